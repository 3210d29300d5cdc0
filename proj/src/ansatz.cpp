// Copyright 2026 The QSE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qse/ansatz.hpp"

#include <string>

#include "qse/error.hpp"

namespace qse {

namespace {

void check_dim(std::span<const double> x, int n, const char* what) {
    if (x.size() != static_cast<std::size_t>(n))
        throw InvalidArgument(std::string(what) + " has " + std::to_string(x.size()) + " entries, expected " +
                              std::to_string(n));
}

/// The full circuit plus, per gate, the Jacobian column its angle feeds (-1
/// for fixed gates).
struct TaggedCircuit {
    Circuit circuit;
    std::vector<int> column;
};

TaggedCircuit build_tagged(const AnsatzSpec& spec, const AnsatzParams& params, std::span<const double> x) {
    const int n = spec.n_qubits;
    const int input_base = static_cast<int>(spec.n_params());
    TaggedCircuit t;
    t.circuit.n_qubits = n;
    t.circuit.gates.reserve(spec.gate_count());
    t.column.reserve(spec.gate_count());
    for (int q = 0; q < n; ++q) {
        t.circuit.gates.push_back(Gate::h(q));
        t.column.push_back(-1);
        t.circuit.gates.push_back(Gate::rz(q, x[static_cast<std::size_t>(q)]));
        t.column.push_back(input_base + q);
    }
    for (int layer = 0; layer < spec.depth; ++layer) {
        for (int c = layer % 2; c + 1 < n; c += 2) {
            t.circuit.gates.push_back(Gate::cnot(c, c + 1));
            t.column.push_back(-1);
        }
        const bool ry = spec.rotation_of(layer) == Rotation::Y;
        for (int q = 0; q < n; ++q) {
            const double a = params.at(spec, layer, q);
            t.circuit.gates.push_back(ry ? Gate::ry(q, a) : Gate::rz(q, a));
            t.column.push_back(layer * n + q);
        }
    }
    return t;
}

void check_inputs(const AnsatzSpec& spec, const AnsatzParams& params, std::span<const double> x) {
    spec.validate();
    if (params.angles.size() != spec.n_params())
        throw InvalidArgument("ansatz has " + std::to_string(params.angles.size()) + " angles, expected " +
                              std::to_string(spec.n_params()));
    check_dim(x, spec.n_qubits, "input angle vector");
}

}  // namespace

void AnsatzSpec::validate() const {
    if (n_qubits < 1 || n_qubits > 16) throw InvalidArgument("ansatz n_qubits must be in [1, 16]");
    if (depth < 1) throw InvalidArgument("ansatz depth must be >= 1");
}

Rotation AnsatzSpec::rotation_of(int layer) const {
    const bool same = layer % 2 == 0;
    if (first_rotation == Rotation::Y) return same ? Rotation::Y : Rotation::Z;
    return same ? Rotation::Z : Rotation::Y;
}

std::size_t AnsatzSpec::gate_count() const {
    std::size_t total = 2 * static_cast<std::size_t>(n_qubits);
    for (int layer = 0; layer < depth; ++layer) {
        const int first = layer % 2;
        const int pairs = n_qubits > first ? (n_qubits - first) / 2 : 0;
        total += static_cast<std::size_t>(pairs + n_qubits);
    }
    return total;
}

Circuit build_embedding(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument("embedding needs at least one input angle");
    Circuit c;
    c.n_qubits = static_cast<int>(x.size());
    for (int q = 0; q < c.n_qubits; ++q) {
        c.gates.push_back(Gate::h(q));
        c.gates.push_back(Gate::rz(q, x[static_cast<std::size_t>(q)]));
    }
    return c;
}

Circuit build_layer(const AnsatzSpec& spec, int layer_index, std::span<const double> layer_angles) {
    spec.validate();
    if (layer_index < 0 || layer_index >= spec.depth)
        throw InvalidArgument("layer index " + std::to_string(layer_index) + " outside [0, " +
                              std::to_string(spec.depth) + ")");
    check_dim(layer_angles, spec.n_qubits, "layer angle vector");
    Circuit c;
    c.n_qubits = spec.n_qubits;
    for (int q = layer_index % 2; q + 1 < spec.n_qubits; q += 2) c.gates.push_back(Gate::cnot(q, q + 1));
    const bool ry = spec.rotation_of(layer_index) == Rotation::Y;
    for (int q = 0; q < spec.n_qubits; ++q) {
        const double a = layer_angles[static_cast<std::size_t>(q)];
        c.gates.push_back(ry ? Gate::ry(q, a) : Gate::rz(q, a));
    }
    return c;
}

Circuit build_ansatz_circuit(const AnsatzSpec& spec, const AnsatzParams& params, std::span<const double> x) {
    check_inputs(spec, params, x);
    return build_tagged(spec, params, x).circuit;
}

std::vector<double> ansatz_forward(const AnsatzSpec& spec, const AnsatzParams& params, std::span<const double> x) {
    check_inputs(spec, params, x);
    const TaggedCircuit t = build_tagged(spec, params, x);
    Statevector psi(spec.n_qubits);
    for (const Gate& g : t.circuit.gates) psi.apply(g);
    return expectation_z_all(psi);
}

Matrix parameter_shift_grad(const AnsatzSpec& spec, const AnsatzParams& params, std::span<const double> x,
                            ShiftRule rule) {
    check_inputs(spec, params, x);
    const TaggedCircuit t = build_tagged(spec, params, x);
    const auto& gates = t.circuit.gates;
    const std::size_t n_out = static_cast<std::size_t>(spec.n_qubits);
    Matrix jac(n_out, spec.n_params() + n_out);

    // One forward sweep caches the state in front of every parameterised
    // gate; each shifted evaluation then replays only the suffix.
    std::vector<Statevector> before;
    std::vector<std::size_t> gate_of;
    before.reserve(jac.cols);
    gate_of.reserve(jac.cols);
    Statevector psi(spec.n_qubits);
    for (std::size_t g = 0; g < gates.size(); ++g) {
        if (t.column[g] >= 0) {
            before.push_back(psi);
            gate_of.push_back(g);
        }
        psi.apply(gates[g]);
    }

    for (std::size_t k = 0; k < gate_of.size(); ++k) {
        const std::size_t g = gate_of[k];
        const auto col = static_cast<std::size_t>(t.column[g]);
        std::vector<double> plus;
        for (const double sign : {+1.0, -1.0}) {
            Statevector shifted = before[k];
            Gate moved = gates[g];
            moved.angle += sign * rule.shift;
            shifted.apply(moved);
            for (std::size_t h = g + 1; h < gates.size(); ++h) shifted.apply(gates[h]);
            auto ez = expectation_z_all(shifted);
            if (sign > 0) {
                plus = std::move(ez);
            } else {
                for (std::size_t q = 0; q < n_out; ++q) jac(q, col) = 0.5 * (plus[q] - ez[q]);
            }
        }
    }
    return jac;
}

}  // namespace qse

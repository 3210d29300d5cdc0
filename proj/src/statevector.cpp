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

#include "qse/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qse/error.hpp"

namespace qse {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
constexpr int kMaxQubits = 24;

const char* prep_name(PrepState s) {
    switch (s) {
        case PrepState::ZPlus: return "Z+";
        case PrepState::ZMinus: return "Z-";
        case PrepState::XPlus: return "X+";
        case PrepState::XMinus: return "X-";
        case PrepState::YPlus: return "Y+";
        case PrepState::YMinus: return "Y-";
    }
    return "?";
}

/// Amplitudes (c0, c1) of the prepared single-qubit state.
std::pair<Complex, Complex> prep_amplitudes(PrepState s) {
    const Complex i{0.0, 1.0};
    switch (s) {
        case PrepState::ZPlus: return {1.0, 0.0};
        case PrepState::ZMinus: return {0.0, 1.0};
        case PrepState::XPlus: return {kInvSqrt2, kInvSqrt2};
        case PrepState::XMinus: return {kInvSqrt2, -kInvSqrt2};
        case PrepState::YPlus: return {kInvSqrt2, i * kInvSqrt2};
        case PrepState::YMinus: return {kInvSqrt2, -i * kInvSqrt2};
    }
    return {1.0, 0.0};
}

}  // namespace

char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    return '?';
}

std::string to_string(PrepState s) { return prep_name(s); }

std::string to_string(const Gate& g) {
    std::ostringstream os;
    os.precision(17);
    switch (g.kind) {
        case GateKind::H: os << "H(" << g.qubit << ")"; break;
        case GateKind::RY: os << "RY(" << g.qubit << "," << g.angle << ")"; break;
        case GateKind::RZ: os << "RZ(" << g.qubit << "," << g.angle << ")"; break;
        case GateKind::CNOT: os << "CNOT(" << g.qubit << "," << g.target << ")"; break;
        case GateKind::Prepare: os << "Prepare(" << g.qubit << "," << prep_name(g.prep) << ")"; break;
        case GateKind::Measure:
            os << "Measure(" << g.qubit << "," << pauli_char(g.basis) << "," << (g.outcome > 0 ? "+1" : "-1")
               << ")";
            break;
    }
    return os.str();
}

void Circuit::validate() const {
    if (n_qubits < 1) throw InvalidCircuit("circuit needs at least one qubit");
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Gate& g = gates[i];
        auto bad = [&](const std::string& why) {
            throw InvalidCircuit("gate " + std::to_string(i) + " " + to_string(g) + ": " + why);
        };
        if (g.qubit < 0 || g.qubit >= n_qubits) bad("qubit out of range");
        if (g.kind == GateKind::CNOT) {
            if (g.target < 0 || g.target >= n_qubits) bad("target out of range");
            if (g.target == g.qubit) bad("control equals target");
        }
        if (g.kind == GateKind::Measure && (g.basis == Pauli::I || (g.outcome != 1 && g.outcome != -1)))
            bad("measurement needs an X/Y/Z basis and outcome +-1");
    }
}

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw InvalidArgument("statevector width must be in [1, " + std::to_string(kMaxQubits) + "]");
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
}

Statevector Statevector::basis(int n_qubits, std::uint64_t index) {
    Statevector s(n_qubits);
    if (index >= s.dimension()) throw InvalidArgument("basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

Statevector Statevector::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) throw InvalidArgument("amplitude count must be a power of two >= 2");
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    Statevector s(n);
    s.amps_ = std::move(amplitudes);
    return s;
}

double Statevector::norm_squared() const {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return acc;
}

void Statevector::check_qubit(int q) const {
    if (q < 0 || q >= n_qubits_)
        throw InvalidCircuit("qubit " + std::to_string(q) + " out of range for " + std::to_string(n_qubits_) +
                             "-qubit state");
}

void Statevector::apply_h(int q) {
    check_qubit(q);
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t base = 0; base < amps_.size(); base += 2 * bit) {
        for (std::size_t i = base; i < base + bit; ++i) {
            const Complex a = amps_[i];
            const Complex b = amps_[i | bit];
            amps_[i] = (a + b) * kInvSqrt2;
            amps_[i | bit] = (a - b) * kInvSqrt2;
        }
    }
}

void Statevector::apply_ry(int q, double theta) {
    check_qubit(q);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t base = 0; base < amps_.size(); base += 2 * bit) {
        for (std::size_t i = base; i < base + bit; ++i) {
            const Complex a = amps_[i];
            const Complex b = amps_[i | bit];
            amps_[i] = c * a - s * b;
            amps_[i | bit] = s * a + c * b;
        }
    }
}

void Statevector::apply_rz(int q, double theta) {
    check_qubit(q);
    // Phases e^{-+i theta/2} written out in real arithmetic; std::complex
    // multiplication carries NaN recovery that dominates this loop.
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const std::size_t bit = std::size_t{1} << q;
    auto rotate = [&](Complex& a, double sg) {
        const double re = a.real(), im = a.imag();
        a = Complex{re * c - im * sg, re * sg + im * c};
    };
    for (std::size_t base = 0; base < amps_.size(); base += 2 * bit) {
        for (std::size_t i = base; i < base + bit; ++i) {
            rotate(amps_[i], -s);
            rotate(amps_[i | bit], s);
        }
    }
}

void Statevector::apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw InvalidCircuit("CNOT control equals target");
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    // Visit each index with the control set and the target clear exactly once.
    const std::size_t lo = std::min(cbit, tbit), hi = std::max(cbit, tbit);
    for (std::size_t a = 0; a < amps_.size(); a += 2 * hi)
        for (std::size_t b = a; b < a + hi; b += 2 * lo)
            for (std::size_t i = b; i < b + lo; ++i) std::swap(amps_[i | cbit], amps_[i | cbit | tbit]);
}

void Statevector::apply_pauli(int q, Pauli p) {
    const std::size_t bit = std::size_t{1} << q;
    const Complex i1{0.0, 1.0};
    switch (p) {
        case Pauli::I: return;
        case Pauli::X:
            for (std::size_t i = 0; i < amps_.size(); ++i)
                if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
            return;
        case Pauli::Y:
            // Y|0> = i|1>, Y|1> = -i|0>
            for (std::size_t i = 0; i < amps_.size(); ++i) {
                if (i & bit) continue;
                const Complex a = amps_[i];
                const Complex b = amps_[i | bit];
                amps_[i] = -i1 * b;
                amps_[i | bit] = i1 * a;
            }
            return;
        case Pauli::Z:
            for (std::size_t i = 0; i < amps_.size(); ++i)
                if (i & bit) amps_[i] = -amps_[i];
            return;
    }
}

double Statevector::apply_measure(int q, Pauli basis, int outcome) {
    if (basis == Pauli::I || (outcome != 1 && outcome != -1))
        throw InvalidCircuit("measurement needs an X/Y/Z basis and outcome +-1");
    // Projector (I + s P) / 2 applied directly.
    Statevector flipped = *this;
    flipped.apply_pauli(q, basis);
    const double s = outcome;
    double prob = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        amps_[i] = 0.5 * (amps_[i] + s * flipped.amps_[i]);
        prob += std::norm(amps_[i]);
    }
    if (prob <= 1e-300) {
        std::fill(amps_.begin(), amps_.end(), Complex{0.0, 0.0});
        zero_branch_ = true;
        return 0.0;
    }
    const double scale = 1.0 / std::sqrt(prob);
    for (auto& a : amps_) a *= scale;
    return prob;
}

void Statevector::apply_prepare(int q, PrepState s) {
    const std::size_t bit = std::size_t{1} << q;
    double excited = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if (i & bit) excited += std::norm(amps_[i]);
    if (excited > 1e-12) throw InvalidCircuit("Prepare on qubit " + std::to_string(q) + " which is not in |0>");
    const auto [c0, c1] = prep_amplitudes(s);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        const Complex v = amps_[i];
        amps_[i] = c0 * v;
        amps_[i | bit] = c1 * v;
    }
}

double Statevector::apply(const Gate& g) {
    check_qubit(g.qubit);
    if (zero_branch_) {
        if (g.kind == GateKind::CNOT) check_qubit(g.target);
        return g.kind == GateKind::Measure ? 0.0 : 1.0;
    }
    switch (g.kind) {
        case GateKind::H: apply_h(g.qubit); return 1.0;
        case GateKind::RY: apply_ry(g.qubit, g.angle); return 1.0;
        case GateKind::RZ: apply_rz(g.qubit, g.angle); return 1.0;
        case GateKind::CNOT: apply_cnot(g.qubit, g.target); return 1.0;
        case GateKind::Prepare: apply_prepare(g.qubit, g.prep); return 1.0;
        case GateKind::Measure: return apply_measure(g.qubit, g.basis, g.outcome);
    }
    throw InvalidCircuit("unknown gate kind");
}

GateResult apply_gate(Statevector state, const Gate& gate) {
    const double w = state.apply(gate);
    return {std::move(state), w};
}

GateResult run_circuit(const Circuit& circuit, Statevector initial) {
    if (circuit.n_qubits != initial.n_qubits())
        throw InvalidCircuit("circuit width " + std::to_string(circuit.n_qubits) + " does not match state width " +
                             std::to_string(initial.n_qubits()));
    circuit.validate();
    double weight = 1.0;
    for (const Gate& g : circuit.gates) weight *= initial.apply(g);
    return {std::move(initial), weight};
}

double expectation_z(const Statevector& state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits()) throw InvalidArgument("qubit out of range");
    const PauliFactor f{qubit, Pauli::Z};
    return expectation_pauli_product(state, std::span<const PauliFactor>(&f, 1));
}

std::vector<double> expectation_z_all(const Statevector& state) {
    const int n = state.n_qubits();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        for (int q = 0; q < n; ++q) out[static_cast<std::size_t>(q)] += ((i >> q) & 1U) ? -p : p;
    }
    return out;
}

double expectation_pauli_product(const Statevector& state, std::span<const PauliFactor> factors) {
    const int n = state.n_qubits();
    std::uint64_t seen = 0;
    std::uint64_t flip_mask = 0;  // X or Y
    std::uint64_t z_mask = 0;     // Y or Z contribute a sign
    int y_count = 0;
    for (const auto& f : factors) {
        if (f.qubit < 0 || f.qubit >= n) throw InvalidArgument("observable qubit out of range");
        const std::uint64_t bit = std::uint64_t{1} << f.qubit;
        if (seen & bit) throw InvalidArgument("duplicate qubit " + std::to_string(f.qubit) + " in observable");
        seen |= bit;
        if (f.op == Pauli::X || f.op == Pauli::Y) flip_mask |= bit;
        if (f.op == Pauli::Y || f.op == Pauli::Z) z_mask |= bit;
        if (f.op == Pauli::Y) ++y_count;
    }
    // P|i> = phase(i) |i ^ flip>, with phase = i^{#Y} * (-1)^{popcount(i & z_mask)}
    // for the Y = iXZ factorisation.
    const auto amps = state.amplitudes();
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const std::size_t j = i ^ flip_mask;
        const bool neg = std::popcount(static_cast<std::uint64_t>(i) & z_mask) & 1;
        const Complex term = std::conj(amps[j]) * amps[i];
        acc += neg ? -term : term;
    }
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return (kIPow[y_count % 4] * acc).real();
}

}  // namespace qse

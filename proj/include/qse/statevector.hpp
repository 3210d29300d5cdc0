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

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qse {

using Complex = std::complex<double>;

enum class Pauli : std::uint8_t { I, X, Y, Z };

/// Single-qubit eigenstates used to initialise fresh wires.
enum class PrepState : std::uint8_t { ZPlus, ZMinus, XPlus, XMinus, YPlus, YMinus };

enum class GateKind : std::uint8_t { H, RY, RZ, CNOT, Prepare, Measure };

char pauli_char(Pauli p);
std::string to_string(PrepState s);

/// One circuit instruction.
///
/// Conventions: RZ(t) = diag(e^{-it/2}, e^{it/2}); RY(t) = [[c, -s], [s, c]]
/// with c = cos(t/2), s = sin(t/2); H = [[1, 1], [1, -1]] / sqrt(2).
/// `Prepare` initialises a qubit that must currently be |0>. `Measure`
/// projects onto the `outcome` eigenspace of `basis` and renormalises.
struct Gate {
    GateKind kind = GateKind::H;
    int qubit = 0;   // target of single-qubit ops, control of CNOT
    int target = -1; // CNOT only
    double angle = 0.0;
    Pauli basis = Pauli::Z;
    int outcome = +1;
    PrepState prep = PrepState::ZPlus;

    static Gate h(int q) { return {GateKind::H, q}; }
    static Gate ry(int q, double theta) { return {GateKind::RY, q, -1, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, control, target}; }
    static Gate prepare(int q, PrepState s) {
        Gate g{GateKind::Prepare, q};
        g.prep = s;
        return g;
    }
    static Gate measure(int q, Pauli basis, int outcome) {
        Gate g{GateKind::Measure, q};
        g.basis = basis;
        g.outcome = outcome;
        return g;
    }

    bool is_unitary() const { return kind != GateKind::Prepare && kind != GateKind::Measure; }
    bool acts_on(int q) const { return qubit == q || (kind == GateKind::CNOT && target == q); }

    friend bool operator==(const Gate&, const Gate&) = default;
};

std::string to_string(const Gate& g);

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;

    /// Throws InvalidCircuit if any gate index is out of range.
    void validate() const;
};

/// One factor of a tensor-product Pauli observable.
struct PauliFactor {
    int qubit = 0;
    Pauli op = Pauli::Z;

    friend bool operator==(const PauliFactor&, const PauliFactor&) = default;
};

/// Dense little-endian statevector: qubit 0 is the least significant bit of
/// the amplitude index.
class Statevector {
public:
    explicit Statevector(int n_qubits);

    /// Computational basis state |index>.
    static Statevector basis(int n_qubits, std::uint64_t index);
    static Statevector from_amplitudes(std::vector<Complex> amplitudes);

    int n_qubits() const { return n_qubits_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const;

    /// True after a measurement branch of probability zero. Such a state has
    /// all-zero amplitudes and every expectation on it is 0.
    bool is_zero_branch() const { return zero_branch_; }

    /// Applies `g` in place and returns the branch weight: 1 for unitaries,
    /// the outcome probability for Measure.
    double apply(const Gate& g);

    void apply_h(int q);
    void apply_ry(int q, double theta);
    void apply_rz(int q, double theta);
    void apply_cnot(int control, int target);

private:
    void check_qubit(int q) const;
    void apply_pauli(int q, Pauli p);
    double apply_measure(int q, Pauli basis, int outcome);
    void apply_prepare(int q, PrepState s);

    int n_qubits_;
    std::vector<Complex> amps_;
    bool zero_branch_ = false;
};

struct GateResult {
    Statevector state;
    double branch_weight;
};

GateResult apply_gate(Statevector state, const Gate& gate);

/// Runs every gate in order; the total weight is the product of branch weights.
GateResult run_circuit(const Circuit& circuit, Statevector initial);

double expectation_z(const Statevector& state, int qubit);

/// <Z_q> for every qubit in one pass.
std::vector<double> expectation_z_all(const Statevector& state);

/// Expectation of a tensor product of Paulis on distinct qubits. Identity
/// factors are allowed and ignored.
double expectation_pauli_product(const Statevector& state, std::span<const PauliFactor> factors);

}  // namespace qse

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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles/dense_oracle.hpp"
#include "qse/error.hpp"
#include "qse/rng.hpp"

namespace qse {
namespace {

constexpr double kR = std::numbers::sqrt2 / 2.0;

void expect_amps(const Statevector& s, std::initializer_list<Complex> want, double tol = 1e-12) {
    ASSERT_EQ(s.dimension(), want.size());
    std::size_t i = 0;
    for (const Complex& w : want) {
        EXPECT_NEAR(s[i].real(), w.real(), tol) << "amplitude " << i;
        EXPECT_NEAR(s[i].imag(), w.imag(), tol) << "amplitude " << i;
        ++i;
    }
}

Gate random_unitary_gate(Rng& rng, int n) {
    const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    switch (rng.below(n > 1 ? 4 : 3)) {
        case 0: return Gate::h(q);
        case 1: return Gate::ry(q, rng.uniform(-4.0, 4.0));
        case 2: return Gate::rz(q, rng.uniform(-4.0, 4.0));
        default: {
            int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
            if (t >= q) ++t;
            return Gate::cnot(q, t);
        }
    }
}

TEST(ApplyGate, HadamardOnZero) {
    auto [s, w] = apply_gate(Statevector(1), Gate::h(0));
    expect_amps(s, {kR, kR});
    EXPECT_EQ(w, 1.0);
}

TEST(ApplyGate, CnotTruthTable) {
    // |q0 q1> = |10> is index 1 in the little-endian layout.
    auto [s, w] = apply_gate(Statevector::basis(2, 0b01), Gate::cnot(0, 1));
    expect_amps(s, {0, 0, 0, 1});
    EXPECT_EQ(w, 1.0);
}

TEST(ApplyGate, MeasureCollapseBornRule) {
    Statevector plus = apply_gate(Statevector(1), Gate::h(0)).state;
    auto [s, w] = apply_gate(plus, Gate::measure(0, Pauli::Z, +1));
    expect_amps(s, {1, 0});
    EXPECT_NEAR(w, 0.5, 1e-15);
}

TEST(ApplyGate, ZeroProbabilityBranchIsFlagged) {
    auto [s, w] = apply_gate(Statevector(1), Gate::measure(0, Pauli::Z, -1));
    EXPECT_EQ(w, 0.0);
    EXPECT_TRUE(s.is_zero_branch());
    EXPECT_EQ(s.norm_squared(), 0.0);
    EXPECT_EQ(expectation_z(s, 0), 0.0);
}

TEST(ApplyGate, OutOfRangeIsInvalidCircuit) {
    Statevector s(2);
    EXPECT_THROW(s.apply(Gate::h(2)), InvalidCircuit);
    EXPECT_THROW(s.apply(Gate::cnot(0, 0)), InvalidCircuit);
    EXPECT_THROW(s.apply(Gate::cnot(0, 5)), InvalidCircuit);
    EXPECT_THROW(run_circuit({2, {Gate::rz(-1, 0.1)}}, Statevector(2)), InvalidCircuit);
}

TEST(ApplyGate, PrepareProducesEigenstates) {
    struct Case {
        PrepState s;
        Pauli p;
        double expect;
    };
    for (const auto& c : {Case{PrepState::XPlus, Pauli::X, 1}, Case{PrepState::XMinus, Pauli::X, -1},
                          Case{PrepState::YPlus, Pauli::Y, 1}, Case{PrepState::YMinus, Pauli::Y, -1},
                          Case{PrepState::ZPlus, Pauli::Z, 1}, Case{PrepState::ZMinus, Pauli::Z, -1}}) {
        Statevector s(2);
        s.apply(Gate::prepare(1, c.s));
        const PauliFactor f{1, c.p};
        EXPECT_NEAR(expectation_pauli_product(s, {&f, 1}), c.expect, 1e-12) << to_string(c.s);
    }
    Statevector busy = apply_gate(Statevector(1), Gate::h(0)).state;
    EXPECT_THROW(busy.apply(Gate::prepare(0, PrepState::ZPlus)), InvalidCircuit);
}

TEST(RunCircuit, EmptyCircuitIsIdentity) {
    auto [s, w] = run_circuit({2, {}}, Statevector::basis(2, 0b10));
    expect_amps(s, {0, 0, 1, 0});
    EXPECT_EQ(w, 1.0);
}

TEST(RunCircuit, BellPreparation) {
    auto [s, w] = run_circuit({2, {Gate::h(0), Gate::cnot(0, 1)}}, Statevector(2));
    expect_amps(s, {kR, 0, 0, kR});
    EXPECT_EQ(w, 1.0);
}

TEST(RunCircuit, MidCircuitMeasurementMatchesDenseOracle) {
    const Circuit c{2, {Gate::h(0), Gate::measure(0, Pauli::Z, -1), Gate::h(0)}};
    auto [s, w] = run_circuit(c, Statevector(2));
    // Hand result: qubit 0 ends in |->, i.e. amplitudes (r, -r, 0, 0).
    expect_amps(s, {kR, -kR, 0, 0});
    EXPECT_NEAR(w, 0.5, 1e-15);

    auto [ref, ref_w] = oracle::dense_run(c, oracle::zero_state(2));
    EXPECT_NEAR(ref_w, w, 1e-15);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(ref[i] - s[i]), 0.0, 1e-15);
}

TEST(RunCircuit, WidthMismatchRejected) {
    EXPECT_THROW(run_circuit({3, {}}, Statevector(2)), InvalidCircuit);
}

TEST(Expectation, ZEigenAndSuperposition) {
    EXPECT_EQ(expectation_z(Statevector(1), 0), 1.0);
    const Statevector plus = apply_gate(Statevector(1), Gate::h(0)).state;
    EXPECT_NEAR(expectation_z(plus, 0), 0.0, 1e-15);
    for (double theta : {0.3, 1.1, 2.7}) {
        const Statevector s = apply_gate(Statevector(1), Gate::ry(0, theta)).state;
        EXPECT_NEAR(expectation_z(s, 0), std::cos(theta), 1e-14);
    }
    EXPECT_THROW(expectation_z(plus, 1), InvalidArgument);
}

TEST(Expectation, BellCorrelations) {
    const Statevector bell = run_circuit({2, {Gate::h(0), Gate::cnot(0, 1)}}, Statevector(2)).state;
    const std::vector<PauliFactor> zz{{0, Pauli::Z}, {1, Pauli::Z}};
    const std::vector<PauliFactor> xx{{0, Pauli::X}, {1, Pauli::X}};
    const std::vector<PauliFactor> yy{{0, Pauli::Y}, {1, Pauli::Y}};
    EXPECT_NEAR(expectation_pauli_product(bell, zz), 1.0, 1e-12);
    EXPECT_NEAR(expectation_pauli_product(bell, xx), 1.0, 1e-12);
    EXPECT_NEAR(expectation_pauli_product(bell, yy), -1.0, 1e-12);

    const Statevector sep = apply_gate(Statevector(2), Gate::h(0)).state;
    const std::vector<PauliFactor> z0{{0, Pauli::Z}};
    EXPECT_NEAR(expectation_pauli_product(sep, z0), 0.0, 1e-12);

    const std::vector<PauliFactor> dup{{0, Pauli::Z}, {0, Pauli::X}};
    EXPECT_THROW(expectation_pauli_product(bell, dup), InvalidArgument);
}

TEST(Expectation, PauliProductMatchesDenseOracle) {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        Circuit c{n, {}};
        for (int g = 0; g < 25; ++g) c.gates.push_back(random_unitary_gate(rng, n));
        const Statevector s = run_circuit(c, Statevector(n)).state;
        const auto ref = oracle::dense_run(c, oracle::zero_state(n)).first;
        std::vector<PauliFactor> obs;
        for (int q = 0; q < n; ++q) obs.push_back({q, static_cast<Pauli>(rng.below(4))});
        EXPECT_NEAR(expectation_pauli_product(s, obs), oracle::dense_expectation(ref, obs, n), 1e-12);
    }
}

// Properties.

TEST(StatevectorProperty, NormPreservedOverLongRandomCircuits) {
    Rng rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(10));
        Statevector s(n);
        for (int g = 0; g < 1000; ++g) s.apply(random_unitary_gate(rng, n));
        EXPECT_LT(std::abs(s.norm_squared() - 1.0), 1e-10) << "n=" << n;
    }
}

TEST(StatevectorProperty, GateThenInverseRestoresState) {
    Rng rng(7);
    const int n = 4;
    Statevector s(n);
    for (int g = 0; g < 60; ++g) s.apply(random_unitary_gate(rng, n));
    for (int trial = 0; trial < 200; ++trial) {
        const Gate g = random_unitary_gate(rng, n);
        Gate inv = g;
        if (g.kind == GateKind::RY || g.kind == GateKind::RZ) inv.angle = -g.angle;
        Statevector t = s;
        t.apply(g);
        t.apply(inv);
        for (std::size_t i = 0; i < s.dimension(); ++i) ASSERT_LT(std::abs(t[i] - s[i]), 1e-12) << to_string(g);
    }
}

TEST(StatevectorProperty, MeasurementBranchesSumToOne) {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        Statevector s(n);
        for (int g = 0; g < 20; ++g) s.apply(random_unitary_gate(rng, n));
        const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const auto basis = static_cast<Pauli>(1 + rng.below(3));
        const double wp = apply_gate(s, Gate::measure(q, basis, +1)).branch_weight;
        const double wm = apply_gate(s, Gate::measure(q, basis, -1)).branch_weight;
        EXPECT_NEAR(wp + wm, 1.0, 1e-12);
        EXPECT_GE(wp, 0.0);
        EXPECT_LE(wp, 1.0 + 1e-12);
    }
}

TEST(StatevectorProperty, ExpectationZAgreesWithProductForm) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(5));
        Statevector s(n);
        for (int g = 0; g < 30; ++g) s.apply(random_unitary_gate(rng, n));
        for (int q = 0; q < n; ++q) {
            const PauliFactor f{q, Pauli::Z};
            EXPECT_EQ(expectation_z(s, q), expectation_pauli_product(s, {&f, 1}));
            const double e = expectation_z(s, q);
            EXPECT_LE(std::abs(e), 1.0 + 1e-12);
        }
    }
}

}  // namespace
}  // namespace qse

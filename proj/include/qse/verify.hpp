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

// Seeded verification suites shared by the command line tool and the
// acceptance runner: analytic gradients against central differences, and
// cut reconstruction against the uncut simulation.

#include <cstdint>
#include <string>
#include <vector>

#include "qse/ansatz.hpp"
#include "qse/cutting.hpp"
#include "qse/rng.hpp"

namespace qse {

/// `layers` rounds of n random gates drawn from H, RY, RZ and CNOT.
Circuit random_circuit(Rng& rng, int n_qubits, int layers);

/// Non-empty random Pauli product over the circuit's qubits.
std::vector<PauliFactor> random_observable(Rng& rng, int n_qubits);

struct GradcheckOptions {
    std::uint64_t seed = 0;
    int hybrid_instances = 50;
    int ansatz_instances = 20;
    int closed_form_points = 16;
    std::vector<int> n_qubits{2, 4, 6};
    std::vector<int> depths{1, 2, 4};
    std::size_t feature_dim = 8;
    std::size_t n_classes = 3;
    double fd_step = 1e-5;
    double abs_tolerance = 1e-7;
    double rel_tolerance = 1e-5;
    double closed_form_tolerance = 1e-12;
    ShiftRule rule;  // a negative shift is the wrong-sign test hook
};

struct GradcheckCase {
    std::string check;  // closed_form | ansatz | hybrid
    int index = 0;
    int n_qubits = 0;
    int depth = 0;
    bool use_skip = false;
    std::size_t n_compared = 0;
    double max_abs = 0.0;
    double max_rel = 0.0;
    bool pass = true;
};

struct GradcheckReport {
    std::vector<GradcheckCase> cases;
    double max_abs = 0.0;
    bool pass = true;
};

/// A component passes when its absolute deviation is within abs_tolerance or
/// its relative deviation within rel_tolerance; the closed-form check uses
/// closed_form_tolerance on the absolute deviation only.
GradcheckReport run_gradcheck(const GradcheckOptions& options);

struct CutVerifyOptions {
    std::uint64_t seed = 0;
    int wire_circuits = 100;
    int wire_gate_circuits = 50;
    int max_qubits = 6;
    int max_depth = 4;
    double tolerance = 1e-9;
    int parallelism = 1;
};

struct CutVerifyCase {
    std::string suite;  // wire | wire+gate | bell | empty
    int index = 0;
    int n_qubits = 0;
    std::size_t gates = 0;
    int wire_cuts = 0;
    int gate_cuts = 0;
    std::size_t combinations = 0;
    double expected_combinations = 0.0;
    double reconstructed = 0.0;
    double uncut = 0.0;
    double deviation = 0.0;
    bool pass = true;
};

struct CutVerifyReport {
    std::vector<CutVerifyCase> cases;
    double max_deviation = 0.0;
    bool pass = true;
};

/// Random circuits with one wire cut, random circuits with one wire and one
/// gate cut, the Bell pair with its CNOT cut (<ZZ> = +1), and an uncut
/// circuit through the empty plan, which must match exactly.
CutVerifyReport run_cut_verify(const CutVerifyOptions& options);

}  // namespace qse

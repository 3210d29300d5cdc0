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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qse/statevector.hpp"

namespace qse {

/// Cut the wire of `qubit` immediately after gate `after_gate`; -1 cuts it
/// before the first gate.
struct WireCut {
    int after_gate = -1;
    int qubit = 0;

    friend bool operator==(const WireCut&, const WireCut&) = default;
};

struct CutPlan {
    std::vector<WireCut> wire_cuts;
    std::vector<int> gate_cuts;  // indices of CNOT gates

    std::size_t n_cuts() const { return wire_cuts.size() + gate_cuts.size(); }
    bool empty() const { return n_cuts() == 0; }

    /// Throws InvalidPlan on out-of-range or duplicate locations, on gate cuts
    /// that do not reference a CNOT, and on circuits with non-unitary gates.
    void validate(const Circuit& circuit) const;
};

inline constexpr std::size_t kWireCutTerms = 8;
inline constexpr std::size_t kGateCutTerms = 6;

/// Upstream measures `measured` (I for the identity pair) and the downstream
/// wire starts in `prepared`.
struct WireCutVariant {
    Pauli measured = Pauli::I;
    PrepState prepared = PrepState::ZPlus;
};

/// Local operations replacing one CNOT, written against qubit 0. A Measure
/// gate marks a signed Z measurement: both outcomes are executed and the
/// branch with outcome -1 enters with a negative sign.
struct GateCutVariant {
    std::vector<Gate> control_ops;
    std::vector<Gate> target_ops;
};

using CutSubstitution = std::variant<WireCutVariant, GateCutVariant>;

struct CutTerm {
    double coefficient = 0.0;
    CutSubstitution substitution;
};

/// Identity-channel decomposition: rho = 1/2 sum_P Tr(P rho) P over
/// P in {I, X, Y, Z}, each Pauli split into its two eigenstate preparations.
/// Eight terms with coefficients +-1/2.
std::vector<CutTerm> expand_wire_cut(const WireCut& location);
std::vector<CutTerm> expand_wire_cut(const Circuit& circuit, const WireCut& location);

/// CNOT = (I x H) CZ (I x H) with the CZ channel written as six local terms
/// (Sum |c| = 3): rotations, a ZZ flip, and signed Z measurements paired with
/// +-pi/2 Z rotations on the partner qubit.
std::vector<CutTerm> expand_gate_cut(const Circuit& circuit, int cnot_index);

/// Wire segments grouped into independently executable fragments.
struct FragmentMap {
    struct Segment {
        int qubit = 0;
        int index = 0;  // 0 = first segment of the qubit
    };
    std::vector<std::vector<Segment>> fragments;  // segment order = local qubit order

    std::size_t size() const { return fragments.size(); }
    int width(std::size_t f) const { return static_cast<int>(fragments[f].size()); }
    int max_width() const;
};

/// An empty plan yields the original circuit as a single fragment.
FragmentMap analyze_fragments(const Circuit& circuit, const CutPlan& plan);

/// One concrete circuit for one fragment, one term combination and one
/// assignment of outcomes to its signed measurements.
struct SubcircuitInstance {
    std::size_t combination = 0;
    std::size_t fragment = 0;
    std::size_t branch = 0;
    Circuit circuit;
    double weight = 1.0;  // branch sign; term coefficients apply per combination
    std::vector<PauliFactor> observable;
};

struct CutCombination {
    double coefficient = 1.0;
    std::vector<std::size_t> term_index;  // one per cut: wire cuts first, then gate cuts
};

struct CutExpansion {
    CutPlan plan;
    FragmentMap fragments;
    std::vector<CutCombination> combinations;
    std::vector<SubcircuitInstance> instances;  // ordered by (combination, fragment, branch)
};

/// 8^(wire cuts) * 6^(gate cuts).
double combination_count(const CutPlan& plan);

/// Cartesian product of every cut's terms; combination index is mixed radix
/// with the first cut most significant.
CutExpansion enumerate_subcircuits(const Circuit& circuit, const CutPlan& plan,
                                   std::span<const PauliFactor> observable);

struct ExecutionResult {
    double expectation = 0.0;
    double branch_weight = 1.0;  // probability of the recorded measurement outcomes
};

/// Sum_c coef_c * Prod_f Sum_b sign_b * weight_b * expectation_b, reduced in
/// combination order. `results` is aligned with `expansion.instances`.
double reconstruct(const CutExpansion& expansion, std::span<const std::optional<ExecutionResult>> results);

using SubcircuitExecutor = std::function<ExecutionResult(const SubcircuitInstance&)>;

/// Runs the instance from |0...0> on the dense simulator.
ExecutionResult statevector_executor(const SubcircuitInstance& instance);

struct CutExecution {
    double value = 0.0;
    std::size_t combinations = 0;
    std::size_t instances = 0;
    int max_fragment_width = 0;
};

/// enumerate -> execute every instance (up to `parallelism` at once) ->
/// reconstruct. Executor exceptions surface as ExecutorFailure naming the
/// first failing combination in stable order.
CutExecution execute_cut(const Circuit& circuit, const CutPlan& plan, std::span<const PauliFactor> observable,
                         const SubcircuitExecutor& executor = statevector_executor, int parallelism = 1);

}  // namespace qse

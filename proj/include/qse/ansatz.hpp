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

#include <numbers>
#include <span>
#include <vector>

#include "qse/matrix.hpp"
#include "qse/statevector.hpp"

namespace qse {

enum class Rotation : std::uint8_t { Y, Z };

/// Shape of the variational circuit: an H + RZ(x) angle embedding followed by
/// `depth` brick-wall layers of CNOTs and alternating RY/RZ rotations.
struct AnsatzSpec {
    int n_qubits = 4;
    int depth = 8;
    Rotation first_rotation = Rotation::Y;

    void validate() const;
    std::size_t n_params() const { return static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(depth); }
    Rotation rotation_of(int layer) const;
    std::size_t gate_count() const;
};

/// Trainable rotation angles indexed (layer, qubit).
struct AnsatzParams {
    std::vector<double> angles;

    static AnsatzParams zeros(const AnsatzSpec& spec) { return {std::vector<double>(spec.n_params(), 0.0)}; }
    double at(const AnsatzSpec& spec, int layer, int qubit) const {
        return angles[static_cast<std::size_t>(layer * spec.n_qubits + qubit)];
    }
};

Circuit build_embedding(std::span<const double> x);

/// Even layers pair (0,1),(2,3),...; odd layers pair (1,2),(3,4),...; no
/// wrap-around. The layer's rotations follow the CNOTs.
Circuit build_layer(const AnsatzSpec& spec, int layer_index, std::span<const double> layer_angles);

/// Embedding plus every variational layer.
Circuit build_ansatz_circuit(const AnsatzSpec& spec, const AnsatzParams& params, std::span<const double> x);

/// <Z_q> for each qubit after the full circuit.
std::vector<double> ansatz_forward(const AnsatzSpec& spec, const AnsatzParams& params, std::span<const double> x);

struct ShiftRule {
    double shift = std::numbers::pi / 2.0;
};

/// Jacobian of the measurement vector: rows are outputs <Z_q>, columns are
/// the depth*n circuit angles in (layer, qubit) order followed by the n input
/// angles. Each column is [f(a + s) - f(a - s)] / 2 with s = rule.shift.
Matrix parameter_shift_grad(const AnsatzSpec& spec, const AnsatzParams& params, std::span<const double> x,
                            ShiftRule rule = {});

}  // namespace qse

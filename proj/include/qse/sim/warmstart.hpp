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

#include <string>
#include <vector>

#include "qse/sim/model.hpp"

namespace qse::sim {

struct StepPlacement {
    StepKind kind = StepKind::C2Q;
    Resource resource = Resource::CPU;
    Domain domain = Domain::Edge;
    double service_ms = 0.0;
    double intensity_after = 0.0;
    bool inserted = false;  // repeated Q2Q step added to close the quality gap
};

struct WarmStartPlan {
    std::vector<StepPlacement> steps;
    double intensity = 0.0;
    double energy_left = 0.0;
    bool target_met = false;
    bool early_stop = false;       // target reached before the pipeline ran out
    bool direct_to_cloud = false;  // no step ran at fog
    bool feasible = true;
    std::string reason;            // set when infeasible
};

/// Places each step on the most client-proximal domain that permits it:
/// the edge needs the client to own the resource and have the energy, fog
/// and cloud need a node with the resource. Placement never moves back
/// toward the client. Once the representation is quantum-ready and the
/// intensity meets the target the remaining steps are dropped; if the chain
/// ends short of the target, repeatable steps are inserted at fog.
/// Throws InvalidPipeline when the chain is incompatible.
WarmStartPlan apply_warmstart_chain(const ClientSpec& client, const Pipeline& pipeline, const SloSpec& slo,
                                    const std::vector<NodeSpec>& nodes);

}  // namespace qse::sim

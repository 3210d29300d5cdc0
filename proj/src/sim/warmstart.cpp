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

#include "qse/sim/warmstart.hpp"

#include <algorithm>

namespace qse::sim {

namespace {

bool hosts(const std::vector<NodeSpec>& nodes, Domain d, Resource r) {
    return std::any_of(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.domain == d && n.resource == r; });
}

bool permitted(const WarmStartStep& step, Domain d, const ClientSpec& client, double energy,
               const std::vector<NodeSpec>& nodes) {
    if (std::find(step.domains.begin(), step.domains.end(), d) == step.domains.end()) return false;
    if (d == Domain::Edge) {
        const bool owns = std::find(client.resources.begin(), client.resources.end(), step.resource) !=
                          client.resources.end();
        return owns && energy > 0.0 && energy >= step.energy_cost;
    }
    return hosts(nodes, d, step.resource);
}

}  // namespace

WarmStartPlan apply_warmstart_chain(const ClientSpec& client, const Pipeline& pipeline, const SloSpec& slo,
                                    const std::vector<NodeSpec>& nodes) {
    pipeline.validate();
    WarmStartPlan plan;
    double energy = client.energy_budget;
    Domain level = Domain::Edge;
    Format format = Format::Classical;

    auto place = [&](const WarmStartStep& step, bool inserted, Domain from) -> bool {
        for (Domain d : {Domain::Edge, Domain::Fog, Domain::Cloud}) {
            if (d < from || !permitted(step, d, client, energy, nodes)) continue;
            if (d == Domain::Edge) energy -= step.energy_cost;
            level = d;
            plan.intensity = std::min(1.0, plan.intensity + step.intensity_gain);
            format = output_format(step.kind);
            plan.steps.push_back({step.kind, step.resource, d, step.service_ms, plan.intensity, inserted});
            return true;
        }
        plan.feasible = false;
        plan.reason = "no domain permits step " + to_string(step.kind) + " on " + to_string(step.resource);
        return false;
    };

    auto satisfied = [&] { return format == Format::Quantum && plan.intensity >= slo.quality_target; };

    for (std::size_t i = 0; i < pipeline.steps.size(); ++i) {
        if (satisfied()) {
            plan.early_stop = true;
            break;
        }
        if (!place(pipeline.steps[i], false, level)) break;
    }

    if (plan.feasible && !satisfied() && format == Format::Quantum) {
        auto it = std::find_if(pipeline.steps.begin(), pipeline.steps.end(),
                               [](const WarmStartStep& s) { return s.repeatable; });
        for (int k = 0; it != pipeline.steps.end() && k < pipeline.max_inserted_steps && !satisfied(); ++k) {
            if (level > Domain::Fog || !permitted(*it, Domain::Fog, client, energy, nodes)) break;
            place(*it, true, Domain::Fog);
        }
    }

    plan.energy_left = energy;
    plan.target_met = plan.intensity >= slo.quality_target;
    plan.direct_to_cloud = std::none_of(plan.steps.begin(), plan.steps.end(),
                                        [](const StepPlacement& p) { return p.domain == Domain::Fog; });
    return plan;
}

}  // namespace qse::sim

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

#include "qse/sim/router.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qse/ansatz.hpp"
#include "qse/cutting.hpp"

namespace qse::sim {

std::string to_string(RouteKind k) {
    switch (k) {
        case RouteKind::Node: return "node";
        case RouteKind::ForwardToCloud: return "forward_to_cloud";
        case RouteKind::SkipQnn: return "skip_qnn";
        case RouteKind::Reject: return "reject";
    }
    return "?";
}

QuantumExecution plan_quantum_execution(const UnitSpec& unit, const NodeSpec& node) {
    if (unit.kind != UnitKind::QuantumWidthwise) throw InvalidArgument("unit " + unit.id + " is not quantum");
    if (!is_quantum(node.resource)) throw InvalidArgument("node " + node.id + " is not a quantum node");
    QuantumExecution out;
    if (unit.width <= node.max_qubits) {
        out.fragment_width = unit.width;
        return out;
    }
    if (node.max_qubits < 2)
        throw InfeasibleUnit("unit " + unit.id + " of width " + std::to_string(unit.width) + " cannot be cut to " +
                             std::to_string(node.max_qubits) + " qubit(s)");

    const AnsatzSpec spec{unit.width, unit.depth, Rotation::Y};
    const Circuit c = build_ansatz_circuit(spec, AnsatzParams::zeros(spec), std::vector<double>(unit.width, 0.0));
    const int block = node.max_qubits;
    CutPlan plan;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        if (g.kind == GateKind::CNOT && g.qubit / block != g.target / block) plan.gate_cuts.push_back(static_cast<int>(i));
    }
    const FragmentMap frags = analyze_fragments(c, plan);
    if (frags.max_width() > node.max_qubits)
        throw SimulationIntegrity("cut plan for unit " + unit.id + " leaves a fragment wider than the node");
    out.mode = QuantumExecution::Mode::Cut;
    out.fragment_width = frags.max_width();
    out.gate_cuts = static_cast<int>(plan.gate_cuts.size());
    out.combinations = combination_count(plan);
    out.service_factor = out.combinations / std::min(static_cast<double>(node.parallelism), out.combinations);
    return out;
}

ClusterState ClusterState::initial(const SimConfig& config) {
    ClusterState s;
    s.config = &config;
    for (const auto& n : config.nodes) s.nodes.push_back({&n, std::vector<double>(static_cast<std::size_t>(n.slots), 0.0), false});
    std::sort(s.nodes.begin(), s.nodes.end(), [](const NodeState& a, const NodeState& b) { return a.spec->id < b.spec->id; });
    return s;
}

NodeState* ClusterState::find(const std::string& id) {
    for (auto& n : nodes)
        if (n.spec->id == id) return &n;
    return nullptr;
}

const NodeState* ClusterState::find(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.spec->id == id) return &n;
    return nullptr;
}

double ClusterState::transfer_ms(const Location& from, const NodeSpec& to, double payload) const {
    if (!from.node.empty() && from.node == to.id) return 0.0;
    const auto link = config->link(from.domain, to.domain);
    if (!link) {
        if (from.domain == to.domain) return 0.0;
        throw SimulationIntegrity("no link between " + to_string(from.domain) + " and " + to_string(to.domain));
    }
    return link->latency_ms + link->ms_per_unit * payload;
}

namespace {

struct Options {
    bool enforce_budget = true;
    bool cloud_only = false;
};

std::optional<RouteDecision> best_placement(const RouteRequest& req, const std::vector<Candidate>& cands,
                                            const ClusterState& state, double now, Options opt) {
    std::optional<RouteDecision> best;
    const double deadline = req.arrival_ms + req.slo.latency_budget_ms;
    for (const NodeState& ns : state.nodes) {  // sorted by id: ties keep the lowest id
        if (ns.down) continue;
        const NodeSpec& node = *ns.spec;
        if (ns.slot_free_ms.empty()) throw SimulationIntegrity("node " + node.id + " has no slots");
        for (const Candidate& cand : cands) {
            const UnitSpec& unit = *cand.unit;
            if (!unit.accepts(node.resource)) continue;
            if (opt.cloud_only ? node.domain != Domain::Cloud : !unit.allows(node.domain)) continue;
            std::optional<QuantumExecution> qx;
            if (unit.kind == UnitKind::QuantumWidthwise) {
                try {
                    qx = plan_quantum_execution(unit, node);
                } catch (const InfeasibleUnit&) {
                    continue;
                }
            }
            const double base = cand.service_ms ? *cand.service_ms : node.service_for(unit.id) * req.payload;
            const double service = base * (qx ? qx->service_factor : 1.0);
            const double transfer = state.transfer_ms(req.at, node, req.payload);
            const auto slot_it = std::min_element(ns.slot_free_ms.begin(), ns.slot_free_ms.end());
            const double start = std::max(now + transfer, *slot_it);
            const double completion = start + service;
            if (!std::isfinite(completion)) throw SimulationIntegrity("non-finite completion time on node " + node.id);
            if (opt.enforce_budget && completion > deadline) continue;
            if (!best || completion < best->completion_ms) {
                RouteDecision d;
                d.kind = RouteKind::Node;
                d.unit = unit.id;
                d.node = node.id;
                d.slot = static_cast<std::size_t>(slot_it - ns.slot_free_ms.begin());
                d.transfer_ms = transfer;
                d.start_ms = start;
                d.completion_ms = completion;
                d.service_ms = service;
                d.quantum = qx;
                best = d;
            }
        }
    }
    return best;
}

/// Drops quantum alternatives in favour of classical siblings at the same
/// branch; without a sibling the quantum unit is bypassed and its successors
/// take its place, transitively.
std::vector<Candidate> skip_quantum(const std::vector<Candidate>& alts, const ClusterState& state) {
    std::vector<Candidate> out;
    for (const auto& a : alts)
        if (a.unit->kind != UnitKind::QuantumWidthwise) out.push_back(a);
    if (!out.empty()) return out;
    std::set<std::string> seen;
    std::vector<Candidate> work(alts.rbegin(), alts.rend());
    while (!work.empty()) {
        const Candidate c = work.back();
        work.pop_back();
        if (!seen.insert(c.unit->id).second) continue;
        if (c.unit->kind != UnitKind::QuantumWidthwise) {
            out.push_back(c);
            continue;
        }
        for (auto it = c.unit->next.rbegin(); it != c.unit->next.rend(); ++it)
            work.push_back({&state.config->graph.unit(*it), std::nullopt});
    }
    return out;
}

RouteDecision classical_route(const RouteRequest& req, const std::vector<Candidate>& cands, const ClusterState& state,
                              double now) {
    if (auto d = best_placement(req, cands, state, now, {})) return *d;
    if (auto d = best_placement(req, cands, state, now, {false, true})) {
        d->kind = RouteKind::ForwardToCloud;
        d->forwarded = true;
        return *d;
    }
    RouteDecision r;
    r.reason = "no node can host the stage";
    return r;
}

}  // namespace

RouteDecision route(const RouteRequest& req, const std::vector<Candidate>& alternatives, const ClusterState& state,
                    double now) {
    if (!state.config) throw SimulationIntegrity("cluster state without a config");
    if (alternatives.empty()) throw SimulationIntegrity("request " + req.id + " has nothing to route");
    for (const auto& a : alternatives)
        if (!a.unit) throw SimulationIntegrity("null unit offered to the router");

    std::vector<Candidate> quantum;
    for (const auto& a : alternatives)
        if (a.unit->kind == UnitKind::QuantumWidthwise) quantum.push_back(a);

    if (quantum.empty() || !req.qnn_required) {
        const auto cands = quantum.empty() ? alternatives : skip_quantum(alternatives, state);
        if (cands.empty()) throw SimulationIntegrity("request " + req.id + " has no classical route");
        return classical_route(req, cands, state, now);
    }

    if (auto d = best_placement(req, quantum, state, now, {})) return *d;
    if (req.slo.quantum_optional) {
        const auto cands = skip_quantum(alternatives, state);
        RouteDecision d = cands.empty() ? RouteDecision{} : classical_route(req, cands, state, now);
        if (d.kind == RouteKind::Reject) {
            d.reason = "QNN skipped but " + (cands.empty() ? std::string("no classical route") : d.reason);
            return d;
        }
        d.reason = "qnn infeasible";
        d.kind = RouteKind::SkipQnn;
        return d;
    }
    if (auto d = best_placement(req, quantum, state, now, {false, true})) {
        d->kind = RouteKind::ForwardToCloud;
        d->forwarded = true;
        return *d;
    }
    RouteDecision r;
    r.reason = "QNN required and no quantum node can host it";
    return r;
}

}  // namespace qse::sim

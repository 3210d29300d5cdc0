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

#include <optional>
#include <string>
#include <vector>

#include "qse/sim/model.hpp"

namespace qse::sim {

struct QuantumExecution {
    enum class Mode { Direct, Cut } mode = Mode::Direct;
    int fragment_width = 0;
    int gate_cuts = 0;
    double combinations = 1.0;    // 6^gate_cuts
    double service_factor = 1.0;  // combinations / min(parallelism, combinations)
};

/// Direct when the unit fits the node. Otherwise the unit's brick-wall
/// circuit is split into contiguous blocks of max_qubits and every CNOT that
/// crosses a block boundary is gate-cut; the fragment widths are checked
/// with the cutting module. Throws InfeasibleUnit when max_qubits < 2 and the
/// unit does not fit, InvalidArgument for a non-quantum unit or node.
QuantumExecution plan_quantum_execution(const UnitSpec& unit, const NodeSpec& node);

struct NodeState {
    const NodeSpec* spec = nullptr;
    std::vector<double> slot_free_ms;  // reservation horizon per slot
    bool down = false;
};

/// Where the request's data currently lives.
struct Location {
    Domain domain = Domain::Edge;
    std::string node;  // empty = the client device
};

struct ClusterState {
    const SimConfig* config = nullptr;
    std::vector<NodeState> nodes;  // sorted by node id

    static ClusterState initial(const SimConfig& config);
    NodeState* find(const std::string& id);
    const NodeState* find(const std::string& id) const;
    double transfer_ms(const Location& from, const NodeSpec& to, double payload) const;
};

struct RouteRequest {
    std::string id;
    double arrival_ms = 0.0;
    double payload = 1.0;
    SloSpec slo;
    Location at;
    bool qnn_required = false;
};

enum class RouteKind { Node, ForwardToCloud, SkipQnn, Reject };
std::string to_string(RouteKind k);

struct RouteDecision {
    RouteKind kind = RouteKind::Reject;
    std::string unit;
    std::string node;
    std::size_t slot = 0;
    double transfer_ms = 0.0;
    double start_ms = 0.0;
    double completion_ms = 0.0;
    double service_ms = 0.0;
    std::optional<QuantumExecution> quantum;
    bool forwarded = false;  // placed on a cloud node past the budget
    std::string reason;
};

/// A unit offered to the router; service_ms overrides the node table.
struct Candidate {
    const UnitSpec* unit = nullptr;
    std::optional<double> service_ms;
};

/// Among feasible (unit, node) pairs, the one with the smallest predicted
/// completion (transfer + queue + service), ties to the lowest node id, then
/// to the earlier alternative. A required but infeasible QNN is skipped when
/// the SLO allows it, forwarded to a cloud node otherwise; a classical stage
/// with no feasible node is forwarded to the cloud; with no cloud node the
/// request is rejected. SkipQnn decisions carry the placement of the stage
/// that replaces the QNN. Throws SimulationIntegrity on inconsistent state.
RouteDecision route(const RouteRequest& request, const std::vector<Candidate>& alternatives, const ClusterState& state,
                    double now);

}  // namespace qse::sim

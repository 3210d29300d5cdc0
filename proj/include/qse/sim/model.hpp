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

// Vocabulary of the continuum simulator: nodes, links, the partition graph,
// warm-start pipelines, clients and the workload.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qse/config.hpp"

namespace qse::sim {

enum class Domain { Edge, Fog, Cloud };
enum class Resource { CPU, TPU, GPU, QPU, MQPU };
enum class Grade { Mobile, Server };
enum class Capacity { VeryLow, Low, Medium, High, Unlimited };
enum class UnitKind { ClassicalDepthwise, QuantumWidthwise };
enum class Format { Classical, Neural, Quantum };
enum class StepKind { C2Q, Q2Q, Q2C, C2N, N2Q };

std::string to_string(Domain d);
std::string to_string(Resource r);
std::string to_string(StepKind k);
std::string to_string(Format f);
bool is_quantum(Resource r);
Format input_format(StepKind k);
Format output_format(StepKind k);

struct NodeSpec {
    std::string id;
    Domain domain = Domain::Fog;
    Resource resource = Resource::CPU;
    Grade grade = Grade::Server;
    Capacity capacity = Capacity::Medium;
    int slots = 1;                             // concurrent services
    double service_ms = 10.0;                  // default per-unit mean, per payload unit
    std::map<std::string, double> service_ms_by_unit;
    int max_qubits = 0;                        // quantum resources only
    int parallelism = 1;                       // fragment executions in flight (cut mode)
    double outage_rate_per_hour = 0.0;
    double outage_duration_ms = 1000.0;
    double energy_budget = 0.0;                // edge only

    double service_for(const std::string& unit) const;
};

/// Symmetric transfer cost between two domains.
struct LinkSpec {
    Domain a = Domain::Edge;
    Domain b = Domain::Fog;
    double latency_ms = 0.0;
    double ms_per_unit = 0.0;
};

struct UnitSpec {
    std::string id;  // partition ids, e.g. "1-2", "3.1", "4"
    UnitKind kind = UnitKind::ClassicalDepthwise;
    std::vector<Domain> domains;
    std::vector<Resource> resources;  // any of
    int width = 0;                    // qubits, quantum units
    int depth = 1;                    // ansatz depth, quantum units
    std::vector<std::string> next;    // alternatives; empty = sink

    bool allows(Domain d) const;
    bool accepts(Resource r) const;
};

struct PartitionGraph {
    std::vector<UnitSpec> units;
    std::string source;
    double classical_quality = 1.0;  // quality reachable without the quantum stage

    const UnitSpec& unit(const std::string& id) const;
    bool has(const std::string& id) const;
    void validate() const;  // SchemaError on cycles, dangling links, unreachable sink
};

struct SloSpec {
    double latency_budget_ms = 1000.0;
    double quality_target = 0.0;
    bool quantum_optional = true;
};

struct WarmStartStep {
    StepKind kind = StepKind::C2Q;
    Resource resource = Resource::CPU;
    std::vector<Domain> domains{Domain::Edge, Domain::Fog, Domain::Cloud};
    double intensity_gain = 0.0;
    double energy_cost = 0.0;  // charged against the client's budget at the edge
    double service_ms = 1.0;
    bool repeatable = false;   // may be re-inserted at fog to reach the target
};

struct Pipeline {
    std::string id;
    std::vector<WarmStartStep> steps;
    Resource final_resource = Resource::QPU;  // the quantum task at the cloud
    double final_service_ms = 10.0;
    int max_inserted_steps = 8;

    void validate() const;  // InvalidPipeline on chain incompatibility
};

struct ClientSpec {
    std::string id;
    double energy_budget = 0.0;
    std::vector<Resource> resources;
    std::string pipeline;  // empty = partition-graph inference
};

struct RequestSpec {
    std::string id;
    std::string client;
    double arrival_ms = 0.0;
    double payload = 1.0;
    SloSpec slo;
};

struct OutageSpec {
    std::string node;
    double at_ms = 0.0;
    double duration_ms = 0.0;
};

struct JitterSpec {
    bool enabled = false;
    double mean_fraction = 0.1;  // exponential extra time, mean = fraction * service
};

struct SimConfig {
    std::uint64_t seed = 0;
    double trace_sampling = 1.0;
    double horizon_ms = 0.0;  // window for randomly drawn outages; 0 = last arrival
    JitterSpec jitter;
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    PartitionGraph graph;
    std::map<std::string, Pipeline> pipelines;
    std::vector<ClientSpec> clients;
    std::vector<RequestSpec> requests;
    std::vector<OutageSpec> outages;

    const NodeSpec* find_node(const std::string& id) const;
    const ClientSpec& client(const std::string& id) const;
    std::optional<LinkSpec> link(Domain a, Domain b) const;
    void validate() const;
};

inline constexpr std::int64_t kSimConfigVersion = 1;

/// Parses and validates a versioned config; generated workloads are expanded
/// with the config seed.
SimConfig parse_sim_config(const Json& doc);
SimConfig load_sim_config(const std::filesystem::path& file);

}  // namespace qse::sim

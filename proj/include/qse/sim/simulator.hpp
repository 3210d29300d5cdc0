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

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "qse/sim/model.hpp"

namespace qse::sim {

/// One trace line. `detail` is a ';'-separated list of key=value pairs.
struct TraceRecord {
    double time_ms = 0.0;
    std::string event;
    std::string node;
    std::string request;
    std::string detail;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct NodeMetrics {
    double busy_ms = 0.0;
    double utilization = 0.0;  // busy / (slots * makespan)
    std::size_t services = 0;
};

struct Metrics {
    std::size_t requests = 0;
    std::size_t classified = 0;
    std::size_t rejected = 0;
    std::size_t failed = 0;
    std::size_t slo_violations = 0;  // classified past the latency budget
    std::size_t qnn_used = 0;
    std::size_t qnn_skipped = 0;
    std::size_t forwarded_to_cloud = 0;
    std::size_t reroutes = 0;
    std::size_t outages = 0;
    double inter_domain_payload = 0.0;
    double latency_mean_ms = 0.0;
    double latency_p50_ms = 0.0;
    double latency_p95_ms = 0.0;
    double latency_p99_ms = 0.0;
    double makespan_ms = 0.0;
    std::map<std::string, NodeMetrics> nodes;
};

struct SimResult {
    std::vector<TraceRecord> trace;  // complete; sampling applies only when writing
    Metrics metrics;
};

struct OutageInterval {
    double start_ms = 0.0;
    double end_ms = 0.0;
};

/// Adds an outage to the config and returns the node's merged unavailability
/// intervals. Throws InvalidArgument for an unknown node.
std::vector<OutageInterval> inject_outage(SimConfig& config, const std::string& node, double at_ms, double duration_ms);

/// Union of overlapping or touching intervals, sorted by start.
std::vector<OutageInterval> merge_intervals(std::vector<OutageInterval> intervals);

/// Runs the event loop to completion. Deterministic for a given config.
SimResult simulate(const SimConfig& config);

/// Aggregates derived from the trace alone.
Metrics compute_metrics(const std::vector<TraceRecord>& trace, const SimConfig& config);

/// Line-delimited JSON, one record per line, fixed key order
/// (t, event, node, request, detail). Sampling keeps every record of every
/// k-th request (k = round(1 / trace_sampling)) and all node-level records.
void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace, double sampling = 1.0);
std::string format_trace(const std::vector<TraceRecord>& trace, double sampling = 1.0);

/// "scope,metric,value" rows; scope is "global" or a node id.
void write_metrics(std::ostream& out, const Metrics& m);

/// Value of `key` in a detail string, or "" when absent.
std::string detail_value(const std::string& detail, const std::string& key);

}  // namespace qse::sim

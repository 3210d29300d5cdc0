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

#include "qse/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <sstream>

#include "qse/dataset.hpp"
#include "qse/rng.hpp"
#include "qse/sim/router.hpp"
#include "qse/sim/warmstart.hpp"

namespace qse::sim {

namespace {

// Completions settle before availability changes, recoveries before
// outages, and both before new arrivals at the same instant.
enum class EvKind { TransferComplete, ServiceStart, ServiceComplete, ClientStepComplete, Recovery, Outage, Arrival };

int priority(EvKind k) {
    switch (k) {
        case EvKind::Recovery: return 1;
        case EvKind::Outage: return 2;
        case EvKind::Arrival: return 3;
        default: return 0;
    }
}

struct Event {
    double t = 0.0;
    int prio = 0;
    std::uint64_t seq = 0;
    EvKind kind = EvKind::Arrival;
    std::size_t req = 0;
    std::string node;
    std::uint64_t gen = 0;
    double until = 0.0;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        if (a.prio != b.prio) return a.prio > b.prio;
        return a.seq > b.seq;
    }
};

struct ReqState {
    const RequestSpec* spec = nullptr;
    const ClientSpec* client = nullptr;
    const Pipeline* pipeline = nullptr;
    WarmStartPlan plan;
    std::size_t next_step = 0;
    std::vector<std::unique_ptr<UnitSpec>> owned;
    std::vector<Candidate> alts;
    bool qnn_required = false;
    Location at;

    bool reserved = false;
    bool started = false;
    std::string node;
    std::string unit;
    double transfer_ms = 0.0;
    double start_ms = 0.0;
    double end_ms = 0.0;
    std::uint64_t gen = 0;

    bool done = false;
    bool qnn_used = false;
    bool qnn_skipped = false;
};

std::string fmt(double v) { return format_double(v); }
std::string flag(bool b) { return b ? "true" : "false"; }

class Engine {
public:
    explicit Engine(const SimConfig& cfg)
        : cfg_(cfg), state_(ClusterState::initial(cfg)), jitter_(cfg.seed ^ 0x6a09e667f3bcc908ULL) {}

    SimResult run() {
        reqs_.resize(cfg_.requests.size());
        std::vector<std::size_t> order(cfg_.requests.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return cfg_.requests[a].arrival_ms < cfg_.requests[b].arrival_ms;
        });
        schedule_outages();
        for (std::size_t i : order) {
            ReqState& r = reqs_[i];
            r.spec = &cfg_.requests[i];
            r.client = &cfg_.client(r.spec->client);
            if (!r.client->pipeline.empty()) r.pipeline = &cfg_.pipelines.at(r.client->pipeline);
            push({r.spec->arrival_ms, 0, 0, EvKind::Arrival, i, "", 0, 0.0});
        }
        while (!queue_.empty()) {
            const Event e = queue_.top();
            queue_.pop();
            handle(e);
        }
        for (const auto& r : reqs_)
            if (!r.done) throw SimulationIntegrity("request " + r.spec->id + " never terminated");
        SimResult out;
        out.metrics = compute_metrics(trace_, cfg_);
        out.trace = std::move(trace_);
        return out;
    }

private:
    void push(Event e) {
        e.prio = priority(e.kind);
        e.seq = seq_++;
        queue_.push(std::move(e));
    }

    void log(double t, const std::string& event, const std::string& node, const std::string& req, std::string detail) {
        trace_.push_back({t, event, node, req, std::move(detail)});
    }

    void schedule_outages() {
        double horizon = cfg_.horizon_ms;
        if (horizon <= 0.0)
            for (const auto& r : cfg_.requests) horizon = std::max(horizon, r.arrival_ms + r.slo.latency_budget_ms);
        Rng rng(cfg_.seed ^ 0xbb67ae8584caa73bULL);
        for (const auto& node : cfg_.nodes) {
            std::vector<OutageInterval> iv;
            for (const auto& o : cfg_.outages)
                if (o.node == node.id && o.duration_ms > 0.0) iv.push_back({o.at_ms, o.at_ms + o.duration_ms});
            if (node.outage_rate_per_hour > 0.0) {
                const double mean_gap = 3.6e6 / node.outage_rate_per_hour;
                for (double t = rng.exponential(mean_gap); t < horizon; t += rng.exponential(mean_gap))
                    iv.push_back({t, t + node.outage_duration_ms});
            }
            for (const auto& m : merge_intervals(std::move(iv))) {
                push({m.start_ms, 0, 0, EvKind::Outage, 0, node.id, 0, m.end_ms});
                push({m.end_ms, 0, 0, EvKind::Recovery, 0, node.id, 0, 0.0});
            }
        }
    }

    void handle(const Event& e) {
        switch (e.kind) {
            case EvKind::Arrival: return on_arrival(e);
            case EvKind::Outage: return on_outage(e);
            case EvKind::Recovery: return on_recovery(e);
            case EvKind::ClientStepComplete: return on_client_step(e);
            default: break;
        }
        ReqState& r = reqs_[e.req];
        if (e.gen != r.gen || r.done) return;  // cancelled by a reroute
        const NodeSpec& node = *state_.find(r.node)->spec;
        switch (e.kind) {
            case EvKind::TransferComplete: {
                std::string d = "from=" + to_string(r.at.domain) + ";to=" + to_string(node.domain) +
                                ";transfer_ms=" + fmt(r.transfer_ms) + ";payload=" + fmt(r.spec->payload);
                if (r.at.domain != node.domain) d += ";inter_domain=1";
                log(e.t, "transfer_complete", r.node, r.spec->id, d);
                break;
            }
            case EvKind::ServiceStart:
                r.started = true;
                log(e.t, "service_start", r.node, r.spec->id, "unit=" + r.unit);
                break;
            case EvKind::ServiceComplete: on_service_complete(e, r, node); break;
            default: break;
        }
    }

    void on_arrival(const Event& e) {
        ReqState& r = reqs_[e.req];
        const RequestSpec& q = *r.spec;
        r.at = {Domain::Edge, ""};
        log(e.t, "arrival", "", q.id,
            "client=" + q.client + ";payload=" + fmt(q.payload) + ";budget_ms=" + fmt(q.slo.latency_budget_ms) +
                ";quality_target=" + fmt(q.slo.quality_target) + ";quantum_optional=" + flag(q.slo.quantum_optional));
        if (r.pipeline) {
            r.plan = apply_warmstart_chain(*r.client, *r.pipeline, q.slo, cfg_.nodes);
            std::string steps;
            for (const auto& s : r.plan.steps)
                steps += (steps.empty() ? "" : ">") + to_string(s.domain) + ":" + to_string(s.kind);
            log(e.t, "warmstart_plan", "", q.id,
                "steps=" + (steps.empty() ? std::string("none") : steps) + ";intensity=" + fmt(r.plan.intensity) +
                    ";target_met=" + flag(r.plan.target_met) + ";direct_to_cloud=" + flag(r.plan.direct_to_cloud));
            if (!r.plan.feasible) return finish_rejected(e.t, r, r.plan.reason, false);
            return advance_warm(e.t, r);
        }
        r.qnn_required = q.slo.quality_target > cfg_.graph.classical_quality;
        r.alts = {{&cfg_.graph.unit(cfg_.graph.source), std::nullopt}};
        dispatch(e.t, r, false);
    }

    void advance_warm(double now, ReqState& r) {
        const double payload = r.spec->payload;
        if (r.next_step < r.plan.steps.size()) {
            const StepPlacement& s = r.plan.steps[r.next_step];
            if (s.domain == Domain::Edge) {
                const double service = s.service_ms * payload + jitter(s.service_ms * payload);
                push({now + service, 0, 0, EvKind::ClientStepComplete, static_cast<std::size_t>(&r - reqs_.data()), "",
                      r.gen, 0.0});
                return;
            }
            auto u = std::make_unique<UnitSpec>();
            u->id = "ws" + std::to_string(r.next_step) + ":" + to_string(s.kind);
            u->domains = {s.domain};
            u->resources = {s.resource};
            r.alts = {{u.get(), s.service_ms * payload}};
            r.owned.push_back(std::move(u));
            return dispatch(now, r, false);
        }
        if (r.plan.direct_to_cloud) log(now, "direct_to_cloud", "", r.spec->id, "intensity=" + fmt(r.plan.intensity));
        auto u = std::make_unique<UnitSpec>();
        u->id = "final";
        u->domains = {Domain::Cloud};
        u->resources = {r.pipeline->final_resource};
        r.alts = {{u.get(), r.pipeline->final_service_ms * payload}};
        r.owned.push_back(std::move(u));
        dispatch(now, r, false);
    }

    void on_client_step(const Event& e) {
        ReqState& r = reqs_[e.req];
        const StepPlacement& s = r.plan.steps[r.next_step];
        log(e.t, "warmstart_step", "client:" + r.client->id, r.spec->id,
            "kind=" + to_string(s.kind) + ";domain=edge;intensity=" + fmt(s.intensity_after));
        ++r.next_step;
        advance_warm(e.t, r);
    }

    double jitter(double service) {
        if (!cfg_.jitter.enabled || service <= 0.0 || cfg_.jitter.mean_fraction <= 0.0) return 0.0;
        return jitter_.exponential(service * cfg_.jitter.mean_fraction);
    }

    const UnitSpec& chosen_unit(const ReqState& r, const std::string& id) const {
        for (const auto& a : r.alts)
            if (a.unit->id == id) return *a.unit;
        return cfg_.graph.unit(id);
    }

    void dispatch(double now, ReqState& r, bool rerouting) {
        RouteRequest rq{r.spec->id, r.spec->arrival_ms, r.spec->payload, r.spec->slo, r.at, r.qnn_required};
        const RouteDecision d = route(rq, r.alts, state_, now);
        log(now, "route", d.node, r.spec->id,
            "decision=" + to_string(d.kind) + (d.unit.empty() ? "" : ";unit=" + d.unit) +
                (d.kind == RouteKind::Reject ? "" : ";predicted_ms=" + fmt(d.completion_ms)));
        if (d.kind == RouteKind::Reject) {
            if (rerouting) return finish_failed(now, r, "outage: " + d.reason);
            return finish_rejected(now, r, d.reason, true);
        }
        if (d.kind == RouteKind::SkipQnn) {
            r.qnn_skipped = true;
            log(now, "skip_qnn", "", r.spec->id, "reason=" + d.reason + ";replacement=" + d.unit);
        }
        if (d.forwarded) log(now, "forward_to_cloud", d.node, r.spec->id, "unit=" + d.unit);
        place(now, r, d);
    }

    void place(double now, ReqState& r, const RouteDecision& d) {
        NodeState& ns = *state_.find(d.node);
        const double extra = jitter(d.service_ms);
        const double end = d.completion_ms + extra;
        ns.slot_free_ms[d.slot] = end;
        r.reserved = true;
        r.started = false;
        r.node = d.node;
        r.unit = d.unit;
        r.transfer_ms = d.transfer_ms;
        r.start_ms = d.start_ms;
        r.end_ms = end;
        ++r.gen;
        if (d.quantum) {
            const auto& q = *d.quantum;
            log(now, "quantum_plan", d.node, r.spec->id,
                std::string("mode=") + (q.mode == QuantumExecution::Mode::Cut ? "cut" : "direct") +
                    ";gate_cuts=" + std::to_string(q.gate_cuts) + ";combinations=" + fmt(q.combinations) +
                    ";fragment_width=" + std::to_string(q.fragment_width));
        }
        const std::size_t idx = static_cast<std::size_t>(&r - reqs_.data());
        push({now + d.transfer_ms, 0, 0, EvKind::TransferComplete, idx, d.node, r.gen, 0.0});
        push({d.start_ms, 0, 0, EvKind::ServiceStart, idx, d.node, r.gen, 0.0});
        push({end, 0, 0, EvKind::ServiceComplete, idx, d.node, r.gen, 0.0});
    }

    void on_service_complete(const Event& e, ReqState& r, const NodeSpec& node) {
        const UnitSpec& unit = chosen_unit(r, r.unit);
        log(e.t, "service_complete", r.node, r.spec->id, "unit=" + r.unit + ";busy_ms=" + fmt(e.t - r.start_ms));
        r.reserved = false;
        r.at = {node.domain, node.id};
        if (unit.kind == UnitKind::QuantumWidthwise) r.qnn_used = true;

        if (r.pipeline) {
            if (r.next_step < r.plan.steps.size()) {
                const StepPlacement& s = r.plan.steps[r.next_step];
                log(e.t, "warmstart_step", node.id, r.spec->id,
                    "kind=" + to_string(s.kind) + ";domain=" + to_string(s.domain) +
                        ";intensity=" + fmt(s.intensity_after) + (s.inserted ? ";inserted=true" : ""));
                ++r.next_step;
                return advance_warm(e.t, r);
            }
            return finish_classified(e.t, r);
        }
        if (unit.next.empty()) return finish_classified(e.t, r);
        r.alts.clear();
        for (const auto& nx : unit.next) r.alts.push_back({&cfg_.graph.unit(nx), std::nullopt});
        dispatch(e.t, r, false);
    }

    void on_outage(const Event& e) {
        NodeState& ns = *state_.find(e.node);
        ns.down = true;
        log(e.t, "outage", e.node, "", "until=" + fmt(e.until));
        std::vector<ReqState*> hit;
        for (auto& r : reqs_) {
            if (r.done || !r.reserved || r.node != e.node) continue;
            if (r.started) log(e.t, "service_abort", e.node, r.spec->id, "unit=" + r.unit + ";busy_ms=" + fmt(e.t - r.start_ms));
            ++r.gen;
            r.reserved = false;
            log(e.t, "reroute", e.node, r.spec->id, "reason=outage;unit=" + r.unit);
            hit.push_back(&r);
        }
        for (auto& s : ns.slot_free_ms) s = e.until;
        for (ReqState* r : hit) dispatch(e.t, *r, true);
    }

    void on_recovery(const Event& e) {
        state_.find(e.node)->down = false;
        log(e.t, "recovery", e.node, "", "");
    }

    void finish_classified(double now, ReqState& r) {
        const double latency = now - r.spec->arrival_ms;
        const bool violated = latency > r.spec->slo.latency_budget_ms;
        const char* qnn = r.qnn_used ? "used" : r.qnn_skipped ? "skipped" : "none";
        log(now, "classified", r.at.node, r.spec->id,
            "latency_ms=" + fmt(latency) + ";slo=" + (violated ? "violated" : "met") + ";qnn=" + qnn);
        r.done = true;
    }

    void finish_rejected(double now, ReqState& r, const std::string& reason, bool slo_flag) {
        log(now, "rejected", "", r.spec->id, "reason=" + reason + (slo_flag ? ";slo=violated" : ""));
        r.done = true;
    }

    void finish_failed(double now, ReqState& r, const std::string& reason) {
        log(now, "failed", "", r.spec->id, "reason=" + reason);
        r.done = true;
    }

    const SimConfig& cfg_;
    ClusterState state_;
    Rng jitter_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::vector<ReqState> reqs_;
    std::vector<TraceRecord> trace_;
};

std::string json_string(const std::string& s) { return Json(s).dump(); }

}  // namespace

std::vector<OutageInterval> merge_intervals(std::vector<OutageInterval> iv) {
    std::sort(iv.begin(), iv.end(), [](const OutageInterval& a, const OutageInterval& b) {
        return a.start_ms < b.start_ms || (a.start_ms == b.start_ms && a.end_ms < b.end_ms);
    });
    std::vector<OutageInterval> out;
    for (const auto& i : iv) {
        if (i.end_ms <= i.start_ms) continue;
        if (!out.empty() && i.start_ms <= out.back().end_ms) out.back().end_ms = std::max(out.back().end_ms, i.end_ms);
        else out.push_back(i);
    }
    return out;
}

std::vector<OutageInterval> inject_outage(SimConfig& config, const std::string& node, double at_ms, double duration_ms) {
    if (!config.find_node(node)) throw InvalidArgument("unknown node " + node);
    if (!(at_ms >= 0.0) || !(duration_ms >= 0.0)) throw InvalidArgument("outage time and duration must be >= 0");
    config.outages.push_back({node, at_ms, duration_ms});
    std::vector<OutageInterval> iv;
    for (const auto& o : config.outages)
        if (o.node == node) iv.push_back({o.at_ms, o.at_ms + o.duration_ms});
    return merge_intervals(std::move(iv));
}

SimResult simulate(const SimConfig& config) {
    config.validate();
    return Engine(config).run();
}

std::string detail_value(const std::string& detail, const std::string& key) {
    std::size_t pos = 0;
    while (pos <= detail.size()) {
        std::size_t end = detail.find(';', pos);
        if (end == std::string::npos) end = detail.size();
        const std::size_t eq = detail.find('=', pos);
        if (eq != std::string::npos && eq < end && detail.compare(pos, eq - pos, key) == 0)
            return detail.substr(eq + 1, end - eq - 1);
        pos = end + 1;
    }
    return "";
}

Metrics compute_metrics(const std::vector<TraceRecord>& trace, const SimConfig& config) {
    Metrics m;
    std::vector<double> latencies;
    for (const auto& n : config.nodes) m.nodes[n.id];
    auto num = [](const std::string& s) { return s.empty() ? 0.0 : std::stod(s); };
    for (const auto& rec : trace) {
        m.makespan_ms = std::max(m.makespan_ms, rec.time_ms);
        const std::string& ev = rec.event;
        if (ev == "arrival") {
            ++m.requests;
        } else if (ev == "classified") {
            ++m.classified;
            latencies.push_back(num(detail_value(rec.detail, "latency_ms")));
            if (detail_value(rec.detail, "slo") == "violated") ++m.slo_violations;
            if (detail_value(rec.detail, "qnn") == "used") ++m.qnn_used;
        } else if (ev == "rejected") {
            ++m.rejected;
        } else if (ev == "failed") {
            ++m.failed;
        } else if (ev == "skip_qnn") {
            ++m.qnn_skipped;
        } else if (ev == "forward_to_cloud") {
            ++m.forwarded_to_cloud;
        } else if (ev == "reroute") {
            ++m.reroutes;
        } else if (ev == "outage") {
            ++m.outages;
        } else if (ev == "transfer_complete") {
            if (detail_value(rec.detail, "inter_domain") == "1") m.inter_domain_payload += num(detail_value(rec.detail, "payload"));
        } else if (ev == "service_complete" || ev == "service_abort") {
            auto it = m.nodes.find(rec.node);
            if (it != m.nodes.end()) {
                it->second.busy_ms += num(detail_value(rec.detail, "busy_ms"));
                if (ev == "service_complete") ++it->second.services;
            }
        }
    }
    if (!latencies.empty()) {
        std::sort(latencies.begin(), latencies.end());
        double sum = 0.0;
        for (double l : latencies) sum += l;
        m.latency_mean_ms = sum / static_cast<double>(latencies.size());
        auto rank = [&](double p) {
            const auto n = static_cast<double>(latencies.size());
            const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(p / 100.0 * n)));
            return latencies[k - 1];
        };
        m.latency_p50_ms = rank(50);
        m.latency_p95_ms = rank(95);
        m.latency_p99_ms = rank(99);
    }
    for (const auto& n : config.nodes) {
        auto& nm = m.nodes[n.id];
        nm.utilization = m.makespan_ms > 0.0 ? nm.busy_ms / (n.slots * m.makespan_ms) : 0.0;
    }
    return m;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace, double sampling) {
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / sampling)));
    std::map<std::string, std::size_t> index;  // request id -> arrival order
    for (const auto& rec : trace) {
        if (!rec.request.empty() && !index.count(rec.request)) {
            const std::size_t k = index.size();
            index[rec.request] = k;
        }
        if (!rec.request.empty() && index[rec.request] % stride != 0) continue;
        out << "{\"t\":" << format_double(rec.time_ms) << ",\"event\":" << json_string(rec.event)
            << ",\"node\":" << json_string(rec.node) << ",\"request\":" << json_string(rec.request)
            << ",\"detail\":" << json_string(rec.detail) << "}\n";
    }
}

std::string format_trace(const std::vector<TraceRecord>& trace, double sampling) {
    std::ostringstream os;
    write_trace(os, trace, sampling);
    return os.str();
}

void write_metrics(std::ostream& out, const Metrics& m) {
    out << "scope,metric,value\n";
    auto row = [&](const std::string& scope, const char* name, double v) {
        out << scope << ',' << name << ',' << format_double(v) << '\n';
    };
    row("global", "requests", static_cast<double>(m.requests));
    row("global", "classified", static_cast<double>(m.classified));
    row("global", "rejected", static_cast<double>(m.rejected));
    row("global", "failed", static_cast<double>(m.failed));
    row("global", "slo_violations", static_cast<double>(m.slo_violations));
    row("global", "qnn_used", static_cast<double>(m.qnn_used));
    row("global", "qnn_skipped", static_cast<double>(m.qnn_skipped));
    row("global", "forwarded_to_cloud", static_cast<double>(m.forwarded_to_cloud));
    row("global", "reroutes", static_cast<double>(m.reroutes));
    row("global", "outages", static_cast<double>(m.outages));
    row("global", "inter_domain_payload", m.inter_domain_payload);
    row("global", "latency_mean_ms", m.latency_mean_ms);
    row("global", "latency_p50_ms", m.latency_p50_ms);
    row("global", "latency_p95_ms", m.latency_p95_ms);
    row("global", "latency_p99_ms", m.latency_p99_ms);
    row("global", "makespan_ms", m.makespan_ms);
    for (const auto& [id, n] : m.nodes) {
        row(id, "busy_ms", n.busy_ms);
        row(id, "services", static_cast<double>(n.services));
        row(id, "utilization", n.utilization);
    }
}

}  // namespace qse::sim

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

#include "qse/sim/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "qse/rng.hpp"

namespace qse::sim {

namespace {

template <typename E>
struct Names {
    E value;
    const char* name;
};

constexpr Names<Domain> kDomains[] = {{Domain::Edge, "edge"}, {Domain::Fog, "fog"}, {Domain::Cloud, "cloud"}};
constexpr Names<Resource> kResources[] = {{Resource::CPU, "CPU"},
                                          {Resource::TPU, "TPU"},
                                          {Resource::GPU, "GPU"},
                                          {Resource::QPU, "QPU"},
                                          {Resource::MQPU, "MQPU"}};
constexpr Names<Grade> kGrades[] = {{Grade::Mobile, "mobile"}, {Grade::Server, "server"}};
constexpr Names<Capacity> kCapacities[] = {{Capacity::VeryLow, "very_low"},
                                           {Capacity::Low, "low"},
                                           {Capacity::Medium, "medium"},
                                           {Capacity::High, "high"},
                                           {Capacity::Unlimited, "unlimited"}};
constexpr Names<UnitKind> kUnitKinds[] = {{UnitKind::ClassicalDepthwise, "classical_depthwise"},
                                          {UnitKind::QuantumWidthwise, "quantum_widthwise"}};
constexpr Names<StepKind> kSteps[] = {{StepKind::C2Q, "C2Q"},
                                      {StepKind::Q2Q, "Q2Q"},
                                      {StepKind::Q2C, "Q2C"},
                                      {StepKind::C2N, "C2N"},
                                      {StepKind::N2Q, "N2Q"}};

template <typename E, std::size_t N>
E parse_enum(const ConfigNode& node, const Names<E> (&table)[N]) {
    const std::string s = node.string();
    for (const auto& entry : table)
        if (s == entry.name) return entry.value;
    std::string options;
    for (const auto& entry : table) options += std::string(options.empty() ? "" : ", ") + entry.name;
    node.fail("unknown value '" + s + "' (expected one of " + options + ")");
}

template <typename E, std::size_t N>
std::string enum_name(E v, const Names<E> (&table)[N]) {
    for (const auto& entry : table)
        if (entry.value == v) return entry.name;
    return "?";
}

template <typename E, std::size_t N>
std::vector<E> parse_enum_list(const ConfigNode& node, const Names<E> (&table)[N]) {
    std::vector<E> out;
    for (const auto& item : node.items()) out.push_back(parse_enum(item, table));
    return out;
}

double non_negative(const ConfigNode& node, const std::string& key, double fallback) {
    const double v = node.get_number(key, fallback);
    if (v < 0.0) node.fail(key, "must be >= 0");
    return v;
}

SloSpec parse_slo(const ConfigNode& n) {
    n.allow_only({"latency_budget_ms", "quality_target", "quantum_optional"});
    SloSpec s;
    s.latency_budget_ms = n.get_number("latency_budget_ms", s.latency_budget_ms);
    if (!(s.latency_budget_ms > 0.0)) n.fail("latency_budget_ms", "must be > 0");
    s.quality_target = n.get_number("quality_target", s.quality_target);
    if (s.quality_target < 0.0 || s.quality_target > 1.0) n.fail("quality_target", "must be in [0, 1]");
    s.quantum_optional = n.get_bool("quantum_optional", s.quantum_optional);
    return s;
}

NodeSpec parse_node(const ConfigNode& n) {
    n.allow_only({"id", "domain", "resource", "grade", "capacity", "slots", "service_ms", "max_qubits", "parallelism",
                  "outage_rate_per_hour", "outage_duration_ms", "energy_budget"});
    NodeSpec s;
    s.id = n.get_string("id");
    if (s.id.empty()) n.fail("id", "must not be empty");
    s.domain = parse_enum(n.at("domain"), kDomains);
    s.resource = parse_enum(n.at("resource"), kResources);
    if (auto g = n.find("grade")) s.grade = parse_enum(*g, kGrades);
    else s.grade = s.resource == Resource::MQPU ? Grade::Mobile : Grade::Server;
    if (auto c = n.find("capacity")) s.capacity = parse_enum(*c, kCapacities);
    s.slots = static_cast<int>(n.get_int_in("slots", 1, 1 << 20, 1));
    if (auto st = n.find("service_ms")) {
        if (st->json().is_number()) {
            s.service_ms = st->number();
        } else {
            for (const auto& [key, _] : st->json().items()) {
                const double v = st->get_number(key);
                if (v < 0.0) st->fail(key, "must be >= 0");
                if (key == "default") s.service_ms = v;
                else s.service_ms_by_unit[key] = v;
            }
        }
        if (s.service_ms < 0.0) st->fail("must be >= 0");
    }
    if (is_quantum(s.resource)) {
        s.max_qubits = static_cast<int>(n.get_int_in("max_qubits", 1, 4096));
    } else if (n.has("max_qubits")) {
        n.fail("max_qubits", "only quantum resources carry max_qubits");
    }
    s.parallelism = static_cast<int>(n.get_int_in("parallelism", 1, 1 << 20, 1));
    s.outage_rate_per_hour = non_negative(n, "outage_rate_per_hour", 0.0);
    s.outage_duration_ms = non_negative(n, "outage_duration_ms", s.outage_duration_ms);
    s.energy_budget = non_negative(n, "energy_budget", 0.0);
    if (s.energy_budget > 0.0 && s.domain != Domain::Edge) n.fail("energy_budget", "only edge nodes carry an energy budget");
    if (s.resource == Resource::MQPU && s.grade != Grade::Mobile) n.fail("grade", "MQPU nodes are mobile-grade");
    if (s.resource == Resource::QPU && s.grade != Grade::Server) n.fail("grade", "QPU nodes are server-grade");
    return s;
}

UnitSpec parse_unit(const ConfigNode& n) {
    n.allow_only({"id", "kind", "domains", "resources", "width", "depth", "next"});
    UnitSpec u;
    u.id = n.get_string("id");
    u.kind = parse_enum(n.at("kind"), kUnitKinds);
    u.domains = parse_enum_list(n.at("domains"), kDomains);
    if (u.domains.empty()) n.fail("domains", "must not be empty");
    u.resources = parse_enum_list(n.at("resources"), kResources);
    if (u.resources.empty()) n.fail("resources", "must not be empty");
    for (std::size_t i = 0; i < u.resources.size(); ++i) {
        const bool q = is_quantum(u.resources[i]);
        if (q != (u.kind == UnitKind::QuantumWidthwise))
            n.fail("resources/" + std::to_string(i), "resource does not match the unit kind");
    }
    if (u.kind == UnitKind::QuantumWidthwise) {
        u.width = static_cast<int>(n.get_int_in("width", 1, 4096));
        u.depth = static_cast<int>(n.get_int_in("depth", 1, 4096, 1));
    }
    if (auto nx = n.find("next"))
        for (const auto& item : nx->items()) u.next.push_back(item.string());
    return u;
}

WarmStartStep parse_step(const ConfigNode& n) {
    n.allow_only({"kind", "resource", "domains", "intensity_gain", "energy_cost", "service_ms", "repeatable"});
    WarmStartStep s;
    s.kind = parse_enum(n.at("kind"), kSteps);
    s.resource = parse_enum(n.at("resource"), kResources);
    if (auto d = n.find("domains")) s.domains = parse_enum_list(*d, kDomains);
    s.intensity_gain = n.get_number("intensity_gain");
    if (s.intensity_gain < 0.0 || s.intensity_gain > 1.0) n.fail("intensity_gain", "must be in [0, 1]");
    s.energy_cost = non_negative(n, "energy_cost", 0.0);
    s.service_ms = non_negative(n, "service_ms", s.service_ms);
    s.repeatable = n.get_bool("repeatable", s.kind == StepKind::Q2Q);
    return s;
}

std::vector<RequestSpec> generate_requests(const ConfigNode& g, const std::vector<ClientSpec>& clients,
                                           std::uint64_t seed) {
    g.allow_only({"count", "start_ms", "mean_interarrival_ms", "clients", "payload", "slo", "seed"});
    const auto count = static_cast<std::size_t>(g.get_int_in("count", 0, 10000000));
    const double start = non_negative(g, "start_ms", 0.0);
    const double mean = non_negative(g, "mean_interarrival_ms", 10.0);
    const double payload = non_negative(g, "payload", 1.0);
    std::vector<std::string> who;
    if (auto c = g.find("clients"))
        for (const auto& item : c->items()) who.push_back(item.string());
    else
        for (const auto& c : clients) who.push_back(c.id);
    if (who.empty()) g.fail("clients", "no clients to generate requests for");
    const SloSpec slo = g.has("slo") ? parse_slo(g.at("slo")) : SloSpec{};
    Rng rng(static_cast<std::uint64_t>(g.get_int_in("seed", 0, INT64_MAX, static_cast<std::int64_t>(seed))));
    std::vector<RequestSpec> out;
    double t = start;
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0 && mean > 0.0) t += rng.exponential(mean);
        out.push_back({"g" + std::to_string(i), who[i % who.size()], t, payload, slo});
    }
    return out;
}

}  // namespace

std::string to_string(Domain d) { return enum_name(d, kDomains); }
std::string to_string(Resource r) { return enum_name(r, kResources); }
std::string to_string(StepKind k) { return enum_name(k, kSteps); }
std::string to_string(Format f) {
    switch (f) {
        case Format::Classical: return "C";
        case Format::Neural: return "N";
        case Format::Quantum: return "Q";
    }
    return "?";
}

bool is_quantum(Resource r) { return r == Resource::QPU || r == Resource::MQPU; }

Format input_format(StepKind k) {
    switch (k) {
        case StepKind::C2Q:
        case StepKind::C2N: return Format::Classical;
        case StepKind::Q2Q:
        case StepKind::Q2C: return Format::Quantum;
        case StepKind::N2Q: return Format::Neural;
    }
    return Format::Classical;
}

Format output_format(StepKind k) {
    switch (k) {
        case StepKind::C2Q:
        case StepKind::Q2Q:
        case StepKind::N2Q: return Format::Quantum;
        case StepKind::Q2C: return Format::Classical;
        case StepKind::C2N: return Format::Neural;
    }
    return Format::Classical;
}

double NodeSpec::service_for(const std::string& unit) const {
    auto it = service_ms_by_unit.find(unit);
    return it == service_ms_by_unit.end() ? service_ms : it->second;
}

bool UnitSpec::allows(Domain d) const { return std::find(domains.begin(), domains.end(), d) != domains.end(); }
bool UnitSpec::accepts(Resource r) const { return std::find(resources.begin(), resources.end(), r) != resources.end(); }

const UnitSpec& PartitionGraph::unit(const std::string& id) const {
    for (const auto& u : units)
        if (u.id == id) return u;
    throw SimulationIntegrity("unknown partition unit " + id);
}

bool PartitionGraph::has(const std::string& id) const {
    return std::any_of(units.begin(), units.end(), [&](const UnitSpec& u) { return u.id == id; });
}

void PartitionGraph::validate() const {
    if (units.empty()) return;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (!ids.insert(units[i].id).second)
            throw SchemaError("/graph/units/" + std::to_string(i) + "/id", "duplicate unit id " + units[i].id);
    }
    if (!has(source)) throw SchemaError("/graph/source", "unknown unit " + source);
    for (std::size_t i = 0; i < units.size(); ++i)
        for (std::size_t k = 0; k < units[i].next.size(); ++k)
            if (!has(units[i].next[k]))
                throw SchemaError("/graph/units/" + std::to_string(i) + "/next/" + std::to_string(k),
                                  "unknown unit " + units[i].next[k]);

    // Depth-first search for cycles; every unit reachable from the source
    // must reach a sink.
    std::map<std::string, int> colour;  // 0 new, 1 open, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        colour[id] = 1;
        for (const auto& nx : unit(id).next) {
            if (colour[nx] == 1) throw SchemaError("/graph", "cycle through unit " + nx);
            if (colour[nx] == 0) visit(nx);
        }
        colour[id] = 2;
    };
    visit(source);
    for (const auto& u : units)
        if (colour[u.id] == 0) throw SchemaError("/graph", "unit " + u.id + " is unreachable from the source");

    // Quantum alternatives need a classical route around them so the QNN
    // stays skippable: the unit must lead somewhere.
    for (const auto& u : units)
        if (u.kind == UnitKind::QuantumWidthwise && u.next.empty())
            throw SchemaError("/graph", "quantum unit " + u.id + " cannot be a sink");
}

void Pipeline::validate() const {
    Format f = Format::Classical;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (input_format(steps[i].kind) != f)
            throw InvalidPipeline("pipeline " + id + ": step " + std::to_string(i) + " (" + to_string(steps[i].kind) +
                                  ") expects " + to_string(input_format(steps[i].kind)) + " input but receives " +
                                  to_string(f));
        f = output_format(steps[i].kind);
    }
    for (const auto& s : steps)
        if (s.repeatable && s.kind != StepKind::Q2Q)
            throw InvalidPipeline("pipeline " + id + ": only Q2Q steps may repeat");
}

const NodeSpec* SimConfig::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const ClientSpec& SimConfig::client(const std::string& id) const {
    for (const auto& c : clients)
        if (c.id == id) return c;
    throw SimulationIntegrity("unknown client " + id);
}

std::optional<LinkSpec> SimConfig::link(Domain a, Domain b) const {
    for (const auto& l : links)
        if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return l;
    return std::nullopt;
}

void SimConfig::validate() const {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!ids.insert(nodes[i].id).second)
            throw SchemaError("/nodes/" + std::to_string(i) + "/id", "duplicate node id " + nodes[i].id);
    std::set<std::string> client_ids;
    for (std::size_t i = 0; i < clients.size(); ++i) {
        if (!client_ids.insert(clients[i].id).second)
            throw SchemaError("/clients/" + std::to_string(i) + "/id", "duplicate client id " + clients[i].id);
        if (!clients[i].pipeline.empty() && !pipelines.count(clients[i].pipeline))
            throw SchemaError("/clients/" + std::to_string(i) + "/pipeline", "unknown pipeline " + clients[i].pipeline);
        if (clients[i].pipeline.empty() && graph.units.empty())
            throw SchemaError("/clients/" + std::to_string(i), "client has no pipeline and the config has no graph");
    }
    graph.validate();
    for (const auto& [_, p] : pipelines) p.validate();
    std::set<std::string> request_ids;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const auto path = "/workload/requests/" + std::to_string(i);
        if (!request_ids.insert(requests[i].id).second) throw SchemaError(path + "/id", "duplicate request id");
        if (!client_ids.count(requests[i].client)) throw SchemaError(path + "/client", "unknown client " + requests[i].client);
    }
    for (std::size_t i = 0; i < outages.size(); ++i)
        if (!find_node(outages[i].node))
            throw SchemaError("/outages/" + std::to_string(i) + "/node", "unknown node " + outages[i].node);

    // Every pair of domains that can exchange data needs a link; clients sit
    // at the edge.
    std::set<Domain> present{Domain::Edge};
    for (const auto& n : nodes) present.insert(n.domain);
    for (Domain a : present)
        for (Domain b : present)
            if (a < b && !link(a, b))
                throw SchemaError("/links", "missing link between " + to_string(a) + " and " + to_string(b));
    if (!(trace_sampling > 0.0 && trace_sampling <= 1.0)) throw SchemaError("/trace_sampling", "must be in (0, 1]");
}

SimConfig parse_sim_config(const Json& doc) {
    const ConfigNode root(doc, "");
    root.allow_only({"version", "description", "seed", "trace_sampling", "horizon_ms", "jitter", "nodes", "links",
                     "graph", "pipelines", "clients", "workload", "outages"});
    require_version(root, kSimConfigVersion);
    SimConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(root.get_int_in("seed", 0, INT64_MAX));
    cfg.trace_sampling = root.get_number("trace_sampling", 1.0);
    cfg.horizon_ms = non_negative(root, "horizon_ms", 0.0);
    if (auto j = root.find("jitter")) {
        j->allow_only({"enabled", "mean_fraction"});
        cfg.jitter.enabled = j->get_bool("enabled", false);
        cfg.jitter.mean_fraction = non_negative(*j, "mean_fraction", cfg.jitter.mean_fraction);
    }
    if (auto nodes = root.find("nodes"))
        for (const auto& n : nodes->items()) cfg.nodes.push_back(parse_node(n));
    if (auto links = root.find("links"))
        for (const auto& l : links->items()) {
            l.allow_only({"between", "latency_ms", "ms_per_unit"});
            const auto between = l.at("between").items();
            if (between.size() != 2) l.fail("between", "expected two domains");
            cfg.links.push_back({parse_enum(between[0], kDomains), parse_enum(between[1], kDomains),
                                 non_negative(l, "latency_ms", 0.0), non_negative(l, "ms_per_unit", 0.0)});
        }
    if (auto g = root.find("graph")) {
        g->allow_only({"source", "classical_quality", "units"});
        for (const auto& u : g->at("units").items()) cfg.graph.units.push_back(parse_unit(u));
        cfg.graph.source = g->get_string("source", cfg.graph.units.empty() ? "" : cfg.graph.units.front().id);
        cfg.graph.classical_quality = g->get_number("classical_quality", 1.0);
    }
    if (auto ps = root.find("pipelines")) {
        for (const auto& [key, _] : ps->json().items()) {
            const ConfigNode p = ps->at(key);
            p.allow_only({"steps", "final_resource", "final_service_ms", "max_inserted_steps"});
            Pipeline pl;
            pl.id = key;
            for (const auto& s : p.at("steps").items()) pl.steps.push_back(parse_step(s));
            if (auto r = p.find("final_resource")) pl.final_resource = parse_enum(*r, kResources);
            pl.final_service_ms = non_negative(p, "final_service_ms", pl.final_service_ms);
            pl.max_inserted_steps = static_cast<int>(p.get_int_in("max_inserted_steps", 0, 1000, pl.max_inserted_steps));
            cfg.pipelines[key] = std::move(pl);
        }
    }
    if (auto cs = root.find("clients"))
        for (const auto& c : cs->items()) {
            c.allow_only({"id", "energy_budget", "resources", "pipeline"});
            ClientSpec cl;
            cl.id = c.get_string("id");
            cl.energy_budget = non_negative(c, "energy_budget", 0.0);
            if (auto r = c.find("resources")) cl.resources = parse_enum_list(*r, kResources);
            cl.pipeline = c.get_string("pipeline", "");
            cfg.clients.push_back(std::move(cl));
        }
    if (auto w = root.find("workload")) {
        w->allow_only({"requests", "generator"});
        if (auto rs = w->find("requests"))
            for (const auto& r : rs->items()) {
                r.allow_only({"id", "client", "arrival_ms", "payload", "slo"});
                RequestSpec q;
                q.id = r.get_string("id");
                q.client = r.get_string("client");
                q.arrival_ms = non_negative(r, "arrival_ms", 0.0);
                q.payload = non_negative(r, "payload", 1.0);
                if (r.has("slo")) q.slo = parse_slo(r.at("slo"));
                cfg.requests.push_back(std::move(q));
            }
        if (auto g = w->find("generator")) {
            auto gen = generate_requests(*g, cfg.clients, cfg.seed);
            cfg.requests.insert(cfg.requests.end(), gen.begin(), gen.end());
        }
    }
    if (auto os = root.find("outages"))
        for (const auto& o : os->items()) {
            o.allow_only({"node", "at_ms", "duration_ms"});
            cfg.outages.push_back({o.get_string("node"), non_negative(o, "at_ms", 0.0), non_negative(o, "duration_ms", 0.0)});
        }
    cfg.validate();
    return cfg;
}

SimConfig load_sim_config(const std::filesystem::path& file) { return parse_sim_config(read_json_file(file)); }

}  // namespace qse::sim

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

#include "qse/commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "qse/checkpoint.hpp"
#include "qse/config.hpp"
#include "qse/dataset.hpp"
#include "qse/sim/simulator.hpp"

namespace qse {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kCommandConfigVersion = 1;

struct LoadedConfig {
    Json doc;
    fs::path dir;  // relative paths in the config resolve against this
};

LoadedConfig load_config(const CommandOptions& opt) {
    if (opt.config.empty()) throw InvalidArgument("--config is required");
    LoadedConfig c{read_json_file(opt.config), opt.config.parent_path()};
    if (!c.doc.is_object()) throw SchemaError("/", "expected an object");
    if (opt.seed) c.doc["seed"] = *opt.seed;
    return c;
}

std::uint64_t root_seed(const ConfigNode& root) {
    if (!root.has("seed")) root.fail("seed", "is required");
    return static_cast<std::uint64_t>(root.get_int_in("seed", 0, INT64_MAX));
}

void check_parallelism(int p) {
    if (p < 1) throw InvalidArgument("--parallelism must be >= 1");
}

std::ofstream open_out(const fs::path& file) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    return out;
}

void write_text(const fs::path& file, const std::string& text) {
    auto out = open_out(file);
    out << text;
    if (!out) throw Error("failed writing " + file.string());
}

std::vector<int> int_or_list(const ConfigNode& node, std::int64_t lo, std::int64_t hi) {
    std::vector<int> out;
    auto one = [&](const ConfigNode& n) {
        const auto v = n.integer();
        if (v < lo || v > hi)
            n.fail("must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        out.push_back(static_cast<int>(v));
    };
    if (node.json().is_array()) {
        for (const auto& n : node.items()) one(n);
        if (out.empty()) node.fail("must not be empty");
    } else {
        one(node);
    }
    return out;
}

std::string pct(double err) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * err);
    return buf;
}

SyntheticDatasetSpec dataset_spec(const ConfigNode& root, std::uint64_t seed) {
    const ConfigNode node = root.at("dataset");
    SyntheticDatasetSpec spec = dataset_spec_from_config(node);
    if (!node.has("seed")) spec.seed = seed;
    try {
        spec.validate();
    } catch (const InvalidArgument& e) {
        node.fail(e.what());
    }
    return spec;
}

}  // namespace

int cmd_gen_data(const CommandOptions& opt, std::ostream& report) {
    const auto cfg = load_config(opt);
    const ConfigNode root(cfg.doc, "");
    root.allow_only({"version", "description", "seed", "dataset"});
    require_version(root, kCommandConfigVersion);
    const SyntheticDatasetSpec spec = dataset_spec(root, root_seed(root));

    const Dataset data = generate_dataset(spec);
    write_dataset(data, spec, opt.out);
    report << "wrote " << data.train.size() << " train and " << data.test.size() << " test samples ("
           << spec.n_classes << " classes, dim " << spec.feature_dim << ", seed " << spec.seed << ") to "
           << opt.out.string() << "\n";
    return 0;
}

namespace {

TrainPlan parse_train_plan(const ConfigNode& root) {
    TrainPlan p;
    p.seed = root_seed(root);
    const std::vector<std::string> known{"classical", "hybrid", "hybrid_skip"};
    if (auto fam = root.find("families")) {
        for (const auto& f : fam->items()) {
            const auto name = f.string();
            if (std::find(known.begin(), known.end(), name) == known.end())
                f.fail("unknown family '" + name + "' (classical, hybrid, hybrid_skip)");
            if (std::find(p.families.begin(), p.families.end(), name) != p.families.end()) f.fail("duplicate family");
            p.families.push_back(name);
        }
        if (p.families.empty()) fam->fail("must not be empty");
    } else {
        p.families = known;
    }
    const ConfigNode model = root.at("model");
    model.allow_only({"n_qubits", "depth", "first_rotation"});
    p.n_qubits = int_or_list(model.at("n_qubits"), 1, 20);
    p.depth = static_cast<int>(model.get_int_in("depth", 1, 1000, 8));
    const auto rot = model.get_string("first_rotation", "Y");
    if (rot != "Y" && rot != "Z") model.fail("first_rotation", "must be \"Y\" or \"Z\"");
    p.first_rotation = rot == "Y" ? Rotation::Y : Rotation::Z;
    if (auto t = root.find("training")) {
        t->allow_only({"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon"});
        p.training.epochs = static_cast<int>(t->get_int_in("epochs", 1, 1000000, p.training.epochs));
        p.training.batch_size = static_cast<int>(t->get_int_in("batch_size", 1, 1000000, p.training.batch_size));
        p.training.learning_rate = t->get_number("learning_rate", p.training.learning_rate);
        p.training.beta1 = t->get_number("beta1", p.training.beta1);
        p.training.beta2 = t->get_number("beta2", p.training.beta2);
        p.training.epsilon = t->get_number("epsilon", p.training.epsilon);
        if (!(p.training.learning_rate > 0.0)) t->fail("learning_rate", "must be > 0");
        if (!(p.training.beta1 >= 0.0 && p.training.beta1 < 1.0)) t->fail("beta1", "must be in [0, 1)");
        if (!(p.training.beta2 >= 0.0 && p.training.beta2 < 1.0)) t->fail("beta2", "must be in [0, 1)");
        if (!(p.training.epsilon > 0.0)) t->fail("epsilon", "must be > 0");
    }
    p.repeats = static_cast<int>(root.get_int_in("repeats", 1, 1000, 1));
    p.save_checkpoints = root.get_bool("save_checkpoints", true);
    return p;
}

std::string family_tag(const std::string& family) { return family == "hybrid_skip" ? "hybrid-skip" : family; }

TrainJobResult run_job(const TrainPlan& plan, const Dataset& data, const std::string& family, int n, int repeat,
                       const fs::path& checkpoint_dir) {
    TrainJobResult r;
    r.family = family;
    r.n_qubits = n;
    r.repeat = repeat;
    r.seed = plan.seed + static_cast<std::uint64_t>(repeat);
    Rng rng(r.seed);
    TrainConfig tc = plan.training;
    tc.seed = r.seed;
    auto finish = [&](const auto& result) {
        r.epochs = result.metrics;
        r.train_error = evaluate_top1(result.model, data.train);
        r.test_error = evaluate_top1(result.model, data.test);
        for (const auto& e : r.epochs)
            if (!std::isfinite(e.train_loss))
                throw Error(family + " q=" + std::to_string(n) + ": non-finite training loss at epoch " +
                            std::to_string(e.epoch));
        if (!checkpoint_dir.empty())
            save_checkpoint(AnyModel(result.model), checkpoint_dir / (family_tag(family) + "-q" + std::to_string(n) +
                                                                      "-r" + std::to_string(repeat) + ".qsec"));
    };
    if (family == "classical") {
        finish(train(ClassicalBaseline::init(data.feature_dim(), data.n_classes, static_cast<std::size_t>(n), rng),
                     data, tc));
    } else {
        const AnsatzSpec spec{n, plan.depth, plan.first_rotation};
        finish(train(HybridClassifier::init(data.feature_dim(), data.n_classes, spec, family == "hybrid_skip", rng),
                     data, tc));
    }
    spdlog::info("trained {} q={} repeat={} seed={}: test error {}", family, n, repeat, r.seed, r.test_error);
    return r;
}

}  // namespace

std::vector<TrainJobResult> run_training(const TrainPlan& plan, const Dataset& data, int parallelism,
                                         const fs::path& checkpoint_dir) {
    check_parallelism(parallelism);
    if (!checkpoint_dir.empty()) fs::create_directories(checkpoint_dir);
    struct Job {
        std::string family;
        int n;
        int repeat;
    };
    std::vector<Job> jobs;
    for (int n : plan.n_qubits)
        for (const auto& f : plan.families)
            for (int k = 0; k < plan.repeats; ++k) jobs.push_back({f, n, k});

    std::vector<TrainJobResult> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = run_job(plan, data, jobs[i].family, jobs[i].n, jobs[i].repeat, checkpoint_dir);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(parallelism), jobs.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

double median_test_error(const std::vector<TrainJobResult>& results, const std::string& family, int n_qubits) {
    std::vector<double> v;
    for (const auto& r : results)
        if (r.family == family && r.n_qubits == n_qubits) v.push_back(r.test_error);
    if (v.empty()) throw InvalidArgument("no results for " + family + " at " + std::to_string(n_qubits) + " qubits");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string comparison_table_csv(const std::vector<TrainJobResult>& results, const std::vector<int>& widths) {
    std::ostringstream os;
    os << "n_qubits,Top-1 Err. C.,Top-1 Err. H.,Top-1 Err. H. Res.\n";
    auto has = [&](const std::string& f) {
        return std::any_of(results.begin(), results.end(), [&](const TrainJobResult& r) { return r.family == f; });
    };
    for (int n : widths) {
        os << n;
        for (const char* f : {"classical", "hybrid", "hybrid_skip"}) {
            os << ',';
            if (has(f)) os << pct(median_test_error(results, f, n));
        }
        os << '\n';
    }
    return os.str();
}

int cmd_train(const CommandOptions& opt, std::ostream& report) {
    check_parallelism(opt.parallelism);
    const auto cfg = load_config(opt);
    const ConfigNode root(cfg.doc, "");
    root.allow_only({"version", "description", "seed", "dataset", "dataset_dir", "families", "model", "training",
                     "repeats", "save_checkpoints"});
    require_version(root, kCommandConfigVersion);
    const TrainPlan plan = parse_train_plan(root);

    Dataset data;
    if (root.has("dataset") == root.has("dataset_dir")) root.fail("exactly one of dataset or dataset_dir is required");
    if (root.has("dataset")) {
        data = generate_dataset(dataset_spec(root, plan.seed));
    } else {
        fs::path dir = root.get_string("dataset_dir");
        if (dir.is_relative()) dir = cfg.dir / dir;
        if (!fs::exists(dir / "manifest.json")) root.fail("dataset_dir", "dataset missing at " + dir.string());
        data = load_dataset(dir);
    }
    const int widest = *std::max_element(plan.n_qubits.begin(), plan.n_qubits.end());
    if (data.feature_dim() < static_cast<std::size_t>(widest))
        root.fail("model", "feature_dim " + std::to_string(data.feature_dim()) + " is smaller than " +
                               std::to_string(widest) + " qubits");

    const auto results =
        run_training(plan, data, opt.parallelism, plan.save_checkpoints ? opt.out / "checkpoints" : fs::path{});

    std::ostringstream metrics, finals;
    metrics << "family,n_qubits,repeat,seed,epoch,train_loss,test_error\n";
    finals << "family,n_qubits,repeat,seed,train_error,test_error\n";
    for (const auto& r : results) {
        const std::string key = r.family + "," + std::to_string(r.n_qubits) + "," + std::to_string(r.repeat) + "," +
                                std::to_string(r.seed) + ",";
        for (const auto& e : r.epochs)
            metrics << key << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.test_error) << '\n';
        finals << key << format_double(r.train_error) << ',' << format_double(r.test_error) << '\n';
    }
    const std::string table = comparison_table_csv(results, plan.n_qubits);
    write_text(opt.out / "metrics.csv", metrics.str());
    write_text(opt.out / "results.csv", finals.str());
    write_text(opt.out / "comparison.csv", table);

    report << "Top-1 test error (%), median over " << plan.repeats << " repeat(s)\n";
    report << std::left << std::setw(8) << "qubits" << std::setw(16) << "Top-1 Err. C." << std::setw(16)
           << "Top-1 Err. H." << "Top-1 Err. H. Res.\n";
    std::istringstream rows(table);
    std::string line;
    std::getline(rows, line);  // header
    while (std::getline(rows, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        cells.resize(4);
        report << std::setw(8) << cells[0];
        for (int i = 1; i < 4; ++i) {
            const std::string v = cells[static_cast<std::size_t>(i)].empty() ? "-" : cells[static_cast<std::size_t>(i)];
            if (i < 3) report << std::setw(16) << v;
            else report << v;
        }
        report << '\n';
    }
    return 0;
}

namespace {

GradcheckOptions parse_gradcheck(const ConfigNode& root) {
    GradcheckOptions o;
    o.seed = root_seed(root);
    const auto g = root.find("gradcheck");
    if (!g) return o;
    g->allow_only({"hybrid_instances", "ansatz_instances", "closed_form_points", "n_qubits", "depths", "feature_dim",
                   "n_classes", "fd_step", "abs_tolerance", "rel_tolerance", "closed_form_tolerance", "test_hooks"});
    o.hybrid_instances = static_cast<int>(g->get_int_in("hybrid_instances", 0, 100000, o.hybrid_instances));
    o.ansatz_instances = static_cast<int>(g->get_int_in("ansatz_instances", 0, 100000, o.ansatz_instances));
    o.closed_form_points = static_cast<int>(g->get_int_in("closed_form_points", 1, 100000, o.closed_form_points));
    if (auto n = g->find("n_qubits")) o.n_qubits = int_or_list(*n, 1, 16);
    if (auto d = g->find("depths")) o.depths = int_or_list(*d, 1, 64);
    o.feature_dim = static_cast<std::size_t>(g->get_int_in("feature_dim", 1, 4096, static_cast<std::int64_t>(o.feature_dim)));
    o.n_classes = static_cast<std::size_t>(g->get_int_in("n_classes", 2, 1000, static_cast<std::int64_t>(o.n_classes)));
    o.fd_step = g->get_number("fd_step", o.fd_step);
    if (!(o.fd_step > 0.0)) g->fail("fd_step", "must be > 0");
    o.abs_tolerance = g->get_number("abs_tolerance", o.abs_tolerance);
    o.rel_tolerance = g->get_number("rel_tolerance", o.rel_tolerance);
    o.closed_form_tolerance = g->get_number("closed_form_tolerance", o.closed_form_tolerance);
    if (auto hooks = g->find("test_hooks")) {
        hooks->allow_only({"wrong_sign_shift"});
        if (hooks->get_bool("wrong_sign_shift", false)) o.rule.shift = -o.rule.shift;
    }
    return o;
}

CutVerifyOptions parse_cut_verify(const ConfigNode& root, int parallelism) {
    CutVerifyOptions o;
    o.seed = root_seed(root);
    o.parallelism = parallelism;
    const auto c = root.find("cut_verify");
    if (!c) return o;
    c->allow_only({"wire_circuits", "wire_gate_circuits", "max_qubits", "max_depth", "tolerance"});
    o.wire_circuits = static_cast<int>(c->get_int_in("wire_circuits", 0, 1000000, o.wire_circuits));
    o.wire_gate_circuits = static_cast<int>(c->get_int_in("wire_gate_circuits", 0, 1000000, o.wire_gate_circuits));
    o.max_qubits = static_cast<int>(c->get_int_in("max_qubits", 2, 12, o.max_qubits));
    o.max_depth = static_cast<int>(c->get_int_in("max_depth", 1, 64, o.max_depth));
    o.tolerance = c->get_number("tolerance", o.tolerance);
    if (!(o.tolerance > 0.0)) c->fail("tolerance", "must be > 0");
    return o;
}

}  // namespace

int cmd_gradcheck(const CommandOptions& opt, std::ostream& report) {
    const auto cfg = load_config(opt);
    const ConfigNode root(cfg.doc, "");
    root.allow_only({"version", "description", "seed", "gradcheck"});
    require_version(root, kCommandConfigVersion);
    const GradcheckOptions o = parse_gradcheck(root);

    const GradcheckReport r = run_gradcheck(o);
    std::ostringstream csv;
    csv << "check,index,n_qubits,depth,use_skip,compared,max_abs,max_rel,pass\n";
    std::size_t failed = 0;
    double worst[3] = {0, 0, 0};
    for (const auto& c : r.cases) {
        csv << c.check << ',' << c.index << ',' << c.n_qubits << ',' << c.depth << ',' << (c.use_skip ? 1 : 0) << ','
            << c.n_compared << ',' << format_double(c.max_abs) << ',' << format_double(c.max_rel) << ','
            << (c.pass ? 1 : 0) << '\n';
        if (!c.pass) ++failed;
        const int slot = c.check == "closed_form" ? 0 : c.check == "ansatz" ? 1 : 2;
        worst[slot] = std::max(worst[slot], c.max_abs);
    }
    write_text(opt.out / "gradcheck.csv", csv.str());
    report << "closed form (n=1)    max |delta| = " << format_double(worst[0]) << "\n"
           << "ansatz shift rule    max |delta| = " << format_double(worst[1]) << " over " << o.ansatz_instances
           << " instance(s)\n"
           << "hybrid loss gradient max |delta| = " << format_double(worst[2]) << " over " << o.hybrid_instances
           << " instance(s)\n"
           << "max |delta| = " << format_double(r.max_abs) << "\n"
           << (r.pass ? "gradcheck PASS" : "gradcheck FAIL (" + std::to_string(failed) + " case(s) out of tolerance)")
           << "\n";
    return r.pass ? 0 : 1;
}

int cmd_cut_verify(const CommandOptions& opt, std::ostream& report) {
    check_parallelism(opt.parallelism);
    const auto cfg = load_config(opt);
    const ConfigNode root(cfg.doc, "");
    root.allow_only({"version", "description", "seed", "cut_verify"});
    require_version(root, kCommandConfigVersion);
    const CutVerifyOptions o = parse_cut_verify(root, opt.parallelism);

    const CutVerifyReport r = run_cut_verify(o);
    std::ostringstream csv;
    csv << "suite,index,n_qubits,gates,wire_cuts,gate_cuts,combinations,expected_combinations,reconstructed,uncut,"
           "deviation,pass\n";
    std::map<std::string, std::pair<std::size_t, double>> per_suite;
    std::size_t failed = 0;
    for (const auto& k : r.cases) {
        csv << k.suite << ',' << k.index << ',' << k.n_qubits << ',' << k.gates << ',' << k.wire_cuts << ','
            << k.gate_cuts << ',' << k.combinations << ',' << format_double(k.expected_combinations) << ','
            << format_double(k.reconstructed) << ',' << format_double(k.uncut) << ',' << format_double(k.deviation)
            << ',' << (k.pass ? 1 : 0) << '\n';
        auto& s = per_suite[k.suite];
        ++s.first;
        s.second = std::max(s.second, k.deviation);
        if (!k.pass) ++failed;
    }
    write_text(opt.out / "cut_verify.csv", csv.str());
    for (const char* suite : {"wire", "wire+gate", "bell", "empty"}) {
        const auto it = per_suite.find(suite);
        if (it == per_suite.end()) continue;
        report << std::left << std::setw(10) << suite << " circuits " << std::setw(4) << it->second.first
               << " max |delta| = " << format_double(it->second.second) << "\n";
    }
    report << "combination counts: wire 8, wire+gate 48\n"
           << "max |delta| = " << format_double(r.max_deviation) << "\n"
           << (r.pass ? "cut-verify PASS" : "cut-verify FAIL (" + std::to_string(failed) + " case(s))") << "\n";
    return r.pass ? 0 : 1;
}

int cmd_simulate(const CommandOptions& opt, std::ostream& report) {
    const auto cfg = load_config(opt);
    const sim::SimConfig config = sim::parse_sim_config(cfg.doc);
    const sim::SimResult r = sim::simulate(config);
    {
        auto out = open_out(opt.out / "trace.jsonl");
        sim::write_trace(out, r.trace, config.trace_sampling);
    }
    {
        auto out = open_out(opt.out / "metrics.csv");
        sim::write_metrics(out, r.metrics);
    }
    const auto& m = r.metrics;
    report << "requests " << m.requests << ": classified " << m.classified << ", rejected " << m.rejected
           << ", failed " << m.failed << "\n"
           << "SLO violations " << m.slo_violations << ", QNN used " << m.qnn_used << ", QNN skipped "
           << m.qnn_skipped << ", forwarded to cloud " << m.forwarded_to_cloud << ", reroutes " << m.reroutes << "\n"
           << "latency ms: mean " << format_double(m.latency_mean_ms) << ", p50 " << format_double(m.latency_p50_ms)
           << ", p95 " << format_double(m.latency_p95_ms) << ", p99 " << format_double(m.latency_p99_ms) << "\n";
    if (m.requests != m.classified + m.rejected + m.failed)
        throw SimulationIntegrity("request conservation violated");
    return 0;
}

}  // namespace qse

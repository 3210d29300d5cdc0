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

#include "qse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qse/error.hpp"
#include "qse/model.hpp"

namespace qse {

namespace {

struct Deviation {
    double abs = 0.0;
    double rel = 0.0;
    bool pass = true;
    std::size_t n = 0;

    void add(double analytic, double numeric, double abs_tol, double rel_tol) {
        const double d = std::abs(analytic - numeric);
        const double scale = std::max(std::abs(analytic), std::abs(numeric));
        const double r = scale > 0.0 ? d / scale : 0.0;
        abs = std::max(abs, d);
        rel = std::max(rel, r);
        if (!(d <= abs_tol || r <= rel_tol)) pass = false;
        ++n;
    }
};

double uniform_angle(Rng& rng) { return rng.uniform(-std::numbers::pi, std::numbers::pi); }

GradcheckCase closed_form(const GradcheckOptions& o, Rng& rng) {
    // One qubit, one RY layer: <Z> = -sin(t) cos(x).
    const AnsatzSpec spec{1, 1, Rotation::Y};
    GradcheckCase c{"closed_form", 0, 1, 1, false};
    Deviation dev;
    for (int i = 0; i < o.closed_form_points; ++i) {
        const double t = uniform_angle(rng), x = uniform_angle(rng);
        const std::vector<double> xs{x};
        const Matrix j = parameter_shift_grad(spec, AnsatzParams{{t}}, xs, o.rule);
        dev.add(j(0, 0), -std::cos(t) * std::cos(x), o.closed_form_tolerance, 0.0);
        dev.add(j(0, 1), std::sin(t) * std::sin(x), o.closed_form_tolerance, 0.0);
    }
    c.n_compared = dev.n;
    c.max_abs = dev.abs;
    c.max_rel = dev.rel;
    c.pass = dev.abs <= o.closed_form_tolerance;
    return c;
}

GradcheckCase ansatz_case(const GradcheckOptions& o, Rng& rng, int index) {
    const int n = o.n_qubits[static_cast<std::size_t>(index) % o.n_qubits.size()];
    const int depth = o.depths[static_cast<std::size_t>(index / static_cast<int>(o.n_qubits.size())) % o.depths.size()];
    const AnsatzSpec spec{n, depth, rng.below(2) ? Rotation::Z : Rotation::Y};
    AnsatzParams p = AnsatzParams::zeros(spec);
    for (double& a : p.angles) a = uniform_angle(rng);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = uniform_angle(rng);

    const Matrix j = parameter_shift_grad(spec, p, x, o.rule);
    Deviation dev;
    const double h = o.fd_step;
    auto column = [&](std::size_t col, double& slot) {
        const double keep = slot;
        slot = keep + h;
        const auto up = ansatz_forward(spec, p, x);
        slot = keep - h;
        const auto down = ansatz_forward(spec, p, x);
        slot = keep;
        for (int q = 0; q < n; ++q)
            dev.add(j(static_cast<std::size_t>(q), col), (up[static_cast<std::size_t>(q)] - down[static_cast<std::size_t>(q)]) / (2 * h),
                    o.abs_tolerance, o.rel_tolerance);
    };
    for (std::size_t k = 0; k < p.angles.size(); ++k) column(k, p.angles[k]);
    for (std::size_t k = 0; k < x.size(); ++k) column(p.angles.size() + k, x[k]);
    return {"ansatz", index, n, depth, false, dev.n, dev.abs, dev.rel, dev.pass};
}

GradcheckCase hybrid_case(const GradcheckOptions& o, Rng& rng, int index) {
    // Cycle skip fastest, then width, then depth, so small runs still cover
    // every combination.
    const bool skip = index % 2 == 1;
    const std::size_t k = static_cast<std::size_t>(index / 2);
    const int n = o.n_qubits[k % o.n_qubits.size()];
    const int depth = o.depths[(k / o.n_qubits.size()) % o.depths.size()];
    const AnsatzSpec spec{n, depth, rng.below(2) ? Rotation::Z : Rotation::Y};
    const std::size_t dim = std::max(o.feature_dim, static_cast<std::size_t>(n));
    HybridClassifier m = HybridClassifier::init(dim, o.n_classes, spec, skip, rng);
    for (double& a : m.ansatz_params.angles) a = uniform_angle(rng);
    std::vector<double> x(dim);
    for (double& v : x) v = rng.normal();
    const int label = static_cast<int>(rng.below(o.n_classes));

    const LossGradient g = backward(m, x, label, o.rule);
    std::vector<double> flat = flatten(m);
    HybridClassifier probe = m;
    Deviation dev;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double keep = flat[i];
        flat[i] = keep + o.fd_step;
        unflatten(probe, flat);
        const double up = cross_entropy(forward_hybrid(probe, x), label);
        flat[i] = keep - o.fd_step;
        unflatten(probe, flat);
        const double down = cross_entropy(forward_hybrid(probe, x), label);
        flat[i] = keep;
        dev.add(g.grad[i], (up - down) / (2 * o.fd_step), o.abs_tolerance, o.rel_tolerance);
    }
    return {"hybrid", index, n, depth, skip, dev.n, dev.abs, dev.rel, dev.pass};
}

}  // namespace

Circuit random_circuit(Rng& rng, int n, int layers) {
    if (n < 1 || layers < 0) throw InvalidArgument("random_circuit needs n >= 1 and layers >= 0");
    Circuit c{n, {}};
    for (int l = 0; l < layers; ++l)
        for (int k = 0; k < n; ++k) {
            const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            switch (rng.below(n > 1 ? 4 : 3)) {
                case 0: c.gates.push_back(Gate::h(q)); break;
                case 1: c.gates.push_back(Gate::ry(q, rng.uniform(-3.2, 3.2))); break;
                case 2: c.gates.push_back(Gate::rz(q, rng.uniform(-3.2, 3.2))); break;
                default: {
                    int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
                    if (t >= q) ++t;
                    c.gates.push_back(Gate::cnot(q, t));
                }
            }
        }
    return c;
}

std::vector<PauliFactor> random_observable(Rng& rng, int n) {
    std::vector<PauliFactor> obs;
    while (obs.empty())
        for (int q = 0; q < n; ++q)
            if (rng.below(2)) obs.push_back({q, static_cast<Pauli>(1 + rng.below(3))});
    return obs;
}

GradcheckReport run_gradcheck(const GradcheckOptions& o) {
    if (o.n_qubits.empty() || o.depths.empty()) throw InvalidArgument("gradcheck needs qubit counts and depths");
    if (!(o.fd_step > 0.0)) throw InvalidArgument("fd_step must be > 0");
    Rng rng(o.seed);
    GradcheckReport r;
    r.cases.push_back(closed_form(o, rng));
    for (int i = 0; i < o.ansatz_instances; ++i) r.cases.push_back(ansatz_case(o, rng, i));
    for (int i = 0; i < o.hybrid_instances; ++i) r.cases.push_back(hybrid_case(o, rng, i));
    for (const auto& c : r.cases) {
        r.max_abs = std::max(r.max_abs, c.max_abs);
        r.pass = r.pass && c.pass;
    }
    return r;
}

namespace {

double uncut_value(const Circuit& c, std::span<const PauliFactor> obs) {
    const auto run = run_circuit(c, Statevector(c.n_qubits));
    return expectation_pauli_product(run.state, obs);
}

std::vector<int> cnots_of(const Circuit& c) {
    std::vector<int> out;
    for (std::size_t i = 0; i < c.gates.size(); ++i)
        if (c.gates[i].kind == GateKind::CNOT) out.push_back(static_cast<int>(i));
    return out;
}

CutVerifyCase check(const std::string& suite, int index, const Circuit& c, const CutPlan& plan,
                    std::span<const PauliFactor> obs, const CutVerifyOptions& o, bool exact) {
    CutVerifyCase k;
    k.suite = suite;
    k.index = index;
    k.n_qubits = c.n_qubits;
    k.gates = c.gates.size();
    k.wire_cuts = static_cast<int>(plan.wire_cuts.size());
    k.gate_cuts = static_cast<int>(plan.gate_cuts.size());
    const CutExecution e = execute_cut(c, plan, obs, statevector_executor, o.parallelism);
    k.combinations = e.combinations;
    k.expected_combinations = combination_count(plan);
    k.reconstructed = e.value;
    k.uncut = uncut_value(c, obs);
    k.deviation = std::abs(k.reconstructed - k.uncut);
    const bool counts = static_cast<double>(k.combinations) == k.expected_combinations;
    k.pass = counts && (exact ? k.reconstructed == k.uncut : k.deviation < o.tolerance);
    return k;
}

}  // namespace

CutVerifyReport run_cut_verify(const CutVerifyOptions& o) {
    if (o.max_qubits < 2 || o.max_depth < 1) throw InvalidArgument("cut-verify needs max_qubits >= 2 and max_depth >= 1");
    Rng rng(o.seed);
    CutVerifyReport r;
    auto shape = [&] {
        const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(o.max_qubits - 1)));
        const int layers = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(o.max_depth)));
        return std::pair{n, layers};
    };
    auto wire = [&](const Circuit& c) {
        return WireCut{static_cast<int>(rng.below(c.gates.size() + 1)) - 1,
                       static_cast<int>(rng.below(static_cast<std::uint64_t>(c.n_qubits)))};
    };
    for (int i = 0; i < o.wire_circuits; ++i) {
        const auto [n, layers] = shape();
        const Circuit c = random_circuit(rng, n, layers);
        const CutPlan plan{{wire(c)}, {}};
        const auto obs = random_observable(rng, n);
        r.cases.push_back(check("wire", i, c, plan, obs, o, false));
    }
    for (int i = 0; i < o.wire_gate_circuits; ++i) {
        const auto [n, layers] = shape();
        Circuit c = random_circuit(rng, n, layers);
        auto cnots = cnots_of(c);
        if (cnots.empty()) {
            // Guarantee something to gate-cut.
            const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
            c.gates.push_back(Gate::cnot(q, q + 1));
            cnots = cnots_of(c);
        }
        const CutPlan plan{{wire(c)}, {cnots[rng.below(cnots.size())]}};
        const auto obs = random_observable(rng, n);
        r.cases.push_back(check("wire+gate", i, c, plan, obs, o, false));
    }
    {
        const Circuit bell{2, {Gate::h(0), Gate::cnot(0, 1)}};
        const std::vector<PauliFactor> zz{{0, Pauli::Z}, {1, Pauli::Z}};
        auto k = check("bell", 0, bell, CutPlan{{}, {1}}, zz, o, false);
        k.pass = k.pass && std::abs(k.reconstructed - 1.0) < o.tolerance;
        r.cases.push_back(k);
    }
    {
        const auto [n, layers] = shape();
        const Circuit c = random_circuit(rng, n, layers);
        const auto obs = random_observable(rng, n);
        r.cases.push_back(check("empty", 0, c, CutPlan{}, obs, o, true));
    }
    for (const auto& k : r.cases) {
        r.max_deviation = std::max(r.max_deviation, k.deviation);
        r.pass = r.pass && k.pass;
    }
    return r;
}

}  // namespace qse

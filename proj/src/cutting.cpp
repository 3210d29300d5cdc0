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

#include "qse/cutting.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <thread>

#include "qse/error.hpp"

namespace qse {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_cut_target(const Circuit& c, int index) {
    return index >= 0 && static_cast<std::size_t>(index) < c.gates.size() &&
           c.gates[static_cast<std::size_t>(index)].kind == GateKind::CNOT;
}

/// Everything about a (circuit, plan) pair that does not depend on which
/// term each cut takes.
struct Layout {
    int n_qubits = 0;
    std::vector<int> seg_offset;                  // first segment id of each qubit
    std::vector<std::vector<int>> cuts_at;        // position -> wire cut indices, position in [0, L]
    std::map<int, std::size_t> gate_cut_slot;     // gate index -> cut slot (after the wire cuts)
    std::vector<int> upstream_of_cut;             // wire cut -> segment it terminates
    std::vector<int> cut_starting;                // segment -> wire cut starting it, or -1
    std::vector<int> cut_ending;                  // segment -> wire cut ending it, or -1
    std::vector<int> fragment_of;                 // segment -> fragment
    std::vector<int> local_of;                    // segment -> local qubit in its fragment
    FragmentMap fragments;

    int segment_count() const { return static_cast<int>(cut_starting.size()); }
};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

Layout make_layout(const Circuit& circuit, const CutPlan& plan) {
    plan.validate(circuit);
    Layout lay;
    const int n = circuit.n_qubits;
    const std::size_t L = circuit.gates.size();
    lay.n_qubits = n;

    std::vector<int> cuts_per_qubit(static_cast<std::size_t>(n), 0);
    lay.cuts_at.assign(L + 1, {});
    for (std::size_t j = 0; j < plan.wire_cuts.size(); ++j) {
        const WireCut& w = plan.wire_cuts[j];
        ++cuts_per_qubit[static_cast<std::size_t>(w.qubit)];
        lay.cuts_at[static_cast<std::size_t>(w.after_gate + 1)].push_back(static_cast<int>(j));
    }
    for (std::size_t k = 0; k < plan.gate_cuts.size(); ++k)
        lay.gate_cut_slot[plan.gate_cuts[k]] = plan.wire_cuts.size() + k;

    lay.seg_offset.resize(static_cast<std::size_t>(n));
    int total = 0;
    for (int q = 0; q < n; ++q) {
        lay.seg_offset[static_cast<std::size_t>(q)] = total;
        total += cuts_per_qubit[static_cast<std::size_t>(q)] + 1;
    }
    lay.cut_starting.assign(static_cast<std::size_t>(total), -1);
    lay.cut_ending.assign(static_cast<std::size_t>(total), -1);
    lay.upstream_of_cut.assign(plan.wire_cuts.size(), -1);

    UnionFind uf(total);
    std::vector<int> cur(lay.seg_offset);
    auto advance = [&](std::size_t pos) {
        for (int j : lay.cuts_at[pos]) {
            const auto q = static_cast<std::size_t>(plan.wire_cuts[static_cast<std::size_t>(j)].qubit);
            const int up = cur[q];
            lay.upstream_of_cut[static_cast<std::size_t>(j)] = up;
            lay.cut_ending[static_cast<std::size_t>(up)] = j;
            lay.cut_starting[static_cast<std::size_t>(up + 1)] = j;
            cur[q] = up + 1;
        }
    };
    for (std::size_t i = 0; i < L; ++i) {
        advance(i);
        const Gate& g = circuit.gates[i];
        if (g.kind == GateKind::CNOT && !lay.gate_cut_slot.contains(static_cast<int>(i)))
            uf.unite(cur[static_cast<std::size_t>(g.qubit)], cur[static_cast<std::size_t>(g.target)]);
    }
    advance(L);

    if (plan.empty())
        for (int s = 1; s < total; ++s) uf.unite(0, s);

    lay.fragment_of.assign(static_cast<std::size_t>(total), -1);
    lay.local_of.assign(static_cast<std::size_t>(total), -1);
    std::map<int, int> root_to_fragment;
    for (int s = 0; s < total; ++s) {
        const int root = uf.find(s);
        auto [it, inserted] = root_to_fragment.emplace(root, static_cast<int>(lay.fragments.fragments.size()));
        if (inserted) lay.fragments.fragments.emplace_back();
        auto& frag = lay.fragments.fragments[static_cast<std::size_t>(it->second)];
        lay.fragment_of[static_cast<std::size_t>(s)] = it->second;
        lay.local_of[static_cast<std::size_t>(s)] = static_cast<int>(frag.size());
        // Segment ids are ordered (qubit, index), so recover both.
        int q = n - 1;
        while (lay.seg_offset[static_cast<std::size_t>(q)] > s) --q;
        frag.push_back({q, s - lay.seg_offset[static_cast<std::size_t>(q)]});
    }
    return lay;
}

Gate relocate(Gate g, int local) {
    g.qubit = local;
    return g;
}

struct FragmentBuild {
    Circuit circuit;
    std::vector<std::size_t> measure_positions;
    std::vector<PauliFactor> observable;
};

std::vector<FragmentBuild> build_fragments(const Circuit& circuit, const CutPlan& plan, const Layout& lay,
                                           const std::vector<const CutTerm*>& terms,
                                           std::span<const PauliFactor> observable) {
    std::vector<FragmentBuild> out(lay.fragments.size());
    for (std::size_t f = 0; f < out.size(); ++f) out[f].circuit.n_qubits = lay.fragments.width(f);

    auto place = [&](int seg) -> std::pair<FragmentBuild&, int> {
        return {out[static_cast<std::size_t>(lay.fragment_of[static_cast<std::size_t>(seg)])],
                lay.local_of[static_cast<std::size_t>(seg)]};
    };
    auto emit = [&](int seg, const Gate& g) {
        auto [fb, local] = place(seg);
        if (g.kind == GateKind::Measure) fb.measure_positions.push_back(fb.circuit.gates.size());
        fb.circuit.gates.push_back(relocate(g, local));
    };

    for (int s = 0; s < lay.segment_count(); ++s) {
        const int j = lay.cut_starting[static_cast<std::size_t>(s)];
        if (j < 0) continue;
        const auto& v = std::get<WireCutVariant>(terms[static_cast<std::size_t>(j)]->substitution);
        emit(s, Gate::prepare(0, v.prepared));
    }

    std::vector<int> cur(lay.seg_offset);
    auto advance = [&](std::size_t pos) {
        for (int j : lay.cuts_at[pos]) ++cur[static_cast<std::size_t>(plan.wire_cuts[static_cast<std::size_t>(j)].qubit)];
    };
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        advance(i);
        const Gate& g = circuit.gates[i];
        const int seg_a = cur[static_cast<std::size_t>(g.qubit)];
        if (g.kind != GateKind::CNOT) {
            emit(seg_a, g);
            continue;
        }
        const int seg_b = cur[static_cast<std::size_t>(g.target)];
        auto slot = lay.gate_cut_slot.find(static_cast<int>(i));
        if (slot == lay.gate_cut_slot.end()) {
            auto [fb, local_c] = place(seg_a);
            Gate local = g;
            local.qubit = local_c;
            local.target = lay.local_of[static_cast<std::size_t>(seg_b)];
            fb.circuit.gates.push_back(local);
            continue;
        }
        const auto& v = std::get<GateCutVariant>(terms[slot->second]->substitution);
        for (const Gate& op : v.control_ops) emit(seg_a, op);
        for (const Gate& op : v.target_ops) emit(seg_b, op);
    }
    advance(circuit.gates.size());

    for (int s = 0; s < lay.segment_count(); ++s) {
        auto [fb, local] = place(s);
        const int j = lay.cut_ending[static_cast<std::size_t>(s)];
        if (j >= 0) {
            const auto& v = std::get<WireCutVariant>(terms[static_cast<std::size_t>(j)]->substitution);
            if (v.measured != Pauli::I) fb.observable.push_back({local, v.measured});
            continue;
        }
        int q = lay.n_qubits - 1;
        while (lay.seg_offset[static_cast<std::size_t>(q)] > s) --q;
        for (const PauliFactor& pf : observable)
            if (pf.qubit == q && pf.op != Pauli::I) fb.observable.push_back({local, pf.op});
    }
    return out;
}

void check_observable(const Circuit& circuit, std::span<const PauliFactor> observable) {
    std::set<int> seen;
    for (const auto& f : observable) {
        if (f.qubit < 0 || f.qubit >= circuit.n_qubits) throw InvalidArgument("observable qubit out of range");
        if (!seen.insert(f.qubit).second) throw InvalidArgument("duplicate qubit in observable");
    }
}

}  // namespace

void CutPlan::validate(const Circuit& circuit) const {
    try {
        circuit.validate();
    } catch (const InvalidCircuit& e) {
        throw InvalidPlan(std::string("circuit is invalid: ") + e.what());
    }
    for (const Gate& g : circuit.gates)
        if (!g.is_unitary()) throw InvalidPlan("only unitary circuits can be cut");
    const int L = static_cast<int>(circuit.gates.size());
    std::set<std::pair<int, int>> wires;
    for (const WireCut& w : wire_cuts) {
        if (w.after_gate < -1 || w.after_gate >= L)
            throw InvalidPlan("wire cut position " + std::to_string(w.after_gate) + " outside [-1, " +
                              std::to_string(L) + ")");
        if (w.qubit < 0 || w.qubit >= circuit.n_qubits)
            throw InvalidPlan("wire cut qubit " + std::to_string(w.qubit) + " out of range");
        if (!wires.insert({w.after_gate, w.qubit}).second) throw InvalidPlan("duplicate wire cut location");
    }
    std::set<int> gates;
    for (int g : gate_cuts) {
        if (!is_cut_target(circuit, g)) throw InvalidPlan("gate cut " + std::to_string(g) + " does not reference a CNOT");
        if (!gates.insert(g).second) throw InvalidPlan("gate " + std::to_string(g) + " cut twice");
    }
}

std::vector<CutTerm> expand_wire_cut(const WireCut& location) {
    if (location.after_gate < -1 || location.qubit < 0) throw InvalidPlan("invalid wire cut location");
    using P = PrepState;
    return {
        {+0.5, WireCutVariant{Pauli::I, P::ZPlus}},  {+0.5, WireCutVariant{Pauli::I, P::ZMinus}},
        {+0.5, WireCutVariant{Pauli::X, P::XPlus}},  {-0.5, WireCutVariant{Pauli::X, P::XMinus}},
        {+0.5, WireCutVariant{Pauli::Y, P::YPlus}},  {-0.5, WireCutVariant{Pauli::Y, P::YMinus}},
        {+0.5, WireCutVariant{Pauli::Z, P::ZPlus}},  {-0.5, WireCutVariant{Pauli::Z, P::ZMinus}},
    };
}

std::vector<CutTerm> expand_wire_cut(const Circuit& circuit, const WireCut& location) {
    CutPlan{{location}, {}}.validate(circuit);
    return expand_wire_cut(location);
}

std::vector<CutTerm> expand_gate_cut(const Circuit& circuit, int cnot_index) {
    if (!is_cut_target(circuit, cnot_index))
        throw InvalidPlan("gate " + std::to_string(cnot_index) + " is not a CNOT");
    // CZ = RZ(pi/2) x RZ(pi/2) * exp(i pi/4 Z x Z) up to phase; the trailing
    // rotations are folded into each term's angles.
    const Gate m = Gate::measure(0, Pauli::Z, +1);
    auto rz = [](double a) { return Gate::rz(0, a); };
    auto target = [](std::vector<Gate> ops) {
        ops.insert(ops.begin(), Gate::h(0));
        ops.push_back(Gate::h(0));
        return ops;
    };
    return {
        {+0.5, GateCutVariant{{rz(kPi / 2)}, target({rz(kPi / 2)})}},
        {+0.5, GateCutVariant{{rz(3 * kPi / 2)}, target({rz(3 * kPi / 2)})}},
        {+0.5, GateCutVariant{{m, rz(kPi / 2)}, target({})}},
        {-0.5, GateCutVariant{{m, rz(kPi / 2)}, target({rz(kPi)})}},
        {+0.5, GateCutVariant{{}, target({m, rz(kPi / 2)})}},
        {-0.5, GateCutVariant{{rz(kPi)}, target({m, rz(kPi / 2)})}},
    };
}

int FragmentMap::max_width() const {
    int w = 0;
    for (std::size_t f = 0; f < size(); ++f) w = std::max(w, width(f));
    return w;
}

FragmentMap analyze_fragments(const Circuit& circuit, const CutPlan& plan) {
    return make_layout(circuit, plan).fragments;
}

double combination_count(const CutPlan& plan) {
    return std::pow(static_cast<double>(kWireCutTerms), static_cast<double>(plan.wire_cuts.size())) *
           std::pow(static_cast<double>(kGateCutTerms), static_cast<double>(plan.gate_cuts.size()));
}

CutExpansion enumerate_subcircuits(const Circuit& circuit, const CutPlan& plan,
                                   std::span<const PauliFactor> observable) {
    const Layout lay = make_layout(circuit, plan);
    check_observable(circuit, observable);

    std::vector<std::vector<CutTerm>> per_cut;
    for (const WireCut& w : plan.wire_cuts) per_cut.push_back(expand_wire_cut(w));
    for (int g : plan.gate_cuts) per_cut.push_back(expand_gate_cut(circuit, g));

    CutExpansion ex;
    ex.plan = plan;
    ex.fragments = lay.fragments;
    const auto total = static_cast<std::size_t>(combination_count(plan));
    ex.combinations.reserve(total);

    std::vector<std::size_t> digits(per_cut.size(), 0);
    std::vector<const CutTerm*> chosen(per_cut.size());
    for (std::size_t c = 0; c < total; ++c) {
        CutCombination combo;
        for (std::size_t k = 0; k < per_cut.size(); ++k) {
            chosen[k] = &per_cut[k][digits[k]];
            combo.coefficient *= chosen[k]->coefficient;
        }
        combo.term_index = digits;

        auto frags = build_fragments(circuit, plan, lay, chosen, observable);
        for (std::size_t f = 0; f < frags.size(); ++f) {
            auto& fb = frags[f];
            const std::size_t n_branches = std::size_t{1} << fb.measure_positions.size();
            for (std::size_t b = 0; b < n_branches; ++b) {
                SubcircuitInstance inst;
                inst.combination = c;
                inst.fragment = f;
                inst.branch = b;
                inst.circuit = fb.circuit;
                for (std::size_t k = 0; k < fb.measure_positions.size(); ++k)
                    inst.circuit.gates[fb.measure_positions[k]].outcome = ((b >> k) & 1U) ? -1 : +1;
                inst.weight = (std::popcount(b) % 2 == 0) ? 1.0 : -1.0;
                inst.observable = fb.observable;
                ex.instances.push_back(std::move(inst));
            }
        }
        ex.combinations.push_back(std::move(combo));

        for (std::size_t k = per_cut.size(); k-- > 0;) {
            if (++digits[k] < per_cut[k].size()) break;
            digits[k] = 0;
        }
    }
    return ex;
}

double reconstruct(const CutExpansion& expansion, std::span<const std::optional<ExecutionResult>> results) {
    if (results.size() != expansion.instances.size())
        throw IncompleteResults("expected " + std::to_string(expansion.instances.size()) + " results, got " +
                                std::to_string(results.size()));
    const std::size_t n_frag = expansion.fragments.size();
    double total = 0.0;
    std::size_t at = 0;
    for (std::size_t c = 0; c < expansion.combinations.size(); ++c) {
        double product = expansion.combinations[c].coefficient;
        for (std::size_t f = 0; f < n_frag; ++f) {
            double frag_value = 0.0;
            bool any = false;
            while (at < expansion.instances.size() && expansion.instances[at].combination == c &&
                   expansion.instances[at].fragment == f) {
                if (!results[at])
                    throw IncompleteResults("missing result for combination " + std::to_string(c) + ", fragment " +
                                            std::to_string(f) + ", branch " +
                                            std::to_string(expansion.instances[at].branch));
                frag_value += expansion.instances[at].weight * results[at]->branch_weight * results[at]->expectation;
                any = true;
                ++at;
            }
            if (!any)
                throw IncompleteResults("no instances for combination " + std::to_string(c) + ", fragment " +
                                        std::to_string(f));
            product *= frag_value;
        }
        total += product;
    }
    return total;
}

ExecutionResult statevector_executor(const SubcircuitInstance& instance) {
    const GateResult r = run_circuit(instance.circuit, Statevector(instance.circuit.n_qubits));
    if (r.branch_weight == 0.0) return {0.0, 0.0};
    return {expectation_pauli_product(r.state, instance.observable), r.branch_weight};
}

CutExecution execute_cut(const Circuit& circuit, const CutPlan& plan, std::span<const PauliFactor> observable,
                         const SubcircuitExecutor& executor, int parallelism) {
    if (parallelism < 1) throw InvalidArgument("parallelism must be >= 1");
    const CutExpansion ex = enumerate_subcircuits(circuit, plan, observable);
    const std::size_t n = ex.instances.size();
    std::vector<std::optional<ExecutionResult>> results(n);
    std::vector<std::exception_ptr> errors(n);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = executor(ex.instances[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto n_threads = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(parallelism), n));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw ExecutorFailure(ex.instances[i].combination, e.what());
        } catch (...) {
            throw ExecutorFailure(ex.instances[i].combination, "unknown executor failure");
        }
    }

    CutExecution out;
    out.value = reconstruct(ex, results);
    out.combinations = ex.combinations.size();
    out.instances = n;
    out.max_fragment_width = ex.fragments.max_width();
    return out;
}

}  // namespace qse

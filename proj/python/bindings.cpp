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

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "qse/ansatz.hpp"
#include "qse/commands.hpp"
#include "qse/config.hpp"
#include "qse/cutting.hpp"
#include "qse/error.hpp"
#include "qse/sim/simulator.hpp"
#include "qse/statevector.hpp"

namespace py = pybind11;
using namespace qse;

namespace {

// Gates arrive as tuples: ("h", q), ("ry", q, theta), ("rz", q, theta),
// ("cnot", control, target).
Circuit to_circuit(int n_qubits, const std::vector<py::tuple>& gates) {
    Circuit c{n_qubits, {}};
    for (const auto& t : gates) {
        if (t.size() < 2) throw InvalidCircuit("gate tuple needs a name and a qubit");
        const auto name = t[0].cast<std::string>();
        const int q = t[1].cast<int>();
        if (name == "h" && t.size() == 2) {
            c.gates.push_back(Gate::h(q));
        } else if (name == "ry" && t.size() == 3) {
            c.gates.push_back(Gate::ry(q, t[2].cast<double>()));
        } else if (name == "rz" && t.size() == 3) {
            c.gates.push_back(Gate::rz(q, t[2].cast<double>()));
        } else if (name == "cnot" && t.size() == 3) {
            c.gates.push_back(Gate::cnot(q, t[2].cast<int>()));
        } else {
            throw InvalidCircuit("unknown gate tuple '" + name + "' of length " + std::to_string(t.size()));
        }
    }
    c.validate();
    return c;
}

// Observables are strings with one letter per qubit, qubit 0 first: "ZIX".
std::vector<PauliFactor> to_observable(const std::string& s) {
    std::vector<PauliFactor> out;
    for (std::size_t q = 0; q < s.size(); ++q) {
        switch (s[q]) {
            case 'I': break;
            case 'X': out.push_back({static_cast<int>(q), Pauli::X}); break;
            case 'Y': out.push_back({static_cast<int>(q), Pauli::Y}); break;
            case 'Z': out.push_back({static_cast<int>(q), Pauli::Z}); break;
            default: throw InvalidArgument(std::string("observable letter '") + s[q] + "' is not one of IXYZ");
        }
    }
    return out;
}

AnsatzSpec to_spec(int n_qubits, int depth, const std::string& first_rotation) {
    if (first_rotation != "Y" && first_rotation != "Z") throw InvalidArgument("first_rotation must be 'Y' or 'Z'");
    AnsatzSpec spec{n_qubits, depth, first_rotation == "Y" ? Rotation::Y : Rotation::Z};
    spec.validate();
    return spec;
}

py::dict metrics_dict(const sim::Metrics& m) {
    py::dict d;
    d["requests"] = m.requests;
    d["classified"] = m.classified;
    d["rejected"] = m.rejected;
    d["failed"] = m.failed;
    d["slo_violations"] = m.slo_violations;
    d["qnn_used"] = m.qnn_used;
    d["qnn_skipped"] = m.qnn_skipped;
    d["forwarded_to_cloud"] = m.forwarded_to_cloud;
    d["reroutes"] = m.reroutes;
    d["outages"] = m.outages;
    d["inter_domain_payload"] = m.inter_domain_payload;
    d["latency_mean_ms"] = m.latency_mean_ms;
    d["latency_p50_ms"] = m.latency_p50_ms;
    d["latency_p95_ms"] = m.latency_p95_ms;
    d["latency_p99_ms"] = m.latency_p99_ms;
    d["makespan_ms"] = m.makespan_ms;
    py::dict nodes;
    for (const auto& [id, n] : m.nodes) {
        py::dict e;
        e["busy_ms"] = n.busy_ms;
        e["utilization"] = n.utilization;
        e["services"] = n.services;
        nodes[py::str(id)] = e;
    }
    d["nodes"] = nodes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qse, m) {
    m.doc() = "Statevector simulation, QNN ansatz gradients, circuit cutting and the continuum simulator.";
    static py::exception<Error> qse_error(m, "QseError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(qse_error, e.what());
        }
    });

    m.def(
        "run_circuit",
        [](int n_qubits, const std::vector<py::tuple>& gates) {
            const auto r = run_circuit(to_circuit(n_qubits, gates), Statevector(n_qubits));
            const auto a = r.state.amplitudes();
            return py::array_t<Complex>(static_cast<py::ssize_t>(a.size()), a.data());
        },
        py::arg("n_qubits"), py::arg("gates"), "Amplitudes after running the circuit from |0...0>.");

    m.def(
        "expectation",
        [](int n_qubits, const std::vector<py::tuple>& gates, const std::string& observable) {
            const auto r = run_circuit(to_circuit(n_qubits, gates), Statevector(n_qubits));
            return expectation_pauli_product(r.state, to_observable(observable));
        },
        py::arg("n_qubits"), py::arg("gates"), py::arg("observable"));

    m.def(
        "ansatz_forward",
        [](int n_qubits, int depth, std::vector<double> angles, std::vector<double> x, const std::string& first_rotation) {
            return ansatz_forward(to_spec(n_qubits, depth, first_rotation), AnsatzParams{std::move(angles)}, x);
        },
        py::arg("n_qubits"), py::arg("depth"), py::arg("angles"), py::arg("x"), py::arg("first_rotation") = "Y");

    m.def(
        "parameter_shift_grad",
        [](int n_qubits, int depth, std::vector<double> angles, std::vector<double> x, const std::string& first_rotation) {
            const Matrix j =
                parameter_shift_grad(to_spec(n_qubits, depth, first_rotation), AnsatzParams{std::move(angles)}, x);
            py::array_t<double> out({static_cast<py::ssize_t>(j.rows), static_cast<py::ssize_t>(j.cols)});
            auto v = out.mutable_unchecked<2>();
            for (std::size_t r = 0; r < j.rows; ++r)
                for (std::size_t c = 0; c < j.cols; ++c)
                    v(static_cast<py::ssize_t>(r), static_cast<py::ssize_t>(c)) = j(r, c);
            return out;
        },
        py::arg("n_qubits"), py::arg("depth"), py::arg("angles"), py::arg("x"), py::arg("first_rotation") = "Y",
        "Jacobian of <Z_q>: angle columns in (layer, qubit) order, then the inputs.");

    m.def(
        "cut_expectation",
        [](int n_qubits, const std::vector<py::tuple>& gates, const std::string& observable,
           const std::vector<std::pair<int, int>>& wire_cuts, const std::vector<int>& gate_cuts, int parallelism) {
            CutPlan plan;
            for (const auto& [after, qubit] : wire_cuts) plan.wire_cuts.push_back({after, qubit});
            plan.gate_cuts = gate_cuts;
            const auto obs = to_observable(observable);
            const Circuit circuit = to_circuit(n_qubits, gates);
            CutExecution e;
            {
                py::gil_scoped_release release;
                e = execute_cut(circuit, plan, obs, statevector_executor, parallelism);
            }
            py::dict d;
            d["value"] = e.value;
            d["combinations"] = e.combinations;
            d["instances"] = e.instances;
            d["max_fragment_width"] = e.max_fragment_width;
            return d;
        },
        py::arg("n_qubits"), py::arg("gates"), py::arg("observable"), py::arg("wire_cuts") = std::vector<std::pair<int, int>>{},
        py::arg("gate_cuts") = std::vector<int>{}, py::arg("parallelism") = 1,
        "Wire cuts are (after_gate, qubit) pairs; gate cuts are CNOT indices.");

    m.def(
        "simulate",
        [](const std::string& config_json) {
            Json doc;
            try {
                doc = Json::parse(config_json);
            } catch (const Json::parse_error& e) {
                throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
            }
            const auto cfg = sim::parse_sim_config(doc);
            sim::SimResult r;
            {
                py::gil_scoped_release release;
                r = sim::simulate(cfg);
            }
            return py::make_tuple(sim::format_trace(r.trace, cfg.trace_sampling), metrics_dict(r.metrics));
        },
        py::arg("config_json"), "Runs a continuum simulation; returns (trace JSONL, metrics dict).");

    m.def(
        "run_command",
        [](const std::string& name, const std::filesystem::path& config, const std::filesystem::path& out,
           std::optional<std::uint64_t> seed, int parallelism) {
            CommandOptions opt{config, seed, out, parallelism};
            std::ostringstream report;
            int code = 0;
            {
                py::gil_scoped_release release;
                if (name == "gen-data") code = cmd_gen_data(opt, report);
                else if (name == "train") code = cmd_train(opt, report);
                else if (name == "gradcheck") code = cmd_gradcheck(opt, report);
                else if (name == "cut-verify") code = cmd_cut_verify(opt, report);
                else if (name == "simulate") code = cmd_simulate(opt, report);
                else throw InvalidArgument("unknown command '" + name + "'");
            }
            return py::make_tuple(code, report.str());
        },
        py::arg("name"), py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), py::arg("parallelism") = 1,
        "Same as the qse subcommand; returns (exit status, report text).");
}

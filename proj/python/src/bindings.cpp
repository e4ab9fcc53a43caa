// Copyright 2026 The qchan Authors
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
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>

#include "qchan/channel.hpp"
#include "qchan/circuit.hpp"
#include "qchan/measures.hpp"
#include "qchan/protocol.hpp"
#include "qchan/reductions.hpp"
#include "qchan/report.hpp"
#include "qchan/suites.hpp"

namespace py = pybind11;

namespace qchan {
namespace {

OptimizerConfig make_config(std::uint64_t seed, std::size_t restarts, std::size_t max_iters) {
  OptimizerConfig cfg;
  cfg.seed = seed;
  cfg.restarts = restarts;
  cfg.max_iters = max_iters;
  cfg.validate();
  return cfg;
}

// Reduction results cross as (first, second, report JSON text).
py::tuple pair_result(const CircuitPair& p) {
  return py::make_tuple(p.first, p.second, dump_json(to_json(p.report)));
}

py::tuple embedding_result(const Embedding& e) {
  return py::make_tuple(e.circuit, e.map_circuit, dump_json(to_json(e.report)));
}

}  // namespace
}  // namespace qchan

PYBIND11_MODULE(_core, m) {
  using namespace qchan;
  m.doc() = "Channel distances, circuit reductions and protocol simulation.";

  py::register_exception<ChannelError>(m, "ChannelError", PyExc_ValueError);
  auto circuit_error = py::register_exception<CircuitError>(m, "CircuitError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", circuit_error.ptr());
  py::register_exception<ResourceCapError>(m, "ResourceCapError", PyExc_MemoryError);

  py::class_<Channel>(m, "Channel")
      .def_static("from_kraus",
                  [](std::vector<Matrix> kraus, std::size_t din, std::size_t dout) {
                    return Channel::from_kraus(std::move(kraus), Dims{din}, Dims{dout});
                  },
                  py::arg("kraus"), py::arg("in_dim"), py::arg("out_dim"))
      .def_static("identity", [](std::size_t d) { return Channel::identity(Dims{d}); }, py::arg("dim"))
      .def_static("unitary", [](const Matrix& u) { return Channel::unitary(u, Dims{static_cast<std::size_t>(u.cols())}); },
                  py::arg("u"))
      .def_property_readonly("in_dim", &Channel::in_dim)
      .def_property_readonly("out_dim", &Channel::out_dim)
      .def_property_readonly("choi", &Channel::choi)
      .def("apply", [](const Channel& c, const Matrix& rho) { return c.apply(rho); }, py::arg("rho"));

  m.def("depolarizing_channel", &depolarizing_channel, py::arg("dim"));
  m.def("dephasing_channel", &dephasing_channel, py::arg("dim"));
  m.def("complement", &complement);
  m.def("compose", &compose, "phi after psi", py::arg("phi"), py::arg("psi"));
  m.def("tensor_channels", &tensor_channels);
  m.def("cptp_residual", &cptp_residual);
  m.def("choi_distance", &choi_distance);

  py::class_<Circuit>(m, "Circuit")
      .def(py::init<std::size_t>(), py::arg("num_inputs") = 0)
      .def_property_readonly("num_inputs", &Circuit::num_inputs)
      .def_property_readonly("num_outputs", &Circuit::num_outputs)
      .def_property_readonly("is_unitary", &Circuit::is_unitary)
      .def("__eq__", [](const Circuit& a, const Circuit& b) { return a == b; })
      .def("__str__", [](const Circuit& c) { return serialize(c); });

  m.def("parse", [](const std::string& text) { return parse(text); }, py::arg("text"));
  m.def("serialize", &serialize);
  m.def("depth", &depth);
  m.def("size", &size);
  m.def("to_channel", &to_channel);
  m.def("to_stinespring_form", &to_stinespring_form);
  m.def("digest", &digest);

  m.def("trace_norm", [](const Matrix& a) { return trace_norm(a); });
  m.def("fidelity", [](const Matrix& a, const Matrix& b) { return fidelity(a, b); });
  m.def("helstrom_success", [](const Matrix& a, const Matrix& b) { return helstrom(a, b).success; });
  m.def("von_neumann_entropy", [](const Matrix& a) { return von_neumann_entropy(a); });
  m.def("diamond_unitary_oracle", &diamond_unitary_oracle);

  const auto seed = py::arg("seed") = 0, restarts = py::arg("restarts") = 20, iters = py::arg("max_iters") = 200;
  m.def("diamond_distance",
        [](const Channel& a, const Channel& b, std::uint64_t s, std::size_t r, std::size_t it) {
          return diamond_distance(a, b, make_config(s, r, it)).value;
        },
        py::arg("phi1"), py::arg("phi2"), seed, restarts, iters);
  m.def("max_output_fidelity",
        [](const Channel& a, const Channel& b, std::uint64_t s, std::size_t r, std::size_t it) {
          return max_output_fidelity(a, b, make_config(s, r, it)).value;
        },
        py::arg("phi1"), py::arg("phi2"), seed, restarts, iters);
  m.def("min_output_entropy",
        [](const Channel& a, std::uint64_t s, std::size_t r, std::size_t it) {
          return min_output_entropy(a, make_config(s, r, it)).value;
        },
        py::arg("phi"), seed, restarts, iters);
  m.def("max_output_p_norm",
        [](const Channel& a, double p, std::uint64_t s, std::size_t r, std::size_t it) {
          return max_output_p_norm(a, p, make_config(s, r, it)).value;
        },
        py::arg("phi"), py::arg("p"), seed, restarts, iters);

  m.def("direct_product", [](const Circuit& a, const Circuit& b, std::size_t r) { return pair_result(direct_product(a, b, r)); });
  m.def("xor_mix", [](const Circuit& a, const Circuit& b, std::size_t r) { return pair_result(xor_mix(a, b, r)); });
  m.def("ci_to_qcd", [](const Circuit& a, const Circuit& b) { return pair_result(ci_to_qcd(a, b)); });
  m.def("ci_to_logdepth", [](const Circuit& a, const Circuit& b, std::size_t per) {
    return pair_result(ci_to_logdepth(a, b, per));
  }, py::arg("q1"), py::arg("q2"), py::arg("gates_per_piece") = 1);
  m.def("degradable_embed", [](const Circuit& q) { return embedding_result(degradable_embed(q)); });
  m.def("antidegradable_embed", [](const Circuit& q) { return embedding_result(antidegradable_embed(q)); });
  m.def("mixed_unitary_circuit", [](const Circuit& q, std::size_t extra) {
    const CircuitResult r = mixed_unitary_circuit(q, extra);
    return py::make_tuple(r.circuit, dump_json(to_json(r.report)));
  });

  m.def("run_protocol",
        [](const Circuit& a, const Circuit& b, const std::string& strategy, std::size_t resolution, std::uint64_t s) {
          ProverSpec prover;
          prover.kind = parse_strategy(strategy);
          prover.resolution = resolution;
          const ProtocolRun run = run_qcd_protocol(a, b, prover, make_config(s, 20, 200));
          return std::make_tuple(run.acceptance, run.distance);
        },
        py::arg("q1"), py::arg("q2"), py::arg("strategy") = "honest", py::arg("resolution") = 16, seed);

  m.def("suite_names", &suite_names);
  m.def("run_suite", [](const std::string& name, std::uint64_t s) {
    const SuiteResult r = run_suite(name, s);
    return std::make_tuple(r.passed(), dump_json(to_json(r)));
  }, py::arg("name"), seed);
}

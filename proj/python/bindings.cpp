// Copyright 2026 The gnmverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

#include <sstream>

#include "cli.hpp"
#include "gnm/analysis.hpp"
#include "gnm/config.hpp"
#include "gnm/errors.hpp"
#include "gnm/group_io.hpp"
#include "gnm/protocol.hpp"
#include "gnm/qsim.hpp"
#include "gnm/sampling.hpp"

namespace py = pybind11;
using namespace gnm;

namespace {

ProverStrategy strategy_from(const std::string& json_text, const FiniteGroup& group, const ProtocolConfig& config) {
  return parse_strategy(nlohmann::json::parse(json_text), group, config.junk_dims);
}

PureState single_register(const Eigen::VectorXcd& amplitudes) {
  return PureState(1, static_cast<std::size_t>(amplitudes.size()), amplitudes);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact simulation of the shallow-circuit group non-membership protocol";
  m.attr("__version__") = GNM_VERSION;

  py::register_exception<NotAGroup>(m, "NotAGroup", PyExc_ValueError);
  py::register_exception<TooLargeForExact>(m, "TooLargeForExact", PyExc_ValueError);
  py::register_exception<StrategyDimensionMismatch>(m, "StrategyDimensionMismatch", PyExc_ValueError);

  py::class_<FiniteGroup, std::shared_ptr<FiniteGroup>>(m, "FiniteGroup")
      .def_static(
          "from_table",
          [](const FiniteGroup::Table& table, std::vector<std::string> names) {
            return std::make_shared<FiniteGroup>(FiniteGroup::from_table(table, std::move(names)));
          },
          py::arg("table"), py::arg("names") = std::vector<std::string>{})
      .def_property_readonly("order", &FiniteGroup::order)
      .def_property_readonly("label_bits", &FiniteGroup::label_bits)
      .def_property_readonly("names", &FiniteGroup::names)
      .def_property_readonly("identity", [](const FiniteGroup& g) { return g.name(g.identity()); })
      .def_property_readonly("fingerprint", &FiniteGroup::fingerprint)
      .def("mult",
           [](const FiniteGroup& g, const std::string& a, const std::string& b) {
             return g.name(g.mult(g.element(a), g.element(b)));
           })
      .def("inverse", [](const FiniteGroup& g, const std::string& a) { return g.name(g.inverse(g.element(a))); })
      .def("element_order", [](const FiniteGroup& g, const std::string& a) { return g.element_order(g.element(a)); })
      .def("table", &FiniteGroup::table_rows);

  py::class_<Subgroup>(m, "Subgroup")
      .def_property_readonly("size", &Subgroup::size)
      .def_property_readonly("elements",
                             [](const Subgroup& s) {
                               std::vector<std::string> out;
                               for (Element e : s.elements()) out.push_back(s.parent().name(e));
                               return out;
                             })
      .def_property_readonly("cosets",
                             [](const Subgroup& s) {
                               std::vector<std::vector<std::string>> out;
                               for (const auto& block : s.cosets()) {
                                 std::vector<std::string> b;
                                 for (Element e : block) b.push_back(s.parent().name(e));
                                 out.push_back(b);
                               }
                               return out;
                             })
      .def("contains", [](const Subgroup& s, const std::string& x) { return s.contains(s.parent().element(x)); });

  py::class_<GroupDefinition>(m, "GroupDefinition")
      .def_property_readonly("group", [](const GroupDefinition& d) { return std::const_pointer_cast<FiniteGroup>(d.group); })
      .def_property_readonly("subgroup_names",
                             [](const GroupDefinition& d) {
                               std::vector<std::string> out;
                               for (const auto& [k, v] : d.subgroups) out.push_back(k);
                               return out;
                             })
      .def("subgroup", &resolve_named_subgroup, py::arg("name"))
      .def("closure", &resolve_subgroup, py::arg("generators"));

  m.def("bundled_group", &bundled_group, py::arg("name"));
  m.def("bundled_group_names", &bundled_group_names);
  m.def("load_group", [](const std::string& path) { return load_group_file(path); }, py::arg("path"));

  py::class_<ProtocolConfig>(m, "ProtocolConfig")
      .def(py::init<>())
      .def_readwrite("m", &ProtocolConfig::m)
      .def_readwrite("junk_dims", &ProtocolConfig::junk_dims)
      .def_readwrite("seed", &ProtocolConfig::seed)
      .def_readwrite("trials", &ProtocolConfig::trials)
      .def_readwrite("threads", &ProtocolConfig::threads)
      .def_property(
          "test_elements", [](const ProtocolConfig& c) { return to_string(c.test_elements); },
          [](ProtocolConfig& c, const std::string& s) { c.test_elements = test_elements_from_string(s); })
      .def(
          "set_noise",
          [](ProtocolConfig& c, double visibility, double state_fidelity_mix) {
            NoiseSpec n{visibility, state_fidelity_mix};
            n.validate();
            c.noise = n;
          },
          py::arg("visibility") = 1.0, py::arg("state_fidelity_mix") = 1.0)
      .def(
          "set_sampler",
          [](ProtocolConfig& c, const std::string& kind, std::uint32_t length, std::uint64_t seed) {
            c.sampler.kind = sampler_kind_from_string(kind);
            c.sampler.subproduct_length = length;
            c.sampler.seed = seed;
            c.sampler.validate();
          },
          py::arg("kind"), py::arg("length") = 16, py::arg("seed") = 0);

  m.def(
      "coset_proof_state",
      [](const Subgroup& s, const std::string& alpha, std::size_t junk_dims) {
        return Eigen::VectorXcd(coset_proof_state(s, s.parent().element(alpha), junk_dims).amplitudes());
      },
      py::arg("subgroup"), py::arg("alpha"), py::arg("junk_dims") = 0);
  m.def(
      "core_circuit_p1",
      [](const Eigen::VectorXcd& amplitudes, const FiniteGroup& g, const std::string& mult) {
        return core_circuit(single_register(amplitudes), 0, g, g.element(mult)).p1;
      },
      py::arg("amplitudes"), py::arg("group"), py::arg("g"));
  m.def(
      "core_probability_closed_form",
      [](const Eigen::VectorXcd& amplitudes, const FiniteGroup& g, const std::string& mult) {
        return core_probability_closed_form(single_register(amplitudes), g, g.element(mult));
      },
      py::arg("amplitudes"), py::arg("group"), py::arg("g"));

  m.def(
      "_exact_accept_probability",
      [](const std::string& strategy, const std::string& g, const Subgroup& s, const ProtocolConfig& c) {
        return exact_accept_probability(strategy_from(strategy, s.parent(), c), s.parent().element(g), s, c);
      },
      py::arg("strategy"), py::arg("g"), py::arg("subgroup"), py::arg("config"));
  m.def(
      "_monte_carlo",
      [](const std::string& strategy, const std::string& g, const Subgroup& s, const ProtocolConfig& c) {
        const MonteCarloEstimate e =
            monte_carlo(strategy_from(strategy, s.parent(), c), s.parent().element(g), s, c);
        py::dict d;
        d["trials"] = e.trials;
        d["accepted"] = e.accepted;
        d["accept_rate"] = e.accept_rate;
        d["std_error"] = e.std_error;
        d["test_pass_rate"] = e.test_pass_rate;
        d["rsi_accept_rate"] = e.rsi_accept_rate;
        d["prove_rate"] = e.prove_rate;
        return d;
      },
      py::arg("strategy"), py::arg("g"), py::arg("subgroup"), py::arg("config"));
  m.def(
      "optimal_cheat_probability",
      [](const std::string& g, const Subgroup& s, const ProtocolConfig& c) {
        return optimal_cheat_probability(s.parent().element(g), s, c);
      },
      py::arg("g"), py::arg("subgroup"), py::arg("config"));

  m.def("soundness_bound", &soundness_bound, py::arg("m"));
  m.def("klein_soundness_bound", &klein_soundness_bound, py::arg("m"));
  m.def("k_factor", &k_factor, py::arg("order"));
  m.def("pass_soundness_bound", &pass_soundness_bound, py::arg("test_pass_prob"), py::arg("order"),
        py::arg("subgroup_size"), py::arg("n"));
  m.def("reserved_pass_bound", &reserved_pass_bound, py::arg("overall_pass"), py::arg("m"));
  m.def(
      "omax_closed_form", [](std::size_t n, double b, double l) { return omax_closed_form({n, b, l}); },
      py::arg("n"), py::arg("b"), py::arg("l"));
  m.def(
      "omax_bruteforce",
      [](std::size_t n, double b, double l, std::size_t starts, std::uint64_t seed) {
        return omax_bruteforce({n, b, l}, 1e-10, starts, seed).value;
      },
      py::arg("n"), py::arg("b"), py::arg("l"), py::arg("starts") = 64, py::arg("seed") = 1);
  m.def(
      "gap_optimize",
      [](double p_prove, double q_test, const std::string& bound, std::size_t m_lo, std::size_t m_hi) {
        std::function<double(std::size_t)> f;
        if (bound == "klein") {
          f = klein_soundness_bound;
        } else if (bound == "generic") {
          f = soundness_bound;
        } else {
          throw std::invalid_argument("bound must be 'klein' or 'generic'");
        }
        const GapResult r = gap_optimize(p_prove, q_test, f, m_lo, m_hi);
        return py::make_tuple(r.m_star, r.gap_star);
      },
      py::arg("p_prove"), py::arg("q_test"), py::arg("bound") = "klein", py::arg("m_lo") = 2,
      py::arg("m_hi") = 200);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = gnm::cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}

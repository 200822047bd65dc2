#include <map>
#include <set>
#include <string>
#include <vector>

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spinfactor/anneal.hpp"
#include "spinfactor/circuit.hpp"
#include "spinfactor/experiments/commands.hpp"
#include "spinfactor/experiments/config.hpp"
#include "spinfactor/ising.hpp"
#include "spinfactor/oracle.hpp"
#include "spinfactor/spin_logic.hpp"

namespace py = pybind11;
using namespace spinfactor;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

SpinConfig config_of(const std::vector<int>& spins) {
  std::vector<Spin> s(spins.begin(), spins.end());
  return SpinConfig(std::move(s));
}

std::vector<int> spins_of(const SpinConfig& c) { return {c.spins().begin(), c.spins().end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spin-logic integer factorization core";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<InfeasibleRelation>(m, "InfeasibleRelation", PyExc_RuntimeError);
  py::register_exception<experiments::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<IsingModel>(m, "IsingModel")
      .def(py::init([](std::size_t n, std::vector<double> h,
                       const std::vector<std::tuple<std::size_t, std::size_t, double>>& couplings,
                       std::vector<std::string> labels) {
             std::vector<Coupling> cs;
             for (const auto& [i, j, v] : couplings) cs.push_back({i, j, v});
             return IsingModel(n, std::move(h), std::move(cs), std::move(labels));
           }),
           py::arg("n"), py::arg("h"), py::arg("couplings") = std::vector<std::tuple<std::size_t, std::size_t, double>>{},
           py::arg("labels") = std::vector<std::string>{})
      .def_property_readonly("size", &IsingModel::size)
      .def_property_readonly("h", [](const IsingModel& model) {
        return std::vector<double>(model.h().begin(), model.h().end());
      })
      .def_property_readonly("couplings", [](const IsingModel& model) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        for (const auto& c : model.couplings()) out.emplace_back(c.i, c.j, c.value);
        return out;
      })
      .def_property_readonly("labels", &IsingModel::labels)
      .def("coupling", &IsingModel::coupling)
      .def("max_abs_coefficient", &IsingModel::max_abs_coefficient)
      .def("to_json", [](const IsingModel& model) { return to_py(model_to_json(model)); })
      .def_static("from_json", [](const py::object& o) { return model_from_json(from_py(o)); })
      .def("with_offsets", [](const IsingModel& model, const std::map<std::size_t, double>& offs) {
        return with_offsets(model, offs);
      })
      .def("__len__", &IsingModel::size)
      .def(py::self == py::self);

  m.def("energy", [](const IsingModel& model, const std::vector<int>& s) { return energy(model, config_of(s)); },
        py::arg("model"), py::arg("spins"));
  m.def("delta_energy",
        [](const IsingModel& model, const std::vector<int>& s, std::size_t k) {
          return delta_energy(model, config_of(s), k);
        },
        py::arg("model"), py::arg("spins"), py::arg("k"));

  py::class_<RelationSpec>(m, "Relation")
      .def_readonly("name", &RelationSpec::name)
      .def_readonly("k", &RelationSpec::k)
      .def_readonly("names", &RelationSpec::names)
      .def_readonly("valid", &RelationSpec::valid)
      .def("contains", &RelationSpec::contains);
  m.def("mu_relation", &mu_relation);
  m.def("relation_from_rows",
        [](std::string name, std::vector<std::string> names, std::vector<std::uint32_t> rows) {
          const std::set<std::uint32_t> valid(rows.begin(), rows.end());
          return relation_from_predicate(std::move(name), std::move(names),
                                         [&](std::uint32_t row) { return valid.count(row) > 0; });
        },
        py::arg("name"), py::arg("names"), py::arg("rows"),
        "Relation whose valid rows are the given bit masks (bit v = variable v).");

  py::class_<SynthesisResult>(m, "SynthesisResult")
      .def_readonly("relation_name", &SynthesisResult::relation_name)
      .def_readonly("model", &SynthesisResult::model)
      .def_readonly("ground_energy", &SynthesisResult::ground_energy)
      .def_readonly("gap", &SynthesisResult::gap)
      .def_readonly("coeff_bound", &SynthesisResult::coeff_bound)
      .def_readonly("raw_gap", &SynthesisResult::raw_gap);
  m.def("synthesize", &synthesize, py::arg("relation"), py::arg("gap_target") = 1.0,
        py::arg("coeff_bound") = 8.0);
  m.def("verify_degenerate_ground",
        [](const RelationSpec& rel, const IsingModel& model, double tol) {
          return to_py(verification_json(rel, verify_degenerate_ground(rel, model, tol)));
        },
        py::arg("relation"), py::arg("model"), py::arg("tol") = 1e-9);

  py::class_<CircuitLayout>(m, "CircuitLayout")
      .def_readonly("n_bits", &CircuitLayout::n_bits)
      .def_readonly("p_bits", &CircuitLayout::p_bits)
      .def_readonly("boundary_zero", &CircuitLayout::boundary_zero)
      .def("label", &CircuitLayout::label)
      .def("to_json", [](const CircuitLayout& l) { return to_py(layout_to_json(l)); });
  m.def("build_factorizer", py::overload_cast<const SynthesisResult&, double>(&build_factorizer),
        py::arg("mu"), py::arg("r"));
  m.def("apply_problem",
        [](const IsingModel& model, const CircuitLayout& layout, unsigned P, double alpha, double beta,
           std::vector<std::size_t> beta_spins) {
          return apply_problem(model, layout, {P, alpha, beta, std::move(beta_spins)});
        },
        py::arg("model"), py::arg("layout"), py::arg("P"), py::arg("alpha"), py::arg("beta"),
        py::arg("beta_spins") = std::vector<std::size_t>{});
  m.def("readout_factors",
        [](const std::vector<int>& s, const CircuitLayout& layout, unsigned P) {
          const auto r = readout_factors(config_of(s), layout, P);
          return py::dict(py::arg("M") = r.M, py::arg("N") = r.N, py::arg("P_read") = r.P_read,
                          py::arg("success") = r.success, py::arg("chain_ok_fraction") = r.chain_ok_fraction);
        },
        py::arg("spins"), py::arg("layout"), py::arg("P"));
  m.def("cq_triple", &cq_triple, py::arg("r"), py::arg("bias_q1"));

  py::class_<Schedule>(m, "Schedule")
      .def(py::init([](const std::string& engine, std::size_t sweeps, double t_start, double t_end,
                       const std::string& interpolation, double a_start, double b_end, double width) {
             Schedule s;
             s.engine = engine_from_string(engine);
             s.sweeps = sweeps;
             s.t_start = t_start;
             s.t_end = t_end;
             s.interpolation = interpolation_from_string(interpolation);
             s.a_start = a_start;
             s.b_end = b_end;
             s.proposal_width = width;
             s.validate();
             return s;
           }),
           py::arg("engine") = "sa", py::arg("sweeps") = 2000, py::arg("t_start") = 2.0,
           py::arg("t_end") = 0.05, py::arg("interpolation") = "geometric", py::arg("a_start") = 2.0,
           py::arg("b_end") = 1.0, py::arg("proposal_width") = 0.3)
      .def_readonly("sweeps", &Schedule::sweeps)
      .def("temperature", &Schedule::temperature);

  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));
  m.def("anneal_once",
        [](const IsingModel& model, const Schedule& s, std::uint64_t seed) {
          const auto r = anneal_once(model, s, seed);
          return py::make_tuple(spins_of(r.config), r.energy);
        },
        py::arg("model"), py::arg("schedule"), py::arg("seed"));
  m.def("sample",
        [](const IsingModel& model, const Schedule& s, std::size_t runs, std::uint64_t seed, unsigned workers) {
          SampleSet set;
          {
            py::gil_scoped_release release;
            set = sample(model, s, runs, seed, workers);
          }
          py::list configs, energies;
          for (const auto& r : set.records) {
            configs.append(spins_of(r.config));
            energies.append(r.energy);
          }
          return py::dict(py::arg("configs") = configs, py::arg("energies") = energies,
                          py::arg("counts") = set.counts);
        },
        py::arg("model"), py::arg("schedule"), py::arg("runs"), py::arg("seed"), py::arg("workers") = 1);

  m.def("ground_states",
        [](const IsingModel& model, const std::map<std::size_t, int>& fixed, double epsilon, bool allow_large,
           unsigned workers) {
          OracleOptions opts;
          opts.epsilon = epsilon;
          opts.allow_large = allow_large;
          opts.workers = workers;
          GroundReport rep;
          {
            py::gil_scoped_release release;
            rep = ground_states_clamped(model, fixed, opts);
          }
          return to_py(ground_report_json(rep));
        },
        py::arg("model"), py::arg("fixed") = std::map<std::size_t, int>{}, py::arg("epsilon") = 1e-6,
        py::arg("allow_large") = false, py::arg("workers") = 0);

  m.def("default_config", [](const std::string& command) {
    return to_py(experiments::default_config(command).to_json());
  });
  m.def("run_command",
        [](const py::object& config, const std::filesystem::path& out_dir) {
          const auto cfg = experiments::config_from_json(from_py(config));
          std::filesystem::create_directories(out_dir);
          experiments::CommandResult res;
          {
            py::gil_scoped_release release;
            res = experiments::run_command(cfg, out_dir);
          }
          return py::make_tuple(res.exit_code, to_py(res.summary));
        },
        py::arg("config"), py::arg("out_dir"));
}

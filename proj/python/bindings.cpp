#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "symgap/audit.hpp"
#include "symgap/error.hpp"
#include "symgap/experiments.hpp"
#include "symgap/extensions.hpp"
#include "symgap/instances.hpp"
#include "symgap/mechanisms.hpp"
#include "symgap/setfn.hpp"

namespace py = pybind11;
using namespace symgap;

namespace {

ItemSet to_set(std::size_t m, const std::vector<std::size_t>& items) {
  return ItemSet::from_items(m, std::span<const std::size_t>(items));
}

EstimatorMode parse_mode(const std::string& mode) {
  if (mode == "monte_carlo") return EstimatorMode::monte_carlo;
  if (mode == "exact_enum") return EstimatorMode::exact_enum;
  if (mode == "exact_blockwise") return EstimatorMode::exact_blockwise;
  throw UsageError("unknown estimator mode '" + mode + "'");
}

std::vector<QueryHandle> handles(const std::vector<ValuationOracle>& vs) { return make_handles(vs); }

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Symmetry-gap experiments: value oracles, extensions, mechanisms and audits.";

  py::register_exception<UsageError>(mod, "UsageError", PyExc_ValueError);
  py::register_exception<ConstructionError>(mod, "ConstructionError", PyExc_ValueError);
  py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);
  py::register_exception<RangeError>(mod, "RangeError", PyExc_ArithmeticError);

  py::class_<ValuationOracle>(mod, "Oracle")
      .def_property_readonly("ground_size", &ValuationOracle::ground_size)
      .def_property_readonly("query_count", &ValuationOracle::query_count)
      .def("__call__", [](const ValuationOracle& f, const std::vector<std::size_t>& items) {
        return f.eval(to_set(f.ground_size(), items));
      })
      .def("descriptor_json", [](const ValuationOracle& f) { return f.descriptor().dump(); })
      .def("with_fresh_counter", &ValuationOracle::with_fresh_counter);

  mod.def("additive", &make_additive, py::arg("weights"));
  mod.def("budget_additive", &make_budget_additive, py::arg("weights"), py::arg("budget"));
  mod.def("coverage", &make_coverage, py::arg("universe_weights"), py::arg("cover_map"));
  mod.def("polar", [](std::size_t m, const std::vector<std::size_t>& desired, double omega) {
    return make_polar(to_set(m, desired), omega);
  }, py::arg("m"), py::arg("desired"), py::arg("omega"));
  mod.def("product", &compose_product, py::arg("f1"), py::arg("f2"));
  // fn receives the sorted item list
  mod.def("custom", [](std::size_t m, std::string name, std::function<double(std::vector<std::size_t>)> fn) {
    return make_custom(m, std::move(name), [fn](const ItemSet& s) {
      py::gil_scoped_acquire gil;
      return fn(s.items());
    });
  }, py::arg("m"), py::arg("name"), py::arg("fn"));
  mod.def("symgap_valuation",
          [](std::size_t m, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
             double alpha, double beta) {
            return make_symgap_valuation(to_set(m, a), to_set(m, b), Phi::alpha(alpha), beta);
          },
          py::arg("m"), py::arg("a"), py::arg("b"), py::arg("alpha"), py::arg("beta"));
  mod.def("gap_instance", &make_gap_instance, py::arg("block_size"), py::arg("alpha"));
  mod.def("from_descriptor_json", [](const std::string& s) { return oracle_from_descriptor(Json::parse(s)); });

  mod.def("phi_alpha", &phi_alpha, py::arg("alpha"), py::arg("t"));
  mod.def("psi", [](double alpha, double x, double y) { return psi(Phi::alpha(alpha), x, y); },
          py::arg("alpha"), py::arg("x"), py::arg("y"));
  mod.def("psi_tilde",
          [](double alpha, double beta, double x, double y) { return psi_tilde(Phi::alpha(alpha), beta, x, y); },
          py::arg("alpha"), py::arg("beta"), py::arg("x"), py::arg("y"));

  mod.def("check_monotone_submodular_json",
          [](const ValuationOracle& f, bool sampled, std::size_t samples, std::uint64_t seed) {
            VerifyOptions o;
            o.sampled = sampled;
            o.samples = samples;
            o.seed = seed;
            return check_monotone_submodular(f, o).to_json().dump();
          },
          py::arg("f"), py::arg("sampled") = false, py::arg("samples") = 100000, py::arg("seed") = 0);

  mod.def("multilinear_F",
          [](const ValuationOracle& f, std::vector<double> x, const std::string& mode, std::size_t samples,
             std::uint64_t seed) {
            const Estimate e = multilinear_F(f, FractionalPoint(std::move(x)), {parse_mode(mode), samples, seed, 1});
            return py::make_tuple(e.value, e.std_error);
          },
          py::arg("f"), py::arg("x"), py::arg("mode") = "exact_enum", py::arg("samples") = 100000,
          py::arg("seed") = 0);
  mod.def("f_exp",
          [](const ValuationOracle& f, std::vector<double> x, const std::string& mode, std::size_t samples,
             std::uint64_t seed) {
            const Estimate e = f_exp(f, FractionalPoint(std::move(x)), {parse_mode(mode), samples, seed, 1});
            return py::make_tuple(e.value, e.std_error);
          },
          py::arg("f"), py::arg("x"), py::arg("mode") = "exact_enum", py::arg("samples") = 100000,
          py::arg("seed") = 0);

  mod.def("greedy_cpp", [](const std::vector<ValuationOracle>& vs, std::size_t k) {
    return greedy_cpp(handles(vs), k).items();
  }, py::arg("players"), py::arg("k"));
  mod.def("exhaustive_opt_cpp", [](const std::vector<ValuationOracle>& vs, std::size_t k) {
    const CppSolution s = exhaustive_opt_cpp(handles(vs), k);
    return py::make_tuple(s.set.items(), s.value);
  }, py::arg("players"), py::arg("k"));
  mod.def("vcg_auction", [](const std::vector<ValuationOracle>& vs) {
    const Outcome o = vcg_auction_exhaustive(handles(vs));
    std::vector<std::vector<std::size_t>> bundles;
    for (const auto& b : o.allocation) bundles.push_back(b.items());
    return py::make_tuple(bundles, o.payments);
  }, py::arg("players"));
  mod.def("poisson_midr_json", [](const ValuationOracle& f, std::size_t k, bool force) {
    PoissonMidrConfig cfg;
    cfg.force = force;
    return poisson_midr_cpp(f, k, cfg).to_json().dump();
  }, py::arg("f"), py::arg("k"), py::arg("force") = false);

  mod.def("separate_quadrant_json",
          [](const std::vector<std::pair<double, double>>& pts, std::pair<double, double> target) {
            std::vector<MenuPoint> ps;
            for (auto [q, p] : pts) ps.push_back({q, p});
            const SeparationResult r = separate_quadrant(ps, {target.first, target.second});
            Json j;
            if (const auto* w = std::get_if<SeparationWitness>(&r)) {
              j = {{"branch", "witness"}, {"q", w->point.q}, {"p", w->point.p}, {"weights", w->weights}};
            } else {
              const auto& l = std::get<SeparationLine>(r);
              j = {{"branch", "line"}, {"lambda_q", l.lambda_q}, {"lambda_p", l.lambda_p}, {"margin", l.margin}};
            }
            return j.dump();
          },
          py::arg("points"), py::arg("target"));

  mod.def("experiment_names", [] {
    std::vector<std::string> out;
    for (const auto& e : experiments()) out.push_back(e.name);
    return out;
  });
  mod.def("run_experiment_json",
          [](const std::string& name, const std::string& params, std::uint64_t seed, std::size_t workers) {
            ExperimentConfig c;
            c.experiment = name;
            c.params = Json::parse(params);
            c.seed = seed;
            c.workers = workers;
            py::gil_scoped_release release;
            return run_experiment(c).dump();
          },
          py::arg("name"), py::arg("params") = "{}", py::arg("seed") = 1, py::arg("workers") = 1);
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "clutter_em/em.hpp"
#include "clutter_em/error.hpp"
#include "clutter_em/eval.hpp"
#include "clutter_em/init.hpp"
#include "clutter_em/io.hpp"
#include "clutter_em/scenario.hpp"

namespace py = pybind11;
using namespace clutter;

namespace {

json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what, e.what());
  }
}

SnapshotSet snapshots(const CMatrix& z) { return SnapshotSet(z); }

}  // namespace

PYBIND11_MODULE(_clutter_em, m) {
  m.doc() = "EM clustering of radar range bins into clutter classes";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataFormatError>(m, "DataFormatError", base.ptr());
  py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ClassCollapseError>(m, "ClassCollapseError", numerical.ptr());

  m.def("covar_ar1", [](int n, double rho) { return CMatrix(covar_ar1(n, rho).matrix()); }, py::arg("n"),
        py::arg("rho"));
  m.def("steering_vector", &steering_vector, py::arg("n"), py::arg("theta_deg"));
  m.def(
      "covar_patches",
      [](int n, const std::vector<double>& angles, double sigma_c2, double sigma_n2) {
        return CMatrix(covar_patches(n, angles, sigma_c2, sigma_n2).matrix());
      },
      py::arg("n"), py::arg("angles_deg"), py::arg("sigma_c2"), py::arg("sigma_n2"));

  m.def(
      "generate",
      [](const std::string& scenario) {
        const auto data = generate(scenario_from_json(parse(scenario, "scenario")));
        return py::make_tuple(CMatrix(data.snapshots.data()), data.true_labels,
                              to_json(data.true_params).dump());
      },
      py::arg("scenario_json"),
      "Returns (Z, labels, true_params_json). Z holds one range bin per column.");

  m.def(
      "log_likelihood",
      [](const CMatrix& z, const std::string& params) {
        return log_likelihood(snapshots(z), mixture_params_from_json(parse(params, "params")));
      },
      py::arg("z"), py::arg("params_json"));

  m.def(
      "e_step",
      [](const CMatrix& z, const std::string& params) {
        return RMatrix(e_step(snapshots(z), mixture_params_from_json(parse(params, "params"))).table());
      },
      py::arg("z"), py::arg("params_json"));

  m.def(
      "fit",
      [](const CMatrix& z, const std::string& fit, std::uint64_t init_seed) {
        const SnapshotSet s = snapshots(z);
        const FitConfig cfg = fit_config_from_json(parse(fit, "fit"));
        InitRecipe recipe;
        recipe.seed = init_seed;
        FitResult result;
        {
          py::gil_scoped_release release;
          result = run_em(s, cfg, resolve_init(recipe, s, cfg));
        }
        return to_json(result).dump();
      },
      py::arg("z"), py::arg("fit_json"), py::arg("init_seed") = 0, "Returns the fit result as a JSON string.");

  m.def(
      "classification_error",
      [](const std::vector<int>& estimated, const std::vector<int>& truth, const std::string& matching) {
        return classification_error(estimated, truth, matching_from_string(matching));
      },
      py::arg("estimated"), py::arg("truth"), py::arg("matching") = "PowerOrder");

  m.def(
      "rmsce", [](const std::vector<int>& counts) { return rmsce(counts); }, py::arg("error_counts"));

  m.def(
      "monte_carlo",
      [](const std::string& scenario, const std::string& fit, int trials, std::uint64_t seed,
         const std::string& matching, unsigned threads) {
        const auto sc = scenario_from_json(parse(scenario, "scenario"));
        const auto fc = fit_config_from_json(parse(fit, "fit"));
        MonteCarloOptions options{matching_from_string(matching), threads, true};
        BenchmarkReport report;
        {
          py::gil_scoped_release release;
          report = monte_carlo(sc, fc, trials, seed, options);
        }
        return canonical_dump(to_json(report));
      },
      py::arg("scenario_json"), py::arg("fit_json"), py::arg("trials"), py::arg("seed"),
      py::arg("matching") = "PowerOrder", py::arg("threads") = 1,
      "Returns the canonical benchmark report as a JSON string.");
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rmsgof/montecarlo.hpp"
#include "rmsgof/statistic.hpp"

namespace py = pybind11;
using namespace rmsgof;

namespace {

std::shared_ptr<const Model> model_from_name(const std::string& name, std::size_t zipf_bins,
                                             double poisson_theta, double epsilon) {
  if (name == "contingency2x2") return make_contingency2x2();
  if (name == "zipf") return make_zipf(zipf_bins);
  if (name == "poisson") return make_poisson(poisson_theta, epsilon);
  throw Error(errc::bad_input, "unknown model `" + name + "`");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Asymptotic confidence levels for the root-mean-square goodness-of-fit test "
            "with a maximum-likelihood-estimated parameter";

  py::register_exception<Error>(m, "RmsgofError");

  py::class_<Model, std::shared_ptr<Model>>(m, "Model")
      .def_property_readonly("name", &Model::name)
      .def_property_readonly("n_bins", &Model::n_bins)
      .def("probabilities", &Model::probabilities, py::arg("theta"))
      .def("dlog_probabilities", &Model::dlog_probabilities, py::arg("theta"))
      .def("mle", &Model::mle, py::arg("fractions"));

  py::class_<BinCounts>(m, "BinCounts")
      .def(py::init([](std::vector<std::uint64_t> counts, std::uint64_t overflow) {
             BinCounts c;
             c.counts = std::move(counts);
             c.overflow = overflow;
             return c;
           }),
           py::arg("counts"), py::arg("overflow") = 0)
      .def_readonly("counts", &BinCounts::counts)
      .def_readonly("overflow", &BinCounts::overflow)
      .def_property_readonly("m", &BinCounts::total);

  py::class_<VarianceSpectrum>(m, "VarianceSpectrum")
      .def_readonly("variances", &VarianceSpectrum::variances)
      .def_readonly("eigenvalues", &VarianceSpectrum::eigenvalues)
      .def_readonly("zero_count", &VarianceSpectrum::zero_count)
      .def_readonly("condition_diag", &VarianceSpectrum::condition_diag);

  py::class_<QuadratureReport>(m, "QuadratureReport")
      .def_readonly("value", &QuadratureReport::value)
      .def_readonly("nodes_used", &QuadratureReport::nodes_used)
      .def_readonly("subdivisions", &QuadratureReport::subdivisions)
      .def_readonly("est_error", &QuadratureReport::est_error);

  py::class_<GofResult>(m, "GofResult")
      .def_readonly("x_stat", &GofResult::x_stat)
      .def_readonly("rms", &GofResult::rms)
      .def_readonly("theta_hat", &GofResult::theta_hat)
      .def_readonly("chi2_stat", &GofResult::chi2_stat)
      .def_readonly("confidence_level", &GofResult::confidence_level)
      .def_readonly("p_value", &GofResult::p_value)
      .def_readonly("spectrum", &GofResult::spectrum)
      .def_readonly("quadrature", &GofResult::quadrature);

  py::class_<SimulationReport>(m, "SimulationReport")
      .def_readonly("sorted_levels", &SimulationReport::sorted_levels)
      .def_readonly("grid", &SimulationReport::grid)
      .def_readonly("ks_distance", &SimulationReport::ks_distance)
      .def_readonly("max_nodes", &SimulationReport::max_nodes)
      .def_readonly("excluded", &SimulationReport::excluded)
      .def_readonly("elapsed_quadrature_s", &SimulationReport::elapsed_quadrature_s)
      .def_readonly("elapsed_simulation_s", &SimulationReport::elapsed_simulation_s);

  m.def("make_model", &model_from_name, py::arg("name"), py::arg("zipf_bins") = 100,
        py::arg("poisson_theta") = 1.0, py::arg("epsilon") = 1e-8,
        "Build a built-in model; the Poisson support is truncated at poisson_theta.");
  m.def("load_tabulated_model", &load_tabulated_model, py::arg("path"));

  m.def("mle_estimate", &mle_estimate, py::arg("model"), py::arg("counts"));
  m.def(
      "cdf_eval",
      [](double x, const std::vector<double>& variances) {
        return cdf_eval(x, variances);
      },
      py::arg("x"), py::arg("variances"),
      "CDF of sum(sigma_k^2 Z_k^2) at x for independent standard normal Z_k.");
  m.def("model_spectrum", &model_spectrum, py::arg("model"), py::arg("theta_hat"));
  m.def(
      "rms_statistic",
      [](const Model& model, const BinCounts& counts) {
        const StatValue sv = rms_statistic(model, counts);
        return py::make_tuple(sv.x_stat, sv.theta_hat);
      },
      py::arg("model"), py::arg("counts"));
  m.def("chi2_statistic", &chi2_statistic, py::arg("model"), py::arg("counts"));
  m.def("confidence_level", &confidence_level, py::arg("model"), py::arg("counts"));

  m.def(
      "run_simulations",
      [](const std::shared_ptr<const Model>& model, double theta, std::uint64_t m_draws, int j,
         std::uint64_t seed, int threads) {
        SimulationConfig config;
        config.model = model;
        config.theta_true = theta;
        config.draws_per_sim = m_draws;
        config.num_sims = j;
        config.seed = seed;
        config.threads = threads;
        return run_simulations(config);
      },
      py::arg("model"), py::arg("theta"), py::arg("m") = 100'000, py::arg("j") = 1'000,
      py::arg("seed") = 0, py::arg("threads") = 0,
      py::call_guard<py::gil_scoped_release>());
  m.def("qq_export", &qq_export, py::arg("report"), py::arg("path"));
}

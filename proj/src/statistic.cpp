#include "rmsgof/statistic.hpp"

#include <cmath>

#include "rmsgof/errors.hpp"

namespace rmsgof {

namespace {

void check_overflow_mass(const Model& model, const BinCounts& counts) {
  if (counts.overflow == 0) return;
  const auto epsilon = model.truncation_epsilon();
  if (!epsilon)
    throw Error(errc::bad_input, "overflow draws supplied for a model with full finite support");
  const double frac = static_cast<double>(counts.overflow) / static_cast<double>(counts.total());
  if (frac > 10.0 * *epsilon)
    throw Error(errc::overflow_mass_too_large,
                "fraction " + std::to_string(frac) + " of draws fell past the truncated support; "
                "the draws almost surely do not come from the model");
}

}  // namespace

StatValue rms_statistic(const Model& model, const BinCounts& counts) {
  check_overflow_mass(model, counts);
  const double theta_hat = mle_estimate(model, counts);
  const std::vector<double> y = counts.fractions();
  const std::vector<double> p = model.probabilities(theta_hat);
  const double m = static_cast<double>(counts.total());
  double x = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double d = y[k] - p[k];
    x += m * d * d;
  }
  return {x, theta_hat};
}

double chi2_statistic(const Model& model, const BinCounts& counts) {
  check_overflow_mass(model, counts);
  const double theta_hat = mle_estimate(model, counts);
  const std::vector<double> y = counts.fractions();
  const std::vector<double> p = model.probabilities(theta_hat);
  const double m = static_cast<double>(counts.total());
  double chi2 = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (p[k] <= 0.0) throw Error(errc::degenerate_probability, "zero model probability");
    const double d = y[k] - p[k];
    chi2 += m * d * d / p[k];
  }
  return chi2;
}

GofResult confidence_level(const Model& model, const BinCounts& counts) {
  GofResult result;
  const StatValue sv = rms_statistic(model, counts);
  result.x_stat = sv.x_stat;
  result.rms = std::sqrt(sv.x_stat);
  result.theta_hat = sv.theta_hat;
  result.chi2_stat = chi2_statistic(model, counts);
  result.derivative_analytic = model.analytic_derivative();
  result.spectrum = model_spectrum(model, sv.theta_hat);
  result.quadrature = cdf_eval_report(sv.x_stat, result.spectrum.variances);
  result.confidence_level = result.quadrature.value;
  result.p_value = 1.0 - result.confidence_level;
  return result;
}

}  // namespace rmsgof

#pragma once

#include "rmsgof/cdf.hpp"
#include "rmsgof/model.hpp"
#include "rmsgof/spectrum.hpp"

namespace rmsgof {

struct GofResult {
  double x_stat = 0.0;     // sum of squared scaled deviations
  double rms = 0.0;        // sqrt(x_stat), for display
  double theta_hat = 0.0;
  double chi2_stat = 0.0;
  double confidence_level = 0.0;
  double p_value = 1.0;
  bool derivative_analytic = true;
  VarianceSpectrum spectrum;
  QuadratureReport quadrature;
};

struct StatValue {
  double x_stat;
  double theta_hat;
};

// X = sum_k (sqrt(m) (Y_k - p_k(theta-hat)))^2 with theta-hat from the
// model's maximum-likelihood estimator.
StatValue rms_statistic(const Model& model, const BinCounts& counts);

// Classic chi-square: same deviations weighted by 1/p_k(theta-hat).
double chi2_statistic(const Model& model, const BinCounts& counts);

// Full pipeline: statistic -> constraint spectrum -> CDF of the limiting
// weighted sum of squares evaluated at X.
GofResult confidence_level(const Model& model, const BinCounts& counts);

}  // namespace rmsgof

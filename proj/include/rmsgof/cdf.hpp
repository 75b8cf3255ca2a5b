#pragma once

#include <span>
#include <vector>

namespace rmsgof {

// Statistic value plus the variance spectrum of the limiting sum of squared
// Gaussians.
struct CdfQuery {
  double x;
  std::vector<double> variances;
};

struct QuadratureReport {
  double value = 0.0;
  int nodes_used = 0;
  int subdivisions = 0;
  double est_error = 0.0;
};

// Imaginary part of the contour integrand at t; square roots take the
// principal branch factor by factor.
double integrand(double t, const CdfQuery& query);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule of order 10 or 21 mapped onto [a, b].
GaussRule gauss_rule(int order, double a, double b);

// Adaptive bisection over (0, upper) comparing the order-10 and order-21
// estimates on each panel.
QuadratureReport adaptive_integrate(const CdfQuery& query, double abs_tol, double upper = 40.0);

double cdf_eval(double x, std::span<const double> variances);
QuadratureReport cdf_eval_report(double x, std::span<const double> variances,
                                 double abs_tol = 1e-12, double upper = 40.0);

}  // namespace rmsgof

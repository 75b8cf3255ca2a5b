#include "rmsgof/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "rmsgof/errors.hpp"

namespace rmsgof {

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Legendre recurrence, converged to full double precision.
GaussRule legendre_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

const GaussRule& base_rule(int order) {
  static const GaussRule g10 = legendre_rule(10);
  static const GaussRule g21 = legendre_rule(21);
  switch (order) {
    case 10: return g10;
    case 21: return g21;
    default: throw Error(errc::unsupported_order, "Gauss rule order must be 10 or 21");
  }
}

double panel_estimate(const GaussRule& rule, double a, double b, const CdfQuery& query) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * integrand(mid + half * rule.nodes[i], query);
  return half * sum;
}

void validate(const CdfQuery& query) {
  if (!(query.x > 0.0)) throw Error(errc::bad_input, "statistic value must be positive");
  if (query.variances.empty()) throw Error(errc::bad_input, "empty variance spectrum");
  for (double v : query.variances)
    if (!(v > 0.0)) throw Error(errc::bad_input, "variances must be positive");
}

}  // namespace

double integrand(double t, const CdfQuery& query) {
  const std::size_t nvar = query.variances.size();
  const double sqrt_n = std::sqrt(static_cast<double>(nvar));
  const double inv_x = 1.0 / query.x;
  const std::complex<double> i_unit(0.0, 1.0);

  std::complex<double> prod(1.0, 0.0);
  for (double s2 : query.variances)
    prod *= std::sqrt(std::complex<double>(1.0 - 2.0 * (t - 1.0) * s2 * inv_x,
                                           2.0 * t * s2 * sqrt_n * inv_x));

  const std::complex<double> pole = t - 1.0 / (1.0 - i_unit * sqrt_n);
  const std::complex<double> numer =
      std::exp(1.0 - t) * std::exp(i_unit * (t * sqrt_n));
  return (numer / (std::numbers::pi * pole * prod)).imag();
}

GaussRule gauss_rule(int order, double a, double b) {
  if (!(a < b)) throw Error(errc::bad_input, "need a < b");
  const GaussRule& base = base_rule(order);
  GaussRule mapped;
  mapped.nodes.resize(base.nodes.size());
  mapped.weights.resize(base.weights.size());
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    mapped.nodes[i] = mid + half * base.nodes[i];
    mapped.weights[i] = half * base.weights[i];
  }
  return mapped;
}

QuadratureReport adaptive_integrate(const CdfQuery& query, double abs_tol, double upper) {
  validate(query);
  if (abs_tol < 1e-14) throw Error(errc::bad_input, "abs_tol below attainable precision");

  const GaussRule& coarse = base_rule(10);
  const GaussRule& fine = base_rule(21);
  QuadratureReport report;

  const auto recurse = [&](auto&& self, double a, double b, double tol_share, int depth) -> void {
    if (depth > 50)
      throw Error(errc::max_subdivision_exceeded, "quadrature recursion depth exceeded 50");
    const double i10 = panel_estimate(coarse, a, b, query);
    const double i21 = panel_estimate(fine, a, b, query);
    report.nodes_used += 31;
    const double diff = std::fabs(i21 - i10);
    if (diff <= tol_share || diff <= 1e-16) {
      report.value += i21;
      report.est_error += diff;
      return;
    }
    report.subdivisions += 1;
    const double mid = 0.5 * (a + b);
    self(self, a, mid, 0.5 * tol_share, depth + 1);
    self(self, mid, b, 0.5 * tol_share, depth + 1);
  };
  // Graded initial partition: the integrand concentrates at small t (the
  // e^(1-t) factor kills the tail), so short panels near 0 avoid paying for
  // rejected ancestors during refinement.
  double edge = 0.0;
  for (double next :
       {upper / 64.0, upper / 32.0, upper / 16.0, upper / 8.0, upper / 4.0, upper / 2.0, upper}) {
    recurse(recurse, edge, next, abs_tol * (next - edge) / upper, 0);
    edge = next;
  }
  return report;
}

QuadratureReport cdf_eval_report(double x, std::span<const double> variances, double abs_tol,
                                 double upper) {
  if (x <= 0.0) {
    QuadratureReport r;
    r.value = 0.0;
    r.nodes_used = 0;
    return r;
  }
  CdfQuery query{x, {variances.begin(), variances.end()}};
  QuadratureReport report = adaptive_integrate(query, abs_tol, upper);
  report.value = std::clamp(report.value, 0.0, 1.0);
  return report;
}

double cdf_eval(double x, std::span<const double> variances) {
  return cdf_eval_report(x, variances).value;
}

}  // namespace rmsgof

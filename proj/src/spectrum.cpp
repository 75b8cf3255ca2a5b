#include "rmsgof/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmsgof/errors.hpp"

namespace rmsgof {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double column_norm(const Matrix& m, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

}  // namespace

ConstraintMatrix build_constraints(const Model& model, double theta_hat) {
  const std::vector<double> g = model.dlog_probabilities(theta_hat);
  const std::size_t n = g.size();
  Matrix h(n, 2);
  for (std::size_t k = 0; k < n; ++k) {
    h(k, 0) = 1.0;
    h(k, 1) = g[k];
  }
  return {std::move(h)};
}

Matrix orthonormal_basis(const ConstraintMatrix& cm) {
  const Matrix& h = cm.h;
  const std::size_t n = h.rows();
  if (n < 3) throw Error(errc::bad_input, "need at least 3 bins");

  // Column pivoting: reflect the larger column first.
  const double n0 = column_norm(h, 0), n1 = column_norm(h, 1);
  const std::size_t piv0 = n1 > n0 ? 1 : 0, piv1 = 1 - piv0;
  const double max_norm = std::max(n0, n1);

  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = h(i, piv0);
    b[i] = h(i, piv1);
  }

  // First Householder reflector v1 sends column a to +-|a| e_1.
  std::vector<double> v1 = a;
  const double alpha = a[0] >= 0.0 ? -max_norm : max_norm;
  v1[0] -= alpha;
  double v1n2 = 0.0;
  for (double x : v1) v1n2 += x * x;
  const auto reflect1 = [&](std::vector<double>& x) {
    if (v1n2 == 0.0) return;
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += v1[i] * x[i];
    const double c = 2.0 * dot / v1n2;
    for (std::size_t i = 0; i < n; ++i) x[i] -= c * v1[i];
  };
  reflect1(b);

  // Second reflector acts on rows 2..n of the reflected second column.
  double tail2 = 0.0;
  for (std::size_t i = 1; i < n; ++i) tail2 += b[i] * b[i];
  const double r22 = std::sqrt(tail2);
  if (r22 <= static_cast<double>(n) * kEps * max_norm)
    throw Error(errc::rank_deficient_constraints,
                "constraint matrix is numerically rank 1; the limiting distribution would have "
                "n-1 degrees of freedom");

  std::vector<double> v2(b.begin() + 1, b.end());
  const double beta = b[1] >= 0.0 ? -r22 : r22;
  v2[0] -= beta;
  double v2n2 = 0.0;
  for (double x : v2) v2n2 += x * x;
  const auto reflect2 = [&](std::vector<double>& x) {
    if (v2n2 == 0.0) return;
    double dot = 0.0;
    for (std::size_t i = 1; i < n; ++i) dot += v2[i - 1] * x[i];
    const double c = 2.0 * dot / v2n2;
    for (std::size_t i = 1; i < n; ++i) x[i] -= c * v2[i - 1];
  };

  // Q columns are H1 H2 e_1 and H1 H2 e_2.
  Matrix q(n, 2);
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    reflect2(e);
    reflect1(e);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = e[i];
  }
  return q;
}

Matrix build_b(const Model& model, double theta_hat, const Matrix& q) {
  const std::vector<double> p = model.probabilities(theta_hat);
  const std::size_t n = p.size();
  if (q.rows() != n || q.cols() != 2) throw Error(errc::bad_input, "basis shape mismatch");
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (p[k] <= 0.0) throw Error(errc::degenerate_probability, "zero model probability");
    d[k] = 1.0 / p[k];
  }

  // B = D - A Q^T - Q A^T + Q S Q^T with A = D Q, S = Q^T A; all rank-2
  // corrections, so forming B costs O(n^2).
  Matrix a(n, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2; ++j) a(i, j) = d[i] * q(i, j);
  double s[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < n; ++i)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) s[r][c] += q(i, r) * a(i, c);

  Matrix bmat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = -(a(i, 0) * q(j, 0) + a(i, 1) * q(j, 1)) -
                 (q(i, 0) * a(j, 0) + q(i, 1) * a(j, 1));
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) v += q(i, r) * s[r][c] * q(j, c);
      bmat(i, j) = v;
    }
    bmat(i, i) += d[i];
  }
  // Symmetrize away the last roundoff.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (bmat(i, j) + bmat(j, i));
      bmat(i, j) = v;
      bmat(j, i) = v;
    }
  return bmat;
}

std::vector<double> jacobi_eigenvalues(const Matrix& b) {
  const std::size_t n = b.rows();
  if (b.cols() != n) throw Error(errc::bad_input, "matrix not square");
  Matrix m = b;

  double fro2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) fro2 += m(i, j) * m(i, j);
  const double tol2 = 1e-28 * fro2;  // off(B)_F <= 1e-14 * ||B||_F

  const auto off2 = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * m(i, j) * m(i, j);
    return s;
  };

  for (int sweep = 0; sweep < 100 && off2() > tol2; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double tau = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

VarianceSpectrum variance_spectrum(const Matrix& b) {
  std::vector<double> ev = jacobi_eigenvalues(b);
  const std::size_t n = ev.size();

  std::vector<double> by_mag = ev;
  std::sort(by_mag.begin(), by_mag.end(),
            [](double x, double y) { return std::fabs(x) < std::fabs(y); });
  const double max_mag = std::fabs(by_mag.back());
  if (max_mag == 0.0) throw Error(errc::spectrum_anomaly, "all eigenvalues vanish");
  const double zero_tol = 1e-8 * max_mag;

  std::size_t zeros = 0;
  while (zeros < n && std::fabs(by_mag[zeros]) <= zero_tol) ++zeros;
  if (zeros != 2)
    throw Error(errc::spectrum_anomaly,
                std::to_string(zeros) + " eigenvalues below the zero threshold; expected 2");

  VarianceSpectrum spec;
  spec.eigenvalues = std::move(ev);
  spec.zero_count = 2;
  spec.variances.reserve(n - 2);
  double lam_min = std::numeric_limits<double>::infinity(), lam_max = 0.0;
  for (std::size_t i = 2; i < n; ++i) {
    const double lam = std::fabs(by_mag[i]);
    if (by_mag[i] <= 0.0)
      throw Error(errc::spectrum_anomaly, "negative eigenvalue beyond the zero threshold");
    lam_min = std::min(lam_min, lam);
    lam_max = std::max(lam_max, lam);
    spec.variances.push_back(1.0 / by_mag[i]);
  }
  std::sort(spec.variances.begin(), spec.variances.end());
  spec.condition_diag = lam_max / lam_min;
  return spec;
}

VarianceSpectrum model_spectrum(const Model& model, double theta_hat) {
  const ConstraintMatrix h = build_constraints(model, theta_hat);
  const Matrix q = orthonormal_basis(h);
  const Matrix b = build_b(model, theta_hat, q);
  return variance_spectrum(b);
}

}  // namespace rmsgof

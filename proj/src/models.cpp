#include "rmsgof/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace rmsgof {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

std::uint64_t BinCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> BinCounts::fractions() const {
  const std::uint64_t m = total();
  if (m == 0) throw Error(errc::insufficient_data, "no draws");
  std::vector<double> y(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    y[k] = static_cast<double>(counts[k]) / static_cast<double>(m);
  return y;
}

std::size_t BinCounts::occupied_bins() const {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c > 0; }));
}

void Model::require_in_domain(double theta) const {
  const ThetaDomain d = theta_domain();
  if (!std::isfinite(theta) || !d.contains(theta))
    throw Error(errc::parameter_out_of_domain,
                name() + ": theta=" + std::to_string(theta) + " outside (" +
                    std::to_string(d.lo) + ", " + std::to_string(d.hi) + ")");
}

std::vector<double> Model::dlog_probabilities(double theta) const {
  require_in_domain(theta);
  double h = std::cbrt(kEps) * std::max(1.0, std::fabs(theta));
  const ThetaDomain d = theta_domain();
  while (!(d.contains(theta - h) && d.contains(theta + h))) h *= 0.5;
  const std::vector<double> lo = probabilities(theta - h);
  const std::vector<double> hi = probabilities(theta + h);
  std::vector<double> g(lo.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    g[k] = (std::log(hi[k]) - std::log(lo[k])) / (2.0 * h);
  return g;
}

double mle_estimate(const Model& model, const BinCounts& counts) {
  if (counts.counts.size() != model.n_bins())
    throw Error(errc::bad_input, "counts length does not match bin count");
  if (counts.total() == 0 || counts.occupied_bins() < 2)
    throw Error(errc::insufficient_data, "need draws in at least two distinct bins");
  return model.mle(counts.fractions());
}

// ---------------------------------------------------------------------------
// 2x2 contingency table: p = (.04 t, .04 (1-t), .96 t, .96 (1-t)).

namespace {

class Contingency2x2 final : public Model {
 public:
  std::string name() const override { return "contingency2x2"; }
  std::size_t n_bins() const override { return 4; }
  ThetaDomain theta_domain() const override { return {0.0, 1.0}; }

  std::vector<double> probabilities(double theta) const override {
    require_in_domain(theta);
    return {0.04 * theta, 0.04 * (1.0 - theta), 0.96 * theta, 0.96 * (1.0 - theta)};
  }

  std::vector<double> dlog_probabilities(double theta) const override {
    require_in_domain(theta);
    const double a = 1.0 / theta;
    const double b = -1.0 / (1.0 - theta);
    return {a, b, a, b};
  }

  bool analytic_derivative() const override { return true; }

  double mle(const std::vector<double>& y) const override {
    const double theta = y[0] + y[2];
    if (!theta_domain().contains(theta))
      throw Error(errc::estimate_at_boundary, "contingency2x2: Y1 + Y3 = " + std::to_string(theta));
    return theta;
  }
};

// ---------------------------------------------------------------------------
// Zipf on n bins: p_k = k^-theta / sum_i i^-theta.

class Zipf final : public Model {
 public:
  explicit Zipf(std::size_t n) : n_(n) {
    if (n < 2) throw Error(errc::bad_input, "zipf needs at least 2 bins");
  }

  std::string name() const override { return "zipf"; }
  std::size_t n_bins() const override { return n_; }
  ThetaDomain theta_domain() const override { return {-50.0, 50.0}; }

  std::vector<double> probabilities(double theta) const override {
    require_in_domain(theta);
    std::vector<double> p = weights(theta);
    const double z = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& pk : p) {
      pk /= z;
      if (pk <= 0.0) throw Error(errc::degenerate_probability, "zipf: bin mass underflowed");
    }
    return p;
  }

  std::vector<double> dlog_probabilities(double theta) const override {
    require_in_domain(theta);
    const double fbar = weighted_log_mean(theta);
    std::vector<double> g(n_);
    for (std::size_t k = 0; k < n_; ++k) g[k] = fbar - std::log(static_cast<double>(k + 1));
    return g;
  }

  bool analytic_derivative() const override { return true; }

  // Solves f(theta) = sum Y_k ln k by bisection, where f is the
  // k^-theta-weighted mean of ln k. f is strictly decreasing.
  double mle(const std::vector<double>& y) const override {
    double target = 0.0;
    for (std::size_t k = 0; k < n_; ++k) target += y[k] * std::log(static_cast<double>(k + 1));
    const auto g = [&](double t) { return weighted_log_mean(t) - target; };

    const ThetaDomain d = theta_domain();
    double lo = -1.0, hi = 1.0;
    double glo = g(lo), ghi = g(hi);
    for (int i = 0; i < 200 && glo * ghi > 0.0; ++i) {
      lo = std::max(d.lo + 1e-9, 2.0 * lo);
      hi = std::min(d.hi - 1e-9, 2.0 * hi);
      glo = g(lo);
      ghi = g(hi);
    }
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (glo * ghi > 0.0)
      throw Error(errc::estimate_at_boundary, "zipf: no sign change inside the parameter domain");
    while (hi - lo > 1e-12 * std::max(1.0, 0.5 * std::fabs(lo + hi))) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if (gm == 0.0) return mid;
      if (glo * gm < 0.0) {
        hi = mid;
      } else {
        lo = mid;
        glo = gm;
      }
    }
    return 0.5 * (lo + hi);
  }

 private:
  std::vector<double> weights(double theta) const {
    // k^-theta scaled by the largest term so extreme theta stays in range.
    std::vector<double> w(n_);
    const double emax = theta >= 0.0 ? 0.0 : -theta * std::log(static_cast<double>(n_));
    for (std::size_t k = 0; k < n_; ++k)
      w[k] = std::exp(-theta * std::log(static_cast<double>(k + 1)) - emax);
    return w;
  }

  double weighted_log_mean(double theta) const {
    const std::vector<double> w = weights(theta);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      num += w[k] * std::log(static_cast<double>(k + 1));
      den += w[k];
    }
    return num / den;
  }

  std::size_t n_;
};

// ---------------------------------------------------------------------------
// Poisson: p_k = e^-theta theta^(k-1) / (k-1)!, k = 1, 2, ...

class PoissonFamily final : public UnboundedModel {
 public:
  std::string name() const override { return "poisson"; }
  ThetaDomain theta_domain() const override { return {0.0, 1e6}; }

  double bin_probability(std::size_t k, double theta) const override {
    const double kk = static_cast<double>(k - 1);
    return std::exp(-theta + kk * std::log(theta) - std::lgamma(kk + 1.0));
  }

  double dlog_bin_probability(std::size_t k, double theta) const override {
    return static_cast<double>(k - 1) / theta - 1.0;
  }

  double mle(const std::vector<double>& y) const override {
    double theta = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) theta += static_cast<double>(k) * y[k];
    if (!theta_domain().contains(theta))
      throw Error(errc::estimate_at_boundary, "poisson: mean estimate " + std::to_string(theta));
    return theta;
  }
};

class TruncatedModel final : public Model {
 public:
  TruncatedModel(std::shared_ptr<const UnboundedModel> family, std::size_t n, double epsilon)
      : family_(std::move(family)), n_(n), epsilon_(epsilon) {}

  std::string name() const override { return family_->name(); }
  std::size_t n_bins() const override { return n_; }
  ThetaDomain theta_domain() const override { return family_->theta_domain(); }

  std::vector<double> probabilities(double theta) const override {
    require_in_domain(theta);
    std::vector<double> p(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      p[k] = family_->bin_probability(k + 1, theta);
      if (p[k] <= 0.0)
        throw Error(errc::degenerate_probability,
                    name() + ": p_" + std::to_string(k + 1) + " underflowed at theta=" +
                        std::to_string(theta));
    }
    return p;
  }

  std::vector<double> dlog_probabilities(double theta) const override {
    require_in_domain(theta);
    std::vector<double> g(n_);
    for (std::size_t k = 0; k < n_; ++k) g[k] = family_->dlog_bin_probability(k + 1, theta);
    return g;
  }

  bool analytic_derivative() const override { return true; }

  double mle(const std::vector<double>& y) const override { return family_->mle(y); }

  std::optional<double> truncation_epsilon() const override { return epsilon_; }

 private:
  std::shared_ptr<const UnboundedModel> family_;
  std::size_t n_;
  double epsilon_;
};

}  // namespace

std::shared_ptr<const Model> truncate_support(std::shared_ptr<const UnboundedModel> family,
                                              double theta, double epsilon, std::size_t max_bins) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(errc::bad_input, "epsilon must be in (0, 1)");
  if (!family->theta_domain().contains(theta))
    throw Error(errc::parameter_out_of_domain, family->name() + ": truncation parameter");
  double mass = 0.0;
  std::size_t n = 0;
  while (mass < 1.0 - epsilon) {
    if (n >= max_bins)
      throw Error(errc::truncation_overflow,
                  family->name() + ": support exceeds " + std::to_string(max_bins) + " bins");
    ++n;
    mass += family->bin_probability(n, theta);
  }
  return std::make_shared<TruncatedModel>(std::move(family), n, epsilon);
}

std::shared_ptr<const Model> make_contingency2x2() { return std::make_shared<Contingency2x2>(); }

std::shared_ptr<const Model> make_zipf(std::size_t n_bins) {
  return std::make_shared<Zipf>(n_bins);
}

std::shared_ptr<const UnboundedModel> make_poisson_family() {
  return std::make_shared<PoissonFamily>();
}

std::shared_ptr<const Model> make_poisson(double theta, double epsilon, std::size_t max_bins) {
  return truncate_support(make_poisson_family(), theta, epsilon, max_bins);
}

// ---------------------------------------------------------------------------
// Tabulated user model.

namespace {

class TabulatedModel final : public Model {
 public:
  TabulatedModel(std::size_t n, std::vector<double> thetas, std::vector<std::vector<double>> rows)
      : n_(n), thetas_(std::move(thetas)), rows_(std::move(rows)) {}

  std::string name() const override { return "tabulated"; }
  std::size_t n_bins() const override { return n_; }
  ThetaDomain theta_domain() const override { return {thetas_.front(), thetas_.back()}; }

  std::vector<double> probabilities(double theta) const override {
    require_in_domain(theta);
    const auto it = std::upper_bound(thetas_.begin(), thetas_.end(), theta);
    const std::size_t j = static_cast<std::size_t>(it - thetas_.begin());
    const double t0 = thetas_[j - 1], t1 = thetas_[j];
    const double w = (theta - t0) / (t1 - t0);
    std::vector<double> p(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      p[k] = (1.0 - w) * rows_[j - 1][k] + w * rows_[j][k];
      if (p[k] <= 0.0)
        throw Error(errc::degenerate_probability, "tabulated: nonpositive interpolated probability");
    }
    return p;
  }

  double mle(const std::vector<double>& y) const override {
    // Coarse scan of the log-likelihood over the grid span, then golden
    // section inside the bracketing cell.
    const double a = thetas_.front(), b = thetas_.back();
    const int samples = 512;
    double best_t = 0.0, best_l = -std::numeric_limits<double>::infinity();
    int best_i = -1;
    for (int i = 1; i < samples; ++i) {
      const double t = a + (b - a) * i / samples;
      const double l = loglik(y, t);
      if (l > best_l) {
        best_l = l;
        best_t = t;
        best_i = i;
      }
    }
    if (best_i <= 1 || best_i >= samples - 1)
      throw Error(errc::estimate_at_boundary, "tabulated: likelihood maximum at the grid edge");
    double lo = a + (b - a) * (best_i - 1) / samples;
    double hi = a + (b - a) * (best_i + 1) / samples;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = loglik(y, x1), f2 = loglik(y, x2);
    while (hi - lo > 1e-10 * std::max(1.0, std::fabs(best_t))) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = loglik(y, x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = loglik(y, x1);
      }
    }
    return 0.5 * (lo + hi);
  }

 private:
  double loglik(const std::vector<double>& y, double theta) const {
    const std::vector<double> p = probabilities(theta);
    double l = 0.0;
    for (std::size_t k = 0; k < n_; ++k)
      if (y[k] > 0.0) l += y[k] * std::log(p[k]);
    return l;
  }

  std::size_t n_;
  std::vector<double> thetas_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace

std::shared_ptr<const Model> load_tabulated_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::bad_input, "cannot open model file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("n=", 0) != 0)
    throw Error(errc::bad_input, "model file must start with a `n=<int>` header");
  const long n_raw = std::stol(line.substr(2));
  if (n_raw < 2) throw Error(errc::bad_input, "model file: n must be at least 2");
  const std::size_t n = static_cast<std::size_t>(n_raw);

  std::vector<double> thetas;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> vals;
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != n + 1)
      throw Error(errc::bad_input, "model file row has wrong number of fields");
    thetas.push_back(vals[0]);
    rows.emplace_back(vals.begin() + 1, vals.end());
  }
  if (thetas.size() < 2) throw Error(errc::bad_input, "model file needs at least two theta rows");
  if (!std::is_sorted(thetas.begin(), thetas.end()))
    throw Error(errc::bad_input, "model file theta grid must be increasing");
  return std::make_shared<TabulatedModel>(n, std::move(thetas), std::move(rows));
}

}  // namespace rmsgof

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmsgof/errors.hpp"

namespace rmsgof {

// Open interval for the model parameter.
struct ThetaDomain {
  double lo;
  double hi;
  bool contains(double theta) const { return theta > lo && theta < hi; }
};

// Observed draw counts per bin. `overflow` holds draws that fell past the
// retained support of a truncated model.
struct BinCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t overflow = 0;

  std::uint64_t total() const;
  std::vector<double> fractions() const;
  std::size_t occupied_bins() const;
};

// A one-parameter discrete model: bin probabilities p_k(theta), the
// derivative of their logarithms, and a maximum-likelihood estimator.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual std::size_t n_bins() const = 0;
  virtual ThetaDomain theta_domain() const = 0;

  virtual std::vector<double> probabilities(double theta) const = 0;

  // Default implementation falls back to centered finite differences with
  // step eps^(1/3) * max(1, |theta|); models overriding this report
  // analytic_derivative() == true.
  virtual std::vector<double> dlog_probabilities(double theta) const;
  virtual bool analytic_derivative() const { return false; }

  // fractions sum to 1; returns theta-hat inside theta_domain or throws
  // EstimateAtBoundary.
  virtual double mle(const std::vector<double>& fractions) const = 0;

  // Set for models produced by truncate_support.
  virtual std::optional<double> truncation_epsilon() const { return std::nullopt; }

 protected:
  void require_in_domain(double theta) const;
};

// Infinite-support model enumerated bin by bin (1-based k).
class UnboundedModel {
 public:
  virtual ~UnboundedModel() = default;

  virtual std::string name() const = 0;
  virtual ThetaDomain theta_domain() const = 0;
  virtual double bin_probability(std::size_t k, double theta) const = 0;
  virtual double dlog_bin_probability(std::size_t k, double theta) const = 0;
  virtual double mle(const std::vector<double>& fractions) const = 0;
};

// Retains the smallest leading set of bins whose mass at `theta` reaches
// 1 - epsilon; the retained probabilities are used unrenormalized.
std::shared_ptr<const Model> truncate_support(std::shared_ptr<const UnboundedModel> family,
                                              double theta, double epsilon,
                                              std::size_t max_bins = 1'000'000);

// Finite models are unaffected by truncation.
inline std::shared_ptr<const Model> truncate_support(std::shared_ptr<const Model> model, double,
                                                     double) {
  return model;
}

// Validates counts (>= 2 occupied bins) and runs the model's estimator.
double mle_estimate(const Model& model, const BinCounts& counts);

// Built-in models (Zipf takes the bin count; Poisson is truncated at theta).
std::shared_ptr<const Model> make_contingency2x2();
std::shared_ptr<const Model> make_zipf(std::size_t n_bins);
std::shared_ptr<const UnboundedModel> make_poisson_family();
std::shared_ptr<const Model> make_poisson(double theta, double epsilon = 1e-8,
                                          std::size_t max_bins = 1'000'000);

// Tabulated user model: header line `n=<int>`, then rows
// `theta,p_1,...,p_n` on an increasing theta grid. Probabilities are
// interpolated linearly in theta and derivatives use finite differences, so
// results are approximate.
std::shared_ptr<const Model> load_tabulated_model(const std::filesystem::path& path);

}  // namespace rmsgof

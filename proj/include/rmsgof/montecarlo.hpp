#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <vector>

#include "rmsgof/model.hpp"

namespace rmsgof {

struct SimulationConfig {
  std::shared_ptr<const Model> model;
  double theta_true = 0.0;
  std::uint64_t draws_per_sim = 100'000;  // m
  int num_sims = 1'000;                   // j
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency; results are thread-count invariant
};

struct SimulationReport {
  std::vector<double> sorted_levels;
  std::vector<double> grid;  // (2i - 1) / (2j) over the included simulations
  double ks_distance = 0.0;  // Kolmogorov-Smirnov statistic against Uniform(0,1)
  int max_nodes = 0;
  int excluded = 0;  // simulations whose MLE hit the domain boundary
  double elapsed_quadrature_s = 0.0;
  double elapsed_simulation_s = 0.0;
};

// Multinomial draw by inversion on the cumulative probability vector; when
// the probabilities sum to less than 1 (truncated support) the residual mass
// lands in `overflow`.
BinCounts sample_multinomial(const std::vector<double>& probabilities, std::uint64_t m,
                             std::mt19937_64& rng);

// Per-simulation RNG streams derived from the master seed by splitmix64, so
// simulations run concurrently yet deterministically.
std::mt19937_64 simulation_stream(std::uint64_t master_seed, std::uint64_t sim_index);

SimulationReport run_simulations(const SimulationConfig& config);

// CSV with header `grid,level`, one row per included simulation.
void qq_export(const SimulationReport& report, const std::filesystem::path& path);

}  // namespace rmsgof

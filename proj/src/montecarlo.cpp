#include "rmsgof/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "rmsgof/statistic.hpp"

namespace rmsgof {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 simulation_stream(std::uint64_t master_seed, std::uint64_t sim_index) {
  return std::mt19937_64(splitmix64(master_seed ^ splitmix64(sim_index)));
}

BinCounts sample_multinomial(const std::vector<double>& probabilities, std::uint64_t m,
                             std::mt19937_64& rng) {
  const std::size_t n = probabilities.size();
  std::vector<double> cum(n);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    s += probabilities[k];
    cum[k] = s;
  }
  BinCounts counts;
  counts.counts.assign(n, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t d = 0; d < m; ++d) {
    const double u = unit(rng);
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) {
      ++counts.overflow;
    } else {
      ++counts.counts[static_cast<std::size_t>(it - cum.begin())];
    }
  }
  return counts;
}

SimulationReport run_simulations(const SimulationConfig& config) {
  if (!config.model) throw Error(errc::bad_input, "no model configured");
  if (config.num_sims < 1) throw Error(errc::bad_input, "need at least one simulation");
  if (config.draws_per_sim < config.model->n_bins())
    throw Error(errc::bad_input, "need at least as many draws as bins");

  const auto wall_start = std::chrono::steady_clock::now();
  const std::vector<double> p_true = config.model->probabilities(config.theta_true);
  const int j = config.num_sims;

  std::vector<double> levels(j, -1.0);  // -1 marks an excluded simulation
  std::vector<int> nodes(j, 0);
  std::atomic<std::int64_t> quad_ns{0};
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const int i = next.fetch_add(1);
      if (i >= j) return;
      std::mt19937_64 rng = simulation_stream(config.seed, static_cast<std::uint64_t>(i));
      const BinCounts counts = sample_multinomial(p_true, config.draws_per_sim, rng);
      try {
        const StatValue sv = rms_statistic(*config.model, counts);
        const VarianceSpectrum spec = model_spectrum(*config.model, sv.theta_hat);
        const auto q0 = std::chrono::steady_clock::now();
        const QuadratureReport q = cdf_eval_report(sv.x_stat, spec.variances);
        quad_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - q0)
                       .count();
        levels[i] = q.value;
        nodes[i] = q.nodes_used;
      } catch (const Error& e) {
        if (e.code() != errc::estimate_at_boundary) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    }
  };

  unsigned nthreads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(j));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SimulationReport report;
  for (int i = 0; i < j; ++i) {
    if (levels[i] < 0.0) {
      ++report.excluded;
    } else {
      report.sorted_levels.push_back(levels[i]);
      report.max_nodes = std::max(report.max_nodes, nodes[i]);
    }
  }
  std::sort(report.sorted_levels.begin(), report.sorted_levels.end());

  const std::size_t jj = report.sorted_levels.size();
  report.grid.resize(jj);
  double ks = 0.0;
  for (std::size_t i = 0; i < jj; ++i) {
    report.grid[i] = (2.0 * (i + 1) - 1.0) / (2.0 * jj);
    const double li = report.sorted_levels[i];
    ks = std::max(ks, std::max(static_cast<double>(i + 1) / jj - li,
                               li - static_cast<double>(i) / jj));
  }
  report.ks_distance = ks;
  report.elapsed_quadrature_s = static_cast<double>(quad_ns.load()) * 1e-9;
  report.elapsed_simulation_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return report;
}

void qq_export(const SimulationReport& report, const std::filesystem::path& path) {
  if (path.empty()) throw Error(errc::bad_input, "empty output path");
  std::ofstream out(path);
  if (!out) throw Error(errc::bad_input, "cannot open " + path.string() + " for writing");
  out.precision(15);
  out << "grid,level\n";
  for (std::size_t i = 0; i < report.sorted_levels.size(); ++i)
    out << report.grid[i] << "," << report.sorted_levels[i] << "\n";
  if (!out) throw Error(errc::bad_input, "write to " + path.string() + " failed");
}

}  // namespace rmsgof

// Acceptance suite: one pass/fail line per criterion; exit status is the
// number of failed criteria.

#include <sys/wait.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "rmsgof/montecarlo.hpp"
#include "rmsgof/statistic.hpp"

using namespace rmsgof;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << (ok ? "PASS" : "FAIL") << " — " << detail
            << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1. cdf_eval with unit variances vs closed-form chi-square CDFs.
void criterion_1() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int dof : {1, 2, 3, 5, 10}) {
    const std::vector<double> vars(dof, 1.0);
    const double xlo = oracles::chi2_quantile(dof, 0.001);
    const double xhi = oracles::chi2_quantile(dof, 0.999);
    for (int i = 0; i < 20; ++i) {
      const double x = xlo + (xhi - xlo) * i / 19.0;
      worst = std::max(worst, std::fabs(cdf_eval(x, vars) - oracles::chi2_cdf(dof, x)));
    }
  }
  const double elapsed = seconds_since(t0);
  report(1, worst <= 1e-9 && elapsed < 5.0,
         "chi-square oracle equivalence: max |error| = " + std::to_string(worst) + ", " +
             std::to_string(elapsed) + " s");
}

// 2. Contingency spectrum closed form at theta-hat = 0.5.
void criterion_2() {
  const VarianceSpectrum spec = model_spectrum(*make_contingency2x2(), 0.5);
  double max_mag = 0.0;
  for (double lam : spec.eigenvalues) max_mag = std::max(max_mag, std::fabs(lam));
  std::vector<double> mags;
  for (double lam : spec.eigenvalues) mags.push_back(std::fabs(lam));
  std::sort(mags.begin(), mags.end());
  const bool zeros_ok = spec.zero_count == 2 && mags[0] <= 1e-8 * max_mag &&
                        mags[1] <= 1e-8 * max_mag;
  bool vars_ok = spec.variances.size() == 2;
  for (double v : spec.variances)
    vars_ok = vars_ok && std::fabs(v - 24.0 / 625.0) <= 1e-12 * (24.0 / 625.0);
  report(2, zeros_ok && vars_ok,
         "contingency theta-hat=0.5: two zero eigenvalues, variances 24/625");
}

// 3. Pipeline spectrum vs an independent dense eigensolve of B.
void criterion_3() {
  double worst = 0.0;
  const auto check = [&](const Model& model, double theta_hat) {
    const Matrix q = orthonormal_basis(build_constraints(model, theta_hat));
    const Matrix b = build_b(model, theta_hat, q);
    const auto ours = variance_spectrum(b).variances;

    const auto n = static_cast<Eigen::Index>(b.rows());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        m(i, j) = b(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    std::sort(ev.begin(), ev.end(),
              [](double x, double y) { return std::fabs(x) < std::fabs(y); });
    std::vector<double> oracle;
    for (std::size_t i = 2; i < ev.size(); ++i) oracle.push_back(1.0 / ev[i]);
    std::sort(oracle.begin(), oracle.end());

    for (std::size_t i = 0; i < ours.size(); ++i)
      worst = std::max(worst, std::fabs(ours[i] - oracle[i]) / std::fabs(oracle[i]));
  };
  check(*make_contingency2x2(), 0.03);
  check(*make_zipf(100), 1.0);
  check(*make_poisson(10.3, 1e-8), 10.3);
  report(3, worst <= 1e-10,
         "spectrum matches dense eigensolver, max rel deviation = " + std::to_string(worst));
}

// 4 + 5. Q-Q uniformity at desk scale, and the quadrature node ceiling.
void criteria_4_and_5() {
  const double critical = 1.63 / std::sqrt(500.0);
  int max_nodes = 0;
  bool uniform_ok = true;
  std::string detail;
  const auto run_model = [&](std::shared_ptr<const Model> model, double theta) {
    int passes = 0;
    std::ostringstream line;
    line << model->name() << " ks=";
    for (std::uint64_t seed : {11u, 22u, 33u}) {
      SimulationConfig config;
      config.model = model;
      config.theta_true = theta;
      config.draws_per_sim = 20'000;
      config.num_sims = 500;
      config.seed = seed;
      const SimulationReport r = run_simulations(config);
      max_nodes = std::max(max_nodes, r.max_nodes);
      if (r.ks_distance < critical) ++passes;
      line << r.ks_distance << (seed == 33u ? "" : ",");
    }
    if (passes < 2) uniform_ok = false;
    detail += line.str() + "  ";
  };
  run_model(make_contingency2x2(), 0.03);
  run_model(make_zipf(100), 1.0);
  run_model(make_poisson(10.3, 1e-8), 10.3);
  report(4, uniform_ok,
         "Q-Q uniformity (KS critical " + std::to_string(critical) + "): " + detail);
  report(5, max_nodes <= 1000,
         "quadrature node ceiling: max_nodes = " + std::to_string(max_nodes));
}

// 6. Empirical CDF of sampled weighted sums vs cdf_eval for the Zipf spectrum.
void criterion_6() {
  const VarianceSpectrum spec = model_spectrum(*make_zipf(100), 1.0);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int samples = 100'000;
  std::vector<double> draws(samples);
  for (double& d : draws) {
    double s = 0.0;
    for (double v : spec.variances) {
      const double z = normal(rng);
      s += v * z * z;
    }
    d = s;
  }
  std::sort(draws.begin(), draws.end());
  double worst = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double x = draws.front() + (draws.back() - draws.front()) * i / 200.0;
    const double ecdf =
        static_cast<double>(std::lower_bound(draws.begin(), draws.end(), x) - draws.begin()) /
        samples;
    worst = std::max(worst, std::fabs(ecdf - cdf_eval(x, spec.variances)));
  }
  report(6, worst <= 0.01,
         "Monte-Carlo CDF agreement (zipf n=100): sup deviation = " + std::to_string(worst));
}

// 7. The score vanishes at the MLE for random counts.
void criterion_7() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  const auto check = [&](const Model& model, double theta_true) {
    const auto p = model.probabilities(theta_true);
    std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
    for (int trial = 0; trial < 100; ++trial) {
      BinCounts counts;
      counts.counts.assign(p.size(), 0);
      for (int d = 0; d < 5000; ++d) ++counts.counts[dist(rng)];
      if (counts.occupied_bins() < 2) continue;
      double theta_hat;
      try {
        theta_hat = mle_estimate(model, counts);
      } catch (const Error&) {
        continue;
      }
      const auto y = counts.fractions();
      const auto g = model.dlog_probabilities(theta_hat);
      double s = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) s += y[k] * g[k];
      worst = std::max(worst, std::fabs(s));
    }
  };
  check(*make_contingency2x2(), 0.03);
  check(*make_zipf(100), 1.0);
  check(*make_poisson(10.3, 1e-8), 10.3);
  report(7, worst <= 1e-10, "MLE score-zero: max |score| = " + std::to_string(worst));
}

// 8. Determinism of `simulate` across runs and thread counts.
void criterion_8() {
  SimulationConfig config;
  config.model = make_contingency2x2();
  config.theta_true = 0.03;
  config.draws_per_sim = 2000;
  config.num_sims = 100;
  config.seed = 77;
  config.threads = 1;
  const SimulationReport serial = run_simulations(config);
  config.threads = 4;
  const SimulationReport parallel = run_simulations(config);
  bool ok = serial.sorted_levels == parallel.sorted_levels &&
            serial.ks_distance == parallel.ks_distance;
  std::string detail = "library levels bit-identical across thread counts";

  if (const char* cli = std::getenv("RMSGOF_CLI")) {
    const auto invoke = [&](const std::string& out) {
      const std::string cmd = std::string(cli) +
                              " simulate --model contingency2x2 --theta 0.03 --m 1000 --j 20 "
                              "--seed 9 --threads 2 --out " +
                              out + " > /dev/null 2>&1";
      return std::system(cmd.c_str()) == 0;
    };
    const auto slurp = [](const std::string& path) {
      std::ifstream in(path);
      std::stringstream buf;
      buf << in.rdbuf();
      return buf.str();
    };
    const bool ran = invoke("acc_qq1.csv") && invoke("acc_qq2.csv");
    const bool identical = ran && !slurp("acc_qq1.csv").empty() &&
                           slurp("acc_qq1.csv") == slurp("acc_qq2.csv");
    std::remove("acc_qq1.csv");
    std::remove("acc_qq2.csv");
    ok = ok && identical;
    detail += identical ? "; CLI output byte-identical" : "; CLI outputs differ";
  } else {
    detail += "; RMSGOF_CLI unset, CLI check skipped";
  }
  report(8, ok, "determinism: " + detail);
}

// 9. Throughput: 1000 Zipf (n = 100) confidence-level evaluations.
void criterion_9() {
  const auto t0 = Clock::now();
  SimulationConfig config;
  config.model = make_zipf(100);
  config.theta_true = 1.0;
  config.draws_per_sim = 20'000;
  config.num_sims = 1000;
  config.seed = 5150;
  const SimulationReport r = run_simulations(config);
  const double elapsed = seconds_since(t0);
  report(9, r.excluded == 0 && elapsed < 60.0,
         "throughput: 1000 zipf evaluations in " + std::to_string(elapsed) + " s");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_and_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failures))
            << std::endl;
  return failures;
}

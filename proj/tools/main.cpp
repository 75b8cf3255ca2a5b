#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmsgof/montecarlo.hpp"
#include "rmsgof/statistic.hpp"

using json = nlohmann::json;

namespace {

struct ModelFlags {
  std::string name = "contingency2x2";
  std::string model_file;
  std::size_t zipf_bins = 100;
  double epsilon = 1e-8;  // truncation mass for infinite-support models
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--model", flags.name,
                  "built-in model: contingency2x2, zipf, poisson")
      ->default_val("contingency2x2");
  cmd->add_option("--model-file", flags.model_file,
                  "tabulated user model (header `n=<int>`, rows `theta,p_1,...,p_n`); "
                  "derivatives by finite differences, approximate");
  cmd->add_option("--n", flags.zipf_bins, "bin count for the Zipf model")->default_val(100);
  cmd->add_option("--epsilon", flags.epsilon,
                  "truncation mass for infinite-support models (default 1e-8)")
      ->default_val(1e-8);
}

// Builds a finite model; infinite-support families are truncated at `theta`.
std::shared_ptr<const rmsgof::Model> build_model(const ModelFlags& flags, double theta) {
  if (!flags.model_file.empty()) return rmsgof::load_tabulated_model(flags.model_file);
  if (flags.name == "contingency2x2") return rmsgof::make_contingency2x2();
  if (flags.name == "zipf") return rmsgof::make_zipf(flags.zipf_bins);
  if (flags.name == "poisson") return rmsgof::make_poisson(theta, flags.epsilon);
  throw rmsgof::Error(rmsgof::errc::bad_input, "unknown model `" + flags.name + "`");
}

std::map<std::uint64_t, std::uint64_t> read_counts_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rmsgof::Error(rmsgof::errc::bad_input, "cannot open counts file " + path);
  std::map<std::uint64_t, std::uint64_t> counts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw rmsgof::Error(rmsgof::errc::bad_input, "counts line `" + line + "` is not `bin,count`");
    try {
      const std::uint64_t bin = std::stoull(a);
      const std::uint64_t c = std::stoull(b);
      if (bin == 0)
        throw rmsgof::Error(rmsgof::errc::bad_input, "bin indices are 1-based");
      counts[bin] += c;
    } catch (const std::invalid_argument&) {
      if (first) continue;  // tolerate a header line
      throw rmsgof::Error(rmsgof::errc::bad_input, "cannot parse counts line `" + line + "`");
    }
    first = false;
  }
  if (counts.empty()) throw rmsgof::Error(rmsgof::errc::bad_input, "counts file is empty");
  return counts;
}

std::vector<double> read_variances(const std::string& arg) {
  std::string text = arg;
  if (std::ifstream in(arg); in) {
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::vector<double> vars;
  std::string tok;
  for (char& c : text)
    if (c == '\n' || c == '\r' || c == ' ') c = ',';
  std::istringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      vars.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw rmsgof::Error(rmsgof::errc::bad_input, "cannot parse variance `" + tok + "`");
    }
  }
  if (vars.empty()) throw rmsgof::Error(rmsgof::errc::bad_input, "no variances supplied");
  return vars;
}

json quadrature_json(const rmsgof::QuadratureReport& q) {
  return {{"nodes_used", q.nodes_used},
          {"subdivisions", q.subdivisions},
          {"est_error", q.est_error}};
}

int cmd_models() {
  json out = json::array();
  out.push_back({{"name", "contingency2x2"},
                 {"n_bins", 4},
                 {"probabilities", "p1 = .04 t, p2 = .04 (1-t), p3 = .96 t, p4 = .96 (1-t)"},
                 {"mle", "t-hat = Y1 + Y3"},
                 {"theta_domain", {0.0, 1.0}}});
  out.push_back({{"name", "zipf"},
                 {"n_bins", "set with --n (default 100)"},
                 {"probabilities", "p_k = k^-t / sum_i i^-t"},
                 {"mle", "solve f(t) = sum Y_k ln k by bisection, "
                         "f(t) = (sum k^-t ln k) / (sum k^-t)"},
                 {"theta_domain", {-50.0, 50.0}}});
  out.push_back({{"name", "poisson"},
                 {"n_bins", "support truncated to mass 1 - epsilon (--epsilon, default 1e-8)"},
                 {"probabilities", "p_k = e^-t t^(k-1) / (k-1)!"},
                 {"mle", "t-hat = sum (k-1) Y_k"},
                 {"theta_domain", {0.0, 1e6}}});
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_cdf(double x, const std::string& variances_arg, double tol, double upper, bool verbose) {
  const std::vector<double> vars = read_variances(variances_arg);
  const rmsgof::QuadratureReport report = rmsgof::cdf_eval_report(x, vars, tol, upper);
  std::cout.precision(15);
  std::cout << report.value << "\n";
  if (verbose)
    std::cerr << "nodes_used=" << report.nodes_used << " subdivisions=" << report.subdivisions
              << " est_error=" << report.est_error << "\n";
  return 0;
}

int cmd_level(const ModelFlags& flags, const std::string& counts_path,
              const std::string& dump_spectrum, bool verbose) {
  const auto raw = read_counts_csv(counts_path);
  std::uint64_t m = 0;
  for (const auto& [bin, c] : raw) m += c;

  std::shared_ptr<const rmsgof::Model> model;
  if (flags.model_file.empty() && flags.name == "poisson") {
    // The Poisson estimator has a closed form over the raw observed bins, so
    // estimate first and truncate the support at theta-hat.
    double theta_hat = 0.0;
    for (const auto& [bin, c] : raw)
      theta_hat += static_cast<double>(bin - 1) * static_cast<double>(c) / static_cast<double>(m);
    if (theta_hat <= 0.0)
      throw rmsgof::Error(rmsgof::errc::estimate_at_boundary, "poisson: mean estimate is 0");
    model = rmsgof::make_poisson(theta_hat, flags.epsilon);
  } else {
    model = build_model(flags, 0.0);
  }

  const std::size_t n = model->n_bins();
  rmsgof::BinCounts counts;
  counts.counts.assign(n, 0);
  for (const auto& [bin, c] : raw) {
    if (bin <= n) {
      counts.counts[bin - 1] += c;
    } else if (model->truncation_epsilon()) {
      counts.overflow += c;
    } else {
      throw rmsgof::Error(rmsgof::errc::bad_input,
                          "bin " + std::to_string(bin) + " exceeds the model's " +
                              std::to_string(n) + " bins");
    }
  }

  json out;
  try {
    const rmsgof::GofResult r = rmsgof::confidence_level(*model, counts);
    out = {{"model", model->name()},
           {"n_bins", n},
           {"m", m},
           {"x_stat", r.x_stat},
           {"rms", r.rms},
           {"theta_hat", r.theta_hat},
           {"chi2_stat", r.chi2_stat},
           {"confidence_level", r.confidence_level},
           {"p_value", r.p_value},
           {"derivative_analytic", r.derivative_analytic},
           {"spectrum",
            {{"variances", r.spectrum.variances},
             {"zero_count", r.spectrum.zero_count},
             {"condition_diag", r.spectrum.condition_diag}}},
           {"quadrature", quadrature_json(r.quadrature)}};
    if (!dump_spectrum.empty()) {
      std::ofstream dump(dump_spectrum);
      if (!dump)
        throw rmsgof::Error(rmsgof::errc::bad_input, "cannot open " + dump_spectrum);
      dump.precision(15);
      for (std::size_t i = 0; i < r.spectrum.eigenvalues.size(); ++i)
        dump << (i ? "," : "") << r.spectrum.eigenvalues[i];
      dump << "\n";
    }
    if (verbose)
      std::cerr << "nodes_used=" << r.quadrature.nodes_used
                << " condition_diag=" << r.spectrum.condition_diag << "\n";
  } catch (const rmsgof::Error& e) {
    if (e.code() != rmsgof::errc::overflow_mass_too_large) throw;
    // Far more mass beyond the truncated support than the model allows.
    out = {{"model", model->name()},
           {"n_bins", n},
           {"m", m},
           {"confidence_level", 1.0},
           {"p_value", 0.0},
           {"note", e.what()}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const ModelFlags& flags, double theta, std::uint64_t m, int j,
                 std::uint64_t seed, int threads, const std::string& out_path) {
  rmsgof::SimulationConfig config;
  config.model = build_model(flags, theta);
  config.theta_true = theta;
  config.draws_per_sim = m;
  config.num_sims = j;
  config.seed = seed;
  config.threads = threads;
  const rmsgof::SimulationReport report = rmsgof::run_simulations(config);
  if (!out_path.empty()) rmsgof::qq_export(report, out_path);
  json out = {{"model", config.model->name()},
              {"n_bins", config.model->n_bins()},
              {"theta", theta},
              {"m", m},
              {"j", j},
              {"seed", seed},
              {"ks_distance", report.ks_distance},
              {"max_nodes", report.max_nodes},
              {"excluded", report.excluded},
              {"elapsed_quadrature_s", report.elapsed_quadrature_s},
              {"elapsed_simulation_s", report.elapsed_simulation_s}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic confidence levels for the root-mean-square goodness-of-fit test "
               "with a maximum-likelihood-estimated parameter"};
  app.require_subcommand(1);

  CLI::App* models = app.add_subcommand("models", "list the built-in models");
  (void)models;

  CLI::App* cdf = app.add_subcommand(
      "cdf", "CDF of a weighted sum of squared standard Gaussians at x");
  double x = 0.0;
  std::string variances_arg;
  double tol = 1e-12, upper = 40.0;
  bool verbose = false;
  cdf->add_option("--x", x, "statistic value")->required();
  cdf->add_option("--variances", variances_arg, "comma-separated list or a file of variances")
      ->required();
  cdf->add_option("--tol", tol, "absolute quadrature tolerance")->default_val(1e-12);
  cdf->add_option("--upper", upper, "upper integration limit (diagnostic; default 40)")
      ->default_val(40.0);
  cdf->add_flag("--verbose", verbose, "print node count and error estimate to stderr");

  CLI::App* level = app.add_subcommand(
      "level", "confidence level that observed counts do not come from the model");
  ModelFlags level_model;
  add_model_flags(level, level_model);
  std::string counts_path, dump_spectrum;
  bool level_verbose = false;
  level->add_option("--counts", counts_path, "CSV of `bin_index,count` lines (1-based)")
      ->required();
  level->add_option("--dump-spectrum", dump_spectrum,
                    "write the eigenvalues of B as CSV (descending)");
  level->add_flag("--verbose", level_verbose, "print diagnostics to stderr");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo validation: simulate draws from the model and report "
                  "the uniformity of the computed levels");
  ModelFlags sim_model;
  add_model_flags(simulate, sim_model);
  double theta = 0.0;
  std::uint64_t m = 100'000, seed = 0;
  int j = 1'000, threads = 0;
  std::string out_path;
  simulate->add_option("--theta", theta, "true model parameter")->required();
  simulate->add_option("--m", m, "draws per simulation")->default_val(100'000);
  simulate->add_option("--j", j, "number of simulations")->default_val(1'000);
  simulate->add_option("--seed", seed, "master RNG seed")->default_val(0);
  simulate->add_option("--threads", threads, "worker threads (0 = auto; results identical)")
      ->default_val(0);
  simulate->add_option("--out", out_path, "Q-Q CSV output path (`grid,level`)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("models")) return cmd_models();
    if (app.got_subcommand("cdf")) return cmd_cdf(x, variances_arg, tol, upper, verbose);
    if (app.got_subcommand("level"))
      return cmd_level(level_model, counts_path, dump_spectrum, level_verbose);
    if (app.got_subcommand("simulate"))
      return cmd_simulate(sim_model, theta, m, j, seed, threads, out_path);
  } catch (const rmsgof::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rmsgof::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("RMSGOF_CLI");
  REQUIRE_MESSAGE(p != nullptr, "RMSGOF_CLI must point at the CLI binary");
  return p;
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string out_path = "cli_test_stdout.tmp";
  const std::string cmd = cli_path() + " " + args + " > " + out_path + " 2> cli_test_stderr.tmp";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return {WEXITSTATUS(status), buf.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("models subcommand lists the built-ins") {
  const RunResult r = run("models");
  CHECK(r.exit_code == 0);
  const json out = json::parse(r.out);
  REQUIRE(out.size() == 3);
  CHECK(out[0]["name"] == "contingency2x2");
  CHECK(out[1]["name"] == "zipf");
  CHECK(out[2]["name"] == "poisson");
}

TEST_CASE("cdf subcommand") {
  const RunResult r = run("cdf --x 2 --variances 1,1");
  CHECK(r.exit_code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));

  // Nonpositive x is accepted and evaluates to 0.
  const RunResult zero = run("cdf --x -1 --variances 1");
  CHECK(zero.exit_code == 0);
  CHECK(std::stod(zero.out) == 0.0);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run("simulate --m 100").exit_code == 2);  // missing --theta
  CHECK(run("").exit_code == 2);                  // missing subcommand
  CHECK(run("no-such-subcommand").exit_code == 2);
}

TEST_CASE("level subcommand on the contingency example") {
  write_file("cli_counts.csv", "1,1\n2,4\n3,2\n4,93\n");
  const RunResult r = run("level --model contingency2x2 --counts cli_counts.csv");
  CHECK(r.exit_code == 0);
  const json out = json::parse(r.out);
  CHECK(out["theta_hat"].get<double>() == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(out["x_stat"].get<double>() == doctest::Approx(0.015776).epsilon(1e-10));
  CHECK(out["p_value"].get<double>() ==
        doctest::Approx(1.0 - out["confidence_level"].get<double>()).epsilon(1e-14));
  CHECK(out["spectrum"]["zero_count"] == 2);
  std::remove("cli_counts.csv");
}

TEST_CASE("level on counts proportional to the model reports a null level") {
  write_file("cli_counts.csv", "1,100\n2,300\n3,2400\n4,7200\n");
  const RunResult r = run("level --model contingency2x2 --counts cli_counts.csv");
  CHECK(r.exit_code == 0);
  const json out = json::parse(r.out);
  CHECK(out["confidence_level"].get<double>() <= 1e-9);
  std::remove("cli_counts.csv");
}

TEST_CASE("level with a spectrum dump") {
  write_file("cli_counts.csv", "1,1\n2,4\n3,2\n4,93\n");
  const RunResult r = run(
      "level --model contingency2x2 --counts cli_counts.csv --dump-spectrum cli_spec.csv");
  CHECK(r.exit_code == 0);
  std::istringstream dump(slurp("cli_spec.csv"));
  std::vector<double> eig;
  std::string tok;
  while (std::getline(dump, tok, ',')) eig.push_back(std::stod(tok));
  REQUIRE(eig.size() == 4);
  CHECK(std::is_sorted(eig.rbegin(), eig.rend()));
  CHECK(eig[0] == doctest::Approx((1.0 / 0.0012 + 1.0 / 0.0288) / 2.0).epsilon(1e-9));
  std::remove("cli_counts.csv");
  std::remove("cli_spec.csv");
}

TEST_CASE("data errors exit with status 3") {
  CHECK(run("level --model contingency2x2 --counts does_not_exist.csv").exit_code == 3);
  write_file("cli_counts.csv", "not,a,count\nstill,not\n");
  CHECK(run("level --model contingency2x2 --counts cli_counts.csv").exit_code == 3);
  // A single occupied bin cannot support estimation.
  write_file("cli_counts.csv", "4,100\n");
  CHECK(run("level --model contingency2x2 --counts cli_counts.csv").exit_code == 3);
  std::remove("cli_counts.csv");
}

TEST_CASE("numeric errors exit with status 4") {
  // All Poisson draws in bin 1: the mean estimate sits on the boundary.
  write_file("cli_counts.csv", "1,100\n");
  CHECK(run("level --model poisson --counts cli_counts.csv").exit_code == 4);
  std::remove("cli_counts.csv");
}

TEST_CASE("poisson level truncates at theta-hat and accepts overflow bins") {
  // Draws concentrated around 10 with one far-out observation.
  std::ostringstream counts;
  for (int k = 5; k <= 18; ++k) counts << k << "," << 100 << "\n";
  counts << "120,1\n";  // single draw far past the truncated support
  write_file("cli_counts.csv", counts.str());
  const RunResult r = run("level --model poisson --counts cli_counts.csv");
  CHECK(r.exit_code == 0);
  const json out = json::parse(r.out);
  // One draw in 1401 is ~7e-4 > 10 * eps: the CLI reports level ~ 1 with a note.
  CHECK(out["confidence_level"].get<double>() == 1.0);
  CHECK(out.contains("note"));
  std::remove("cli_counts.csv");
}

TEST_CASE("simulate is byte-identical across runs and thread counts") {
  const std::string base =
      "simulate --model contingency2x2 --theta 0.03 --m 1000 --j 20 --seed 7";
  const RunResult r1 = run(base + " --threads 1 --out cli_qq1.csv");
  const RunResult r2 = run(base + " --threads 4 --out cli_qq2.csv");
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(slurp("cli_qq1.csv") == slurp("cli_qq2.csv"));

  const json s1 = json::parse(r1.out);
  CHECK(s1["ks_distance"].is_number());
  CHECK(s1["excluded"] == 0);
  std::remove("cli_qq1.csv");
  std::remove("cli_qq2.csv");
}

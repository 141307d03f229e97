#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csthresh/cli.hpp"
#include "csthresh/errors.hpp"

using namespace csthresh;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "csthresh");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  return v;
}

std::string temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("csthresh_test_" + name);
  std::ofstream(p) << body;
  return p.string();
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = cli::parse_grid("0.01:0.24:0.01");
  REQUIRE(g.size() == 24);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == doctest::Approx(0.24));
  CHECK(cli::parse_grid("0.3:0.3:0.1").size() == 1);
  CHECK_THROWS_AS(cli::parse_grid("0.5:0.4:0.1"), DomainError);
  CHECK_THROWS_AS(cli::parse_grid("0.1:0.2:0"), DomainError);
  CHECK_THROWS_AS(cli::parse_grid("0.1:0.2"), DomainError);
  CHECK_THROWS_AS(cli::parse_grid("a:0.2:0.1"), DomainError);
  CHECK_THROWS_AS(cli::parse_grid("0.1:0.2:0.1x"), DomainError);
}

TEST_CASE("exit codes") {
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"curve", "--help"}).code == cli::kExitOk);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"bogus"}).code == cli::kExitUsage);
  CHECK(run({"curve", "--kind", "nope", "--beta", "0.1:0.2:0.1"}).code == cli::kExitUsage);
  CHECK(run({"curve", "--kind", "weak", "--beta", "0.5:0.4:0.1"}).code == cli::kExitUsage);
  CHECK(run({"invert", "--kind", "weak", "--alpha", "1.5"}).code == cli::kExitUsage);
  CHECK(run({"curve", "--kind", "weak", "--beta", "0.1:0.1:0.1", "--eps", "2"}).code ==
        cli::kExitUsage);
  const Run bad = run({"check-nsp", "--matrix", "/nonexistent/file", "--k", "1"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("error:") != std::string::npos);
}

TEST_CASE("curve at the strong endpoint") {
  const Run r = run({"curve", "--kind", "strong", "--beta", "0.24:0.24:0.01"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "kind,beta,theta_hat,alpha_min,eps,flags");
  const auto f = fields(ls[1]);
  REQUIRE(f.size() == 6);
  CHECK(f[0] == "strong");
  CHECK(std::stod(f[3]) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(f[5].find("saturated") != std::string::npos);
}

TEST_CASE("curve csv round-trips at full precision") {
  const Run r = run({"curve", "--kind", "weak", "--beta", "0.05:0.45:0.1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 6);
  const auto grid = cli::parse_grid("0.05:0.45:0.1");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto f = fields(ls[i + 1]);
    const double beta = std::stod(f[1]);
    CHECK(beta == grid[i]);
    const CurvePoint p = alpha_bound(ThresholdKind::WeakFixedSupportSigns, beta);
    CHECK(std::stod(f[3]) == p.alpha_min);
    CHECK(std::stod(f[2]) == p.theta_hat);
  }
}

TEST_CASE("curve json and svg") {
  const std::string svg = temp_file("curve.svg", "");
  const Run r = run({"curve", "--kind", "sectional", "--beta", "0.1:0.3:0.1", "--format", "json",
                     "--svg", svg});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.size() == 3);
  CHECK(j[0]["kind"] == "sectional");
  CHECK(j[1]["alpha_min"].get<double>() > j[0]["alpha_min"].get<double>());
  std::ifstream in(svg);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("<polyline") != std::string::npos);
  std::filesystem::remove(svg);
}

TEST_CASE("invert output") {
  const Run r = run({"invert", "--kind", "weak", "--alpha", "0.5", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["beta"].get<double>() ==
        doctest::Approx(invert_alpha(ThresholdKind::WeakFixedSupportSigns, 0.5)));
  CHECK(j["alpha_min"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  const Run csv = run({"invert", "--kind", "nonneg", "--alpha", "0.5"});
  REQUIRE(csv.code == 0);
  CHECK(lines(csv.out).size() == 2);
}

TEST_CASE("width report is reproducible") {
  const std::vector<std::string> args = {"width", "--kind", "weak", "--n", "400", "--k", "20",
                                         "--m", "200", "--samples", "30", "--seed", "9"};
  const Run a = run(args);
  auto threaded = args;
  threaded.insert(threaded.begin(), {"--threads", "3"});
  const Run b = run(threaded);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["samples"] == 30);
  CHECK(j["c_mode"] == "exact");
  CHECK(j["pass"].is_boolean());
  CHECK(j["std_err"].get<double>() > 0.0);
}

TEST_CASE("phase output is reproducible") {
  const std::vector<std::string> args = {"phase", "--n", "20", "--alpha", "0.5:1:0.5", "--beta",
                                         "0.1:0.2:0.1", "--trials", "3", "--model", "weak",
                                         "--seed", "4"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto ls = lines(a.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "alpha,beta,n,trials,successes,lp_failures,seed");
  auto json_args = args;
  json_args.insert(json_args.end(), {"--format", "json"});
  const json j = json::parse(run(json_args).out);
  CHECK(j.size() == 4);
  CHECK(j[3]["m"] == 20);
}

TEST_CASE("check-nsp on small matrices") {
  const std::string ones = temp_file("ones.txt", "1 2\n1 1\n");
  const Run r = run({"check-nsp", "--matrix", ones, "--k", "1"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(0) == "boundary");

  const std::string eye = temp_file("eye.txt", "3 3\n1 0 0\n0 1 0\n0 0 1\n");
  for (const char* v : {"strong", "sectional", "weak", "nonneg"}) {
    const Run e = run({"check-nsp", "--matrix", eye, "--k", "2", "--variant", v});
    REQUIRE(e.code == 0);
    CHECK(lines(e.out).at(0) == "holds");
  }
  const Run j = run({"check-nsp", "--matrix", ones, "--k", "1", "--format", "json"});
  const json parsed = json::parse(j.out);
  CHECK(parsed["verdict"] == "boundary");
  CHECK(parsed.contains("witness"));
  std::filesystem::remove(ones);
  std::filesystem::remove(eye);
}

TEST_CASE("matrix reader") {
  std::istringstream ok("2 2\n1 2\n3 4\n");
  const Eigen::MatrixXd A = cli::read_matrix(ok);
  CHECK(A(1, 0) == 3.0);
  std::istringstream short_file("2 2\n1 2\n3\n");
  CHECK_THROWS_AS(cli::read_matrix(short_file), DomainError);
  std::istringstream trailing("1 1\n1\n2\n");
  CHECK_THROWS_AS(cli::read_matrix(trailing), DomainError);
  std::istringstream header("0 3\n");
  CHECK_THROWS_AS(cli::read_matrix(header), DomainError);
}

TEST_CASE("format_double keeps 17 significant digits") {
  const double v = 0.1 + 0.2;
  CHECK(std::stod(cli::format_double(v)) == v);
  CHECK(cli::format_double(1.0) == "1");
}

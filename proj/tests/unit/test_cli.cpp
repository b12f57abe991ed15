#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "freeconv/suites.hpp"
#include "json.hpp"

#ifndef FREECONV_BIN
#error "FREECONV_BIN must name the CLI executable"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(FREECONV_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("classify") {
  Run r = run("classify --alpha 0.5 --rho 1");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["verdict"]["decision"] == true);
  CHECK(j["verdict"]["rule"] == "alpha_le_half");

  j = nlohmann::json::parse(run("classify --alpha 1 --rho 0.5").out);
  CHECK(j["verdict"]["decision"] == true);
  CHECK(j["verdict"]["rule"] == "cauchy");

  r = run("classify --alpha 1.5 --rho 0.2");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["verdict"]["decision"] == false);
}

TEST_CASE("classify with the numeric verifier") {
  const Run r = run("classify --alpha 0.6 --rho 0.5 --numeric");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["agree"] == true);
}

TEST_CASE("usage and parameter errors exit with 1") {
  CHECK(run("classify --alpha 3 --rho 0.5").code == 1);
  CHECK(run("classify --alpha 0.5").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("verify --suite nope").code == 1);
  CHECK(run("convolve --op free --lhs boolean:0.9,1 --power 0.5").code == 1);
  CHECK(run("density --family classical --alpha 0.5 --rho 0.3").code == 1);
}

TEST_CASE("density tables") {
  const Run r = run("density --family boolean --alpha 0.5 --rho 1 --x-min 0.01 --x-max 100 --n 501 --format csv");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("x,density\n", 0) == 0);
  // Node 250 of a 501-point log grid on [0.01, 100] is x = 1.
  std::size_t pos = 0;
  for (int line = 0; line < 251; ++line) pos = r.out.find('\n', pos) + 1;
  const std::string row = r.out.substr(pos, r.out.find('\n', pos) - pos);
  const double x = std::stod(row.substr(0, row.find(','))), f = std::stod(row.substr(row.find(',') + 1));
  CHECK(x == doctest::Approx(1.0));
  CHECK(f == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
  CHECK(r.out.find("# mass_estimate,") != std::string::npos);
}

TEST_CASE("mixture file with a single atom reproduces the boolean table") {
  const std::string sigma = temp_file("freeconv_sigma.json", R"({"atoms":[{"alpha":0.5,"lambda":1.0}],"continuous":null})");
  const auto a = nlohmann::json::parse(run("density --family mixture --sigma-file " + sigma + " --n 50").out);
  const auto b = nlohmann::json::parse(run("density --family boolean --alpha 0.5 --rho 1 --n 50").out);
  REQUIRE(a["density"].size() == 50);
  for (std::size_t i = 0; i < 50; ++i)
    CHECK(std::abs(a["density"][i].get<double>() - b["density"][i].get<double>()) <= 1e-12);
}

TEST_CASE("classical density table") {
  const auto j = nlohmann::json::parse(run("density --family classical --alpha 0.5 --x-min 0.1 --x-max 10 --n 3").out);
  const double x = j["x"][1], f = j["density"][1];
  CHECK(f == doctest::Approx(std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(M_PI) * std::pow(x, 1.5))));
}

TEST_CASE("convolve") {
  auto j = nlohmann::json::parse(run("convolve --op freemult --lhs boolean:0.5,1 --rhs boolean:0.5,1 --n 20").out);
  const auto t = nlohmann::json::parse(run("density --family boolean --alpha 0.3333333333333333 --rho 1 --n 20").out);
  for (std::size_t i = 0; i < 20; ++i)
    CHECK(std::abs(j["density"][i].get<double>() - t["density"][i].get<double>()) <= 1e-3 * t["density"][i].get<double>());

  j = nlohmann::json::parse(run("convolve --op free --lhs boolean:0.5,1 --rhs boolean:0.5,1 --n 10").out);
  CHECK(j["diagnostics"]["max_residual"].get<double>() <= 1e-10);
  CHECK(j["method"] == "subordination_fixpoint");

  // b^{(+)2} = D_{2^{1/alpha}} b; with alpha = 1/2 the dilation is by 4: f(x/4)/4.
  j = nlohmann::json::parse(run("convolve --op boolean --lhs boolean:0.5,1 --power 2 --n 10").out);
  for (std::size_t i = 0; i < 10; ++i) {
    const double x = j["x"][i], y = x / 4.0;
    CHECK(j["density"][i].get<double>() == doctest::Approx(1.0 / (M_PI * std::sqrt(y) * (1.0 + y)) / 4.0).epsilon(1e-6));
  }

  const Run c = run("convolve --op classmult --lhs classical:0.5 --rhs classical:0.5 --n 5 --format csv");
  CHECK(c.code == 0);
  CHECK(c.out.rfind("x,density\n", 0) == 0);
}

TEST_CASE("verify exit codes and summary") {
  Run r = run("verify --suite reproducing");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["passed"] == true);

  // An impossible tolerance turns the same suite into a failure.
  const std::string cfg = temp_file("freeconv_cfg.json", R"({"schema":1,"tolerances":{"strict_stability":1e-30}})");
  r = run("verify --suite reproducing --config " + cfg);
  CHECK(r.code == 3);
  CHECK(nlohmann::json::parse(r.out)["passed"] == false);

  r = run("verify --suite reproducing --format csv");
  CHECK(r.out.rfind("id,name,passed,seconds\n", 0) == 0);
}

TEST_CASE("run config parsing") {
  using freeconv::RunConfig;
  const auto j = nlohmann::json::parse(
      R"({"schema":1,"grid":{"nx":11,"ny":5},"output_format":"csv","parallelism":2,"seed":9})");
  const RunConfig c = j.get<RunConfig>();
  CHECK(c.grid.nx == 11);
  CHECK(c.output_format == freeconv::OutputFormat::csv);
  CHECK(c.seed == 9);
  CHECK(c.tol("density") == 1e-4);
  nlohmann::json back = c;
  CHECK(back["schema"] == 1);
  CHECK_THROWS(nlohmann::json::parse(R"({"grid":{"nx":1}})").get<RunConfig>());
  CHECK_THROWS(nlohmann::json::parse(R"({"tolerances":{"mass":-1}})").get<RunConfig>());
  CHECK_THROWS(nlohmann::json::parse(R"({"parallelism":0})").get<RunConfig>());
}

TEST_CASE("suites are deterministic for a fixed seed") {
  freeconv::RunConfig cfg;
  const auto a = freeconv::run_criterion(4, cfg), b = freeconv::run_criterion(4, cfg);
  CHECK(a.detail == b.detail);
  CHECK(freeconv::suite_criteria("all").size() == 11);
  CHECK_THROWS(freeconv::suite_criteria("other"));
}

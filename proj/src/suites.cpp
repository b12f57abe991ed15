#include "freeconv/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "freeconv/complete_monotonicity.hpp"
#include "freeconv/convolutions.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/mixtures.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

std::map<std::string, double> RunConfig::default_tolerances() {
  return {{"fid_im_phi", 1e-9},       {"witness_im_phi", 1e-6},  {"jump", 1e-3},
          {"density", 1e-4},          {"mass", 1e-6},            {"strict_stability", 1e-12},
          {"reproducing", 1e-3},      {"identity_density", 1e-4}, {"identity_mult", 1e-3},
          {"bercovici_pata", 1e-4},   {"ray_residual", 1e-10},   {"mixture_density", 1e-4}};
}

void RunConfig::validate() const {
  for (const auto& [name, v] : tolerances)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("RunConfig: tolerance '" + name + "' must be positive");
  if (grid.nx < 2 || grid.ny < 2) throw DomainError("RunConfig: grid counts must be at least 2");
  if (!(grid.x_min < grid.x_max) || !(grid.y_min > 0.0 && grid.y_min < grid.y_max))
    throw DomainError("RunConfig: grid ranges must be increasing with y_min > 0");
  if (parallelism < 1) throw DomainError("RunConfig: parallelism must be positive");
  if (mixture_nodes < 1) throw DomainError("RunConfig: mixture_nodes must be positive");
}

double RunConfig::tol(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it != tolerances.end()) return it->second;
  const auto defaults = default_tolerances();
  const auto d = defaults.find(name);
  if (d == defaults.end()) throw DomainError("RunConfig: unknown tolerance '" + name + "'");
  return d->second;
}

FidGridSpec RunConfig::fid_grid() const {
  FidGridSpec g;
  g.x_min = grid.x_min;
  g.x_max = grid.x_max;
  g.nx = grid.nx;
  g.y_min = grid.y_min;
  g.y_max = grid.y_max;
  g.ny = grid.ny;
  g.jump_tol = tol("jump");
  return g;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("RunConfig: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("RunConfig: " + path + ": " + e.what());
  }
  return j.get<RunConfig>();
}

RunConfig RunConfig::from_env() {
  const char* path = std::getenv("FREECONV_CONFIG");
  if (path == nullptr || *path == '\0') return RunConfig{};
  return from_file(path);
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"schema", 1},
                     {"tolerances", c.tolerances},
                     {"grid",
                      {{"x_min", c.grid.x_min},
                       {"x_max", c.grid.x_max},
                       {"nx", c.grid.nx},
                       {"y_min", c.grid.y_min},
                       {"y_max", c.grid.y_max},
                       {"ny", c.grid.ny}}},
                     {"output_format", c.output_format == OutputFormat::json ? "json" : "csv"},
                     {"parallelism", c.parallelism},
                     {"seed", c.seed},
                     {"mixture_nodes", c.mixture_nodes}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  c = RunConfig{};
  try {
    if (j.contains("schema") && j["schema"].get<int>() != 1) throw DomainError("RunConfig: unsupported schema");
    if (j.contains("tolerances"))
      for (const auto& [k, v] : j["tolerances"].items()) c.tolerances[k] = v.get<double>();
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      c.grid.x_min = g.value("x_min", c.grid.x_min);
      c.grid.x_max = g.value("x_max", c.grid.x_max);
      c.grid.nx = g.value("nx", c.grid.nx);
      c.grid.y_min = g.value("y_min", c.grid.y_min);
      c.grid.y_max = g.value("y_max", c.grid.y_max);
      c.grid.ny = g.value("ny", c.grid.ny);
    }
    if (j.contains("output_format")) {
      const std::string f = j["output_format"].get<std::string>();
      if (f == "json")
        c.output_format = OutputFormat::json;
      else if (f == "csv")
        c.output_format = OutputFormat::csv;
      else
        throw DomainError("RunConfig: output_format must be json or csv");
    }
    c.parallelism = j.value("parallelism", c.parallelism);
    c.seed = j.value("seed", c.seed);
    c.mixture_nodes = j.value("mixture_nodes", c.mixture_nodes);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("RunConfig: ") + e.what());
  }
  c.validate();
}

void to_json(nlohmann::json& j, const CriterionResult& r) {
  j = nlohmann::json{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"detail", r.detail}};
}

void to_json(nlohmann::json& j, const SuiteReport& r) {
  j = nlohmann::json{{"schema", 1}, {"suite", r.suite}, {"passed", r.passed}, {"criteria", r.results}};
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

nlohmann::json cplx(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

struct Check {
  bool passed = true;
  nlohmann::json detail = nlohmann::json::object();
};

Check fid_truth_table(const RunConfig&) {
  struct Row {
    double alpha, rho;
    bool fid;
    FidRule rule;
  };
  const double a23 = 2.0 / 3.0;
  const std::vector<Row> rows{
      {0.5, 0.0, true, FidRule::alpha_le_half},     {0.5, 0.3, true, FidRule::alpha_le_half},
      {0.5, 1.0, true, FidRule::alpha_le_half},     {0.2, 0.7, true, FidRule::alpha_le_half},
      {a23, 0.5, true, FidRule::middle_band},       {0.6, 1.0 / 0.6 - 1.0, true, FidRule::middle_band},
      {0.6, 2.0 - 1.0 / 0.6, true, FidRule::middle_band}, {0.55, 0.5, true, FidRule::middle_band},
      {0.6, 0.0, false, FidRule::none},             {0.6, 0.7, false, FidRule::none},
      {a23, 0.45, false, FidRule::none},            {0.7, 0.5, false, FidRule::none},
      {1.0, 0.5, true, FidRule::cauchy},            {1.0, 0.4, false, FidRule::none},
      {1.0, 0.0, false, FidRule::none},             {0.9, 0.5, false, FidRule::none},
      {1.5, 0.5, false, FidRule::none},             {1.5, 0.4, false, FidRule::none},
      {2.0, 0.5, false, FidRule::none}};
  Check c;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& r : rows) {
    const FIDVerdict v = classify_fid(r.alpha, r.rho);
    const bool ok = v.decision == r.fid && v.rule == r.rule;
    c.passed = c.passed && ok;
    table.push_back({{"alpha", r.alpha}, {"rho", r.rho}, {"decision", v.decision},
                     {"rule", to_string(*v.rule)}, {"ok", ok}});
  }
  c.detail["table"] = table;
  return c;
}

Check fid_agreement(const RunConfig& cfg) {
  const std::vector<double> alphas{0.3, 0.55, 0.6, 0.7, 0.9};
  const std::vector<double> rhos{0.0, 0.25, 0.5, 0.75, 1.0};
  const int n = static_cast<int>(alphas.size() * rhos.size());
  std::vector<nlohmann::json> rows(n);
  std::vector<char> ok(n, 0);
  const FidGridSpec grid = cfg.fid_grid();
  const double tol = cfg.tol("fid_im_phi");
  const double wtol = cfg.tol("witness_im_phi");
  const double jtol = cfg.tol("jump");
  parallel_for(n, cfg.parallelism, [&](int k) {
    const double a = alphas[k / rhos.size()], r = rhos[k % rhos.size()];
    const FIDVerdict expect = classify_fid(a, r);
    const FIDVerdict got = verify_fid_numeric(a, r, grid, tol);
    bool good = got.decision == expect.decision;
    if (!expect.decision) {
      const auto& e = got.evidence;
      const bool witness = e.witness.has_value() &&
                           ((e.witness_kind == "im_phi" && e.witness_value > wtol) ||
                            (e.witness_kind == "jump" && e.witness_value > jtol) || e.witness_kind == "f0_divergence");
      good = good && witness;
    }
    ok[k] = good;
    rows[k] = {{"alpha", a}, {"rho", r}, {"expected", expect.decision}, {"verdict", got}, {"ok", good}};
  });
  Check c;
  c.passed = std::all_of(ok.begin(), ok.end(), [](char b) { return b != 0; });
  c.detail["points"] = rows;
  return c;
}

Check density_inversion(const RunConfig& cfg) {
  const std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const int n = static_cast<int>(alphas.size());
  std::vector<nlohmann::json> rows(n);
  std::vector<char> ok(n, 0);
  const double dtol = cfg.tol("density"), mtol = cfg.tol("mass");
  parallel_for(n, cfg.parallelism, [&](int k) {
    const double a = alphas[k];
    const MeasureHandle b = boolean_stable_handle(a, 1.0);
    const auto xs = log_space(1e-2, 1e2, 200);
    const StieltjesInversion inv = stieltjes_invert(b, xs);
    double err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      err = std::max(err, std::abs(inv.density.values[i] - boolean_stable_density(a, 1.0, xs[i])));
    StieltjesOptions wide;
    wide.tail_exponent = -a - 1.0;
    wide.head_exponent = a - 1.0;
    const auto wx = log_space(1e-60, 1e60, 6000);
    const double mass = stieltjes_invert(b, wx, wide).density.mass();
    ok[k] = err <= dtol && std::abs(mass - 1.0) <= mtol;
    rows[k] = {{"alpha", a}, {"sup_err", err}, {"mass", mass}, {"ok", ok[k] != 0}};
  });
  Check c;
  c.passed = std::all_of(ok.begin(), ok.end(), [](char b) { return b != 0; });
  c.detail["alphas"] = rows;
  return c;
}

Check strict_stability(const RunConfig& cfg) {
  const std::vector<std::pair<double, double>> pairs{{0.3, 1.0}, {0.5, 0.5}, {0.7, 0.2}, {0.9, 0.0}, {1.0, 0.5},
                                                     {1.2, 0.6}, {1.5, 0.4}, {1.8, 0.5}, {0.4, 0.8}, {2.0, 0.5}};
  std::mt19937_64 rng(cfg.seed);
  std::vector<Complex> pts;
  for (int k = 0; k < 100; ++k) {
    const double x = -10.0 + 20.0 * uniform01(rng);
    const double y = std::pow(10.0, -2.0 + 4.0 * uniform01(rng));
    pts.emplace_back(x, y);
  }
  Check c;
  const double tol = cfg.tol("strict_stability");
  nlohmann::json rows = nlohmann::json::array();
  for (auto [a, r] : pairs) {
    const MeasureHandle b = boolean_stable_handle(a, r);
    const MeasureHandle bb = boolean_convolve(b, b).handle;
    const MeasureHandle d = dilate(b, std::pow(2.0, 1.0 / a));
    double err = 0.0;
    for (Complex z : pts) {
      const Complex kd = d.K(z);
      err = std::max(err, std::abs(bb.K(z) - kd) / std::abs(kd));
    }
    c.passed = c.passed && err <= tol;
    rows.push_back({{"alpha", a}, {"rho", r}, {"sup_rel_err", err}});
  }
  c.detail["pairs"] = rows;
  c.detail["points"] = pts.size();
  return c;
}

Check reproducing(const RunConfig& cfg) {
  const double tol = cfg.tol("reproducing");
  const std::vector<Complex> grid = standard_grid(5, 4);
  const std::vector<IdentityReport> reps{verify_boolean_reproducing(1.0, 1.0, 1.0, tol, grid),
                                         verify_boolean_reproducing(1.0, 1.0, 2.0, tol, grid),
                                         verify_boolean_reproducing(0.3, 1.0, 1.0, tol, grid)};
  Check c;
  for (const auto& r : reps) c.passed = c.passed && r.passed;
  c.detail["identities"] = reps;
  return c;
}

Check stable_product_identity(const RunConfig& cfg) {
  Check c;
  auto target = [](double x) { return 1.0 / (kPi * std::sqrt(x) * (1.0 + x)); };
  const auto xs = log_space(0.05, 20.0, 300);

  GriddedDensity n;
  n.nodes = log_space(1e-8, 1e8, 8000);
  for (double x : n.nodes) n.values.push_back(classical_stable_density(0.5, x));
  n.tail_exponent = -1.5;
  const ClassicalMultResult cl = classical_mult_convolve(n, reciprocal_pushforward(n));
  double e1 = 0.0;
  for (double x : xs) e1 = std::max(e1, std::abs(cl.density(x) - target(x)));
  const bool ok1 = e1 <= cfg.tol("identity_density");

  const MeasureHandle s = free_stable_handle(0.5, 1.0);
  const ConvolutionResult fm = free_mult_convolve(s, reciprocal_pushforward(s));
  const StieltjesInversion inv = stieltjes_invert(fm.handle, xs);
  double e2 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) e2 = std::max(e2, std::abs(inv.density.values[i] - target(xs[i])));
  const bool ok2 = e2 <= cfg.tol("identity_mult");

  c.passed = ok1 && ok2;
  c.detail = {{"classical_sup_err", e1}, {"classical_mass_loss", cl.mass_loss},
              {"free_sup_err", e2},      {"free_residual", fm.diagnostics.max_residual},
              {"classical_ok", ok1},     {"free_ok", ok2}};
  return c;
}

Check bercovici_pata(const RunConfig& cfg) {
  const MeasureHandle b1 = belinschi_nica(boolean_stable_handle(0.5, 1.0), 1.0);
  Check c;
  double worst = 0.0;
  nlohmann::json pts = nlohmann::json::array();
  for (int k = 0; k < 10; ++k) {
    const Complex z(-1.0 + 0.2 * k, 1.0 + 0.4 * k);
    const Complex expected = -kI * std::sqrt(z);
    const double e = std::abs(numeric_phi(b1, z) - expected) / std::abs(expected);
    worst = std::max(worst, e);
    pts.push_back({{"z", cplx(z)}, {"rel_err", e}});
  }
  c.passed = worst <= cfg.tol("bercovici_pata");
  c.detail = {{"sup_rel_err", worst}, {"points", pts}};
  return c;
}

Check complete_monotonicity(const RunConfig&) {
  Check c;
  nlohmann::json rows = nlohmann::json::array();
  for (double a : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    const cm::ClassicalIdReport r = cm::classical_id_verdict(a, 1.0, 10);
    c.passed = c.passed && r.status == "certified" && r.cm.orders_checked == 10;
    rows.push_back({{"alpha", a}, {"status", r.status}, {"passed", r.cm.passed}});
  }
  const cm::Expr x = cm::Expr::variable();
  const cm::CMReport neg = cm::cm_check(x * cm::exp(-1.0 * x), 10);
  const bool caught = !neg.passed && neg.first_violation && neg.first_violation->order == 1;
  c.passed = c.passed && caught;
  c.detail = {{"boolean_stable", rows},
              {"x_exp_minus_x_fails_at", neg.first_violation ? neg.first_violation->order : -1}};
  return c;
}

Check mixtures(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<MixtureSpec> specs;
  for (int k = 0; k < 5; ++k) specs.push_back(random_mixture_spec(rng));
  MixtureVerifyOptions opt;
  opt.fid_grid = cfg.fid_grid();
  opt.cm_orders = 8;
  opt.check_stieltjes = true;
  opt.stieltjes_tol = cfg.tol("mixture_density");
  opt.mass_tol = cfg.tol("mass");
  opt.nodes = cfg.mixture_nodes;
  std::vector<nlohmann::json> rows(specs.size());
  std::vector<char> ok(specs.size(), 0);
  parallel_for(static_cast<int>(specs.size()), cfg.parallelism, [&](int k) {
    const MixtureReport r = mixture_verify(specs[k], opt);
    ok[k] = r.passed;
    nlohmann::json row{{"sigma", specs[k]},
                       {"fid", r.fid.decision},
                       {"cm", r.cm.passed},
                       {"scaling_residual", r.scaling_residual},
                       {"mass", r.mass ? *r.mass : NAN},
                       {"stieltjes_sup_err", r.stieltjes_sup_err ? *r.stieltjes_sup_err : NAN},
                       {"passed", r.passed}};
    rows[k] = row;
  });
  Check c;
  c.passed = std::all_of(ok.begin(), ok.end(), [](char b) { return b != 0; });
  c.detail["specs"] = rows;
  return c;
}

Check nonfid_diagnostics(const RunConfig& cfg) {
  Check c;
  const RayWitness w = ray_noninjectivity_witness(0.9, 0.1);
  const bool ray_ok = w.r1 < w.r2 && w.residual <= cfg.tol("ray_residual");
  const MeasureHandle b = boolean_stable_handle(1.0, 0.8);
  double last = 0.0;
  const bool f0 = f0_diverges(b, &last);
  FidGridSpec g = cfg.fid_grid();
  const FIDVerdict v = verify_fid_numeric(b, g);
  const bool fast = !v.decision && v.evidence.witness_kind == "f0_divergence";
  c.passed = ray_ok && f0 && fast;
  c.detail = {{"theta", w.theta},          {"r1", w.r1},  {"r2", w.r2}, {"residual", w.residual},
              {"f0_diverges", f0},         {"f0_last_abs", last},
              {"verdict_witness", v.evidence.witness_kind}};
  return c;
}

Check indicator_dichotomy(const RunConfig& cfg) {
  const std::vector<double> taus{0.5, 1.0, 2.0, 8.0};
  const IndicatorReport a = indicator_probe(0.5, 0.5, taus, cfg.fid_grid());
  const IndicatorReport b = indicator_probe(0.9, 1.0, taus, cfg.fid_grid());
  Check c;
  c.passed = a.all_fid && b.none_fid;
  c.detail = {{"half_half", a}, {"nine_tenths_one", b}};
  return c;
}

struct Entry {
  const char* name;
  Check (*fn)(const RunConfig&);
};

const Entry kCriteria[kCriterionCount] = {
    {"fid truth table", fid_truth_table},
    {"classifier/verifier agreement", fid_agreement},
    {"density inversion and mass", density_inversion},
    {"boolean strict stability", strict_stability},
    {"multiplicative reproducing property", reproducing},
    {"stable product identity at alpha 1/2", stable_product_identity},
    {"bercovici-pata image of b_{1/2}^1", bercovici_pata},
    {"complete monotonicity", complete_monotonicity},
    {"continuous boolean mixtures", mixtures},
    {"non-fid diagnostics", nonfid_diagnostics},
    {"indicator dichotomy", indicator_dichotomy},
};

}  // namespace

CriterionResult run_criterion(int id, const RunConfig& cfg) {
  if (id < 1 || id > kCriterionCount) throw DomainError("run_criterion: id must lie in 1..11");
  const Entry& e = kCriteria[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = e.name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Check c = e.fn(cfg);
    r.passed = c.passed;
    r.detail = std::move(c.detail);
  } catch (const std::exception& ex) {
    r.passed = false;
    r.detail = {{"error", ex.what()}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"all", "fid", "cm", "reproducing", "mixtures", "identity"};
  return names;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  if (suite == "fid") return {1, 2, 10, 11};
  if (suite == "cm") return {3, 8};
  if (suite == "reproducing") return {4, 5};
  if (suite == "mixtures") return {9};
  if (suite == "identity") return {6, 7};
  throw DomainError("unknown suite '" + suite + "'");
}

SuiteReport run_suite(const std::string& suite, const RunConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  rep.suite = suite;
  for (int id : suite_criteria(suite)) rep.results.push_back(run_criterion(id, cfg));
  rep.passed = std::all_of(rep.results.begin(), rep.results.end(), [](const auto& r) { return r.passed; });
  return rep;
}

}  // namespace freeconv

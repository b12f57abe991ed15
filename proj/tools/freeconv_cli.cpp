// Command-line front end: classification, density tables, convolutions and
// the verification suites. Exit codes: 0 ok, 1 usage or parameter error,
// 2 classifier/verifier disagreement, 3 suite failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freeconv/complete_monotonicity.hpp"
#include "freeconv/convolutions.hpp"
#include "freeconv/divisibility.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/mixtures.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/suites.hpp"
#include "freeconv/transforms.hpp"
#include "json.hpp"

using namespace freeconv;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kUsage = 1, kDisagree = 2, kSuiteFailed = 3;

struct TableOptions {
  double x_min = 0.01, x_max = 100.0;
  int n = 500;
  std::string spacing = "auto";
};

std::vector<double> table_nodes(const TableOptions& t) {
  if (t.n < 2) throw DomainError("--n must be at least 2");
  if (!(t.x_min < t.x_max)) throw DomainError("--x-min must be below --x-max");
  const bool log = t.spacing == "log" || (t.spacing == "auto" && t.x_min > 0.0);
  if (log && !(t.x_min > 0.0)) throw DomainError("log spacing needs --x-min > 0");
  if (t.spacing != "auto" && t.spacing != "log" && t.spacing != "linear")
    throw DomainError("--spacing must be auto, log or linear");
  return log ? log_space(t.x_min, t.x_max, t.n) : lin_space(t.x_min, t.x_max, t.n);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// An operand: a stable law, a mixture b(sigma) or a tabulated density.
struct Operand {
  std::string label;
  std::optional<StableLaw> law;
  std::optional<MixtureSpec> mixture;
};

/// "boolean:alpha,rho", "free:alpha,rho", "classical:alpha", "mixture:file.json"
/// or "@file.json" holding a stable law.
Operand parse_operand(const std::string& spec) {
  Operand op;
  op.label = spec;
  if (!spec.empty() && spec[0] == '@') {
    op.law = json::parse(read_file(spec.substr(1))).get<StableLaw>();
    return op;
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("operand '" + spec + "' must look like family:alpha,rho");
  const std::string fam = spec.substr(0, colon), rest = spec.substr(colon + 1);
  if (fam == "mixture") {
    op.mixture = json::parse(read_file(rest)).get<MixtureSpec>();
    return op;
  }
  StableLaw law;
  law.family = family_from_string(fam);
  const auto comma = rest.find(',');
  try {
    law.alpha = std::stod(rest.substr(0, comma));
    law.rho = comma == std::string::npos ? 1.0 : std::stod(rest.substr(comma + 1));
  } catch (const std::logic_error&) {
    throw DomainError("operand '" + spec + "': cannot parse parameters");
  }
  law.validate();
  op.law = law;
  return op;
}

MeasureHandle to_handle(const Operand& op, int nodes) {
  if (op.mixture) return mixture_handle(*op.mixture, nodes);
  switch (op.law->family) {
    case Family::boolean:
      return boolean_stable_handle(*op.law);
    case Family::free:
      return free_stable_handle(*op.law);
    case Family::classical:
      break;
  }
  throw DomainError("classical stable laws have no transform oracle; use them with classmult or density only");
}

/// Density of a handle on xs: closed form when available, otherwise
/// Stieltjes inversion of the F oracle. Nodes where the extrapolation did not
/// settle (typically support edges) are counted in `meta` rather than fatal.
std::vector<double> tabulate(const MeasureHandle& m, const std::vector<double>& xs, json* meta = nullptr) {
  if (m.atom()) throw DomainError("the measure is a point mass and has no density");
  std::vector<double> out;
  if (m.has_density()) {
    for (double x : xs) out.push_back(m.density(x));
    if (meta) (*meta)["density_source"] = "closed_form";
    return out;
  }
  StieltjesOptions opt;
  opt.max_failed_fraction = 1.0;
  StieltjesInversion inv = stieltjes_invert(m, xs, opt);
  if (meta) {
    (*meta)["density_source"] = "stieltjes_inversion";
    (*meta)["unsettled_nodes"] = inv.failed_nodes;
  }
  return std::move(inv.density.values);
}

double mass_estimate(const std::vector<double>& xs, const std::vector<double>& ys, std::optional<double> tail,
                     std::optional<double> head) {
  GriddedDensity g;
  g.nodes = xs;
  g.values = ys;
  g.tail_exponent = tail;
  if (xs.front() > 0.0) g.head_exponent = head;
  return g.mass();
}

void emit_table(const RunConfig& cfg, const std::vector<double>& xs, const std::vector<double>& ys, double mass,
                json meta) {
  if (cfg.output_format == OutputFormat::csv) {
    std::printf("x,density\n");
    for (std::size_t i = 0; i < xs.size(); ++i) std::printf("%.17g,%.17g\n", xs[i], ys[i]);
    std::printf("# mass_estimate,%.17g\n", mass);
    for (const auto& [k, v] : meta.items()) std::printf("# %s,%s\n", k.c_str(), v.dump().c_str());
    return;
  }
  meta["schema"] = 1;
  meta["x"] = xs;
  meta["density"] = ys;
  meta["mass_estimate"] = mass;
  std::cout << meta.dump(1) << "\n";
}

int cmd_classify(const RunConfig& cfg, double alpha, double rho, bool numeric) {
  const FIDVerdict v = classify_fid(alpha, rho);
  json out{{"schema", 1}, {"verdict", v}};
  bool agree = true;
  std::optional<FIDVerdict> nv;
  if (numeric) {
    nv = verify_fid_numeric(alpha, rho, cfg.fid_grid(), cfg.tol("fid_im_phi"));
    agree = nv->decision == v.decision;
    out["numeric"] = *nv;
    out["agree"] = agree;
  }
  if (cfg.output_format == OutputFormat::csv) {
    std::printf("alpha,rho,decision,rule,numeric_decision,agree\n");
    std::printf("%.17g,%.17g,%s,%s,%s,%s\n", alpha, rho, v.decision ? "true" : "false", to_string(*v.rule).c_str(),
                nv ? (nv->decision ? "true" : "false") : "", numeric ? (agree ? "true" : "false") : "");
  } else {
    std::cout << out.dump(1) << "\n";
  }
  return agree ? kOk : kDisagree;
}

int cmd_density(const RunConfig& cfg, const std::string& family, double alpha, double rho,
                const std::string& sigma_file, const TableOptions& t) {
  const std::vector<double> xs = table_nodes(t);
  std::vector<double> ys;
  std::optional<double> tail, head;
  json meta{{"family", family}};
  if (family == "mixture") {
    if (sigma_file.empty()) throw DomainError("--sigma-file is required for the mixture family");
    const MixtureSpec s = json::parse(read_file(sigma_file)).get<MixtureSpec>();
    for (double x : xs) ys.push_back(x > 0.0 ? mixture_density(s, x, cfg.mixture_nodes) : 0.0);
    meta["sigma"] = s;
    const double m = mixture_mass(s, cfg.mixture_nodes);
    emit_table(cfg, xs, ys, m, meta);
    return kOk;
  }
  StableLaw law;
  law.family = family_from_string(family);
  law.alpha = alpha;
  law.rho = rho;
  law.validate();
  meta["alpha"] = alpha;
  meta["rho"] = rho;
  if (law.family == Family::classical) {
    if (!(alpha < 1.0) || rho != 1.0)
      throw DomainError("classical densities are available for positive laws only (alpha < 1, rho = 1)");
    for (double x : xs) ys.push_back(x > 0.0 ? classical_stable_density(alpha, x) : 0.0);
    tail = -alpha - 1.0;
  } else {
    const MeasureHandle m = to_handle(Operand{family, law, std::nullopt}, cfg.mixture_nodes);
    ys = tabulate(m, xs, &meta);
    tail = m.tail_exponent();
    head = m.head_exponent();
  }
  emit_table(cfg, xs, ys, mass_estimate(xs, ys, tail, head), meta);
  return kOk;
}

GriddedDensity positive_grid(const Operand& op, int nodes) {
  GriddedDensity g;
  g.nodes = log_space(1e-8, 1e8, 8000);
  if (op.law && op.law->family == Family::classical) {
    if (!(op.law->alpha < 1.0) || op.law->rho != 1.0)
      throw PreconditionError("classmult: operands must be supported on [0, inf)");
    for (double x : g.nodes) g.values.push_back(classical_stable_density(op.law->alpha, x));
    g.tail_exponent = -op.law->alpha - 1.0;
    return g;
  }
  const MeasureHandle m = to_handle(op, nodes);
  if (!m.support_hint().nonnegative()) throw PreconditionError("classmult: operands must be supported on [0, inf)");
  g.values = tabulate(m, g.nodes);
  g.tail_exponent = m.tail_exponent();
  g.head_exponent = m.head_exponent();
  return g;
}

int cmd_convolve(const RunConfig& cfg, const std::string& op, const std::string& lhs, const std::string& rhs,
                 std::optional<double> power, const TableOptions& t) {
  const std::vector<double> xs = table_nodes(t);
  const Operand a = parse_operand(lhs);
  json meta{{"op", op}, {"lhs", lhs}};
  if (power) meta["power"] = *power;
  if (!rhs.empty()) meta["rhs"] = rhs;

  if (op == "classmult") {
    if (rhs.empty() || power) throw DomainError("classmult takes --lhs and --rhs and no --power");
    const ClassicalMultResult r = classical_mult_convolve(positive_grid(a, cfg.mixture_nodes),
                                                          positive_grid(parse_operand(rhs), cfg.mixture_nodes));
    std::vector<double> ys;
    for (double x : xs) ys.push_back(r.density(x));
    meta["method"] = to_string(ConvolutionMethod::log_mellin);
    meta["diagnostics"] = {{"mass_loss", r.mass_loss}, {"mass_loss_exceeded", r.mass_loss_exceeded}};
    emit_table(cfg, xs, ys, mass_estimate(xs, ys, r.density.tail_exponent, r.density.head_exponent), meta);
    return kOk;
  }

  const MeasureHandle ha = to_handle(a, cfg.mixture_nodes);
  ConvolutionResult res;
  if (power) {
    if (!rhs.empty()) throw DomainError("--power takes a single operand");
    if (op == "boolean")
      res = boolean_power(ha, *power);
    else if (op == "free")
      res = free_power(ha, *power);
    else
      throw DomainError("--power is defined for boolean and free only");
  } else {
    if (rhs.empty()) throw DomainError(op + " needs --rhs (or --power)");
    const MeasureHandle hb = to_handle(parse_operand(rhs), cfg.mixture_nodes);
    if (op == "boolean")
      res = boolean_convolve(ha, hb);
    else if (op == "free")
      res = free_convolve(ha, hb);
    else if (op == "freemult")
      res = free_mult_convolve(ha, hb);
    else
      throw DomainError("--op must be boolean, free, freemult or classmult");
  }
  meta["method"] = to_string(res.method);
  json diag{{"max_residual", res.diagnostics.max_residual}, {"grid_size", res.diagnostics.grid_size}};
  if (res.diagnostics.s_residual) diag["s_residual"] = *res.diagnostics.s_residual;
  meta["diagnostics"] = diag;
  const std::vector<double> ys = tabulate(res.handle, xs, &meta);
  emit_table(cfg, xs, ys, mass_estimate(xs, ys, res.handle.tail_exponent(), res.handle.head_exponent()), meta);
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  const SuiteReport rep = run_suite(suite, cfg);
  if (cfg.output_format == OutputFormat::csv) {
    std::printf("id,name,passed,seconds\n");
    for (const auto& r : rep.results)
      std::printf("%d,\"%s\",%s,%.3f\n", r.id, r.name.c_str(), r.passed ? "true" : "false", r.seconds);
  } else {
    std::cout << json(rep).dump(1) << "\n";
  }
  return rep.passed ? kOk : kSuiteFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boolean, free and classical stable laws: transforms, convolutions and divisibility checks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, format;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  app.add_option("--config", config_path, "RunConfig JSON (default: $FREECONV_CONFIG)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "seed for randomized test points");
  app.add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);

  double alpha = 0.5, rho = 1.0;
  bool numeric = false;
  auto* classify = app.add_subcommand("classify", "free infinite divisibility of b_alpha^rho");
  classify->add_option("--alpha", alpha)->required();
  classify->add_option("--rho", rho)->required();
  classify->add_flag("--numeric", numeric, "also run the numerical verifier");

  std::string family = "boolean", sigma_file;
  TableOptions table;
  auto* density = app.add_subcommand("density", "density table of a stable law or mixture");
  density->add_option("--family", family)->check(CLI::IsMember({"boolean", "free", "classical", "mixture"}));
  density->add_option("--alpha", alpha);
  density->add_option("--rho", rho);
  density->add_option("--sigma-file", sigma_file, "MixtureSpec JSON");
  density->add_option("--x-min", table.x_min);
  density->add_option("--x-max", table.x_max);
  density->add_option("--n", table.n);
  density->add_option("--spacing", table.spacing, "auto, log or linear");

  std::string op, lhs, rhs;
  std::optional<double> power;
  auto* convolve = app.add_subcommand("convolve", "Boolean, free or multiplicative convolution");
  convolve->add_option("--op", op)->required()->check(CLI::IsMember({"boolean", "free", "freemult", "classmult"}));
  convolve->add_option("--lhs", lhs, "family:alpha,rho | mixture:file.json | @law.json")->required();
  convolve->add_option("--rhs", rhs);
  convolve->add_option("--power", power);
  convolve->add_option("--x-min", table.x_min);
  convolve->add_option("--x-max", table.x_max);
  convolve->add_option("--n", table.n);
  convolve->add_option("--spacing", table.spacing);

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", suite)->check(CLI::IsMember(suite_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig::from_env() : RunConfig::from_file(config_path);
    if (!format.empty()) cfg.output_format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
    if (seed) cfg.seed = *seed;
    if (parallelism) cfg.parallelism = *parallelism;
    cfg.validate();

    if (*classify) return cmd_classify(cfg, alpha, rho, numeric);
    if (*density) return cmd_density(cfg, family, alpha, rho, sigma_file, table);
    if (*convolve) return cmd_convolve(cfg, op, lhs, rhs, power, table);
    if (*verify) return cmd_verify(cfg, suite);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}

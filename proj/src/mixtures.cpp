#include "freeconv/mixtures.hpp"

#include <algorithm>
#include <cmath>

#include "freeconv/convolutions.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/quadrature.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

void MixtureSpec::validate() const {
  for (const auto& a : atoms) {
    if (!(a.alpha > 0.0 && a.alpha <= 0.5)) throw DomainError("MixtureSpec: every alpha must lie in (0, 1/2]");
    if (!(a.lambda > 0.0) || !std::isfinite(a.lambda)) throw DomainError("MixtureSpec: weights must be positive");
  }
  if (continuous) {
    if (!(continuous->mass > 0.0) || !std::isfinite(continuous->mass))
      throw DomainError("MixtureSpec: continuous mass must be positive");
    if (!(continuous->exponent > -1.0)) throw DomainError("MixtureSpec: continuous exponent must exceed -1");
    if (continuous->nodes < 1) throw DomainError("MixtureSpec: continuous part needs at least one node");
  }
}

std::vector<MixtureAtom> MixtureSpec::discretized(int nodes) const {
  validate();
  std::vector<MixtureAtom> out = atoms;
  if (continuous) {
    const int n = nodes > 0 ? nodes : continuous->nodes;
    const double h = 0.5 / n;
    const double q = continuous->exponent + 1.0;
    const double total = std::pow(0.5, q);
    for (int k = 0; k < n; ++k) {
      const double cell = std::pow((k + 1) * h, q) - std::pow(k * h, q);
      out.push_back({(2.0 * k + 1.0) / (4.0 * n), continuous->mass * cell / total});
    }
  }
  return out;
}

MixtureSpec MixtureSpec::scaled(double t) const {
  MixtureSpec s = *this;
  for (auto& a : s.atoms) a.lambda *= t;
  if (s.continuous) s.continuous->mass *= t;
  return s;
}

void to_json(nlohmann::json& j, const MixtureSpec& s) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : s.atoms) atoms.push_back({{"alpha", a.alpha}, {"lambda", a.lambda}});
  j = nlohmann::json{{"atoms", atoms}};
  if (s.continuous)
    j["continuous"] = {{"mass", s.continuous->mass},
                       {"exponent", s.continuous->exponent},
                       {"nodes", s.continuous->nodes}};
  else
    j["continuous"] = nullptr;
}

void from_json(const nlohmann::json& j, MixtureSpec& s) {
  s = MixtureSpec{};
  for (const auto& a : j.at("atoms")) s.atoms.push_back({a.at("alpha").get<double>(), a.at("lambda").get<double>()});
  if (j.contains("continuous") && !j["continuous"].is_null()) {
    const auto& c = j["continuous"];
    ContinuousPart part;
    part.mass = c.value("mass", 1.0);
    part.exponent = c.value("exponent", 0.0);
    part.nodes = c.value("nodes", 40);
    s.continuous = part;
  }
  s.validate();
}

MeasureHandle mixture_handle(const MixtureSpec& sigma, int nodes) {
  const std::vector<MixtureAtom> atoms = sigma.discretized(nodes);
  if (atoms.empty()) return MeasureHandle::point_mass(0.0);
  double amin = 1.0, amax = 0.0;
  for (const auto& a : atoms) {
    amin = std::min(amin, a.alpha);
    amax = std::max(amax, a.alpha);
  }
  auto K = [atoms](const Lifted& w) {
    Complex k{};
    for (const auto& a : atoms) k += power_energy(a.lambda, a.alpha, 1.0, w);
    return k;
  };
  MeasureHandle::Parts p;
  p.F = [K](const Lifted& w) { return w.z - K(w); };
  p.dF = [atoms](const Lifted& w) {
    Complex d{1.0, 0.0};
    for (const auto& a : atoms) d += a.lambda * expi(kPi * a.alpha) * (1.0 - a.alpha) * lifted_pow(w, -a.alpha);
    return d;
  };
  p.K = [K](Complex z) { return K(principal(z)); };
  p.continuable = true;
  p.caps = {true, false, true};
  MixtureSpec copy = sigma;
  p.density = [copy, nodes](double x) { return x > 0.0 ? mixture_density(copy, x, nodes) : 0.0; };
  p.support = {0.0, INFINITY};
  p.fid = FidStatus::certified;
  p.tail_exponent = -amin - 1.0;
  p.head_exponent = amax - 1.0;
  p.boolean_powers_positive = true;
  p.label = "b(sigma)";
  return MeasureHandle(std::move(p));
}

double mixture_density(const MixtureSpec& sigma, double x, int nodes) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("mixture_density: x must be positive");
  const std::vector<MixtureAtom> atoms = sigma.discretized(nodes);
  if (atoms.empty()) throw DomainError("mixture_density: empty sigma is delta_0, which has no density");
  double f = 0.0, a = std::sqrt(x), b = 0.0;
  for (const auto& m : atoms) {
    const double s = m.lambda * std::sin(m.alpha * kPi);
    const double c = m.lambda * std::cos(m.alpha * kPi);
    f += s * std::pow(x, -m.alpha);
    a += c * std::pow(x, 0.5 - m.alpha);
    b += s * std::pow(x, 0.5 - m.alpha);
  }
  return f / (kPi * (a * a + b * b));
}

cm::Expr mixture_density_expr(const MixtureSpec& sigma, int nodes) {
  const std::vector<MixtureAtom> atoms = sigma.discretized(nodes);
  if (atoms.empty()) throw DomainError("mixture_density_expr: empty sigma");
  cm::Expr f = cm::Expr::constant(0.0);
  cm::Expr a = cm::monomial(1.0, 0.5);
  cm::Expr b = cm::Expr::constant(0.0);
  for (const auto& m : atoms) {
    const double s = m.lambda * std::sin(m.alpha * kPi);
    const double c = m.lambda * std::cos(m.alpha * kPi);
    f = f + cm::monomial(s, -m.alpha);
    a = a + cm::monomial(c, 0.5 - m.alpha);
    b = b + cm::monomial(s, 0.5 - m.alpha);
  }
  return (1.0 / kPi) * f / (a * a + b * b);
}

double mixture_mass(const MixtureSpec& sigma, int nodes) {
  const std::vector<MixtureAtom> atoms = sigma.discretized(nodes);
  if (atoms.empty()) return 1.0;
  double amin = 1.0, amax = 0.0;
  for (const auto& a : atoms) {
    amin = std::min(amin, a.alpha);
    amax = std::max(amax, a.alpha);
  }
  constexpr double U = 600.0;
  auto g = [&](double u) {
    const double x = std::exp(u);
    return mixture_density(sigma, x, nodes) * x;
  };
  double total = 0.0;
  // Panels of width 50 in log x keep the adaptive rule from missing the bulk.
  for (double lo = -U; lo < U; lo += 50.0) {
    const auto r = quad::integrate<double>(g, lo, lo + 50.0, 1e-13, 1e-12, 4000);
    if (!r.converged) throw ConvergenceError("mixture_mass: quadrature did not converge", r.error);
    total += r.value;
  }
  // x^{amax - 1} near 0, x^{-amin - 1} near infinity.
  total += g(-U) / amax + g(U) / amin;
  return total;
}

double mixture_refinement_gap(const MixtureSpec& sigma, int n1, int n2) {
  const MeasureHandle a = mixture_handle(sigma, n1);
  const MeasureHandle b = mixture_handle(sigma, n2);
  double worst = 0.0;
  for (Complex z : standard_grid()) {
    const Complex fb = b.F(z);
    worst = std::max(worst, std::abs(a.F(z) - fb) / std::abs(fb));
  }
  return worst;
}

void to_json(nlohmann::json& j, const MixtureReport& r) {
  j = nlohmann::json{{"fid", r.fid},
                     {"cm", r.cm},
                     {"scaling_residual", r.scaling_residual},
                     {"scaling_passed", r.scaling_passed},
                     {"mass", r.mass ? nlohmann::json(*r.mass) : nlohmann::json(nullptr)},
                     {"stieltjes_sup_err",
                      r.stieltjes_sup_err ? nlohmann::json(*r.stieltjes_sup_err) : nlohmann::json(nullptr)},
                     {"passed", r.passed}};
}

MixtureReport mixture_verify(const MixtureSpec& sigma, const MixtureVerifyOptions& opt) {
  sigma.validate();
  MixtureReport r;
  const MeasureHandle h = mixture_handle(sigma, opt.nodes);
  r.fid = verify_fid_numeric(h, opt.fid_grid);
  const bool has_density = !sigma.discretized(opt.nodes).empty();
  if (has_density) r.cm = cm::cm_check(mixture_density_expr(sigma, opt.nodes), opt.cm_orders, opt.cm_grid);

  const MeasureHandle lhs = boolean_power(h, opt.scaling_t).handle;
  const MeasureHandle rhs = mixture_handle(sigma.scaled(opt.scaling_t), opt.nodes);
  for (Complex z : standard_grid()) {
    const Complex kr = rhs.K(z);
    if (std::abs(kr) == 0.0) continue;
    r.scaling_residual = std::max(r.scaling_residual, std::abs(lhs.K(z) - kr) / std::abs(kr));
  }
  r.scaling_passed = r.scaling_residual <= opt.scaling_tol;

  bool ok = r.fid.decision && (!has_density || r.cm.passed) && r.scaling_passed;
  if (opt.check_mass && has_density) {
    r.mass = mixture_mass(sigma, opt.nodes);
    ok = ok && std::abs(*r.mass - 1.0) <= opt.mass_tol;
  }
  if (opt.check_stieltjes && has_density) {
    const auto xs = log_space(1e-2, 1e2, 200);
    const StieltjesInversion inv = stieltjes_invert(h, xs);
    double e = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      e = std::max(e, std::abs(inv.density.values[i] - mixture_density(sigma, xs[i], opt.nodes)));
    r.stieltjes_sup_err = e;
    ok = ok && e <= opt.stieltjes_tol;
  }
  r.passed = ok;
  return r;
}

MixtureSpec random_mixture_spec(std::mt19937_64& rng) {
  auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53); };
  MixtureSpec s;
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int k = 0; k < n; ++k) s.atoms.push_back({uniform(0.1, 0.5), uniform(0.05, 2.0)});
  return s;
}

}  // namespace freeconv

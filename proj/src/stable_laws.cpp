#include "freeconv/stable_laws.hpp"

#include <cmath>
#include <cstdio>

#include "freeconv/errors.hpp"
#include "freeconv/quadrature.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

std::string to_string(Family f) {
  switch (f) {
    case Family::boolean: return "boolean";
    case Family::free: return "free";
    case Family::classical: return "classical";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "boolean") return Family::boolean;
  if (s == "free") return Family::free;
  if (s == "classical") return Family::classical;
  throw DomainError("unknown stable family '" + s + "'");
}

void StableLaw::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(rho) || !std::isfinite(shift))
    throw DomainError("StableLaw: non-finite parameter");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("StableLaw: scale must be positive");
  switch (family) {
    case Family::boolean:
      if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("boolean stable law: alpha must lie in (0, 2]");
      if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("boolean stable law: rho must lie in [0, 1]");
      break;
    case Family::free:
      if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("free stable law: alpha must lie in (0, 1]");
      if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("free stable law: rho must lie in [0, 1]");
      break;
    case Family::classical:
      if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("classical stable law: alpha must lie in (0, 1)");
      if (rho != 1.0) throw DomainError("classical stable law: only rho = 1 (positive) is supported");
      break;
  }
}

void to_json(nlohmann::json& j, const StableLaw& law) {
  j = nlohmann::json{{"family", to_string(law.family)},
                     {"alpha", law.alpha},
                     {"rho", law.rho},
                     {"shift", law.shift},
                     {"scale", law.scale}};
}

void from_json(const nlohmann::json& j, StableLaw& law) {
  law.family = family_from_string(j.at("family").get<std::string>());
  law.alpha = j.at("alpha").get<double>();
  law.rho = j.value("rho", 1.0);
  law.shift = j.value("shift", 0.0);
  law.scale = j.value("scale", 1.0);
  law.validate();
}

FidRule fid_rule(double alpha, double rho) {
  if (!(alpha > 0.0 && alpha <= 2.0) || !(rho >= 0.0 && rho <= 1.0))
    throw DomainError("fid_rule: need alpha in (0, 2] and rho in [0, 1]");
  // Slack of a few ulps so that boundary parameters typed as decimals (2/3,
  // 2 - 1/alpha, ...) land on the inclusive side.
  constexpr double slack = 1e-12;
  if (alpha <= 0.5 + slack) return FidRule::alpha_le_half;
  if (alpha <= 2.0 / 3.0 + slack && rho >= 2.0 - 1.0 / alpha - slack && rho <= 1.0 / alpha - 1.0 + slack)
    return FidRule::middle_band;
  if (alpha == 1.0 && rho == 0.5) return FidRule::cauchy;
  return FidRule::none;
}

std::string to_string(FidRule r) {
  switch (r) {
    case FidRule::alpha_le_half: return "alpha_le_half";
    case FidRule::middle_band: return "middle_band";
    case FidRule::cauchy: return "cauchy";
    case FidRule::none: return "none";
  }
  return "?";
}

Complex power_energy(double lambda, double alpha, double rho, const Lifted& w) {
  return -(lambda * expi(kPi * rho * alpha)) * lifted_pow(w, 1.0 - alpha);
}

namespace {

void check_params(double alpha, double rho) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("boolean stable law: alpha must lie in (0, 2]");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("boolean stable law: rho must lie in [0, 1]");
}

Complex boolean_K_lifted(double alpha, double rho, const Lifted& w) {
  if (alpha < 1.0) return power_energy(1.0, alpha, rho, w);
  if (alpha == 1.0) return Complex{0.0, -2.0 * rho} + (2.0 * (2.0 * rho - 1.0) / kPi) * lifted_log(w);
  return expi((alpha - 2.0) * rho * kPi) * lifted_pow(w, 1.0 - alpha);
}

Complex boolean_dK_lifted(double alpha, double rho, const Lifted& w) {
  if (alpha < 1.0) return -expi(kPi * rho * alpha) * (1.0 - alpha) * lifted_pow(w, -alpha);
  if (alpha == 1.0) return (2.0 * (2.0 * rho - 1.0) / kPi) / w.z;
  return expi((alpha - 2.0) * rho * kPi) * (1.0 - alpha) * lifted_pow(w, -alpha);
}

}  // namespace

Complex boolean_stable_K(double alpha, double rho, Complex z) {
  check_params(alpha, rho);
  if (!(z.imag() > 0.0)) throw DomainError("boolean_stable_K: requires Im z > 0");
  return boolean_K_lifted(alpha, rho, principal(z));
}

Complex boolean_stable_K(double alpha, double rho, const Lifted& w) {
  check_params(alpha, rho);
  return boolean_K_lifted(alpha, rho, w);
}

MeasureHandle boolean_stable_handle(double alpha, double rho) {
  return boolean_stable_handle(StableLaw{Family::boolean, alpha, rho, 0.0, 1.0});
}

MeasureHandle boolean_stable_handle(const StableLaw& law) {
  if (law.family != Family::boolean) throw DomainError("boolean_stable_handle: family must be boolean");
  law.validate();
  const double alpha = law.alpha, rho = law.rho;
  MeasureHandle::Parts p;
  p.F = [alpha, rho](const Lifted& w) { return w.z - boolean_K_lifted(alpha, rho, w); };
  p.dF = [alpha, rho](const Lifted& w) { return 1.0 - boolean_dK_lifted(alpha, rho, w); };
  p.K = [alpha, rho](Complex z) { return boolean_K_lifted(alpha, rho, principal(z)); };
  p.continuable = true;
  p.caps.closed_K = true;
  if (alpha < 1.0) {
    p.caps.closed_density = true;
    p.density = [alpha, rho](double x) { return x == 0.0 ? 0.0 : boolean_stable_density(alpha, rho, x); };
    p.tail_exponent = -alpha - 1.0;
    if (rho == 1.0) {
      p.support = {0.0, INFINITY};
      p.head_exponent = alpha - 1.0;
      p.boolean_powers_positive = true;
    } else if (rho == 0.0) {
      p.support = {-INFINITY, 0.0};
    }
  } else if (alpha == 1.0 && rho == 0.5) {
    p.caps.closed_density = true;
    p.density = [](double x) { return 1.0 / (kPi * (1.0 + x * x)); };
    p.tail_exponent = -2.0;
  }
  p.fid = fid_rule(alpha, rho) == FidRule::none ? FidStatus::refuted : FidStatus::certified;
  char buf[64];
  std::snprintf(buf, sizeof buf, "b(%g,%g)", alpha, rho);
  p.label = buf;
  MeasureHandle base(std::move(p));
  return boolean_shift(dilate(base, law.scale), law.shift);
}

double boolean_stable_density(double alpha, double rho, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("boolean_stable_density: alpha must lie in (0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("boolean_stable_density: rho must lie in [0, 1]");
  if (x == 0.0 || !std::isfinite(x)) throw DomainError("boolean_stable_density: x must be finite and nonzero");
  if (rho == 1.0) {
    if (x < 0.0) return 0.0;
    const double xa = std::pow(x, alpha);
    return std::sin(alpha * kPi) * std::pow(x, alpha - 1.0) / (kPi * (xa * xa + 2.0 * std::cos(alpha * kPi) * xa + 1.0));
  }
  // Boundary value from above: arg x = 0 for x > 0 and pi for x < 0.
  const Lifted w{Complex{x, 0.0}, x > 0.0 ? 0.0 : kPi};
  const Complex F = w.z - power_energy(1.0, alpha, rho, w);
  return std::max(0.0, -(1.0 / F).imag() / kPi);
}

namespace {

AnalyticMap free_stable_H(double alpha, double rho) {
  const Complex c = expi(alpha * rho * kPi);
  AnalyticMap h;
  h.value = [c, alpha](const Lifted& w) { return w.z - c * lifted_pow(w, 1.0 - alpha); };
  h.derivative = [c, alpha](const Lifted& w) { return 1.0 - c * (1.0 - alpha) * lifted_pow(w, -alpha); };
  return h;
}

void check_free(double alpha, double rho) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("free stable law: alpha must lie in (0, 1]");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("free stable law: rho must lie in [0, 1]");
}

Complex free_F_impl(double alpha, double rho, const AnalyticMap& H, Complex z) {
  if (alpha == 1.0) return z + expi(rho * kPi);
  const Preimage p = invert_vertical(H, z);
  if (!p.converged)
    throw ConvergenceError("free_stable_F: continuation failed at z = (" + std::to_string(z.real()) + ", " +
                               std::to_string(z.imag()) + ")",
                           p.residual);
  return p.w.z;
}

}  // namespace

Complex free_stable_F(double alpha, double rho, Complex z) {
  check_free(alpha, rho);
  if (!(z.imag() > 0.0)) throw DomainError("free_stable_F: requires Im z > 0");
  return free_F_impl(alpha, rho, free_stable_H(alpha, rho), z);
}

MeasureHandle free_stable_handle(double alpha, double rho) {
  return free_stable_handle(StableLaw{Family::free, alpha, rho, 0.0, 1.0});
}

MeasureHandle free_stable_handle(const StableLaw& law) {
  if (law.family != Family::free) throw DomainError("free_stable_handle: family must be free");
  law.validate();
  const double alpha = law.alpha, rho = law.rho;
  const AnalyticMap H = free_stable_H(alpha, rho);
  MeasureHandle::Parts p;
  // Real targets (outside the support) are reached as limits from above.
  p.F = [alpha, rho, H](const Lifted& w) { return free_F_impl(alpha, rho, H, w.z); };
  p.phi = [alpha, rho](Complex z) { return -expi(alpha * rho * kPi) * std::pow(z, 1.0 - alpha); };
  p.caps.closed_phi = true;
  p.fid = FidStatus::certified;
  if (alpha < 1.0) {
    p.tail_exponent = -alpha - 1.0;
    if (rho == 1.0) p.support = {0.0, INFINITY};
    if (rho == 0.0) p.support = {-INFINITY, 0.0};
  } else {
    p.continuable = true;
    p.F = [rho](const Lifted& w) { return w.z + expi(rho * kPi); };
    p.dF = [](const Lifted&) { return Complex{1.0, 0.0}; };
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "s(%g,%g)", alpha, rho);
  p.label = buf;
  MeasureHandle base(std::move(p));
  return boolean_shift(dilate(base, law.scale), law.shift);
}

Complex classical_stable_laplace(double alpha, Complex z) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("classical_stable_laplace: alpha must lie in (0, 1)");
  if (z.real() < 0.0) throw DomainError("classical_stable_laplace: requires Re z >= 0");
  if (z == Complex{}) return {1.0, 0.0};
  return std::exp(-std::pow(z, alpha));
}

namespace {

// Weideman's optimised Talbot contour
//   s(theta) = (N/t)(-0.6122 + 0.5017 theta cot(0.6407 theta) + 0.2645 i theta)
// with the midpoint rule in theta on (-pi, pi).
double talbot(double alpha, double t, int n) {
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = -kPi + (k + 0.5) * 2.0 * kPi / n;
    const double a = 0.6407 * th;
    const double cot = std::cos(a) / std::sin(a);
    const Complex s = (n / t) * Complex{-0.6122 + 0.5017 * th * cot, 0.2645 * th};
    const Complex ds =
        (n / t) * Complex{0.5017 * cot - 0.5017 * 0.6407 * th / (std::sin(a) * std::sin(a)), 0.2645};
    const Complex term = std::exp(s * t - std::pow(s, alpha)) * ds;
    acc += (term / Complex{0.0, static_cast<double>(n)}).real();
  }
  return acc;
}

// Bromwich integral on the vertical line through the saddle point
// s0 = (alpha / x)^{1/(1-alpha)} of h(s) = s x - s^alpha, with e^{h(s0)}
// factored out. Used where the Talbot contour overflows (small x, alpha > 1/2).
double saddle_line(double alpha, double x) {
  const double s0 = std::pow(alpha / x, 1.0 / (1.0 - alpha));
  const double h0 = (alpha - 1.0) * std::pow(s0, alpha);
  if (h0 < -760.0) return 0.0;
  auto rel_h = [&](double y) {
    const Complex s{s0, y};
    return s * x - std::pow(s, alpha) - h0;
  };
  double y_max = std::sqrt(1.0 / (alpha * (1.0 - alpha) * std::pow(s0, alpha - 2.0)));
  while (rel_h(y_max).real() > -40.0) y_max *= 2.0;
  const auto r = quad::integrate<double>([&](double y) { return std::exp(rel_h(y)).real(); }, 0.0, y_max, 1e-300,
                                         1e-11, 20000);
  if (!r.converged) throw ConvergenceError("classical_stable_density: saddle-line quadrature", r.error);
  return std::exp(h0) * r.value / kPi;
}

}  // namespace

double classical_stable_density(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("classical_stable_density: alpha must lie in (0, 1)");
  if (!(x > 0.0)) throw DomainError("classical_stable_density: x must be positive");
  if (alpha == 0.5) return std::exp(-0.25 / x) / (2.0 * std::sqrt(kPi) * x * std::sqrt(x));
  const double f64 = talbot(alpha, x, 64);
  const double f48 = talbot(alpha, x, 48);
  const double err = std::abs(f64 - f48);
  if (std::isfinite(f64) && err <= 1e-6 * std::max(1.0, std::abs(f64))) return std::max(0.0, f64);
  if (x < 1.0) return std::max(0.0, saddle_line(alpha, x));
  throw ConvergenceError("classical_stable_density: Talbot inversion inaccurate", err);
}

}  // namespace freeconv

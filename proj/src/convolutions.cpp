#include "freeconv/convolutions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "freeconv/errors.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

std::string to_string(ConvolutionMethod m) {
  switch (m) {
    case ConvolutionMethod::transform_algebra: return "transform_algebra";
    case ConvolutionMethod::subordination_fixpoint: return "subordination_fixpoint";
    case ConvolutionMethod::s_transform: return "s_transform";
    case ConvolutionMethod::log_mellin: return "log_mellin";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<Complex> diagnostic_grid(const SubordinationOptions& opt) {
  return opt.diagnostic_grid.empty() ? standard_grid() : opt.diagnostic_grid;
}

// Plain iteration w <- T(w); switches to the averaged map (w + T(w))/2 once
// the step stops shrinking, and finally to Newton on w - T(w) = 0.
template <class Map>
Complex solve_fixed_point(const Map& T, Complex w0, const SubordinationOptions& opt, bool upper_half, const char* what) {
  Complex w = w0;
  double prev = INFINITY;
  int stalls = 0;
  bool averaged = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    Complex next = T(w);
    if (!is_finite(next)) break;
    if (averaged) next = 0.5 * (w + next);
    const double step = std::abs(next - w);
    w = next;
    if (step <= opt.tol * std::max(1.0, std::abs(w))) return w;
    if (!averaged && it > 10 && step > 0.95 * prev && ++stalls > 5) averaged = true;
    prev = step;
  }
  AnalyticMap g;
  g.value = [&T](const Lifted& v) { return v.z - T(v.z); };
  g.upper_half_only = upper_half;
  const Complex seed = is_finite(w) ? w : w0;
  const Preimage p = newton_solve(g, Complex{}, principal(seed), {});
  if (!p.converged) throw ConvergenceError(std::string(what) + ": subordination fixed point did not converge", p.residual);
  return p.w.z;
}

void require_handle(const MeasureHandle& m, const char* op) {
  if (!m.valid()) throw DomainError(std::string(op) + ": empty measure handle");
}

}  // namespace

ConvolutionResult boolean_convolve(const MeasureHandle& m1, const MeasureHandle& m2) {
  require_handle(m1, "boolean_convolve");
  require_handle(m2, "boolean_convolve");
  const auto& a = m1.parts();
  const auto& b = m2.parts();
  MeasureHandle::Parts p;
  p.F = [m1, m2](const Lifted& w) { return m1.F(w) + m2.F(w) - w.z; };
  if (a.dF && b.dF) p.dF = [m1, m2](const Lifted& w) { return m1.dF(w) + m2.dF(w) - 1.0; };
  p.K = [m1, m2](Complex z) { return m1.K(z) + m2.K(z); };
  p.continuable = a.continuable && b.continuable;
  p.caps.closed_K = a.caps.closed_K && b.caps.closed_K;
  if (a.atom && b.atom) {
    p.atom = *a.atom + *b.atom;
    p.support = {*p.atom, *p.atom};
  } else if (a.boolean_powers_positive && b.boolean_powers_positive) {
    p.support = {0.0, INFINITY};
  }
  p.boolean_powers_positive = a.boolean_powers_positive && b.boolean_powers_positive;
  if (a.tail_exponent && b.tail_exponent) p.tail_exponent = std::max(*a.tail_exponent, *b.tail_exponent);
  p.label = "(" + a.label + " (+) " + b.label + ")";
  return {MeasureHandle(std::move(p)), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
}

ConvolutionResult boolean_power(const MeasureHandle& m, double t) {
  require_handle(m, "boolean_power");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("boolean_power: t must be >= 0");
  if (t == 0.0) return {MeasureHandle::point_mass(0.0), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
  if (t == 1.0) return {m, ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
  const auto& src = m.parts();
  MeasureHandle::Parts p;
  p.F = [m, t](const Lifted& w) { return w.z - t * (w.z - m.F(w)); };
  if (src.dF) p.dF = [m, t](const Lifted& w) { return 1.0 - t * (1.0 - m.dF(w)); };
  p.K = [m, t](Complex z) { return t * m.K(z); };
  p.continuable = src.continuable;
  p.caps.closed_K = src.caps.closed_K;
  if (src.atom) {
    p.atom = t * *src.atom;
    p.support = {*p.atom, *p.atom};
  } else if (src.support.nonnegative() && (t <= 1.0 || src.boolean_powers_positive)) {
    // For t <= 1, F_t(x) = (1 - t) x + t F(x) < 0 on the negative axis.
    p.support = {0.0, INFINITY};
  }
  p.boolean_powers_positive = src.boolean_powers_positive;
  p.tail_exponent = src.tail_exponent;
  p.head_exponent = src.head_exponent;
  p.label = src.label + "^(+)" + fmt(t);
  return {MeasureHandle(std::move(p)), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
}

ConvolutionResult free_convolve(const MeasureHandle& m1, const MeasureHandle& m2, const SubordinationOptions& opt) {
  require_handle(m1, "free_convolve");
  require_handle(m2, "free_convolve");
  if (m1.atom() && m2.atom()) {
    return {MeasureHandle::point_mass(*m1.atom() + *m2.atom()), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
  }
  if (m1.atom() || m2.atom()) {
    // Translation: F(z) = F_m(z - a).
    const MeasureHandle& m = m1.atom() ? m2 : m1;
    const double a = m1.atom() ? *m1.atom() : *m2.atom();
    const auto& src = m.parts();
    MeasureHandle::Parts p;
    p.F = [m, a](const Lifted& w) { return m.F(w.z - a); };
    p.fid = src.fid;
    p.support = {src.support.lo + a, src.support.hi + a};
    if (src.density) p.density = [m, a](double x) { return m.density(x - a); };
    p.caps.closed_density = src.caps.closed_density;
    if (src.phi) p.phi = [m, a](Complex z) { return m.closed_phi(z) + a; };
    p.caps.closed_phi = src.caps.closed_phi;
    p.tail_exponent = src.tail_exponent;
    p.label = "(" + src.label + " [+] delta_" + fmt(a) + ")";
    return {MeasureHandle(std::move(p)), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
  }

  auto omega1 = [m1, m2, opt](Complex z) {
    auto T = [&](Complex w) {
      const Complex w2 = z + (m1.F(w) - w);
      return z + (m2.F(w2) - w2);
    };
    return solve_fixed_point(T, z, opt, true, "free_convolve");
  };
  MeasureHandle::Parts p;
  p.F = [m1, omega1](const Lifted& w) { return m1.F(omega1(w.z)); };
  if (m1.fid_status() == FidStatus::certified && m2.fid_status() == FidStatus::certified) p.fid = FidStatus::certified;
  if (m1.support_hint().nonnegative() && m2.support_hint().nonnegative()) p.support = {0.0, INFINITY};
  p.label = "(" + m1.label() + " [+] " + m2.label() + ")";

  ConvolutionDiagnostics diag;
  if (opt.compute_diagnostics) {
    const auto grid = diagnostic_grid(opt);
    for (Complex z : grid) {
      const Complex w1 = omega1(z);
      const Complex w2 = z + (m1.F(w1) - w1);
      diag.max_residual = std::max(diag.max_residual, std::abs(m1.F(w1) - m2.F(w2)));
    }
    diag.grid_size = static_cast<int>(grid.size());
  }
  return {MeasureHandle(std::move(p)), ConvolutionMethod::subordination_fixpoint, diag};
}

ConvolutionResult free_power(const MeasureHandle& m, double t, const SubordinationOptions& opt) {
  require_handle(m, "free_power");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("free_power: t must be >= 0");
  if (t == 1.0) return {m, ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
  if (m.atom()) return {MeasureHandle::point_mass(t * *m.atom()), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
  if (t < 1.0) {
    if (m.fid_status() == FidStatus::refuted)
      throw PreconditionError("free_power: t < 1 requires a freely infinitely divisible measure; '" + m.label() +
                              "' is not (free divisibility criterion: rule none)");
    if (m.fid_status() != FidStatus::certified)
      throw PreconditionError("free_power: t < 1 requires a measure certified freely infinitely divisible; '" +
                              m.label() + "' is not certified");
    if (t == 0.0) return {MeasureHandle::point_mass(0.0), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
    if (!m.continuable())
      throw PreconditionError("free_power: t < 1 needs the analytic continuation of F, which '" + m.label() +
                              "' does not provide");
  }

  const auto& src = m.parts();
  std::function<Lifted(Complex)> omega;
  if (t > 1.0) {
    omega = [m, t, opt](Complex z) {
      auto T = [&](Complex w) { return z / t + (1.0 - 1.0 / t) * m.F(w); };
      return principal(solve_fixed_point(T, z, opt, true, "free_power"));
    };
  } else {
    AnalyticMap M;
    M.value = [m, t](const Lifted& w) { return t * w.z + (1.0 - t) * m.F(w); };
    if (src.dF) M.derivative = [m, t](const Lifted& w) { return t + (1.0 - t) * m.dF(w); };
    omega = [M](Complex z) {
      const Preimage pre = invert_vertical(M, z);
      if (!pre.converged) throw ConvergenceError("free_power: continuation failed", pre.residual);
      return pre.w;
    };
  }
  MeasureHandle::Parts p;
  p.F = [m, omega](const Lifted& w) { return m.F(omega(w.z)); };
  p.fid = src.fid == FidStatus::certified ? FidStatus::certified : FidStatus::unknown;
  if (src.phi) {
    p.phi = [m, t](Complex z) { return t * m.closed_phi(z); };
    p.caps.closed_phi = true;
  }
  if (src.support.nonnegative()) p.support = {0.0, INFINITY};
  p.tail_exponent = src.tail_exponent;
  p.label = src.label + "^[+]" + fmt(t);

  ConvolutionDiagnostics diag;
  if (opt.compute_diagnostics) {
    const auto grid = diagnostic_grid(opt);
    for (Complex z : grid) {
      const Lifted w = omega(z);
      diag.max_residual = std::max(diag.max_residual, std::abs(t * w.z + (1.0 - t) * m.F(w) - z));
    }
    diag.grid_size = static_cast<int>(grid.size());
  }
  return {MeasureHandle(std::move(p)), ConvolutionMethod::subordination_fixpoint, diag};
}

ConvolutionResult free_mult_convolve(const MeasureHandle& m1_in, const MeasureHandle& m2_in,
                                     const SubordinationOptions& opt) {
  require_handle(m1_in, "free_mult_convolve");
  require_handle(m2_in, "free_mult_convolve");
  const bool pos1 = m1_in.support_hint().nonnegative();
  const bool pos2 = m2_in.support_hint().nonnegative();
  if (!pos1 && !pos2) throw DomainError("free_mult_convolve: at least one factor must be supported on [0, inf)");
  // The product is commutative; put a positive factor first.
  const MeasureHandle& m1 = pos1 ? m1_in : m2_in;
  const MeasureHandle& m2 = pos1 ? m2_in : m1_in;

  for (const MeasureHandle* a : {&m1, &m2}) {
    if (!a->atom()) continue;
    const MeasureHandle& other = a == &m1 ? m2 : m1;
    const double c = *a->atom();
    if (c == 0.0) return {MeasureHandle::point_mass(0.0), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
    if (c < 0.0) throw DomainError("free_mult_convolve: atoms must be at c >= 0");
    return {dilate(other, c), ConvolutionMethod::transform_algebra, {0.0, 0, {}}};
  }

  auto subordinated = [m1, m2, opt](Complex z) {
    auto T = [&](Complex v) { return z / m2.K(z / m1.K(v)); };
    return solve_fixed_point(T, z, opt, false, "free_mult_convolve");
  };
  auto K = [m1, subordinated](Complex z) {
    const Complex v = subordinated(z);
    return z * m1.K(v) / v;
  };
  MeasureHandle::Parts p;
  p.F = [K](const Lifted& w) { return w.z - K(w.z); };
  p.K = K;
  p.caps.closed_K = false;
  if (pos1 && pos2) p.support = {0.0, INFINITY};
  p.label = "(" + m1.label() + " [x] " + m2.label() + ")";
  MeasureHandle result(std::move(p));

  ConvolutionDiagnostics diag;
  if (opt.compute_diagnostics) {
    const auto grid = diagnostic_grid(opt);
    for (Complex z : grid) {
      const Complex v = subordinated(z);
      const Complex r = v - z / m2.K(z / m1.K(v));
      diag.max_residual = std::max(diag.max_residual, std::abs(r) / std::max(1.0, std::abs(v)));
    }
    diag.grid_size = static_cast<int>(grid.size());
    if (pos1 && pos2) {
      try {
        double worst = 0.0;
        for (double w : {-0.25, -0.5, -0.75}) {
          const Complex prod = s_transform(m1, Complex{w, 0.0}) * s_transform(m2, Complex{w, 0.0});
          worst = std::max(worst, std::abs(s_transform(result, Complex{w, 0.0}) - prod) / std::abs(prod));
        }
        diag.s_residual = worst;
      } catch (const Error&) {
        // The S-check needs real-axis evaluations that some inputs lack.
      }
    }
  }
  return {result, ConvolutionMethod::s_transform, diag};
}

MeasureHandle reciprocal_pushforward(const MeasureHandle& m) {
  require_handle(m, "reciprocal_pushforward");
  if (!m.support_hint().nonnegative())
    throw DomainError("reciprocal_pushforward: measure must be supported on [0, inf)");
  if (m.atom()) {
    if (*m.atom() <= 0.0) throw DomainError("reciprocal_pushforward: atom at 0");
    return MeasureHandle::point_mass(1.0 / *m.atom());
  }
  const auto& src = m.parts();
  MeasureHandle::Parts p;
  p.F = [m](const Lifted& w) {
    const Complex z = w.z;
    const Complex G = 1.0 / z - (1.0 / m.F(1.0 / z)) / (z * z);
    return 1.0 / G;
  };
  p.support = {0.0, INFINITY};
  if (src.density) {
    p.density = [m](double x) { return x > 0.0 ? m.density(1.0 / x) / (x * x) : 0.0; };
    p.caps.closed_density = src.caps.closed_density;
  }
  if (src.head_exponent) p.tail_exponent = -*src.head_exponent - 2.0;
  if (src.tail_exponent) p.head_exponent = -*src.tail_exponent - 2.0;
  p.label = "inv(" + src.label + ")";
  return MeasureHandle(std::move(p));
}

GriddedDensity reciprocal_pushforward(const GriddedDensity& d) {
  d.validate();
  if (!d.positive_support()) throw DomainError("reciprocal_pushforward: density must live on (0, inf)");
  GriddedDensity out;
  const std::size_t n = d.nodes.size();
  out.nodes.resize(n);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = d.nodes[n - 1 - i];
    const double y = 1.0 / x;
    out.nodes[i] = y;
    out.values[i] = d.values[n - 1 - i] / (y * y);
  }
  if (d.head_exponent) out.tail_exponent = -*d.head_exponent - 2.0;
  if (d.tail_exponent) out.head_exponent = -*d.tail_exponent - 2.0;
  return out;
}

ClassicalMultResult classical_mult_convolve(const GriddedDensity& d1, const GriddedDensity& d2,
                                            const LogGridOptions& opt) {
  d1.validate();
  d2.validate();
  if (!d1.positive_support() || !d2.positive_support())
    throw DomainError("classical_mult_convolve: both densities must live on (0, inf)");
  if (opt.nodes < 4 || opt.nodes % 2 != 0 || !(opt.log_max > opt.log_min))
    throw DomainError("classical_mult_convolve: need an even node count >= 4 and log_max > log_min");
  if (opt.log_min != -opt.log_max) throw DomainError("classical_mult_convolve: the log grid must be symmetric");
  const int n = opt.nodes;
  const int half = n / 2;
  const double h = (opt.log_max - opt.log_min) / n;
  std::vector<double> u(n), g1(n), g2(n);
  for (int i = 0; i < n; ++i) {
    u[i] = (i - half) * h;
    const double x = std::exp(u[i]);
    g1[i] = d1(x) * x;
    g2[i] = d2(x) * x;
  }
  // (g1 * g2)(u_k) with u_i + u_j = u_{i + j - half}.
  std::vector<double> g(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (g1[i] == 0.0) continue;
    const int jlo = std::max(0, half - i);
    const int jhi = std::min(n - 1, n - 1 + half - i);
    const double a = g1[i] * h;
    for (int j = jlo; j <= jhi; ++j) g[i + j - half] += a * g2[j];
  }
  ClassicalMultResult out;
  double mass = 0.0;
  out.density.nodes.resize(n);
  out.density.values.resize(n);
  for (int k = 0; k < n; ++k) {
    const double x = std::exp(u[k]);
    out.density.nodes[k] = x;
    out.density.values[k] = std::max(0.0, g[k] / x);
    mass += g[k] * h;
  }
  if (d1.tail_exponent && d2.tail_exponent)
    out.density.tail_exponent = std::max(*d1.tail_exponent, *d2.tail_exponent);
  if (d1.head_exponent && d2.head_exponent)
    out.density.head_exponent = std::min(*d1.head_exponent, *d2.head_exponent);
  out.mass_loss = 1.0 - mass;
  out.mass_loss_exceeded = std::abs(out.mass_loss) > opt.mass_tol;
  return out;
}

void to_json(nlohmann::json& j, const IdentityReport& r) {
  j = nlohmann::json{{"identity", r.identity}, {"grid", r.grid}, {"sup_rel_err", r.sup_rel_err}};
  if (r.witness)
    j["witness"] = {{"z", {r.witness->real(), r.witness->imag()}}};
  else
    j["witness"] = nullptr;
  j["tol"] = r.tol;
  j["passed"] = r.passed;
}

namespace {

template <class Err>
IdentityReport sweep(std::string identity, std::span<const Complex> grid_in, double tol, const Err& rel_err) {
  std::vector<Complex> fallback;
  std::span<const Complex> grid = grid_in;
  if (grid.empty()) {
    fallback = standard_grid();
    grid = fallback;
  }
  IdentityReport r;
  r.identity = std::move(identity);
  r.grid = static_cast<int>(grid.size());
  r.tol = tol;
  for (Complex z : grid) {
    const double e = rel_err(z);
    if (!(e <= r.sup_rel_err)) {
      r.sup_rel_err = std::isnan(e) ? INFINITY : e;
      r.witness = z;
    }
  }
  r.passed = r.sup_rel_err <= tol;
  if (r.passed) r.witness.reset();
  return r;
}

}  // namespace

IdentityReport verify_boolean_reproducing(double rho, double s, double t, double tol, std::span<const Complex> grid) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("verify_boolean_reproducing: rho must lie in [0, 1]");
  if (!(s > 0.0) || !(t > 0.0)) throw DomainError("verify_boolean_reproducing: s, t must be positive");
  const MeasureHandle a = boolean_stable_handle(1.0 / (1.0 + t), rho);
  const MeasureHandle b = boolean_stable_handle(1.0 / (1.0 + s), 1.0);
  SubordinationOptions opt;
  opt.compute_diagnostics = false;
  const MeasureHandle prod = free_mult_convolve(a, b, opt).handle;
  const std::string lhs = "b^" + fmt(rho) + "_{1/(1+" + fmt(t) + ")} [x] b^1_{1/(1+" + fmt(s) + ")}";
  if (rho == 0.0 || rho == 0.5 || rho == 1.0) {
    const MeasureHandle ref = boolean_stable_handle(1.0 / (1.0 + s + t), rho);
    return sweep(lhs + " = b^" + fmt(rho) + "_{1/(1+" + fmt(s + t) + ")}", grid, tol, [&](Complex z) {
      const Complex g_ref = 1.0 / ref.F(z);
      return std::abs(1.0 / prod.F(z) - g_ref) / std::abs(g_ref);
    });
  }
  const double c = std::pow(2.0, 1.0 + s + t);
  return sweep(lhs + " is Boolean strictly stable with index 1/(1+" + fmt(s + t) + ")", grid, tol, [&](Complex z) {
    const Complex lhs_k = 2.0 * prod.K(z);
    return std::abs(lhs_k - c * prod.K(z / c)) / std::abs(lhs_k);
  });
}

IdentityReport verify_scaling_identity(const MeasureHandle& m1, const MeasureHandle& m2, double t, double tol,
                                       std::span<const Complex> grid) {
  if (!(t > 0.0)) throw DomainError("verify_scaling_identity: t must be positive");
  SubordinationOptions opt;
  opt.compute_diagnostics = false;
  const MeasureHandle lhs = boolean_power(free_mult_convolve(m1, m2, opt).handle, t).handle;
  const MeasureHandle rhs =
      dilate(free_mult_convolve(boolean_power(m1, t).handle, boolean_power(m2, t).handle, opt).handle, 1.0 / t);
  return sweep("(m1 [x] m2)^(+)" + fmt(t) + " = D_{1/" + fmt(t) + "}(m1^(+)" + fmt(t) + " [x] m2^(+)" + fmt(t) + ")",
               grid, tol, [&](Complex z) {
                 const Complex k = lhs.K(z);
                 return std::abs(k - rhs.K(z)) / std::max(std::abs(k), 1e-300);
               });
}

}  // namespace freeconv

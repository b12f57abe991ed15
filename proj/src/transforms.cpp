#include "freeconv/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "freeconv/errors.hpp"
#include "freeconv/quadrature.hpp"

namespace freeconv {

namespace {

void require_upper(Complex z, const char* op) {
  if (!(z.imag() > 0.0)) throw DomainError(std::string(op) + ": requires Im z > 0");
}

// Neville evaluation at 0 of the interpolating polynomial through (x_k, y_k).
double neville_at_zero(std::span<const double> x, std::span<const double> y) {
  std::vector<double> p(y.begin(), y.end());
  const std::size_t n = p.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  return p[0];
}

// int_0^1 s^q / (z s - c) ds with q > 0, regularised by s = t^(1/q) when q < 1.
Complex power_closure(Complex z, double c, double q, double tol) {
  quad::Result<Complex> r;
  if (q < 1.0) {
    const double inv = 1.0 / q;
    r = quad::integrate<Complex>(
        [&](double t) {
          const double s = std::pow(t, inv);
          return Complex{inv * s, 0.0} / (z * s - c);
        },
        0.0, 1.0, tol);
  } else {
    r = quad::integrate<Complex>([&](double s) { return Complex{std::pow(s, q), 0.0} / (z * s - c); }, 0.0, 1.0, tol);
  }
  if (!r.converged) throw ConvergenceError("cauchy_transform: tail closure quadrature did not converge", r.error);
  return r.value;
}

}  // namespace

Complex cauchy_transform(const MeasureHandle& m, Complex z) {
  require_upper(z, "cauchy_transform");
  return 1.0 / m.F(z);
}

Complex f_transform(const MeasureHandle& m, Complex z) {
  require_upper(z, "f_transform");
  return m.F(z);
}

Complex k_transform(const MeasureHandle& m, Complex z) {
  require_upper(z, "k_transform");
  return m.K(z);
}

Complex cauchy_transform(const GriddedDensity& d, Complex z, double abs_tol) {
  require_upper(z, "cauchy_transform");
  d.validate();
  const std::size_t n = d.nodes.size();
  const double panel_tol = abs_tol / static_cast<double>(n + 2);
  Complex total{};
  double err = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double a = d.nodes[i - 1], b = d.nodes[i];
    const double va = d.values[i - 1], vb = d.values[i];
    auto integrand = [&](double x) {
      const double t = (x - a) / (b - a);
      return Complex{(1.0 - t) * va + t * vb, 0.0} / (z - x);
    };
    const auto r = quad::integrate<Complex>(integrand, a, b, panel_tol);
    if (!r.converged) throw ConvergenceError("cauchy_transform: panel quadrature did not converge", r.error);
    total += r.value;
    err += r.error;
  }
  if (d.tail_exponent && *d.tail_exponent < -1.0) {
    const double q = -*d.tail_exponent - 1.0;
    if (d.nodes.back() > 0.0)
      total += d.values.back() * d.nodes.back() * power_closure(z, d.nodes.back(), q, panel_tol);
    if (d.nodes.front() < 0.0)
      total += d.values.front() * std::abs(d.nodes.front()) * power_closure(z, d.nodes.front(), q, panel_tol);
  }
  if (d.positive_support() && d.head_exponent && *d.head_exponent > -1.0) {
    const double p = *d.head_exponent + 1.0;
    const double x0 = d.nodes.front();
    const auto r = quad::integrate<Complex>(
        [&](double t) { return Complex{1.0, 0.0} / (z - x0 * std::pow(t, 1.0 / p)); }, 0.0, 1.0, panel_tol);
    if (!r.converged) throw ConvergenceError("cauchy_transform: head closure quadrature did not converge", r.error);
    total += d.values.front() * x0 / p * r.value;
  }
  (void)err;
  return total;
}

StieltjesInversion stieltjes_invert(const MeasureHandle& m, std::span<const double> x_grid,
                                    const StieltjesOptions& opt) {
  if (m.atom()) throw DomainError("stieltjes_invert: point mass has no absolutely continuous density");
  const auto& eps = opt.eps_schedule;
  if (eps.size() < 3) throw DomainError("stieltjes_invert: eps_schedule needs at least 3 levels");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw DomainError("stieltjes_invert: eps levels must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) throw DomainError("stieltjes_invert: eps_schedule must be decreasing");
  }
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    if (!(x_grid[i] > x_grid[i - 1])) throw DomainError("stieltjes_invert: x_grid must be sorted");

  StieltjesInversion out;
  out.density.nodes.assign(x_grid.begin(), x_grid.end());
  out.density.values.resize(x_grid.size());
  out.density.tail_exponent = opt.tail_exponent;
  out.density.head_exponent = opt.head_exponent;
  out.residual.resize(x_grid.size());

  const std::size_t levels = eps.size();
  std::vector<double> h(levels), g(levels);
  double worst = 0.0;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    const double scale = opt.relative_eps ? (x != 0.0 ? std::abs(x) : 1.0) : 1.0;
    double gmag = 0.0;
    for (std::size_t k = 0; k < levels; ++k) {
      h[k] = eps[k] * scale;
      const Complex G = 1.0 / m.F(Complex{x, h[k]});
      g[k] = G.imag();
      gmag = std::abs(G);
    }
    const double full = neville_at_zero(h, g);
    const double reduced = neville_at_zero(std::span<const double>(h).subspan(1), std::span<const double>(g).subspan(1));
    double value = -full / kPi;
    const double res = std::abs(full - reduced) / kPi;
    out.residual[i] = res;
    if (res > opt.rtol * std::abs(value) + opt.atol) {
      ++out.failed_nodes;
      worst = std::max(worst, res);
    }
    if (value < 0.0) {
      // Negativity within the extrapolation error estimate is noise, not a branch error.
      const double clamp = std::max(1e-10 * std::max(1.0, gmag / kPi), 2.0 * res);
      if (-value <= clamp)
        value = 0.0;
      else
        throw DomainError("stieltjes_invert: negative density " + std::to_string(value) + " at x = " +
                          std::to_string(x) + " (branch error?)");
    }
    out.density.values[i] = value;
  }
  if (!x_grid.empty() &&
      static_cast<double>(out.failed_nodes) > opt.max_failed_fraction * static_cast<double>(x_grid.size()))
    throw ConvergenceError("stieltjes_invert: extrapolation residual above tolerance at " +
                               std::to_string(out.failed_nodes) + " nodes",
                           worst);
  return out;
}

Complex psi_transform(const MeasureHandle& m, Complex z) {
  if (!m.support_hint().nonnegative()) throw DomainError("psi_transform: measure must be supported on [0, inf)");
  if (z == Complex{}) return {};
  const Complex u = 1.0 / z;
  const Complex G = 1.0 / m.F(u);
  return G / z - 1.0;
}

namespace {

// Solves psi(-t) = w for t > 0; psi is increasing on (-inf, 0) with range (-1, 0).
double chi_negative(const MeasureHandle& m, double w, double seed) {
  auto g = [&](double logt) { return psi_transform(m, Complex{-std::exp(logt), 0.0}).real() - w; };
  double lo = std::log(seed), hi = lo;
  double glo = g(lo), ghi = glo;
  for (int k = 0; ghi > 0.0; ++k) {
    if (k > 200) throw ConvergenceError("s_transform: could not bracket psi^{-1}", ghi);
    hi += std::log(4.0);
    ghi = g(hi);
  }
  for (int k = 0; glo < 0.0; ++k) {
    if (k > 200) throw ConvergenceError("s_transform: could not bracket psi^{-1}", glo);
    lo -= std::log(4.0);
    glo = g(lo);
  }
  // Newton in log t, kept inside [lo, hi]; secant between the bracket ends
  // when Newton leaves it, bisection when neither makes progress.
  double x = 0.5 * (lo + hi);
  double gx = g(x);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(gx) <= 1e-14 || hi - lo < 1e-15 * std::max(1.0, std::abs(x))) return -std::exp(x);
    const double hstep = 1e-6 * std::max(1.0, std::abs(x));
    const double deriv = (g(x + hstep) - g(x - hstep)) / (2.0 * hstep);
    double next = deriv != 0.0 ? x - gx / deriv : NAN;
    if (!(next > lo && next < hi)) next = lo - glo * (hi - lo) / (ghi - glo);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double gn = g(next);
    if (gn > 0.0) {
      lo = next;
      glo = gn;
    } else {
      hi = next;
      ghi = gn;
    }
    x = next;
    gx = gn;
  }
  if (std::abs(gx) > 1e-10) throw ConvergenceError("s_transform: psi inversion did not converge", std::abs(gx));
  return -std::exp(x);
}

}  // namespace

Complex s_transform(const MeasureHandle& m, Complex w) {
  if (!m.support_hint().nonnegative()) throw DomainError("s_transform: measure must be supported on [0, inf)");
  if (m.atom()) return Complex{1.0 / *m.atom(), 0.0};
  const double wr = w.real();
  if (!(wr > -1.0 && wr < 0.0)) throw DomainError("s_transform: Re w must lie in (-1, 0)");
  const double u0 = chi_negative(m, wr, 1.0);
  Complex u{u0, 0.0};
  if (w.imag() != 0.0) {
    AnalyticMap psi;
    psi.value = [&m](const Lifted& v) { return psi_transform(m, v.z); };
    ContinuationOptions opt;
    const Preimage p = continue_segment(psi, Complex{wr, 0.0}, principal(u), w, opt);
    if (!p.converged) throw ConvergenceError("s_transform: complex continuation of psi^{-1} failed", p.residual);
    u = p.w.z;
  }
  return (1.0 + w) / w * u;
}

std::vector<double> s_transform(const MeasureHandle& m, std::span<const double> ws) {
  if (!m.support_hint().nonnegative()) throw DomainError("s_transform: measure must be supported on [0, inf)");
  std::vector<double> out;
  out.reserve(ws.size());
  double seed = 1.0;
  for (double w : ws) {
    if (!(w > -1.0 && w < 0.0)) throw DomainError("s_transform: w must lie in (-1, 0)");
    if (m.atom()) {
      out.push_back(1.0 / *m.atom());
      continue;
    }
    const double u = chi_negative(m, w, seed);
    seed = -u;
    out.push_back((1.0 + w) / w * u);
  }
  return out;
}

MeasureHandle dilate(const MeasureHandle& m, double b) {
  if (!(b > 0.0)) throw DomainError("dilate: scale must be positive");
  if (b == 1.0) return m;
  const auto& src = m.parts();
  MeasureHandle::Parts p;
  p.F = [m, b](const Lifted& w) { return b * m.F(Lifted{w.z / b, w.arg}); };
  if (src.dF) p.dF = [m, b](const Lifted& w) { return m.dF(Lifted{w.z / b, w.arg}); };
  if (src.K) p.K = [m, b](Complex z) { return b * m.K(z / b); };
  if (src.density) p.density = [m, b](double x) { return m.density(x / b) / b; };
  if (src.phi) p.phi = [m, b](Complex z) { return b * m.closed_phi(z / b); };
  p.continuable = src.continuable;
  p.caps = src.caps;
  p.support = {src.support.lo * b, src.support.hi * b};
  p.affine = {src.affine.shift * b, src.affine.scale * b};
  if (src.atom) p.atom = *src.atom * b;
  p.fid = src.fid;
  p.tail_exponent = src.tail_exponent;
  p.head_exponent = src.head_exponent;
  p.boolean_powers_positive = src.boolean_powers_positive;
  p.label = "D_" + std::to_string(b) + "(" + src.label + ")";
  return MeasureHandle(std::move(p));
}

MeasureHandle boolean_shift(const MeasureHandle& m, double a) {
  if (a == 0.0) return m;
  const auto& src = m.parts();
  MeasureHandle::Parts p;
  p.F = [m, a](const Lifted& w) { return m.F(w) - a; };
  if (src.dF) p.dF = [m](const Lifted& w) { return m.dF(w); };
  if (src.K) p.K = [m, a](Complex z) { return m.K(z) + a; };
  p.continuable = src.continuable;
  p.caps.closed_K = src.caps.closed_K;
  if (src.atom) {
    p.atom = *src.atom + a;
    p.support = {*p.atom, *p.atom};
  } else if (a > 0.0 && src.support.nonnegative()) {
    // F < 0 on the negative axis for a measure on [0, inf), and so is F - a.
    p.support = {0.0, INFINITY};
  }
  p.boolean_powers_positive = src.boolean_powers_positive && a >= 0.0;
  p.affine = {src.affine.shift + a, src.affine.scale};
  p.fid = src.fid;
  p.tail_exponent = src.tail_exponent;
  p.label = "delta_" + std::to_string(a) + " (+) " + src.label;
  return MeasureHandle(std::move(p));
}

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  if (n > 1) {
    v.front() = lo;
    v.back() = hi;
  }
  return v;
}

std::vector<double> lin_space(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<Complex> standard_grid(int nx, int ny) {
  std::vector<Complex> g;
  g.reserve(static_cast<std::size_t>(nx * ny));
  for (double y : log_space(1e-2, 1e2, ny))
    for (double x : lin_space(-10.0, 10.0, nx)) g.emplace_back(x, y);
  return g;
}

}  // namespace freeconv

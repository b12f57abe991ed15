#include "freeconv/continuation.hpp"

#include <algorithm>
#include <cmath>

#include "freeconv/errors.hpp"

namespace freeconv {

Complex AnalyticMap::diff(const Lifted& w) const {
  if (derivative) return derivative(w);
  const double scale = std::max(std::abs(w.z), 1e-300);
  double h = 1e-3 * scale;
  if (upper_half_only) h = std::min(h, 0.25 * w.z.imag());
  const Complex hr{h, 0.0};
  const Complex hi{0.0, h};
  const Complex dr = (value(relift(w, w.z + hr)) - value(relift(w, w.z - hr))) / (2.0 * hr);
  const Complex di = (value(relift(w, w.z + hi)) - value(relift(w, w.z - hi))) / (2.0 * hi);
  return 0.5 * (dr + di);
}

namespace {

// Evaluates f - target, mapping unavailable continuations to NaN so that the
// line search rejects them.
Complex residual_at(const AnalyticMap& f, const Lifted& w, Complex target) {
  try {
    return f(w) - target;
  } catch (const ContinuationUnavailable&) {
    return {NAN, NAN};
  } catch (const DomainError&) {
    return {NAN, NAN};
  }
}

double finite_abs(Complex r) { return is_finite(r) ? std::abs(r) : INFINITY; }

}  // namespace

Preimage newton_solve(const AnalyticMap& f, Complex target, const Lifted& seed, const NewtonOptions& opt) {
  Preimage out;
  out.w = seed;
  const double scale = std::max(1.0, std::abs(target));
  Complex r = residual_at(f, out.w, target);
  double res = finite_abs(r);
  for (int it = 0; it <= opt.max_iter; ++it) {
    out.newton_iterations = it;
    if (res <= opt.tol * scale) {
      out.converged = true;
      break;
    }
    if (!std::isfinite(res) || it == opt.max_iter) break;
    Complex d;
    try {
      d = f.diff(out.w);
    } catch (const Error&) {
      break;
    }
    if (!is_finite(d) || std::abs(d) < opt.min_derivative) {
      out.obstructed = true;
      break;
    }
    Complex step = r / d;
    const double cap = 0.5 * std::abs(out.w.z);
    if (cap > 0.0 && std::abs(step) > cap) step *= cap / std::abs(step);
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving) {
      const Lifted trial = relift(out.w, out.w.z - step);
      const Complex rt = residual_at(f, trial, target);
      const double rest = finite_abs(rt);
      if (rest < res) {
        out.w = trial;
        r = rt;
        res = rest;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  out.residual = res;
  if (out.converged) {
    try {
      out.abs_derivative = std::abs(f.diff(out.w));
    } catch (const Error&) {
      out.abs_derivative = 0.0;
    }
    if (out.abs_derivative < opt.min_derivative) out.obstructed = true;
  } else {
    out.obstructed = true;
  }
  return out;
}

namespace {

// Follows z(s) = from + s*(to - from), s in [0, 1], from a converged solution.
// `param` maps the path parameter to the point; used for both straight and
// geometric (vertical, log-height) paths.
template <class Path>
Preimage follow(const AnalyticMap& f, const Path& path, Preimage cur, const ContinuationOptions& opt) {
  double s = 0.0;
  double ds = 0.125;
  while (s < 1.0) {
    const double s_next = std::min(1.0, s + ds);
    const Complex z_cur = path(s);
    const Complex z_next = path(s_next);
    Lifted seed = cur.w;
    try {
      const Complex d = f.diff(cur.w);
      if (is_finite(d) && std::abs(d) > 0.0) {
        Complex dw = (z_next - z_cur) / d;
        const double cap = 0.5 * std::abs(cur.w.z);
        if (cap > 0.0 && std::abs(dw) > cap) dw *= cap / std::abs(dw);
        seed = relift(cur.w, cur.w.z + dw);
      }
    } catch (const Error&) {
    }
    Preimage next = newton_solve(f, z_next, seed, opt.newton);
    const bool jumped = next.converged && std::abs(next.w.z - cur.w.z) > 0.5 * std::abs(cur.w.z) + std::abs(z_next - z_cur);
    if (next.converged && !next.obstructed && !jumped && next.newton_iterations <= 12) {
      s = s_next;
      cur = next;
      if (next.newton_iterations <= 4) ds = std::min(0.25, ds * 2.0);
    } else {
      ds *= 0.5;
      if (ds < opt.min_step) {
        next.obstructed = true;
        next.converged = false;
        return next;
      }
    }
  }
  return cur;
}

Preimage start_at_top(const AnalyticMap& f, Complex top, const ContinuationOptions& opt) {
  return newton_solve(f, top, principal(top), opt.newton);
}

}  // namespace

Preimage continue_segment(const AnalyticMap& f, Complex from, const Lifted& w_from, Complex to,
                          const ContinuationOptions& opt) {
  Preimage cur;
  cur.w = w_from;
  cur.converged = true;
  auto path = [&](double s) { return from + s * (to - from); };
  return follow(f, path, cur, opt);
}

std::vector<Preimage> invert_column(const AnalyticMap& f, double x, std::span<const double> heights,
                                    const ContinuationOptions& opt) {
  std::vector<Preimage> out;
  out.reserve(heights.size());
  const double top = std::max(opt.start_height, heights.empty() ? 0.0 : 2.0 * heights.front());
  Preimage cur = start_at_top(f, Complex{x, top}, opt);
  double y = top;
  for (double target : heights) {
    if (!cur.converged || cur.obstructed) {
      out.push_back(cur);
      continue;
    }
    if (target > 0.0) {
      const double ly0 = std::log(y);
      const double ly1 = std::log(target);
      auto path = [&](double s) { return Complex{x, std::exp(ly0 + s * (ly1 - ly0))}; };
      cur = follow(f, path, cur, opt);
    } else {
      // Geometric descent to a tiny height, then a straight step onto the axis.
      const double floor_y = 1e-8 * std::max(1.0, std::abs(x));
      if (y > floor_y) {
        const double ly0 = std::log(y);
        const double ly1 = std::log(floor_y);
        auto path = [&](double s) { return Complex{x, std::exp(ly0 + s * (ly1 - ly0))}; };
        cur = follow(f, path, cur, opt);
      }
      if (cur.converged && !cur.obstructed) cur = continue_segment(f, Complex{x, floor_y}, cur.w, Complex{x, 0.0}, opt);
    }
    y = target;
    out.push_back(cur);
  }
  return out;
}

Preimage invert_vertical(const AnalyticMap& f, Complex target, const ContinuationOptions& opt) {
  const double h = target.imag();
  return invert_column(f, target.real(), std::span<const double>(&h, 1), opt).front();
}

}  // namespace freeconv

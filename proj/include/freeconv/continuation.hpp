#pragma once

#include <functional>
#include <span>
#include <vector>

#include "freeconv/complex.hpp"

namespace freeconv {

/// An analytic function evaluated on lifted points, optionally with its
/// derivative. When `derivative` is empty a fourth-order complex central
/// difference is used. `upper_half_only` marks maps that can only be
/// evaluated for Im w > 0; the difference stencil is shrunk accordingly.
struct AnalyticMap {
  std::function<Complex(const Lifted&)> value;
  std::function<Complex(const Lifted&)> derivative;
  bool upper_half_only = false;

  Complex operator()(const Lifted& w) const { return value(w); }
  Complex diff(const Lifted& w) const;
};

struct NewtonOptions {
  double tol = 1e-12;  ///< on |f(w) - target| / max(1, |target|)
  int max_iter = 100;
  double min_derivative = 1e-8;
};

struct ContinuationOptions {
  NewtonOptions newton;
  double start_height = 1e6;
  double min_step = 1e-10;  ///< relative path parameter below which we give up
};

/// Outcome of solving f(w) = target.
struct Preimage {
  Lifted w;
  double residual = 0.0;        ///< |f(w) - target|
  double abs_derivative = 0.0;  ///< |f'(w)|
  bool converged = false;
  bool obstructed = false;  ///< Newton breakdown or |f'| below min_derivative
  int newton_iterations = 0;
};

/// Damped Newton for f(w) = target from `seed`. Steps are capped at half of
/// |w| (so the lifted argument stays continuous) and halved until the
/// residual decreases.
Preimage newton_solve(const AnalyticMap& f, Complex target, const Lifted& seed, const NewtonOptions& opt = {});

/// Solve f(w) = target by continuation down the vertical ray from
/// Re(target) + i*start_height, seeding with w = z where f(z) = z(1 + o(1)).
/// A target on the real axis is approached from above.
Preimage invert_vertical(const AnalyticMap& f, Complex target, const ContinuationOptions& opt = {});

/// Like invert_vertical but reports the solution at every height of one
/// column x + i*heights[k]; `heights` must be strictly decreasing. Once the
/// path is obstructed, the remaining entries are returned obstructed.
std::vector<Preimage> invert_column(const AnalyticMap& f, double x, std::span<const double> heights,
                                    const ContinuationOptions& opt = {});

/// Continue a solution of f(w) = from along the segment [from, to].
Preimage continue_segment(const AnalyticMap& f, Complex from, const Lifted& w_from, Complex to,
                          const ContinuationOptions& opt = {});

}  // namespace freeconv

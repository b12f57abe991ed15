#pragma once

#include <span>
#include <vector>

#include "freeconv/gridded_density.hpp"
#include "freeconv/measure.hpp"

namespace freeconv {

/// G(z) = 1/F(z) for Im z > 0.
Complex cauchy_transform(const MeasureHandle& m, Complex z);

/// G(z) of a gridded density: adaptive Gauss-Kronrod on each node interval of
/// the piecewise-linear interpolant plus the power-law closures. Throws
/// ConvergenceError carrying the achieved error estimate.
Complex cauchy_transform(const GriddedDensity& d, Complex z, double abs_tol = 1e-9);

Complex f_transform(const MeasureHandle& m, Complex z);
Complex k_transform(const MeasureHandle& m, Complex z);

struct StieltjesOptions {
  /// Decreasing offsets; at least three levels. With relative_eps the offset
  /// at node x is eps * |x| (eps * 1 at x = 0).
  std::vector<double> eps_schedule{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  bool relative_eps = true;
  double rtol = 1e-6;  ///< extrapolation residual tolerance, relative part
  double atol = 1e-10;
  double max_failed_fraction = 0.01;
  std::optional<double> tail_exponent;
  std::optional<double> head_exponent;
};

struct StieltjesInversion {
  GriddedDensity density;
  std::vector<double> residual;  ///< per-node extrapolation residual
  int failed_nodes = 0;
};

/// density(x) = -(1/pi) lim Im G(x + i eps), Richardson-extrapolated in eps.
StieltjesInversion stieltjes_invert(const MeasureHandle& m, std::span<const double> x_grid,
                                    const StieltjesOptions& opt = {});

/// psi(z) = (1/z) G(1/z) - 1 for a measure on [0, inf).
Complex psi_transform(const MeasureHandle& m, Complex z);

/// S(w) = ((1 + w)/w) psi^{-1}(w) for w in (-1, 0) or a small complex
/// neighbourhood of that interval.
Complex s_transform(const MeasureHandle& m, Complex w);

/// Vector form seeded by continuation along the (real, sorted) interval.
std::vector<double> s_transform(const MeasureHandle& m, std::span<const double> ws);

/// F_{D_b m}(z) = b F_m(z / b).
MeasureHandle dilate(const MeasureHandle& m, double b);

/// delta_a (+) m, i.e. K -> K + a.
MeasureHandle boolean_shift(const MeasureHandle& m, double a);

/// {x + iy : |x| <= 10, 1e-2 <= y <= 1e2}, x uniform, y log-spaced.
std::vector<Complex> standard_grid(int nx = 21, int ny = 20);

std::vector<double> log_space(double lo, double hi, int n);
std::vector<double> lin_space(double lo, double hi, int n);

}  // namespace freeconv

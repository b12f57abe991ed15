#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freeconv/gridded_density.hpp"
#include "freeconv/measure.hpp"
#include "json.hpp"

namespace freeconv {

enum class ConvolutionMethod { transform_algebra, subordination_fixpoint, s_transform, log_mellin };

std::string to_string(ConvolutionMethod m);

struct ConvolutionDiagnostics {
  double max_residual = 0.0;  ///< worst defining-relation residual over the diagnostic grid
  int grid_size = 0;
  /// |S_result(w) - S_1(w) S_2(w)| / |S_1 S_2| at a few w in (-1, 0); only for
  /// free multiplicative products of two measures on [0, inf).
  std::optional<double> s_residual;
};

struct ConvolutionResult {
  MeasureHandle handle;
  ConvolutionMethod method = ConvolutionMethod::transform_algebra;
  ConvolutionDiagnostics diagnostics;
};

struct SubordinationOptions {
  double tol = 1e-12;  ///< on successive iterates, relative to max(1, |w|)
  int max_iter = 2000;
  /// Grid on which the defining relation is re-checked after construction;
  /// empty means the standard grid.
  std::vector<Complex> diagnostic_grid;
  bool compute_diagnostics = true;
};

/// K_{m1 (+) m2} = K_1 + K_2.
ConvolutionResult boolean_convolve(const MeasureHandle& m1, const MeasureHandle& m2);

/// K_{m^{(+)t}} = t K_m, t >= 0; t = 0 gives delta_0.
ConvolutionResult boolean_power(const MeasureHandle& m, double t);

/// Free additive convolution by the subordination fixed point
/// w <- z + h_2(z + h_1(w)), h_i = F_i - id; F = F_1(w_1).
ConvolutionResult free_convolve(const MeasureHandle& m1, const MeasureHandle& m2, const SubordinationOptions& opt = {});

/// m^{[+]t}. For t >= 1 by the subordination F_t(z) = F(w), t w + (1 - t) F(w) = z.
/// For 0 <= t < 1 the same relation is solved by continuation of the lifted F,
/// which requires a continuable handle certified freely infinitely divisible.
ConvolutionResult free_power(const MeasureHandle& m, double t, const SubordinationOptions& opt = {});

/// Free multiplicative convolution. At least one factor must be supported on
/// [0, inf). Computed through the multiplicative subordination of the
/// eta-transforms, which is the S-transform product S_1 S_2 written as a
/// fixed point on the upper half-plane: with v the subordinated point,
///   v = z / K_2(z / K_1(v)),   K_result(z) = z K_1(v) / v.
ConvolutionResult free_mult_convolve(const MeasureHandle& m1, const MeasureHandle& m2,
                                     const SubordinationOptions& opt = {});

/// Push-forward by x -> 1/x of a measure on (0, inf):
/// G(z) = 1/z - G_m(1/z) / z^2.
MeasureHandle reciprocal_pushforward(const MeasureHandle& m);

/// Density of 1/X: f(1/x) / x^2 on the reciprocal nodes.
GriddedDensity reciprocal_pushforward(const GriddedDensity& d);

struct LogGridOptions {
  int nodes = 1 << 14;
  double log_min = -20.0;
  double log_max = 20.0;
  double mass_tol = 1e-4;
};

struct ClassicalMultResult {
  GriddedDensity density;
  double mass_loss = 0.0;   ///< 1 - captured mass of the product on the log grid
  bool mass_loss_exceeded = false;
};

/// Density of XY for independent X ~ d1, Y ~ d2 on (0, inf): additive
/// convolution of the log-densities on a uniform log grid.
ClassicalMultResult classical_mult_convolve(const GriddedDensity& d1, const GriddedDensity& d2,
                                            const LogGridOptions& opt = {});

struct IdentityReport {
  std::string identity;
  int grid = 0;
  double sup_rel_err = 0.0;
  std::optional<Complex> witness;  ///< point of the largest error
  double tol = 0.0;
  bool passed = false;
};

void to_json(nlohmann::json& j, const IdentityReport& r);

/// b^rho_{1/(1+t)} [x] b^1_{1/(1+s)}. For rho in {0, 1/2, 1} compares G with
/// b^rho_{1/(1+s+t)}; for other rho checks Boolean strict stability of the
/// product with index 1/(1+s+t): 2 K_p(z) = c K_p(z / c), c = 2^{1+s+t}.
IdentityReport verify_boolean_reproducing(double rho, double s, double t, double tol = 1e-3,
                                          std::span<const Complex> grid = {});

/// (m1 [x] m2)^{(+)t} versus D_{1/t}(m1^{(+)t} [x] m2^{(+)t}), compared in K.
IdentityReport verify_scaling_identity(const MeasureHandle& m1, const MeasureHandle& m2, double t, double tol = 1e-3,
                                       std::span<const Complex> grid = {});

}  // namespace freeconv

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freeconv/continuation.hpp"
#include "freeconv/measure.hpp"
#include "freeconv/stable_laws.hpp"
#include "json.hpp"

namespace freeconv {

struct FIDEvidence {
  /// min of -Im phi over the unflagged grid points (absent for the closed-form
  /// classifier and for the F(0) fast path).
  std::optional<double> min_neg_im_phi;
  std::optional<Complex> witness;
  /// "im_phi", "jump", "f0_divergence", "obstruction" or empty.
  std::string witness_kind;
  double witness_value = 0.0;  ///< Im phi, jump size or |F(i eps)| at the witness
  int grid_points = 0;
  int flagged = 0;
  int jumps = 0;
};

/// `rule` is the matched clause of the closed-form criterion; numeric verdicts
/// on arbitrary handles leave it empty. When present, decision == (rule != none).
struct FIDVerdict {
  std::optional<double> alpha;
  std::optional<double> rho;
  bool decision = false;
  std::optional<FidRule> rule;
  FIDEvidence evidence;
};

void to_json(nlohmann::json& j, const FIDVerdict& v);

/// Closed-form classification of b_alpha^rho.
FIDVerdict classify_fid(double alpha, double rho);

/// phi(z) = F^{-1}(z) - z by Newton continuation down the vertical ray from
/// Re z + i 1e6. Throws ConvergenceError on an obstructed path.
Complex numeric_phi(const MeasureHandle& m, Complex z, const ContinuationOptions& opt = {});

struct FidGridSpec {
  double x_min = -10.0, x_max = 10.0;
  int nx = 81;
  double y_min = 1e-2, y_max = 1e2;
  int ny = 24;
  double jump_tol = 1e-3;
  double max_flagged_fraction = 0.01;
  bool f0_fast_path = true;
};

/// Numerical test of: phi extends to C+ with Im phi <= tol. Each grid column
/// is continued downwards from height 1e6; neighbouring columns are joined by
/// horizontal continuation and a mismatch above jump_tol (a second sheet of
/// F^{-1}) is a witness against divisibility. A divergent |F(i eps)| as
/// eps -> 0 (F cannot extend continuously to 0) short-circuits to false.
FIDVerdict verify_fid_numeric(const MeasureHandle& m, const FidGridSpec& grid = {}, double tol = 1e-9);

/// Convenience: numeric verdict for b_alpha^rho with alpha, rho recorded.
FIDVerdict verify_fid_numeric(double alpha, double rho, const FidGridSpec& grid = {}, double tol = 1e-9);

/// |F(i eps)| at eps = 1e-4, 1e-8, 1e-12, 1e-16 grows without bound.
bool f0_diverges(const MeasureHandle& m, double* last_abs = nullptr);

struct BranchAngles {
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::optional<double> theta3;  ///< (phi + pi)/alpha when phi < (2 alpha - 1) pi
  std::optional<double> theta4;  ///< (phi - pi)/alpha when phi > (1 - alpha) pi
  double phi_angle = 0.0;        ///< alpha rho pi
};

BranchAngles branch_angles(double alpha, double rho);

struct RayWitness {
  double theta = 0.0;
  double r1 = 0.0, r2 = 0.0;
  double r_star = 0.0;  ///< (1 - alpha)^{1/alpha}, minimiser of r - r^{1-alpha}
  Complex value;        ///< common value z0 / 2
  double residual = 0.0;  ///< |F(r1 e^{i theta}) - F(r2 e^{i theta})|
};

/// Two radii r1 < r* < r2 with F(r1 e^{i theta}) = F(r2 e^{i theta}) on the
/// continuation of F along arg z = theta, theta = theta3 (or theta4).
RayWitness ray_noninjectivity_witness(double alpha, double rho);

struct RayReport {
  double theta = 0.0;
  double max_im_F = 0.0;          ///< should be <= 1e-10
  double min_separation = 0.0;    ///< min |F(r_i e^{i theta}) - F(r_j e^{i theta})|, i != j
  bool in_sector = false;         ///< image arguments within the expected sector
  bool abs_monotone = false;      ///< |F| increasing along the ray (informational)
};

struct UIBoundaryReport {
  double alpha = 0.0, rho = 0.0;
  RayReport ray1, ray2;
  /// theta2 - theta1 reaches 2 pi: the two image sectors touch along a ray.
  bool sectors_touch = false;
  bool passed = false;
};

void to_json(nlohmann::json& j, const UIBoundaryReport& r);

/// Boundary behaviour of F on the rays arg z = theta1, theta2 for alpha <= 1/2.
/// Diagnostic only.
UIBoundaryReport ui_boundary_diagnostic(double alpha, double rho, int samples = 400);

/// B_t(m) = (m^{[+](1+t)})^{(+)1/(1+t)}.
MeasureHandle belinschi_nica(const MeasureHandle& m, double t);

struct IndicatorEntry {
  double tau = 0.0;
  FIDVerdict verdict;
};

struct IndicatorReport {
  double alpha = 0.0, rho = 0.0;
  std::vector<IndicatorEntry> entries;
  bool all_fid = false;
  bool none_fid = false;
};

void to_json(nlohmann::json& j, const IndicatorReport& r);

/// verify_fid_numeric on (b_alpha^rho)^{(+)tau} for every tau.
IndicatorReport indicator_probe(double alpha, double rho, const std::vector<double>& taus,
                                const FidGridSpec& grid = {});

}  // namespace freeconv

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "freeconv/complete_monotonicity.hpp"
#include "freeconv/divisibility.hpp"
#include "freeconv/measure.hpp"
#include "json.hpp"

namespace freeconv {

struct MixtureAtom {
  double alpha = 0.5;
  double lambda = 1.0;
};

/// Continuous part of sigma on (0, 1/2]. The density is proportional to
/// alpha^exponent (exponent 0 is uniform) and has total mass `mass`; it is
/// replaced by `nodes` midpoint-rule atoms at alpha_k = (2k + 1) / (4 nodes).
struct ContinuousPart {
  double mass = 1.0;
  double exponent = 0.0;
  int nodes = 40;
};

/// A finite measure sigma on (0, 1/2]; b(sigma) has
/// F(z) = z + int e^{i alpha pi} z^{1 - alpha} sigma(d alpha).
struct MixtureSpec {
  std::vector<MixtureAtom> atoms;
  std::optional<ContinuousPart> continuous;

  /// Throws DomainError on alpha outside (0, 1/2], non-positive weights or
  /// fewer than one node.
  void validate() const;

  /// Atoms plus the discretised continuous part. `nodes` overrides the
  /// refinement level of the continuous part when positive.
  std::vector<MixtureAtom> discretized(int nodes = 0) const;

  /// t sigma.
  MixtureSpec scaled(double t) const;
};

void to_json(nlohmann::json& j, const MixtureSpec& s);
void from_json(const nlohmann::json& j, MixtureSpec& s);

/// Continuous Boolean convolution b(sigma). An empty sigma gives delta_0.
MeasureHandle mixture_handle(const MixtureSpec& sigma, int nodes = 0);

/// (1/pi) f(x) / g(x) with f = sum lambda sin(alpha pi) x^{-alpha} and
/// g = (x^{1/2} + sum lambda cos(alpha pi) x^{1/2-alpha})^2 + (sum lambda sin(alpha pi) x^{1/2-alpha})^2.
double mixture_density(const MixtureSpec& sigma, double x, int nodes = 0);

/// The same density as a jet expression for the complete monotonicity check.
cm::Expr mixture_density_expr(const MixtureSpec& sigma, int nodes = 0);

/// Total mass of mixture_density, integrated in log x over [e^-600, e^600]
/// with power-law closures beyond.
double mixture_mass(const MixtureSpec& sigma, int nodes = 0);

/// sup over the standard grid of |F_n1 - F_n2| / |F_n2| between two refinement
/// levels of the continuous part.
double mixture_refinement_gap(const MixtureSpec& sigma, int n1, int n2);

struct MixtureVerifyOptions {
  FidGridSpec fid_grid;
  int cm_orders = 8;
  std::vector<double> cm_grid = cm::default_grid();
  double scaling_t = 2.0;
  double scaling_tol = 1e-12;
  bool check_mass = true;
  double mass_tol = 1e-6;
  bool check_stieltjes = false;
  double stieltjes_tol = 1e-4;
  int nodes = 0;
};

struct MixtureReport {
  FIDVerdict fid;
  cm::CMReport cm;
  double scaling_residual = 0.0;  ///< sup relative |K_{b(sigma)^{(+)t}} - K_{b(t sigma)}|
  bool scaling_passed = false;
  std::optional<double> mass;
  std::optional<double> stieltjes_sup_err;
  bool passed = false;
};

void to_json(nlohmann::json& j, const MixtureReport& r);

/// FID verification, CM of the density and the Boolean scaling identity
/// b(sigma)^{(+)t} = b(t sigma); optionally normalisation and agreement of
/// the density with Stieltjes inversion of the F oracle on [1e-2, 1e2].
MixtureReport mixture_verify(const MixtureSpec& sigma, const MixtureVerifyOptions& opt = {});

/// 1 to 3 atoms with alpha uniform in [0.1, 0.5] and lambda uniform in [0.05, 2].
MixtureSpec random_mixture_spec(std::mt19937_64& rng);

}  // namespace freeconv

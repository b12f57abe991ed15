#pragma once

#include <string>

#include "freeconv/measure.hpp"
#include "json.hpp"

namespace freeconv {

enum class Family { boolean, free, classical };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// (alpha, rho) plus the wrapper delta_shift (+) D_scale(base). The wrapper is
/// Boolean, i.e. F(z) = scale * F_base(z / scale) - shift.
struct StableLaw {
  Family family = Family::boolean;
  double alpha = 0.5;
  double rho = 1.0;
  double shift = 0.0;
  double scale = 1.0;

  /// Throws DomainError when (alpha, rho, scale) are outside the family's range.
  void validate() const;
};

void to_json(nlohmann::json& j, const StableLaw& law);
void from_json(const nlohmann::json& j, StableLaw& law);

/// Which clause of the free infinite divisibility criterion for b_alpha^rho
/// applies; `none` means not freely infinitely divisible.
enum class FidRule { alpha_le_half, middle_band, cauchy, none };

FidRule fid_rule(double alpha, double rho);
std::string to_string(FidRule r);

/// K(z) of b_alpha^rho (Im z > 0):
///   alpha < 1:  -e^{i pi rho alpha} z^{1-alpha}
///   alpha = 1:  -2 rho i + (2 (2 rho - 1) / pi) log z
///   alpha > 1:  e^{i (alpha - 2) rho pi} z^{1-alpha}
Complex boolean_stable_K(double alpha, double rho, Complex z);

/// Same formula evaluated on a lifted point (analytic continuation).
Complex boolean_stable_K(double alpha, double rho, const Lifted& w);

/// The single power term -(lambda e^{i pi rho alpha}) z^{1-alpha}. Shared by
/// the stable and mixture oracles so that they agree bit-for-bit.
Complex power_energy(double lambda, double alpha, double rho, const Lifted& w);

MeasureHandle boolean_stable_handle(const StableLaw& law);
MeasureHandle boolean_stable_handle(double alpha, double rho);

/// -(1/pi) Im G(x + i0) for alpha in (0, 1), x != 0. For rho = 1 this is
/// sin(alpha pi) x^{alpha-1} / (pi (x^{2 alpha} + 2 cos(alpha pi) x^alpha + 1))
/// on x > 0 and 0 on x < 0.
double boolean_stable_density(double alpha, double rho, double x);

/// F of the free stable law s_alpha^rho: the inverse of
/// H(w) = w - e^{i alpha rho pi} w^{1-alpha}, found by continuation from
/// large |z|. Throws ConvergenceError with the last residual on failure.
Complex free_stable_F(double alpha, double rho, Complex z);

MeasureHandle free_stable_handle(const StableLaw& law);
MeasureHandle free_stable_handle(double alpha, double rho);

/// e^{-z^alpha}, Re z > 0 (z = 0 allowed).
Complex classical_stable_laplace(double alpha, Complex z);

/// Density of the positive strictly stable law n_alpha, alpha in (0, 1).
/// alpha = 1/2 uses the Levy form; otherwise a 64-node Talbot inversion of
/// the Laplace transform.
double classical_stable_density(double alpha, double x);

}  // namespace freeconv

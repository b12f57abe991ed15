#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace freeconv {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// A point of the punctured plane together with a continuous choice of its
/// argument. Analytic continuation of z^p and log z across the negative real
/// axis is done by carrying `arg` along a path instead of using the principal
/// value.
struct Lifted {
  Complex z;
  double arg = 0.0;
};

/// Principal lift, arg in (-pi, pi]. For Im z == +0 on the negative axis this
/// gives arg = pi, i.e. the limit from the upper half-plane.
inline Lifted principal(Complex z) { return {z, std::arg(z)}; }

/// Lift `z` continuously from a nearby reference point.
inline Lifted relift(const Lifted& ref, Complex z) {
  if (ref.z == Complex{}) return principal(z);
  return {z, ref.arg + std::arg(z / ref.z)};
}

inline Complex lifted_pow(const Lifted& w, double p) {
  const double r = std::abs(w.z);
  if (r == 0.0) return p > 0.0 ? Complex{} : Complex{INFINITY, 0.0};
  return std::polar(std::pow(r, p), p * w.arg);
}

inline Complex lifted_log(const Lifted& w) { return {std::log(std::abs(w.z)), w.arg}; }

inline Complex expi(double theta) { return std::polar(1.0, theta); }

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace freeconv

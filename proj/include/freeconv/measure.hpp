#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "freeconv/complex.hpp"
#include "freeconv/continuation.hpp"

namespace freeconv {

struct Capabilities {
  bool closed_K = false;
  bool closed_phi = false;
  bool closed_density = false;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool nonnegative() const { return lo >= 0.0; }
};

/// Location/scale wrapper delta_a (+)_Boolean D_b(base).
struct Affine {
  double shift = 0.0;
  double scale = 1.0;
  bool is_identity() const { return shift == 0.0 && scale == 1.0; }
};

enum class FidStatus { unknown, certified, refuted };

/// A probability measure on R represented by its reciprocal Cauchy transform
/// F = 1/G, an analytic self-map of the upper half-plane.
///
/// Two evaluation modes exist:
///  - F(z) is the transform of the measure on C \ R, extended to the lower
///    half-plane by F(conj z) = conj F(z), and to real points outside the
///    support hint by the boundary value from above.
///  - F(Lifted) is the analytic continuation of F|C+ along a path, which is
///    what inverse-function machinery needs. Only handles built from closed
///    forms are continuable; the others accept Im w > 0 only.
///
/// Handles are immutable and cheap to copy.
class MeasureHandle {
 public:
  using Oracle = std::function<Complex(const Lifted&)>;

  struct Parts {
    Oracle F;
    Oracle dF;  ///< optional
    bool continuable = false;
    Capabilities caps;
    Interval support;
    Affine affine;
    std::optional<double> atom;  ///< set iff the measure is delta_atom
    std::function<double(double)> density;
    std::function<Complex(Complex)> phi;
    std::function<Complex(Complex)> K;
    FidStatus fid = FidStatus::unknown;
    std::optional<double> tail_exponent;
    std::optional<double> head_exponent;
    /// Every Boolean power m^{(+)t}, t > 0, is again supported on [0, inf)
    /// (true for positive Boolean stable laws and their continuous mixtures).
    bool boolean_powers_positive = false;
    std::string label;
  };

  MeasureHandle() = default;
  explicit MeasureHandle(Parts parts);

  static MeasureHandle point_mass(double a);
  /// Cauchy law with F(z) = z + i (scale 1, centred at 0).
  static MeasureHandle cauchy();

  Complex F(Complex z) const;
  Complex F(const Lifted& w) const;
  Complex dF(const Lifted& w) const;
  Complex K(Complex z) const;

  /// F viewed as an AnalyticMap for the continuation solvers.
  AnalyticMap analytic_map() const;

  bool continuable() const { return p_->continuable; }
  const Capabilities& capabilities() const { return p_->caps; }
  const Interval& support_hint() const { return p_->support; }
  const Affine& affine() const { return p_->affine; }
  std::optional<double> atom() const { return p_->atom; }
  bool has_density() const { return static_cast<bool>(p_->density); }
  double density(double x) const;
  bool has_phi() const { return static_cast<bool>(p_->phi); }
  Complex closed_phi(Complex z) const;
  FidStatus fid_status() const { return p_->fid; }
  std::optional<double> tail_exponent() const { return p_->tail_exponent; }
  std::optional<double> head_exponent() const { return p_->head_exponent; }
  bool boolean_powers_positive() const { return p_->boolean_powers_positive; }
  const std::string& label() const { return p_->label; }
  const Parts& parts() const { return *p_; }
  bool valid() const { return static_cast<bool>(p_); }

 private:
  std::shared_ptr<const Parts> p_;
};

}  // namespace freeconv

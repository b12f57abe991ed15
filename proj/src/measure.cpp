#include "freeconv/measure.hpp"

#include "freeconv/errors.hpp"

namespace freeconv {

MeasureHandle::MeasureHandle(Parts parts) {
  if (!parts.F) throw DomainError("MeasureHandle: F oracle is required");
  p_ = std::make_shared<const Parts>(std::move(parts));
}

MeasureHandle MeasureHandle::point_mass(double a) {
  Parts p;
  p.F = [a](const Lifted& w) { return w.z - a; };
  p.dF = [](const Lifted&) { return Complex{1.0, 0.0}; };
  p.K = [a](Complex) { return Complex{a, 0.0}; };
  p.continuable = true;
  p.caps.closed_K = true;
  p.support = {a, a};
  p.affine = {a, 1.0};
  p.atom = a;
  p.fid = FidStatus::certified;
  p.boolean_powers_positive = a >= 0.0;
  p.label = "delta(" + std::to_string(a) + ")";
  return MeasureHandle(std::move(p));
}

MeasureHandle MeasureHandle::cauchy() {
  Parts p;
  p.F = [](const Lifted& w) { return w.z + kI; };
  p.dF = [](const Lifted&) { return Complex{1.0, 0.0}; };
  p.K = [](Complex) { return -kI; };
  p.phi = [](Complex) { return -kI; };
  p.density = [](double x) { return 1.0 / (kPi * (1.0 + x * x)); };
  p.continuable = true;
  p.caps = {true, true, true};
  p.fid = FidStatus::certified;
  p.tail_exponent = -2.0;
  p.label = "cauchy";
  return MeasureHandle(std::move(p));
}

Complex MeasureHandle::F(Complex z) const {
  if (z.imag() > 0.0) return p_->F(principal(z));
  if (z.imag() < 0.0) return std::conj(p_->F(principal(std::conj(z))));
  if (p_->support.contains(z.real()))
    throw DomainError("F evaluated on the real axis inside the support hint");
  // Boundary value from above; signed zero keeps arg = pi on the negative axis.
  return p_->F(principal(Complex{z.real(), +0.0}));
}

Complex MeasureHandle::F(const Lifted& w) const {
  if (!p_->continuable && !(w.z.imag() > 0.0))
    throw ContinuationUnavailable("handle '" + p_->label + "' has no continuation below the real axis");
  return p_->F(w);
}

Complex MeasureHandle::dF(const Lifted& w) const {
  if (p_->dF) {
    if (!p_->continuable && !(w.z.imag() > 0.0))
      throw ContinuationUnavailable("handle '" + p_->label + "' has no continuation below the real axis");
    return p_->dF(w);
  }
  return analytic_map().diff(w);
}

Complex MeasureHandle::K(Complex z) const {
  if (p_->K && z.imag() > 0.0) return p_->K(z);
  return z - F(z);
}

AnalyticMap MeasureHandle::analytic_map() const {
  AnalyticMap m;
  auto self = *this;
  m.value = [self](const Lifted& w) { return self.F(w); };
  if (p_->dF) m.derivative = [self](const Lifted& w) { return self.dF(w); };
  m.upper_half_only = !p_->continuable;
  return m;
}

double MeasureHandle::density(double x) const {
  if (!p_->density) throw DomainError("handle '" + p_->label + "' has no closed-form density");
  return p_->density(x);
}

Complex MeasureHandle::closed_phi(Complex z) const {
  if (!p_->phi) throw DomainError("handle '" + p_->label + "' has no closed-form Voiculescu transform");
  return p_->phi(z);
}

}  // namespace freeconv

#include "freeconv/divisibility.hpp"

#include <algorithm>
#include <cmath>

#include "freeconv/convolutions.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

namespace {

nlohmann::json point_json(const std::optional<Complex>& z) {
  if (!z) return nullptr;
  return nlohmann::json::array({z->real(), z->imag()});
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

void to_json(nlohmann::json& j, const FIDVerdict& v) {
  j = nlohmann::json{{"alpha", opt_json(v.alpha)},
                     {"rho", opt_json(v.rho)},
                     {"decision", v.decision},
                     {"rule", v.rule ? nlohmann::json(to_string(*v.rule)) : nlohmann::json(nullptr)},
                     {"min_neg_im_phi", opt_json(v.evidence.min_neg_im_phi)},
                     {"witness", point_json(v.evidence.witness)}};
  if (!v.evidence.witness_kind.empty()) {
    j["witness_kind"] = v.evidence.witness_kind;
    j["witness_value"] = v.evidence.witness_value;
  }
  if (v.evidence.grid_points > 0) {
    j["grid_points"] = v.evidence.grid_points;
    j["flagged"] = v.evidence.flagged;
    j["jumps"] = v.evidence.jumps;
  }
}

FIDVerdict classify_fid(double alpha, double rho) {
  FIDVerdict v;
  v.alpha = alpha;
  v.rho = rho;
  v.rule = fid_rule(alpha, rho);
  v.decision = *v.rule != FidRule::none;
  return v;
}

Complex numeric_phi(const MeasureHandle& m, Complex z, const ContinuationOptions& opt) {
  if (!(z.imag() > 0.0)) throw DomainError("numeric_phi: requires Im z > 0");
  const Preimage p = invert_vertical(m.analytic_map(), z, opt);
  if (!p.converged || p.obstructed)
    throw ConvergenceError("numeric_phi: continuation obstructed at z = (" + std::to_string(z.real()) + ", " +
                               std::to_string(z.imag()) + ")",
                           p.residual);
  return p.w.z - z;
}

bool f0_diverges(const MeasureHandle& m, double* last_abs) {
  double a[4];
  const double eps[4] = {1e-4, 1e-8, 1e-12, 1e-16};
  try {
    for (int k = 0; k < 4; ++k) {
      a[k] = std::abs(m.F(Complex{0.0, eps[k]}));
      if (!std::isfinite(a[k])) {
        if (last_abs) *last_abs = a[k];
        return true;
      }
    }
  } catch (const Error&) {
    return false;
  }
  if (last_abs) *last_abs = a[3];
  const double d1 = a[1] - a[0], d2 = a[2] - a[1], d3 = a[3] - a[2];
  return d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d3 >= 0.5 * d1 && a[3] - a[0] > 1e-6;
}

FIDVerdict verify_fid_numeric(const MeasureHandle& m, const FidGridSpec& g, double tol) {
  if (g.nx < 2 || g.ny < 2 || !(g.y_min > 0.0) || !(g.y_max > g.y_min) || !(g.x_max > g.x_min))
    throw DomainError("verify_fid_numeric: grid must lie in C+ with at least 2 x 2 points");
  FIDVerdict v;
  double f0 = 0.0;
  if (g.f0_fast_path && f0_diverges(m, &f0)) {
    v.decision = false;
    v.evidence.witness = Complex{0.0, 1e-16};
    v.evidence.witness_kind = "f0_divergence";
    v.evidence.witness_value = f0;
    return v;
  }

  const auto xs = lin_space(g.x_min, g.x_max, g.nx);
  auto ys = log_space(g.y_min, g.y_max, g.ny);
  std::reverse(ys.begin(), ys.end());
  const AnalyticMap f = m.analytic_map();

  std::vector<std::vector<Preimage>> cols(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) cols[i] = invert_column(f, xs[i], ys);
  auto ok = [](const Preimage& p) { return p.converged && !p.obstructed; };

  double max_im = -INFINITY;
  std::optional<Complex> im_witness;
  std::optional<Complex> first_flagged;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Preimage& p = cols[i][j];
      ++v.evidence.grid_points;
      if (!ok(p)) {
        ++v.evidence.flagged;
        if (!first_flagged) first_flagged = Complex{xs[i], ys[j]};
        continue;
      }
      const double im_phi = p.w.z.imag() - ys[j];
      if (im_phi > max_im) {
        max_im = im_phi;
        im_witness = Complex{xs[i], ys[j]};
      }
    }
  }

  double max_jump = 0.0;
  std::optional<Complex> jump_witness;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const Preimage& a = cols[i][j];
      const Preimage& b = cols[i + 1][j];
      if (!ok(a) || !ok(b)) continue;
      const Preimage h = continue_segment(f, Complex{xs[i], ys[j]}, a.w, Complex{xs[i + 1], ys[j]});
      if (!ok(h)) continue;
      const double d = std::abs(h.w.z - b.w.z);
      if (d > g.jump_tol) {
        ++v.evidence.jumps;
        if (d > max_jump) {
          max_jump = d;
          jump_witness = Complex{xs[i + 1], ys[j]};
        }
      }
    }
  }

  if (std::isfinite(max_im)) v.evidence.min_neg_im_phi = -max_im;
  const double flagged_fraction = static_cast<double>(v.evidence.flagged) / v.evidence.grid_points;
  const bool im_violation = std::isfinite(max_im) && max_im > tol;
  v.decision = !im_violation && v.evidence.jumps == 0 && flagged_fraction <= g.max_flagged_fraction;
  if (im_violation) {
    v.evidence.witness = im_witness;
    v.evidence.witness_kind = "im_phi";
    v.evidence.witness_value = max_im;
  } else if (v.evidence.jumps > 0) {
    v.evidence.witness = jump_witness;
    v.evidence.witness_kind = "jump";
    v.evidence.witness_value = max_jump;
  } else if (!v.decision) {
    v.evidence.witness = first_flagged;
    v.evidence.witness_kind = "obstruction";
    v.evidence.witness_value = flagged_fraction;
  }
  return v;
}

FIDVerdict verify_fid_numeric(double alpha, double rho, const FidGridSpec& grid, double tol) {
  FIDVerdict v = verify_fid_numeric(boolean_stable_handle(alpha, rho), grid, tol);
  v.alpha = alpha;
  v.rho = rho;
  return v;
}

BranchAngles branch_angles(double alpha, double rho) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("branch_angles: alpha must lie in (0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("branch_angles: rho must lie in [0, 1]");
  BranchAngles b;
  const double phi = alpha * rho * kPi;
  b.phi_angle = phi;
  b.theta1 = -phi / (1.0 - alpha);
  b.theta2 = (kPi - phi) / (1.0 - alpha);
  if (phi < (2.0 * alpha - 1.0) * kPi) b.theta3 = (phi + kPi) / alpha;
  if (phi > (1.0 - alpha) * kPi) b.theta4 = (phi - kPi) / alpha;
  return b;
}

RayWitness ray_noninjectivity_witness(double alpha, double rho) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw DomainError("ray_noninjectivity_witness: alpha must lie in (1/2, 1)");
  const BranchAngles b = branch_angles(alpha, rho);
  if (!b.theta3 && !b.theta4)
    throw DomainError("ray_noninjectivity_witness: (alpha, rho) is outside the wedge phi < (2 alpha - 1) pi or "
                      "phi > (1 - alpha) pi");
  RayWitness w;
  w.theta = b.theta3 ? *b.theta3 : *b.theta4;
  w.r_star = std::pow(1.0 - alpha, 1.0 / alpha);
  const double min_value = -alpha * std::pow(1.0 - alpha, (1.0 - alpha) / alpha);
  const double target = 0.5 * min_value;
  auto g = [alpha, target](double r) { return r - std::pow(r, 1.0 - alpha) - target; };
  // g > 0 at 0 and 1, g < 0 at r*.
  auto bisect = [&g](double lo, double hi, bool increasing) {
    for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if ((g(mid) > 0.0) == increasing)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  w.r1 = bisect(0.0, w.r_star, false);
  w.r2 = bisect(w.r_star, 1.0, true);
  const MeasureHandle F = boolean_stable_handle(alpha, rho);
  const Complex e = expi(w.theta);
  const Complex f1 = F.F(Lifted{w.r1 * e, w.theta});
  const Complex f2 = F.F(Lifted{w.r2 * e, w.theta});
  w.value = target * e;
  w.residual = std::abs(f1 - f2);
  return w;
}

void to_json(nlohmann::json& j, const UIBoundaryReport& r) {
  auto ray = [](const RayReport& x) {
    return nlohmann::json{{"theta", x.theta},
                          {"max_im_F", x.max_im_F},
                          {"min_separation", x.min_separation},
                          {"in_sector", x.in_sector},
                          {"abs_monotone", x.abs_monotone}};
  };
  j = nlohmann::json{{"alpha", r.alpha}, {"rho", r.rho},         {"ray1", ray(r.ray1)},
                     {"ray2", ray(r.ray2)}, {"sectors_touch", r.sectors_touch}, {"passed", r.passed}};
}

UIBoundaryReport ui_boundary_diagnostic(double alpha, double rho, int samples) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainError("ui_boundary_diagnostic: alpha must lie in (0, 1/2]");
  if (samples < 2) throw DomainError("ui_boundary_diagnostic: need at least two samples");
  const BranchAngles b = branch_angles(alpha, rho);
  const MeasureHandle F = boolean_stable_handle(alpha, rho);
  const auto rs = log_space(1e-4, 1e4, samples);
  auto sweep = [&](double theta, double lo, double hi) {
    RayReport out;
    out.theta = theta;
    std::vector<Complex> img;
    img.reserve(rs.size());
    const double centre = 0.5 * (lo + hi);
    out.in_sector = true;
    out.abs_monotone = true;
    out.max_im_F = -INFINITY;
    for (double r : rs) {
      const Complex v = F.F(Lifted{r * expi(theta), theta});
      out.max_im_F = std::max(out.max_im_F, v.imag());
      if (std::abs(v) > 1e-300) {
        const double a = centre + std::remainder(std::arg(v) - centre, 2.0 * kPi);
        if (a < lo - 1e-9 || a > hi + 1e-9) out.in_sector = false;
      }
      if (!img.empty() && !(std::abs(v) > std::abs(img.back()))) out.abs_monotone = false;
      img.push_back(v);
    }
    out.min_separation = INFINITY;
    for (std::size_t i = 0; i < img.size(); ++i)
      for (std::size_t k = i + 1; k < img.size(); ++k) out.min_separation = std::min(out.min_separation, std::abs(img[i] - img[k]));
    return out;
  };
  UIBoundaryReport r;
  r.alpha = alpha;
  r.rho = rho;
  r.ray1 = sweep(b.theta1, b.theta1, 0.0);
  r.ray2 = sweep(b.theta2, kPi, b.theta2);
  r.sectors_touch = b.theta2 - b.theta1 >= 2.0 * kPi - 1e-12;
  auto good = [](const RayReport& x) { return x.max_im_F <= 1e-10 && x.min_separation > 1e-8 && x.in_sector; };
  r.passed = good(r.ray1) && good(r.ray2);
  return r;
}

MeasureHandle belinschi_nica(const MeasureHandle& m, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("belinschi_nica: t must be >= 0");
  if (t == 0.0) return m;
  SubordinationOptions opt;
  opt.compute_diagnostics = false;
  return boolean_power(free_power(m, 1.0 + t, opt).handle, 1.0 / (1.0 + t)).handle;
}

void to_json(nlohmann::json& j, const IndicatorReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) entries.push_back({{"tau", e.tau}, {"verdict", e.verdict}});
  j = nlohmann::json{{"alpha", r.alpha}, {"rho", r.rho},           {"entries", entries},
                     {"all_fid", r.all_fid}, {"none_fid", r.none_fid}};
}

IndicatorReport indicator_probe(double alpha, double rho, const std::vector<double>& taus, const FidGridSpec& grid) {
  const MeasureHandle b = boolean_stable_handle(alpha, rho);
  IndicatorReport r;
  r.alpha = alpha;
  r.rho = rho;
  r.all_fid = true;
  r.none_fid = true;
  for (double tau : taus) {
    if (!(tau > 0.0)) throw DomainError("indicator_probe: tau must be positive");
    IndicatorEntry e;
    e.tau = tau;
    e.verdict = verify_fid_numeric(boolean_power(b, tau).handle, grid);
    e.verdict.alpha = alpha;
    e.verdict.rho = rho;
    r.all_fid = r.all_fid && e.verdict.decision;
    r.none_fid = r.none_fid && !e.verdict.decision;
    r.entries.push_back(std::move(e));
  }
  return r;
}

}  // namespace freeconv

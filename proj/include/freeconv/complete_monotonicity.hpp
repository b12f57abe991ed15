#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace freeconv::cm {

/// Truncated Taylor expansion f(x0 + h) = sum c[k] h^k, k <= order, together
/// with a running bound mag[k] >= sum of |terms| that produced c[k]. Rounding
/// error in c[k] is a small multiple of eps * mag[k].
struct Jet {
  std::vector<double> c;
  std::vector<double> mag;

  int order() const { return static_cast<int>(c.size()) - 1; }
  /// n-th derivative n! c[n].
  double derivative(int n) const;
};

/// A closed-form real function that can produce its Taylor jet at any x > 0.
/// Built from powers of x, exp, sin, cos and the field operations, which is
/// enough for Boolean stable densities and their mixtures.
class Expr {
 public:
  using Fn = std::function<Jet(double x, int order)>;

  Expr() = default;
  explicit Expr(Fn fn) : fn_(std::move(fn)) {}

  Jet jet(double x, int order) const { return fn_(x, order); }
  double operator()(double x) const { return jet(x, 0).c[0]; }
  bool valid() const { return static_cast<bool>(fn_); }

  static Expr variable();
  static Expr constant(double c);

 private:
  Fn fn_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator*(double s, const Expr& a);

/// c * x^p (exact jet of the monomial).
Expr monomial(double c, double p);
/// a^p for a positive expression a.
Expr pow(const Expr& a, double p);
Expr exp(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
/// outer(inner(x)).
Expr compose(const Expr& outer, const Expr& inner);
Expr derivative(const Expr& a);

struct Violation {
  int order = 0;
  double x = 0.0;
  double value = 0.0;  ///< (-1)^n f^{(n)}(x)
};

struct OrderRow {
  int order = 0;
  bool passed = true;
  /// min over nodes of (-1)^n f^{(n)}(x) / (n! mag_n(x)), in [-1, 1].
  double worst_margin = 1.0;
};

/// Sign table of (-1)^n f^{(n)} for n = 0..orders_checked on a grid. A node
/// passes order n when (-1)^n f^{(n)}(x) >= -tol_n, tol_n being the rounding
/// bound carried by the jet. This is a strong numerical check, not a proof.
struct CMReport {
  int orders_checked = 0;
  std::vector<double> grid;
  std::vector<OrderRow> sign_table;
  std::optional<Violation> first_violation;
  std::vector<double> overflow_nodes;  ///< nodes where a derivative was not finite
  bool passed = false;
};

void to_json(nlohmann::json& j, const CMReport& r);

/// 200 log-spaced nodes on [1e-2, 1e2].
std::vector<double> default_grid();

/// `tol_scale` multiplies the carried rounding bound. orders <= 12.
CMReport cm_check(const Expr& f, int orders = 10, const std::vector<double>& grid = default_grid(),
                  double tol_scale = 1.0);

struct CalculusReport {
  CMReport f, g, sum, product;
  bool preconditions_met = false;  ///< f and g pass
  bool passed = false;             ///< preconditions met and sum, product pass
};

void to_json(nlohmann::json& j, const CalculusReport& r);

/// Closure of c.m. functions under sums and products, checked numerically.
CalculusReport cm_calculus_check(const Expr& f, const Expr& g, int orders = 10,
                                 const std::vector<double>& grid = default_grid());

struct CompositionReport {
  CMReport outer;             ///< f, as a function on (0, inf)
  CMReport inner_derivative;  ///< h'
  bool inner_positive = false;
  CMReport composition;       ///< f(h(x))
  bool preconditions_met = false;
  bool passed = false;
};

void to_json(nlohmann::json& j, const CompositionReport& r);

/// f c.m. and h > 0 with h' c.m. implies f(h(x)) c.m.
CompositionReport cm_composition_check(const Expr& outer, const Expr& h, int orders = 10,
                                       const std::vector<double>& grid = default_grid());

/// sin(alpha pi) x^{alpha-1} / (pi (x^{2 alpha} + 2 cos(alpha pi) x^alpha + 1)).
Expr boolean_stable_density_expr(double alpha);

/// x^{2 alpha} + 2 cos(alpha pi) x^alpha + 1.
Expr boolean_stable_denominator(double alpha);

struct ClassicalIdReport {
  double alpha = 0.0;
  /// "certified" (alpha <= 1/2 and the CM check passes), "no_conclusion"
  /// (alpha > 1/2) or "cm_failed".
  std::string status;
  std::string note;
  CMReport cm;
};

void to_json(nlohmann::json& j, const ClassicalIdReport& r);

/// Classical infinite divisibility of b_alpha^1 through complete monotonicity
/// of its density. rho must be 1.
ClassicalIdReport classical_id_verdict(double alpha, double rho = 1.0, int orders = 10,
                                       const std::vector<double>& grid = default_grid());

}  // namespace freeconv::cm

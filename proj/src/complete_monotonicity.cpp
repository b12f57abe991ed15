#include "freeconv/complete_monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "freeconv/errors.hpp"

namespace freeconv::cm {

namespace {

Jet zeros(int n) { return Jet{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)}; }

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Jet mul(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  Jet r = zeros(n);
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= k; ++j) {
      r.c[k] += a.c[j] * b.c[k - j];
      r.mag[k] += a.mag[j] * b.mag[k - j];
    }
  return r;
}

Jet div(const Jet& a, const Jet& b) {
  const int n = std::min(a.order(), b.order());
  if (b.c[0] == 0.0) throw DomainError("cm: division by an expression vanishing at the node");
  Jet q = zeros(n);
  const double b0 = std::abs(b.c[0]);
  for (int k = 0; k <= n; ++k) {
    double s = a.c[k];
    double m = a.mag[k];
    for (int j = 1; j <= k; ++j) {
      s -= b.c[j] * q.c[k - j];
      m += b.mag[j] * q.mag[k - j];
    }
    q.c[k] = s / b.c[0];
    q.mag[k] = (m + b.mag[0] * std::abs(q.c[k])) / b0;
  }
  return q;
}

// Composition sum_m O_m d^m with d = inner - inner(x0), by Horner.
Jet compose_jets(const Jet& outer, const Jet& inner) {
  const int n = std::min(outer.order(), inner.order());
  Jet d = inner;
  d.c.resize(n + 1);
  d.mag.resize(n + 1);
  d.c[0] = 0.0;
  d.mag[0] = 0.0;
  Jet r = zeros(n);
  r.c[0] = outer.c[n];
  r.mag[0] = outer.mag[n];
  for (int m = n - 1; m >= 0; --m) {
    r = mul(r, d);
    r.c[0] += outer.c[m];
    r.mag[0] += outer.mag[m];
  }
  // Error in inner(x0) shifts the expansion point of the outer jet.
  if (n >= 1) r.mag[0] += std::abs(outer.c[1]) * inner.mag[0];
  return r;
}

}  // namespace

double Jet::derivative(int n) const { return factorial(n) * c.at(static_cast<std::size_t>(n)); }

Expr Expr::variable() {
  return Expr([](double x, int n) {
    Jet j = zeros(n);
    j.c[0] = x;
    j.mag[0] = std::abs(x);
    if (n >= 1) j.c[1] = j.mag[1] = 1.0;
    return j;
  });
}

Expr Expr::constant(double c) {
  return Expr([c](double, int n) {
    Jet j = zeros(n);
    j.c[0] = c;
    j.mag[0] = std::abs(c);
    return j;
  });
}

Expr operator+(const Expr& a, const Expr& b) {
  return Expr([a, b](double x, int n) {
    Jet r = a.jet(x, n);
    const Jet s = b.jet(x, n);
    for (int k = 0; k <= n; ++k) {
      r.c[k] += s.c[k];
      r.mag[k] += s.mag[k];
    }
    return r;
  });
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-1.0) * b; }

Expr operator*(const Expr& a, const Expr& b) {
  return Expr([a, b](double x, int n) { return mul(a.jet(x, n), b.jet(x, n)); });
}

Expr operator/(const Expr& a, const Expr& b) {
  return Expr([a, b](double x, int n) { return div(a.jet(x, n), b.jet(x, n)); });
}

Expr operator*(double s, const Expr& a) {
  return Expr([s, a](double x, int n) {
    Jet r = a.jet(x, n);
    for (int k = 0; k <= n; ++k) {
      r.c[k] *= s;
      r.mag[k] *= std::abs(s);
    }
    return r;
  });
}

Expr monomial(double c, double p) {
  return Expr([c, p](double x, int n) {
    if (!(x > 0.0)) throw DomainError("cm: monomials are evaluated at x > 0 only");
    Jet j = zeros(n);
    j.c[0] = c * std::pow(x, p);
    j.mag[0] = std::abs(j.c[0]);
    for (int k = 1; k <= n; ++k) {
      j.c[k] = j.c[k - 1] * (p - k + 1) / (k * x);
      j.mag[k] = std::abs(j.c[k]) * (k + 1);
    }
    return j;
  });
}

Expr pow(const Expr& a, double p) { return compose(monomial(1.0, p), a); }

Expr exp(const Expr& a) {
  return Expr([a](double x, int n) {
    const Jet g = a.jet(x, n);
    Jet e = zeros(n);
    e.c[0] = std::exp(g.c[0]);
    e.mag[0] = e.c[0] * (1.0 + g.mag[0]);
    for (int k = 1; k <= n; ++k) {
      double s = 0.0, m = 0.0;
      for (int j = 1; j <= k; ++j) {
        s += j * g.c[j] * e.c[k - j];
        m += j * g.mag[j] * e.mag[k - j];
      }
      e.c[k] = s / k;
      e.mag[k] = m / k;
    }
    return e;
  });
}

namespace {

// sin and cos of a jet together: s' = c g', c' = -s g'.
std::pair<Jet, Jet> sincos(const Jet& g) {
  const int n = g.order();
  Jet s = zeros(n), c = zeros(n);
  s.c[0] = std::sin(g.c[0]);
  c.c[0] = std::cos(g.c[0]);
  s.mag[0] = std::abs(s.c[0]) + g.mag[0];
  c.mag[0] = std::abs(c.c[0]) + g.mag[0];
  for (int k = 1; k <= n; ++k) {
    double ss = 0.0, cs = 0.0, m = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * g.c[j] * c.c[k - j];
      cs -= j * g.c[j] * s.c[k - j];
      m += j * g.mag[j] * std::max(s.mag[k - j], c.mag[k - j]);
    }
    s.c[k] = ss / k;
    c.c[k] = cs / k;
    s.mag[k] = c.mag[k] = m / k;
  }
  return {s, c};
}

}  // namespace

Expr sin(const Expr& a) {
  return Expr([a](double x, int n) { return sincos(a.jet(x, n)).first; });
}

Expr cos(const Expr& a) {
  return Expr([a](double x, int n) { return sincos(a.jet(x, n)).second; });
}

Expr compose(const Expr& outer, const Expr& inner) {
  return Expr([outer, inner](double x, int n) {
    const Jet i = inner.jet(x, n);
    return compose_jets(outer.jet(i.c[0], n), i);
  });
}

Expr derivative(const Expr& a) {
  return Expr([a](double x, int n) {
    const Jet j = a.jet(x, n + 1);
    Jet d = zeros(n);
    for (int k = 0; k <= n; ++k) {
      d.c[k] = (k + 1) * j.c[k + 1];
      d.mag[k] = (k + 1) * j.mag[k + 1];
    }
    return d;
  });
}

std::vector<double> default_grid() {
  std::vector<double> g(200);
  for (int i = 0; i < 200; ++i) g[i] = std::pow(10.0, -2.0 + 4.0 * i / 199.0);
  return g;
}

void to_json(nlohmann::json& j, const CMReport& r) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : r.sign_table)
    table.push_back({{"order", row.order}, {"passed", row.passed}, {"worst_margin", row.worst_margin}});
  j = nlohmann::json{{"orders_checked", r.orders_checked},
                     {"grid_size", r.grid.size()},
                     {"grid_min", r.grid.empty() ? 0.0 : r.grid.front()},
                     {"grid_max", r.grid.empty() ? 0.0 : r.grid.back()},
                     {"sign_table", table},
                     {"passed", r.passed}};
  if (r.first_violation)
    j["first_violation"] = {{"order", r.first_violation->order},
                            {"x", r.first_violation->x},
                            {"value", r.first_violation->value}};
  else
    j["first_violation"] = nullptr;
  j["overflow_nodes"] = r.overflow_nodes;
}

CMReport cm_check(const Expr& f, int orders, const std::vector<double>& grid, double tol_scale) {
  if (!f.valid()) throw DomainError("cm_check: empty expression");
  if (orders < 0 || orders > 12) throw DomainError("cm_check: orders must lie in [0, 12]");
  if (grid.empty()) throw DomainError("cm_check: empty grid");
  for (double x : grid)
    if (!(x > 0.0)) throw DomainError("cm_check: grid nodes must be positive");
  CMReport r;
  r.orders_checked = orders;
  r.grid = grid;
  r.sign_table.resize(orders + 1);
  for (int n = 0; n <= orders; ++n) r.sign_table[n].order = n;
  const double gamma = 8.0 * (orders + 2) * (orders + 2) * std::numeric_limits<double>::epsilon();
  for (double x : grid) {
    Jet j;
    bool finite = true;
    try {
      j = f.jet(x, orders);
    } catch (const DomainError&) {
      finite = false;
    }
    for (int n = 0; finite && n <= orders; ++n)
      if (!std::isfinite(j.c[n]) || !std::isfinite(j.mag[n])) finite = false;
    if (!finite) {
      r.overflow_nodes.push_back(x);
      continue;
    }
    for (int n = 0; n <= orders; ++n) {
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      const double scaled = sign * j.c[n];
      const double tol = tol_scale * gamma * j.mag[n];
      auto& row = r.sign_table[n];
      if (j.mag[n] > 0.0) row.worst_margin = std::min(row.worst_margin, scaled / j.mag[n]);
      if (scaled < -tol) {
        row.passed = false;
        const double value = scaled * factorial(n);
        if (!r.first_violation || n < r.first_violation->order) r.first_violation = Violation{n, x, value};
      }
    }
  }
  r.passed = r.overflow_nodes.empty() &&
             std::all_of(r.sign_table.begin(), r.sign_table.end(), [](const OrderRow& row) { return row.passed; });
  return r;
}

void to_json(nlohmann::json& j, const CalculusReport& r) {
  j = nlohmann::json{{"f", r.f},           {"g", r.g},
                     {"sum", r.sum},       {"product", r.product},
                     {"preconditions_met", r.preconditions_met}, {"passed", r.passed}};
}

CalculusReport cm_calculus_check(const Expr& f, const Expr& g, int orders, const std::vector<double>& grid) {
  CalculusReport r;
  r.f = cm_check(f, orders, grid);
  r.g = cm_check(g, orders, grid);
  r.sum = cm_check(f + g, orders, grid);
  r.product = cm_check(f * g, orders, grid);
  r.preconditions_met = r.f.passed && r.g.passed;
  r.passed = r.preconditions_met && r.sum.passed && r.product.passed;
  return r;
}

void to_json(nlohmann::json& j, const CompositionReport& r) {
  j = nlohmann::json{{"outer", r.outer},
                     {"inner_derivative", r.inner_derivative},
                     {"inner_positive", r.inner_positive},
                     {"composition", r.composition},
                     {"preconditions_met", r.preconditions_met},
                     {"passed", r.passed}};
}

CompositionReport cm_composition_check(const Expr& outer, const Expr& h, int orders, const std::vector<double>& grid) {
  CompositionReport r;
  r.inner_positive = std::all_of(grid.begin(), grid.end(), [&h](double x) { return h(x) > 0.0; });
  std::vector<double> image;
  image.reserve(grid.size());
  if (r.inner_positive) {
    for (double x : grid) image.push_back(h(x));
    std::sort(image.begin(), image.end());
    r.outer = cm_check(outer, orders, image);
  }
  r.inner_derivative = cm_check(derivative(h), orders, grid);
  r.preconditions_met = r.inner_positive && r.outer.passed && r.inner_derivative.passed;
  if (r.inner_positive) r.composition = cm_check(compose(outer, h), orders, grid);
  r.passed = r.preconditions_met && r.composition.passed;
  return r;
}

Expr boolean_stable_denominator(double alpha) {
  return monomial(1.0, 2.0 * alpha) + monomial(2.0 * std::cos(alpha * std::numbers::pi), alpha) + Expr::constant(1.0);
}

Expr boolean_stable_density_expr(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("boolean_stable_density_expr: alpha must lie in (0, 1)");
  const double s = std::sin(alpha * std::numbers::pi) / std::numbers::pi;
  return monomial(s, alpha - 1.0) / boolean_stable_denominator(alpha);
}

void to_json(nlohmann::json& j, const ClassicalIdReport& r) {
  j = nlohmann::json{{"alpha", r.alpha}, {"status", r.status}, {"note", r.note}, {"cm", r.cm}};
}

ClassicalIdReport classical_id_verdict(double alpha, double rho, int orders, const std::vector<double>& grid) {
  if (rho != 1.0) throw DomainError("classical_id_verdict: only rho = 1 (laws on [0, inf)) is covered");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("classical_id_verdict: alpha must lie in (0, 1)");
  ClassicalIdReport r;
  r.alpha = alpha;
  r.cm = cm_check(boolean_stable_density_expr(alpha), orders, grid);
  if (alpha <= 0.5) {
    r.status = r.cm.passed ? "certified" : "cm_failed";
    r.note = r.cm.passed ? "ID(*) via complete monotonicity of the density (numerical sign check, not a proof)"
                         : "CM check failed although alpha <= 1/2; see first_violation";
  } else {
    r.status = "no_conclusion";
    r.note = "alpha > 1/2: no statement is made; CM report attached for information";
  }
  return r;
}

}  // namespace freeconv::cm

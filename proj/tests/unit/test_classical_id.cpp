#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freeconv/complete_monotonicity.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/stable_laws.hpp"

using namespace freeconv;
using namespace freeconv::cm;

namespace {

const Expr X = Expr::variable();

}  // namespace

TEST_CASE("jets of monomials carry exact derivatives") {
  const Jet j = monomial(2.0, -0.7).jet(1.5, 4);
  double falling = 2.0;
  for (int n = 0; n <= 4; ++n) {
    CHECK(j.derivative(n) == doctest::Approx(falling * std::pow(1.5, -0.7 - n)).epsilon(1e-13));
    falling *= -0.7 - n;
  }
}

TEST_CASE("jets compose through exp, sin and quotients") {
  // d^n/dx^n e^{-2x} = (-2)^n e^{-2x}
  const Jet e = exp(-2.0 * X).jet(0.4, 6);
  for (int n = 0; n <= 6; ++n) CHECK(e.derivative(n) == doctest::Approx(std::pow(-2.0, n) * std::exp(-0.8)));
  // (sin x)'' = -sin x
  CHECK(sin(X).jet(1.1, 2).derivative(2) == doctest::Approx(-std::sin(1.1)));
  // 1 / (1 + x): n-th derivative (-1)^n n! / (1 + x)^{n+1}
  const Jet q = (Expr::constant(1.0) / (Expr::constant(1.0) + X)).jet(2.0, 5);
  CHECK(q.derivative(5) == doctest::Approx(-120.0 / std::pow(3.0, 6)));
  // derivative() shifts the jet.
  CHECK(derivative(pow(X, 3.0)).jet(2.0, 0).c[0] == doctest::Approx(12.0));
  CHECK(compose(cos(X), 2.0 * X).jet(0.3, 0).c[0] == doctest::Approx(std::cos(0.6)));
}

TEST_CASE("completely monotone functions pass") {
  CHECK(cm_check(exp(-1.0 * X)).passed);
  CHECK(cm_check(monomial(1.0, -0.7)).passed);
  CHECK(cm_check(Expr::constant(1.0) / (Expr::constant(1.0) + X)).passed);
  CHECK(cm_check(Expr::constant(3.0)).passed);
}

TEST_CASE("non completely monotone functions fail at the right order") {
  const CMReport a = cm_check(X * exp(-1.0 * X));
  CHECK_FALSE(a.passed);
  REQUIRE(a.first_violation.has_value());
  CHECK(a.first_violation->order == 1);
  const CMReport b = cm_check(Expr::constant(-1.0) + X);
  CHECK(b.first_violation->order == 0);
  // e^{-x}(1.5 + sin x) is positive and decreasing near 0 but its second derivative changes sign.
  const CMReport c = cm_check(exp(-1.0 * X) * (Expr::constant(1.5) + sin(X)));
  CHECK_FALSE(c.passed);
  CHECK(c.first_violation->order >= 1);
}

TEST_CASE("report layout") {
  const CMReport r = cm_check(exp(-1.0 * X), 4);
  CHECK(r.orders_checked == 4);
  CHECK(r.sign_table.size() == 5);
  CHECK(r.grid.size() == 200);
  nlohmann::json j = r;
  CHECK(j["passed"] == true);
  CHECK_THROWS_AS(cm_check(X, 13), DomainError);
}

TEST_CASE("closure under sums and products") {
  const CalculusReport r = cm_calculus_check(exp(-1.0 * X), monomial(1.0, -0.5));
  CHECK(r.preconditions_met);
  CHECK(r.passed);
  const CalculusReport bad = cm_calculus_check(X, exp(-1.0 * X));
  CHECK_FALSE(bad.preconditions_met);
}

TEST_CASE("composition with a Bernstein inner function") {
  // f(y) = 1/y is c.m.; h = x^{1/2} + 1 is positive with c.m. derivative.
  const CompositionReport r = cm_composition_check(monomial(1.0, -1.0), monomial(1.0, 0.5) + Expr::constant(1.0));
  CHECK(r.preconditions_met);
  CHECK(r.passed);
  // x^2 has a derivative that is not c.m.
  CHECK_FALSE(cm_composition_check(monomial(1.0, -1.0), monomial(1.0, 2.0)).preconditions_met);
}

TEST_CASE("boolean stable density expression matches the closed form") {
  for (double alpha : {0.2, 0.5, 0.8})
    for (double x : {0.03, 1.0, 30.0})
      CHECK(boolean_stable_density_expr(alpha)(x) == doctest::Approx(boolean_stable_density(alpha, 1.0, x)));
}

TEST_CASE("classical infinite divisibility verdicts") {
  for (double alpha : {0.1, 0.25, 0.5}) CHECK(classical_id_verdict(alpha).status == "certified");
  const ClassicalIdReport high = classical_id_verdict(0.75);
  CHECK(high.status == "no_conclusion");
  CHECK_THROWS_AS(classical_id_verdict(0.4, 0.5), DomainError);
}

TEST_CASE("the denominator of b_alpha^1 has a c.m. derivative only for alpha <= 1/2") {
  CHECK(cm_check(derivative(boolean_stable_denominator(0.4)), 8).passed);
  CHECK_FALSE(cm_check(derivative(boolean_stable_denominator(0.7)), 8).passed);
}

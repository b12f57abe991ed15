#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freeconv/errors.hpp"
#include "freeconv/gridded_density.hpp"
#include "freeconv/measure.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/transforms.hpp"

using namespace freeconv;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("point mass transforms") {
  const MeasureHandle d = MeasureHandle::point_mass(1.5);
  for (Complex z : {Complex(0.3, 0.2), Complex(-4.0, 7.0), Complex(10.0, 1e-3)}) {
    CHECK(rel(cauchy_transform(d, z), 1.0 / (z - 1.5)) < 1e-15);
    CHECK(std::abs(k_transform(d, z) - 1.5) < 1e-12);
  }
  CHECK(d.atom().value() == 1.5);
}

TEST_CASE("cauchy law transform and inversion") {
  const MeasureHandle c = MeasureHandle::cauchy();
  CHECK(rel(cauchy_transform(c, Complex(0, 1)), Complex(0, -0.5)) < 1e-15);
  CHECK(rel(cauchy_transform(c, Complex(2, 3)), 1.0 / Complex(2, 4)) < 1e-15);
  const auto xs = lin_space(-20.0, 20.0, 81);
  const StieltjesInversion inv = stieltjes_invert(c, xs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(inv.density.values[i] == doctest::Approx(1.0 / (kPi * (1.0 + xs[i] * xs[i]))).epsilon(1e-7));
}

TEST_CASE("transforms reject the real axis") {
  const MeasureHandle c = MeasureHandle::cauchy();
  CHECK_THROWS_AS(cauchy_transform(c, Complex(1.0, 0.0)), DomainError);
  CHECK_THROWS_AS(f_transform(c, Complex(1.0, -1.0)), DomainError);
}

TEST_CASE("gridded cauchy transform of the uniform law") {
  GriddedDensity u;
  u.nodes = lin_space(0.0, 1.0, 2001);
  u.values.assign(u.nodes.size(), 1.0);
  for (Complex z : {Complex(0.5, 0.1), Complex(-1.0, 2.0), Complex(3.0, 0.5)}) {
    const Complex exact = std::log(z / (z - 1.0));
    CHECK(rel(cauchy_transform(u, z, 1e-12), exact) < 1e-8);
  }
}

TEST_CASE("gridded density interpolation, tails and csv") {
  GriddedDensity g;
  g.nodes = {1.0, 2.0, 4.0};
  g.values = {1.0, 0.5, 0.25};
  g.tail_exponent = -2.0;
  CHECK(g(1.5) == doctest::Approx(0.75));
  CHECK(g(8.0) == doctest::Approx(0.25 / 4.0));
  CHECK(g(0.5) == 0.0);
  const GriddedDensity back = GriddedDensity::from_csv(g.to_csv());
  CHECK(back.nodes == g.nodes);
  CHECK(back.values == g.values);
  GriddedDensity bad;
  bad.nodes = {2.0, 1.0};
  bad.values = {1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("stieltjes inversion recovers the positive boolean stable density") {
  const MeasureHandle b = boolean_stable_handle(0.5, 1.0);
  const auto xs = log_space(1e-2, 1e2, 50);
  const StieltjesInversion inv = stieltjes_invert(b, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double exact = 1.0 / (kPi * std::sqrt(x) * (1.0 + x));
    CHECK(inv.density.values[i] == doctest::Approx(exact).epsilon(1e-6));
  }
  CHECK(inv.failed_nodes == 0);
}

TEST_CASE("stieltjes inversion validates its input") {
  const MeasureHandle c = MeasureHandle::cauchy();
  const std::vector<double> unsorted{1.0, 0.0};
  CHECK_THROWS_AS(stieltjes_invert(c, unsorted), DomainError);
  const std::vector<double> xs{0.0, 1.0};
  CHECK_THROWS_AS(stieltjes_invert(MeasureHandle::point_mass(0.0), xs), DomainError);
}

TEST_CASE("dilation and boolean shift") {
  const MeasureHandle c = MeasureHandle::cauchy();
  const MeasureHandle d = dilate(c, 3.0);
  const MeasureHandle s = boolean_shift(c, 2.0);
  for (Complex z : {Complex(0.4, 0.9), Complex(-2.0, 0.3)}) {
    // Cauchy with scale 3: G = 1 / (z + 3i); a Boolean shift subtracts a from F.
    CHECK(rel(cauchy_transform(d, z), 1.0 / (z + Complex(0, 3))) < 1e-14);
    CHECK(rel(f_transform(s, z), z + Complex(0, 1) - 2.0) < 1e-14);
  }
  CHECK_THROWS_AS(dilate(c, 0.0), DomainError);
}

TEST_CASE("S-transform of a point mass and of b_alpha^1") {
  CHECK(s_transform(MeasureHandle::point_mass(4.0), Complex(-0.5, 0)).real() == doctest::Approx(0.25));
  // eta(z) = 1 - z F(1/z) = -e^{i alpha pi} z^alpha, so S(w) = (-w / (1 + w))^{1/alpha - 1}.
  for (double alpha : {0.3, 0.5, 0.8}) {
    const MeasureHandle b = boolean_stable_handle(alpha, 1.0);
    for (double w : {-0.2, -0.5, -0.85}) {
      const double exact = std::pow(-w / (1.0 + w), 1.0 / alpha - 1.0);
      CHECK(s_transform(b, Complex(w, 0)).real() == doctest::Approx(exact).epsilon(1e-9));
    }
  }
}

TEST_CASE("psi transform needs a nonnegative support") {
  CHECK_THROWS_AS(psi_transform(MeasureHandle::cauchy(), Complex(-1.0, 0.0)), Error);
}

TEST_CASE("grid helpers") {
  const auto g = standard_grid();
  CHECK(g.size() == 420);
  for (Complex z : g) CHECK(z.imag() > 0.0);
  const auto l = log_space(1e-2, 1e2, 5);
  CHECK(l[2] == doctest::Approx(1.0));
  const auto li = lin_space(-1.0, 1.0, 3);
  CHECK(li[1] == doctest::Approx(0.0));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freeconv/convolutions.hpp"
#include "freeconv/divisibility.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/transforms.hpp"

using namespace freeconv;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

const std::vector<Complex> kPoints{{0.3, 0.4}, {-2.0, 1.0}, {5.0, 0.2}, {0.0, 3.0}, {-0.7, 0.05}};

}  // namespace

TEST_CASE("boolean convolution of point masses is a translation") {
  const auto r = boolean_convolve(MeasureHandle::point_mass(1.0), MeasureHandle::point_mass(-3.0));
  CHECK(r.handle.atom().value() == doctest::Approx(-2.0));
  CHECK(r.method == ConvolutionMethod::transform_algebra);
}

TEST_CASE("boolean powers of boolean stable laws are dilations") {
  for (auto [alpha, rho] : std::vector<std::pair<double, double>>{{0.4, 1.0}, {0.7, 0.3}, {1.5, 0.5}}) {
    const MeasureHandle b = boolean_stable_handle(alpha, rho);
    for (double t : {0.5, 2.0, 3.5}) {
      const MeasureHandle p = boolean_power(b, t).handle;
      const MeasureHandle d = dilate(b, std::pow(t, 1.0 / alpha));
      for (Complex z : kPoints) CHECK(rel(p.K(z), d.K(z)) < 1e-12);
    }
  }
  CHECK(boolean_power(boolean_stable_handle(0.5, 1.0), 0.0).handle.atom().value() == 0.0);
  CHECK_THROWS_AS(boolean_power(MeasureHandle::cauchy(), -1.0), DomainError);
}

TEST_CASE("free convolution of cauchy laws adds scales") {
  const auto r = free_convolve(MeasureHandle::cauchy(), MeasureHandle::cauchy());
  CHECK(r.method == ConvolutionMethod::subordination_fixpoint);
  for (Complex z : kPoints) CHECK(rel(cauchy_transform(r.handle, z), 1.0 / (z + Complex(0, 2))) < 1e-10);
  CHECK(r.diagnostics.max_residual <= 1e-10);
}

TEST_CASE("free convolution with a point mass translates") {
  const MeasureHandle b = boolean_stable_handle(0.5, 1.0);
  const auto r = free_convolve(b, MeasureHandle::point_mass(2.0));
  for (Complex z : kPoints) CHECK(rel(r.handle.F(z), b.F(z - 2.0)) < 1e-14);
}

TEST_CASE("free stable laws are free strictly stable") {
  // phi(z) = -e^{i alpha rho pi} z^{1 - alpha}; adding two copies equals dilation by 2^{1/alpha}.
  const double alpha = 0.6, rho = 0.5;
  const MeasureHandle s = free_stable_handle(alpha, rho);
  const auto r = free_convolve(s, s);
  const MeasureHandle d = dilate(s, std::pow(2.0, 1.0 / alpha));
  for (Complex z : kPoints) CHECK(rel(r.handle.F(z), d.F(z)) < 1e-9);
}

TEST_CASE("free powers double the Voiculescu transform") {
  const MeasureHandle b = boolean_stable_handle(0.5, 1.0);
  const MeasureHandle b2 = free_power(b, 2.0).handle;
  // Points where z + 2 phi(z) stays in the upper half-plane.
  for (Complex z : {Complex(0.0, 8.0), Complex(-1.0, 6.0), Complex(1.0, 10.0)})
    CHECK(rel(numeric_phi(b2, z), 2.0 * numeric_phi(b, z)) < 1e-8);
  const MeasureHandle half = free_power(b, 0.5).handle;
  for (Complex z : {Complex(0.5, 2.0), Complex(-1.0, 3.0)})
    CHECK(rel(numeric_phi(half, z), 0.5 * numeric_phi(b, z)) < 1e-8);
}

TEST_CASE("free powers below one need a divisible measure") {
  CHECK_THROWS_AS(free_power(boolean_stable_handle(0.9, 1.0), 0.5), PreconditionError);
}

TEST_CASE("free multiplicative convolution of positive boolean stable laws") {
  const auto r = free_mult_convolve(boolean_stable_handle(0.5, 1.0), boolean_stable_handle(0.5, 1.0));
  const MeasureHandle target = boolean_stable_handle(1.0 / 3.0, 1.0);
  for (Complex z : kPoints) CHECK(rel(cauchy_transform(r.handle, z), cauchy_transform(target, z)) < 1e-9);
  REQUIRE(r.diagnostics.s_residual.has_value());
  CHECK(*r.diagnostics.s_residual < 1e-9);
}

TEST_CASE("free multiplicative convolution with a point mass dilates") {
  const MeasureHandle b = boolean_stable_handle(0.4, 1.0);
  const auto r = free_mult_convolve(b, MeasureHandle::point_mass(3.0));
  const MeasureHandle d = dilate(b, 3.0);
  for (Complex z : kPoints) CHECK(rel(r.handle.F(z), d.F(z)) < 1e-12);
}

TEST_CASE("free multiplicative convolution rejects two signed factors") {
  CHECK_THROWS_AS(free_mult_convolve(MeasureHandle::cauchy(), MeasureHandle::cauchy()), DomainError);
}

TEST_CASE("reciprocal pushforward") {
  const MeasureHandle r = reciprocal_pushforward(MeasureHandle::point_mass(2.0));
  for (Complex z : kPoints) CHECK(rel(cauchy_transform(r, z), 1.0 / (z - 0.5)) < 1e-13);
  // b_{1/2}^1 is invariant under x -> 1/x: its density x^{-1/2} / (pi (1 + x)) is.
  const MeasureHandle b = boolean_stable_handle(0.5, 1.0);
  const MeasureHandle rb = reciprocal_pushforward(b);
  for (Complex z : kPoints) CHECK(rel(cauchy_transform(rb, z), cauchy_transform(b, z)) < 1e-12);
}

TEST_CASE("classical multiplicative convolution of log-normal densities") {
  // log X ~ N(0, 0.5^2), log Y ~ N(0.3, 0.4^2): log XY ~ N(0.3, 0.41).
  auto lognormal = [](double mu, double s2) {
    GriddedDensity g;
    g.nodes = log_space(1e-6, 1e6, 4000);
    for (double x : g.nodes)
      g.values.push_back(std::exp(-std::pow(std::log(x) - mu, 2) / (2 * s2)) / (x * std::sqrt(2 * kPi * s2)));
    return g;
  };
  const ClassicalMultResult r = classical_mult_convolve(lognormal(0.0, 0.25), lognormal(0.3, 0.16));
  const GriddedDensity exact = lognormal(0.3, 0.41);
  for (double x : {0.2, 0.7, 1.3, 3.0, 8.0}) CHECK(r.density(x) == doctest::Approx(exact(x)).epsilon(1e-4));
  CHECK(r.mass_loss < 1e-8);
  CHECK_FALSE(r.mass_loss_exceeded);
}

TEST_CASE("reproducing identities pass and a wrong target fails") {
  const auto grid = standard_grid(5, 4);
  CHECK(verify_boolean_reproducing(1.0, 1.0, 1.0, 1e-3, grid).passed);
  CHECK(verify_boolean_reproducing(1.0, 2.0, 0.5, 1e-3, grid).passed);
  CHECK(verify_boolean_reproducing(0.3, 1.0, 1.0, 1e-3, grid).passed);
  const auto wrong = verify_scaling_identity(boolean_stable_handle(0.5, 1.0), boolean_stable_handle(0.5, 1.0), 2.0,
                                             1e-3, grid);
  CHECK(wrong.passed);
  nlohmann::json j = wrong;
  CHECK(j.contains("sup_rel_err"));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freeconv/errors.hpp"
#include "freeconv/quadrature.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/transforms.hpp"

using namespace freeconv;

namespace {

// -Im G(x + i eps) / pi straight from F(z) = z + e^{i pi rho alpha} z^{1 - alpha}.
double density_from_power_law(double alpha, double rho, double x) {
  const Complex z(x, 1e-13);
  const Complex F = z + std::polar(1.0, kPi * rho * alpha) * std::pow(z, 1.0 - alpha);
  return -(1.0 / F).imag() / kPi;
}

}  // namespace

TEST_CASE("boolean stable density matches the power-law transform") {
  for (double alpha : {0.2, 0.5, 0.75}) {
    for (double rho : {1.0, 0.4, 0.0}) {
      for (double x : {-3.0, -0.4, 0.05, 1.0, 7.5}) {
        if ((rho == 1.0 && x < 0.0) || (rho == 0.0 && x > 0.0)) {
          CHECK(boolean_stable_density(alpha, rho, x) == 0.0);
          continue;
        }
        CHECK(boolean_stable_density(alpha, rho, x) ==
              doctest::Approx(density_from_power_law(alpha, rho, x)).epsilon(1e-9));
      }
    }
  }
  CHECK(boolean_stable_density(0.5, 1.0, 1.0) == doctest::Approx(1.0 / (2.0 * kPi)));
}

TEST_CASE("boolean stable K is a pure power") {
  const Complex z(0.7, 1.3);
  CHECK(std::abs(boolean_stable_K(0.4, 0.6, z) + std::polar(1.0, kPi * 0.24) * std::pow(z, 0.6)) < 1e-14);
  // Cauchy: F = z + i.
  CHECK(std::abs(f_transform(boolean_stable_handle(1.0, 0.5), z) - (z + Complex(0, 1))) < 1e-14);
}

TEST_CASE("boolean stable handles carry support and divisibility status") {
  const MeasureHandle pos = boolean_stable_handle(0.3, 1.0);
  CHECK(pos.support_hint().nonnegative());
  CHECK(pos.fid_status() == FidStatus::certified);
  CHECK(boolean_stable_handle(0.9, 0.5).fid_status() == FidStatus::refuted);
  CHECK(boolean_stable_handle(0.6, 0.5).fid_status() == FidStatus::certified);
}

TEST_CASE("affine parameters act as shift of F and dilation") {
  StableLaw law;
  law.alpha = 0.5;
  law.rho = 0.5;
  law.scale = 2.0;
  law.shift = 0.75;
  const MeasureHandle h = boolean_stable_handle(law);
  const MeasureHandle base = boolean_stable_handle(0.5, 0.5);
  const Complex z(0.3, 0.8);
  CHECK(std::abs(h.F(z) - (2.0 * base.F(z / 2.0) - 0.75)) < 1e-13);
}

TEST_CASE("stable law validation and json") {
  StableLaw bad;
  bad.alpha = 1.5;
  bad.rho = 1.2;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.family = Family::free;
  bad.rho = 0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  StableLaw law{Family::free, 0.7, 0.3, 0.0, 1.0};
  nlohmann::json j = law;
  const StableLaw back = j.get<StableLaw>();
  CHECK(back.family == Family::free);
  CHECK(back.alpha == 0.7);
  CHECK(back.rho == 0.3);
  CHECK_THROWS(family_from_string("gaussian"));
}

TEST_CASE("fid rule regions") {
  CHECK(fid_rule(0.5, 0.0) == FidRule::alpha_le_half);
  CHECK(fid_rule(2.0 / 3.0, 0.5) == FidRule::middle_band);
  CHECK(fid_rule(0.6, 0.3) == FidRule::none);
  CHECK(fid_rule(1.0, 0.5) == FidRule::cauchy);
  CHECK(fid_rule(1.0, 0.49) == FidRule::none);
  CHECK(fid_rule(1.7, 0.5) == FidRule::none);
}

TEST_CASE("free stable F inverts w - e^{i alpha rho pi} w^{1 - alpha}") {
  for (auto [alpha, rho] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {0.3, 0.4}, {0.8, 0.0}, {1.0, 0.3}}) {
    for (Complex z : {Complex(0.5, 0.5), Complex(-3.0, 0.1), Complex(20.0, 4.0)}) {
      const Complex w = free_stable_F(alpha, rho, z);
      CHECK(w.imag() > 0.0);
      const Complex back = w - std::polar(1.0, alpha * rho * kPi) * std::pow(w, 1.0 - alpha);
      CHECK(std::abs(back - z) < 1e-10 * std::max(1.0, std::abs(z)));
    }
  }
}

TEST_CASE("classical positive stable density has Laplace transform exp(-s^alpha)") {
  for (double alpha : {0.5, 0.3, 0.7}) {
    for (double s : {0.5, 1.0, 3.0}) {
      auto integrand = [&](double u) {
        const double x = std::exp(u);
        return std::exp(-s * x) * classical_stable_density(alpha, x) * x;
      };
      const auto r = quad::integrate<double>(integrand, -40.0, 10.0, 1e-12, 1e-10);
      CHECK(r.value == doctest::Approx(std::exp(-std::pow(s, alpha))).epsilon(1e-7));
    }
  }
  CHECK(std::abs(classical_stable_laplace(0.5, Complex(4.0, 0)) - std::exp(-2.0)) < 1e-15);
  CHECK_THROWS_AS(classical_stable_density(0.5, -1.0), DomainError);
}

TEST_CASE("levy density closed form at alpha 1/2") {
  for (double x : {0.05, 0.5, 2.0, 40.0}) {
    const double levy = std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(kPi) * std::pow(x, 1.5));
    CHECK(classical_stable_density(0.5, x) == doctest::Approx(levy).epsilon(1e-13));
  }
}

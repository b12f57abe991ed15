#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freeconv/convolutions.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/mixtures.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/transforms.hpp"

using namespace freeconv;

TEST_CASE("single atom mixture is the boolean stable law") {
  MixtureSpec s;
  s.atoms = {{0.5, 1.0}};
  const MeasureHandle m = mixture_handle(s);
  const MeasureHandle b = boolean_stable_handle(0.5, 1.0);
  for (Complex z : standard_grid(5, 4)) CHECK(std::abs(m.F(z) - b.F(z)) <= 1e-14 * std::abs(b.F(z)));
  for (double x : {0.01, 1.0, 50.0})
    CHECK(mixture_density(s, x) == doctest::Approx(boolean_stable_density(0.5, 1.0, x)).epsilon(1e-12));
}

TEST_CASE("mixture with weight lambda is a dilated boolean stable law") {
  // lambda e^{i alpha pi} z^{1 - alpha} is the energy of D_c b_alpha^1 with c = lambda^{1/alpha}.
  MixtureSpec s;
  s.atoms = {{0.3, 2.0}};
  const MeasureHandle d = dilate(boolean_stable_handle(0.3, 1.0), std::pow(2.0, 1.0 / 0.3));
  const MeasureHandle m = mixture_handle(s);
  for (Complex z : standard_grid(5, 4)) CHECK(std::abs(m.K(z) - d.K(z)) <= 1e-12 * std::abs(d.K(z)));
}

TEST_CASE("density is the boundary value of the transform") {
  MixtureSpec s;
  s.atoms = {{0.2, 0.5}, {0.45, 1.5}};
  for (double x : {0.02, 0.8, 12.0}) {
    const Complex z(x, 1e-12);
    Complex F = z;
    for (const auto& a : s.atoms) F += a.lambda * std::polar(1.0, a.alpha * kPi) * std::pow(z, 1.0 - a.alpha);
    CHECK(mixture_density(s, x) == doctest::Approx(-(1.0 / F).imag() / kPi).epsilon(1e-8));
  }
  CHECK(mixture_mass(s) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("continuous part discretisation") {
  MixtureSpec s;
  s.continuous = ContinuousPart{2.0, 0.0, 4};
  const auto atoms = s.discretized();
  REQUIRE(atoms.size() == 4);
  CHECK(atoms[0].alpha == doctest::Approx(1.0 / 16.0));
  CHECK(atoms[3].alpha == doctest::Approx(7.0 / 16.0));
  double total = 0.0;
  for (const auto& a : atoms) total += a.lambda;
  CHECK(total == doctest::Approx(2.0));
  CHECK(s.discretized(10).size() == 10);
}

TEST_CASE("midpoint refinement converges at second order") {
  MixtureSpec s;
  s.continuous = ContinuousPart{};
  const double g1 = mixture_refinement_gap(s, 20, 40);
  const double g2 = mixture_refinement_gap(s, 40, 80);
  CHECK(g2 < 1e-4);
  CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("validation") {
  MixtureSpec s;
  s.atoms = {{0.6, 1.0}};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.atoms = {{0.3, -1.0}};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.atoms.clear();
  CHECK(mixture_handle(s).atom().value() == 0.0);
}

TEST_CASE("json round trip") {
  const auto j = nlohmann::json::parse(R"({"atoms":[{"alpha":0.25,"lambda":1.0}],"continuous":null})");
  const MixtureSpec s = j.get<MixtureSpec>();
  REQUIRE(s.atoms.size() == 1);
  CHECK(s.atoms[0].alpha == 0.25);
  CHECK_FALSE(s.continuous.has_value());
  nlohmann::json back = s;
  CHECK(back == j);
  CHECK_THROWS(nlohmann::json::parse(R"({"atoms":[{"alpha":0.75,"lambda":1.0}]})").get<MixtureSpec>());
}

TEST_CASE("verification of a mixture with a continuous part") {
  MixtureSpec s;
  s.atoms = {{0.5, 0.3}};
  s.continuous = ContinuousPart{1.0, 1.0, 20};
  MixtureVerifyOptions opt;
  opt.check_stieltjes = true;
  const MixtureReport r = mixture_verify(s, opt);
  CHECK(r.fid.decision);
  CHECK(r.cm.passed);
  CHECK(r.scaling_passed);
  CHECK(std::abs(*r.mass - 1.0) < 1e-6);
  CHECK(*r.stieltjes_sup_err < 1e-4);
  CHECK(r.passed);
}

TEST_CASE("boolean powers stay inside the mixture family") {
  MixtureSpec s;
  s.atoms = {{0.2, 0.7}, {0.4, 0.2}};
  const MeasureHandle p = boolean_power(mixture_handle(s), 3.0).handle;
  const MeasureHandle q = mixture_handle(s.scaled(3.0));
  for (Complex z : standard_grid(5, 4)) CHECK(std::abs(p.K(z) - q.K(z)) <= 1e-12 * std::abs(q.K(z)));
}

TEST_CASE("seeded random specs are reproducible and in range") {
  std::mt19937_64 a(7), b(7);
  for (int k = 0; k < 20; ++k) {
    const MixtureSpec s = random_mixture_spec(a), t = random_mixture_spec(b);
    REQUIRE(s.atoms.size() == t.atoms.size());
    CHECK(s.atoms.size() >= 1);
    CHECK(s.atoms.size() <= 3);
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
      CHECK(s.atoms[i].alpha == t.atoms[i].alpha);
      CHECK(s.atoms[i].alpha >= 0.1);
      CHECK(s.atoms[i].alpha <= 0.5);
      CHECK(s.atoms[i].lambda >= 0.05);
      CHECK(s.atoms[i].lambda <= 2.0);
    }
  }
}

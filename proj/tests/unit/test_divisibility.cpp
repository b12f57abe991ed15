#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freeconv/convolutions.hpp"
#include "freeconv/divisibility.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/stable_laws.hpp"
#include "freeconv/transforms.hpp"

using namespace freeconv;

TEST_CASE("closed-form classification") {
  struct Row {
    double alpha, rho;
    bool fid;
  };
  for (const Row& r : std::vector<Row>{{0.1, 0.9, true},
                                       {0.5, 0.0, true},
                                       {0.5, 1.0, true},
                                       {0.6, 0.5, true},
                                       {0.6, 2.0 - 1.0 / 0.6, true},
                                       {0.6, 0.3, false},
                                       {2.0 / 3.0, 0.5, true},
                                       {0.7, 0.5, false},
                                       {1.0, 0.5, true},
                                       {1.0, 0.6, false},
                                       {1.2, 0.5, false}}) {
    CAPTURE(r.alpha);
    CAPTURE(r.rho);
    CHECK(classify_fid(r.alpha, r.rho).decision == r.fid);
  }
  CHECK_THROWS_AS(classify_fid(2.5, 0.5), DomainError);
  nlohmann::json j = classify_fid(0.5, 1.0);
  CHECK(j["rule"] == "alpha_le_half");
}

TEST_CASE("numeric phi of free stable laws is the closed form") {
  const MeasureHandle b = boolean_stable_handle(0.5, 1.0);
  const MeasureHandle s = free_stable_handle(0.5, 1.0);
  for (Complex z : {Complex(0.5, 2.0), Complex(-3.0, 1.0), Complex(4.0, 5.0)}) {
    const Complex expected = -std::polar(1.0, 0.5 * kPi) * std::sqrt(z);
    CHECK(std::abs(numeric_phi(s, z) - expected) / std::abs(expected) < 1e-9);
    // phi of the Boolean law: F^{-1}(z) - z with F(w) = w + i w^{1/2}.
    const Complex w = numeric_phi(b, z) + z;
    CHECK(std::abs(b.F(w) - z) < 1e-9 * std::abs(z));
  }
}

TEST_CASE("numeric verifier agrees on sample points") {
  for (auto [alpha, rho] : std::vector<std::pair<double, double>>{{0.4, 0.3}, {0.6, 0.5}, {0.6, 0.05}, {0.8, 0.5}}) {
    const FIDVerdict v = verify_fid_numeric(alpha, rho);
    CHECK(v.decision == classify_fid(alpha, rho).decision);
    if (!v.decision) CHECK(v.evidence.witness.has_value());
  }
}

TEST_CASE("F(0) divergence fast path") {
  const FIDVerdict v = verify_fid_numeric(boolean_stable_handle(1.0, 0.8));
  CHECK_FALSE(v.decision);
  CHECK(v.evidence.witness_kind == "f0_divergence");
  CHECK_FALSE(f0_diverges(boolean_stable_handle(0.3, 1.0)));
}

TEST_CASE("ray non-injectivity witness") {
  const RayWitness w = ray_noninjectivity_witness(0.9, 0.1);
  CHECK(w.r1 < w.r_star);
  CHECK(w.r_star < w.r2);
  // F(r e^{i theta}) = r e^{i theta} + e^{i alpha rho pi} r^{1 - alpha} e^{i (1 - alpha) theta} on the continued sheet.
  auto F = [&](double r) {
    return std::polar(r, w.theta) + std::polar(std::pow(r, 0.1), 0.09 * kPi + 0.1 * w.theta);
  };
  CHECK(std::abs(F(w.r1) - F(w.r2)) <= 1e-10);
  CHECK(w.residual <= 1e-10);
  CHECK(w.r_star == doctest::Approx(std::pow(0.1, 1.0 / 0.9)));
  CHECK_THROWS_AS(ray_noninjectivity_witness(0.3, 0.5), DomainError);
}

TEST_CASE("boundary rays of the univalence domain") {
  for (auto [alpha, rho] : std::vector<std::pair<double, double>>{{0.3, 0.5}, {0.5, 0.0}, {0.2, 0.7}}) {
    const UIBoundaryReport r = ui_boundary_diagnostic(alpha, rho);
    CHECK(r.passed);
    CHECK(r.ray1.max_im_F <= 1e-10);
    CHECK(r.ray2.max_im_F <= 1e-10);
  }
}

TEST_CASE("branch angles") {
  const BranchAngles b = branch_angles(0.9, 0.1);
  CHECK(b.phi_angle == doctest::Approx(0.09 * kPi));
  CHECK(b.theta3.has_value());
}

TEST_CASE("belinschi-nica map at t = 1 gives the free stable law") {
  const MeasureHandle b1 = belinschi_nica(boolean_stable_handle(0.5, 1.0), 1.0);
  for (Complex z : {Complex(0.0, 1.0), Complex(-1.0, 2.0), Complex(3.0, 4.0)}) {
    const Complex expected = -Complex(0, 1) * std::sqrt(z);
    CHECK(std::abs(numeric_phi(b1, z) - expected) / std::abs(expected) < 1e-8);
  }
  CHECK_THROWS_AS(belinschi_nica(boolean_stable_handle(0.5, 1.0), -0.5), DomainError);
}

TEST_CASE("indicator probe dichotomy") {
  const std::vector<double> taus{0.5, 2.0};
  CHECK(indicator_probe(0.5, 0.5, taus).all_fid);
  CHECK(indicator_probe(0.9, 1.0, taus).none_fid);
}

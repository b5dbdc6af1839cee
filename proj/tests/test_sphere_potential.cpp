#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metagrav/sphere_potential.hpp"

using namespace metagrav;

namespace {
double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("coincident and boundary values") {
  SpherePairPotential pot(1.0, 1.0, 1.0);  // natural M = R = G = 1
  CHECK(rel_err(pot.mutual_energy(0.0), -6.0 / 5.0) < 1e-12);
  // continuity with the point form at d = 2R
  CHECK(rel_err(pot.mutual_energy(2.0), -0.5) < 1e-12);
  // Newtonian point value outside overlap
  CHECK(rel_err(pot.mutual_energy(4.0), -0.25) < 1e-12);
  CHECK(rel_err(pot.mutual_energy(10.0), -0.1) < 1e-12);
  CHECK_THROWS_AS(pot.mutual_energy(-0.1), std::domain_error);
}

TEST_CASE("dimensional scaling of the energy") {
  const double M = 3.7, R = 2.2, G = 0.9;
  SpherePairPotential pot(M, R, G);
  SpherePairPotential unit(1.0, 1.0, 1.0);
  // U(M,R,G; d) = (G M^2 / R) U(1,1,1; d/R)
  for (double s : {0.0, 0.4, 0.9, 1.3, 2.0, 3.1}) {
    CHECK(rel_err(pot.mutual_energy(s * R),
                  G * M * M / R * unit.mutual_energy(s)) < 1e-12);
  }
  CHECK_THROWS_AS(SpherePairPotential(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(SpherePairPotential(1.0, -1.0, 1.0), std::domain_error);
}

TEST_CASE("monotone non-decreasing on a dense separation grid") {
  SpherePairPotential pot(1.0, 1.0, 1.0);
  double prev = pot.mutual_energy(0.0);
  for (int i = 1; i <= 4000; ++i) {
    const double u = pot.mutual_energy(i * 1e-3 * 5.0);
    CHECK(u >= prev - 1e-15);
    prev = u;
  }
}

TEST_CASE("C1 continuity at d = 2R") {
  SpherePairPotential pot(2.0, 1.5, 1.0);
  const double d = 2.0 * pot.radius();
  const double eps = d * 1e-9;
  CHECK(rel_err(pot.force(d - eps), pot.force(d + eps)) < 1e-6);
  // derivative of the polynomial at s=1 equals the point-form derivative
  const double h = 1e-6;
  const double left = (pot.mutual_energy(d) - pot.mutual_energy(d - h)) / h;
  const double right = (pot.mutual_energy(d + h) - pot.mutual_energy(d)) / h;
  CHECK(std::abs(left - right) < 1e-5 * std::abs(left));
}

TEST_CASE("force is minus the energy derivative") {
  SpherePairPotential pot(1.0, 1.0, 1.0);
  CHECK(pot.force(0.0) == 0.0);
  // inverse square outside overlap
  CHECK(rel_err(pot.force(4.0), -1.0 / 16.0) < 1e-12);
  // centered finite difference inside the overlap
  for (double d : {0.3, 1.0, 1.7, 2.5}) {
    const double h = 1e-6;
    const double fd = -(pot.mutual_energy(d + h) - pot.mutual_energy(d - h)) /
                      (2.0 * h);
    CHECK(rel_err(pot.force(d), fd) < 1e-8);
  }
  CHECK_THROWS_AS(pot.force(-1.0), std::domain_error);
}

TEST_CASE("spring constant and alpha") {
  SpherePairPotential unit(1.0, 1.0, 1.0);
  CHECK(rel_err(unit.spring_constant(), 1.0) < 1e-12);
  CHECK(std::abs(unit.alpha() - 1.0) < 1e-6);
  CHECK(unit.alpha() > 0.1);
  CHECK(unit.alpha() < 10.0);
  // k scales as G M^2 / R^3; alpha is scale invariant
  SpherePairPotential pot(3.0, 2.0, 0.5);
  const double k_expected = 0.5 * 9.0 / 8.0;
  CHECK(rel_err(pot.spring_constant(), k_expected) < 1e-12);
  CHECK(std::abs(pot.alpha() - 1.0) < 1e-6);
  // finite-difference cross-check; U'(0) = 0 lets f(h) = 2(U(h)-U(0))/h^2
  // approximate k with an O(h) error from the cubic term, removed by one
  // Richardson step 2 f(h) - f(2h)
  const double h = 1e-3;
  auto f = [&](double step) {
    return 2.0 * (unit.mutual_energy(step) - unit.mutual_energy(0.0)) /
           (step * step);
  };
  const double k_fd = 2.0 * f(h) - f(2.0 * h);
  CHECK(rel_err(unit.spring_constant(), k_fd) < 1e-6);
}

TEST_CASE("harmonic residual near coincidence") {
  SpherePairPotential pot(1.0, 1.0, 1.0);
  const double u0 = pot.mutual_energy(0.0);
  const double k = pot.spring_constant();
  // the leading correction is the cubic term, so residual/quadratic grows
  // linearly as 0.375 d/R: the 5% mark sits at d = 2R/15, and out to 0.2R
  // the ratio stays below 0.375 d/R (the quintic term only reduces it)
  for (double d = 0.02; d <= 0.2 + 1e-12; d += 0.02) {
    const double quad = 0.5 * k * d * d;
    const double residual = std::abs(pot.mutual_energy(d) - u0 - quad);
    CHECK(residual <= 0.375 * d * quad * (1.0 + 1e-12));
    if (d <= 2.0 / 15.0) CHECK(residual <= 0.05 * quad);
  }
}

TEST_CASE("Monte Carlo oracle: determinism and error estimate") {
  SpherePairPotential pot(1.0, 1.0, 1.0);
  const MonteCarloEnergy a = pot.numeric_energy(0.7, 50000, 1234);
  const MonteCarloEnergy b = pot.numeric_energy(0.7, 50000, 1234);
  CHECK(a.energy == b.energy);
  CHECK(a.std_error == b.std_error);
  CHECK(a.std_error > 0.0);
  // different seed gives a different estimate within a few sigma
  const MonteCarloEnergy c = pot.numeric_energy(0.7, 50000, 99);
  CHECK(c.energy != a.energy);
  CHECK(std::abs(c.energy - a.energy) < 8.0 * (a.std_error + c.std_error));
  CHECK_THROWS_AS(pot.numeric_energy(0.7, 100, 1), std::domain_error);
}

TEST_CASE("Monte Carlo oracle confirms the overlap polynomial") {
  SpherePairPotential pot(1.0, 1.0, 1.0);
  const double R = pot.radius();
  // 20 separations spanning [0, 4R], including the coincident configuration
  for (int i = 0; i < 20; ++i) {
    const double d = 4.0 * R * i / 19.0;
    const MonteCarloEnergy mc =
        pot.numeric_energy(d, 200000, 1000 + static_cast<std::uint64_t>(i));
    const double exact = pot.mutual_energy(d);
    const double tol = std::max(3.0 * mc.std_error, 1e-3 * std::abs(exact));
    CHECK(std::abs(mc.energy - exact) <= tol);
  }
  // disjoint spheres follow the shell theorem
  const MonteCarloEnergy far = pot.numeric_energy(3.0 * R, 200000, 7);
  CHECK(std::abs(far.energy - (-1.0 / 3.0)) <= 3.0 * far.std_error +
                                                   1e-3 / 3.0);
}

#ifndef METAGRAV_SPHERE_POTENTIAL_HPP
#define METAGRAV_SPHERE_POTENTIAL_HPP

#include <cstdint>

namespace metagrav {

struct MonteCarloEnergy {
  double energy;     // erg (or natural)
  double std_error;  // one-sigma statistical error of the estimate
};

// Mutual gravitational potential energy of two identical uniform spheres as a
// function of center separation d. Outside overlap (d >= 2R) the exact point
// form -G M^2 / d applies; inside, the closed-form overlap polynomial
//   U(d) = -(G M^2 / R) * (6/5 - 2 s^2 + (3/2) s^3 - (1/5) s^5), s = d / (2R),
// which is C^1 at d = 2R and harmonic near d = 0 with k = G M^2 / R^3.
class SpherePairPotential {
 public:
  SpherePairPotential(double mass, double radius, double G);

  double mass() const { return mass_; }
  double radius() const { return radius_; }
  double gravitational_constant() const { return G_; }

  double mutual_energy(double d) const;
  // -dU/dd; negative (restoring toward d = 0) everywhere, zero at d = 0.
  double force(double d) const;
  // d^2U/dd^2 at d = 0 from the overlap polynomial.
  double spring_constant() const;
  // alpha = k R^3 / (G M^2), the dimensionless harmonic coefficient.
  double alpha() const;

  // Monte Carlo double integral -G rho_A rho_B / |x-y| over the two spheres,
  // the independent oracle for mutual_energy. Deterministic for a fixed seed.
  MonteCarloEnergy numeric_energy(double d, std::int64_t samples,
                                  std::uint64_t seed) const;

 private:
  double mass_;
  double radius_;
  double G_;
};

}  // namespace metagrav

#endif

#ifndef METAGRAV_RADIAL_SOLVER_HPP
#define METAGRAV_RADIAL_SOLVER_HPP

#include <functional>
#include <optional>
#include <vector>

namespace metagrav {

// s-wave radial problem for the relative motion of two point metabodies,
// solved on a uniform mesh r in (0, r_max] with the u(r) = r psi substitution.
struct RadialProblem {
  double reduced_mass = 0.5;
  std::function<double(double)> potential;  // V(r), natural units
  double r_max = 50.0;
  int mesh_points = 20000;
};

struct RadialEigenstate {
  double energy;
  std::vector<double> u;  // u(r_i), r_i = (i+1) h, normalized: integral u^2 dr = 1
  double mesh_spacing;
  int nodes;
  double tail_fraction;  // |u(r_max)| / max|u|, post-hoc box-size check
};

// Lowest s-wave bound state by Numerov integration with outward/inward
// matching and node-counting bisection on the energy. Returns nullopt when no
// bound state exists in the bracket.
std::optional<RadialEigenstate> ground_state(const RadialProblem& problem);

// n-th s-wave state (node count <= 3).
std::optional<RadialEigenstate> bound_state(const RadialProblem& problem,
                                            int nodes);

// <r> = integral r u^2 dr for a normalized u.
double expectation_radius(const RadialEigenstate& state);

}  // namespace metagrav

#endif

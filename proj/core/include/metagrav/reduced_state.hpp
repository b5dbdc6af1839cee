#ifndef METAGRAV_REDUCED_STATE_HPP
#define METAGRAV_REDUCED_STATE_HPP

#include <vector>

#include "metagrav/grid_dynamics.hpp"

namespace metagrav {

// Physical (green-sector) density matrix rho(X, X') after tracing out the red
// coordinates. Entries carry continuum density units; the discrete trace is
// sum(diag) * spacing^green_dims.
struct ReducedDensityMatrix {
  int dim = 0;         // matrix dimension: N (2-coord) or N^2 (4-coord)
  int axis_points = 0; // N per green axis
  int green_dims = 1;
  double spacing = 0.0;

  std::vector<Complex> entries;  // row-major dim x dim

  Complex at(int a, int b) const { return entries[static_cast<std::size_t>(a) * dim + b]; }
  double green_measure() const;
  double trace() const;
  double hermiticity_defect() const;  // max |rho(a,b) - conj(rho(b,a))|
};

// rho(X,X') = sum_Y Phi(X,Y) conj(Phi(X',Y)) * red measure. For 4-coordinate
// states the full matrix is materialized only up to 32 points per axis.
ReducedDensityMatrix partial_trace_red(const MetaWavefunction& state);

double purity(const ReducedDensityMatrix& rho);

// Half-open index interval on the green axis (or flattened green pair).
struct Region {
  int lo;
  int hi;
};

// Integrated |rho| mass of the A-B off-diagonal block, normalized by the
// geometric mean of the A-A and B-B diagonal block masses. 1 for a pure equal
// superposition of a packet in A and a packet in B, 0 for the mixture.
double coherence_visibility(const ReducedDensityMatrix& rho, Region a, Region b);

// Variance of the green position under the diagonal density (1 green dim).
double position_spread(const ReducedDensityMatrix& rho, double extent);

// Smallest eigenvalue estimate via shifted power iteration (small matrices).
double smallest_eigenvalue(const ReducedDensityMatrix& rho, int iterations = 500);

}  // namespace metagrav

#endif

#ifndef METAGRAV_GRID_DYNAMICS_HPP
#define METAGRAV_GRID_DYNAMICS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace metagrav {

using Complex = std::complex<double>;

// Uniform periodic position grid, identical geometry on every axis.
// The domain per axis is [-extent/2, extent/2).
struct Grid {
  int dims = 2;          // 2 (X,Y) or 4 (X1,X2,Y1,Y2)
  int points = 64;       // per axis, power of two >= 16
  double extent = 32.0;  // natural length

  Grid() = default;
  Grid(int dims_, int points_, double extent_);

  double spacing() const { return extent / points; }
  double coord(int i) const { return -0.5 * extent + i * spacing(); }
  std::size_t total() const;
  // position-space volume element dx^dims
  double measure() const;
  // signed minimal-image difference on the periodic axis
  double min_image(double delta) const;
};

// Complex amplitude field over the grid. The first dims/2 coordinates are
// green (physical), the last dims/2 are the red partners.
struct MetaWavefunction {
  Grid grid;
  std::vector<Complex> amplitudes;
  std::vector<double> masses;  // per coordinate, natural; defaults to 1

  static MetaWavefunction zero(const Grid& g);
  double norm() const;
  void normalize();
};

// Kinetic masses plus the cross-color interaction. Only green-red pairs are
// allowed in the interaction graph.
struct MetaHamiltonian {
  std::vector<double> masses;                      // per coordinate
  std::function<double(double)> cross_potential;   // U(separation)
  std::vector<std::pair<int, int>> interactions;   // (green coord, red coord)
  // Gaussian filter width applied to the periodic pair-potential table.
  // The minimal-image table has a derivative kink at half the box length;
  // filtering keeps the table band-limited so the split-step evolution does
  // not scatter amplitude across the Brillouin-zone edge (which would show
  // up as spurious total-momentum drift). 0 disables the filter.
  double table_smoothing = 0.0;

  static MetaHamiltonian cross_pairs(int dims, std::vector<double> masses,
                                     std::function<double(double)> potential);
  void validate(int dims) const;
};

enum class EvolutionMode { RealTime, ImaginaryTime };

struct EvolutionParams {
  double dt = 1e-3;
  std::int64_t steps = 1;
  EvolutionMode mode = EvolutionMode::RealTime;
  std::int64_t renormalize_every = 10;  // ImaginaryTime only
  std::int64_t sample_every = 0;        // 0: sample only start and end
  bool enforce_stability_bound = true;
};

struct Observables {
  std::vector<double> mean_x;   // per coordinate
  std::vector<double> mean_p;   // per coordinate
  std::vector<double> var_x;    // per coordinate
  double total_momentum = 0.0;  // sum of mean_p over all coordinates
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double norm = 0.0;
};

struct ObservableSample {
  double t;
  std::int64_t step;
  Observables obs;
};

struct EvolutionResult {
  MetaWavefunction state;
  std::vector<ObservableSample> series;
};

// Normalized discrete Gaussian exp(-(x-center)^2/(2 width^2) + i momentum x).
std::vector<Complex> gaussian_packet(int points, double extent, double center,
                                     double width, double momentum);

// Outer product of one 1D factor per coordinate, normalized.
MetaWavefunction product_state(const Grid& grid,
                               const std::vector<std::vector<Complex>>& factors);

// Green/red exchange swap of the amplitude array.
MetaWavefunction exchange_swap(const MetaWavefunction& state);

// Projection onto the exchange-symmetric subspace, renormalized. Throws on
// (anti)symmetric null projection.
MetaWavefunction symmetrize(const MetaWavefunction& state);

double l2_distance(const MetaWavefunction& a, const MetaWavefunction& b);

// Spectral split-operator propagator (Strang: half kinetic, potential, half
// kinetic) with precomputed pair-potential and phase tables.
class Propagator {
 public:
  Propagator(const Grid& grid, const MetaHamiltonian& hamiltonian, double dt,
             EvolutionMode mode);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  // Advance by n whole Strang steps. ImaginaryTime renormalizes per
  // renormalize_every.
  void advance(MetaWavefunction& state, std::int64_t n_steps,
               std::int64_t renormalize_every = 0);
  Observables measure(const MetaWavefunction& state);
  double potential_value(std::size_t flat_index) const;
  double max_abs_potential() const { return max_abs_v_; }
  double stability_dt_bound() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double max_abs_v_ = 0.0;
};

// Full evolution driver; samples observables every sample_every steps and
// aborts with a diagnostic if real-time norm drift exceeds 1e-4.
EvolutionResult split_step_evolve(const MetaWavefunction& initial,
                                  const MetaHamiltonian& hamiltonian,
                                  const EvolutionParams& params);

struct GroundStateParams {
  double dt = 0.05;
  std::int64_t max_steps = 200000;
  std::int64_t renormalize_every = 10;
  double energy_tolerance = 1e-10;  // relative change per step
};

struct GroundStateResult {
  MetaWavefunction state;
  double energy;
  std::int64_t steps;
  double last_residual;  // relative energy change per step at exit
};

GroundStateResult ground_state_imaginary_time(const MetaHamiltonian& hamiltonian,
                                              const MetaWavefunction& seed,
                                              const GroundStateParams& params);

Observables observables(const MetaWavefunction& state,
                        const MetaHamiltonian& hamiltonian);

// Binary checkpoint: header (dims, points, extent, step index, dt) followed by
// row-major little-endian complex doubles.
void save_checkpoint(const MetaWavefunction& state, std::int64_t step_index,
                     double dt, const std::string& path);
struct Checkpoint {
  MetaWavefunction state;
  std::int64_t step_index;
  double dt;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace metagrav

#endif

#include "metagrav/grid_dynamics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace metagrav {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Angular wavenumber of FFT bin i on an n-point axis of length L.
double fft_wavenumber(int i, int n, double extent) {
  const int f = (i < n / 2) ? i : i - n;
  return 2.0 * std::numbers::pi * f / extent;
}

}  // namespace

Grid::Grid(int dims_, int points_, double extent_)
    : dims(dims_), points(points_), extent(extent_) {
  if (dims != 2 && dims != 4)
    throw std::domain_error("Grid: dims must be 2 or 4");
  if (points < 16 || !is_power_of_two(points))
    throw std::domain_error("Grid: points_per_axis must be a power of two >= 16");
  if (!(extent > 0.0)) throw std::domain_error("Grid: extent must be positive");
}

std::size_t Grid::total() const {
  std::size_t t = 1;
  for (int a = 0; a < dims; ++a) t *= static_cast<std::size_t>(points);
  return t;
}

double Grid::measure() const { return std::pow(spacing(), dims); }

double Grid::min_image(double delta) const {
  return delta - extent * std::round(delta / extent);
}

MetaWavefunction MetaWavefunction::zero(const Grid& g) {
  MetaWavefunction w;
  w.grid = g;
  w.amplitudes.assign(g.total(), Complex{0.0, 0.0});
  w.masses.assign(g.dims, 1.0);
  return w;
}

double MetaWavefunction::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return std::sqrt(s * grid.measure());
}

void MetaWavefunction::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw std::domain_error("normalize: zero-norm state");
  const double inv = 1.0 / n;
  for (auto& a : amplitudes) a *= inv;
}

MetaHamiltonian MetaHamiltonian::cross_pairs(
    int dims, std::vector<double> masses,
    std::function<double(double)> potential) {
  MetaHamiltonian h;
  h.masses = std::move(masses);
  h.cross_potential = std::move(potential);
  const int half = dims / 2;
  for (int g = 0; g < half; ++g)
    for (int r = half; r < dims; ++r) h.interactions.emplace_back(g, r);
  h.validate(dims);
  return h;
}

void MetaHamiltonian::validate(int dims) const {
  if (static_cast<int>(masses.size()) != dims)
    throw std::domain_error("MetaHamiltonian: one mass per coordinate required");
  for (double m : masses)
    if (!(m > 0.0))
      throw std::domain_error("MetaHamiltonian: masses must be positive");
  const int half = dims / 2;
  for (auto [g, r] : interactions) {
    const bool cross = g >= 0 && g < half && r >= half && r < dims;
    if (!cross)
      throw std::domain_error(
          "MetaHamiltonian: interaction graph may contain green-red pairs only");
  }
}

std::vector<Complex> gaussian_packet(int points, double extent, double center,
                                     double width, double momentum) {
  const double dx = extent / points;
  if (!(width > 2.0 * dx))
    throw std::domain_error("gaussian_packet: width must exceed 2 grid spacings");
  if (!(std::abs(center) + 4.0 * width < 0.5 * extent))
    throw std::domain_error(
        "gaussian_packet: packet does not fit the domain (wrap-around risk)");
  std::vector<Complex> f(points);
  double nrm = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = -0.5 * extent + i * dx;
    const double arg = (x - center) / width;
    const double env = std::exp(-0.5 * arg * arg);
    f[i] = env * std::polar(1.0, momentum * x);
    nrm += env * env;
  }
  const double inv = 1.0 / std::sqrt(nrm * dx);
  for (auto& a : f) a *= inv;
  return f;
}

MetaWavefunction product_state(const Grid& grid,
                               const std::vector<std::vector<Complex>>& factors) {
  if (static_cast<int>(factors.size()) != grid.dims)
    throw std::domain_error("product_state: one factor per coordinate required");
  for (const auto& f : factors)
    if (static_cast<int>(f.size()) != grid.points)
      throw std::domain_error("product_state: factor length mismatch");
  MetaWavefunction w = MetaWavefunction::zero(grid);
  const int n = grid.points;
  const std::size_t total = grid.total();
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rem = p;
    Complex v{1.0, 0.0};
    for (int a = grid.dims - 1; a >= 0; --a) {
      v *= factors[a][rem % n];
      rem /= n;
    }
    w.amplitudes[p] = v;
  }
  w.normalize();
  return w;
}

MetaWavefunction exchange_swap(const MetaWavefunction& state) {
  MetaWavefunction out = state;
  const int n = state.grid.points;
  if (state.grid.dims == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.amplitudes[static_cast<std::size_t>(i) * n + j] =
            state.amplitudes[static_cast<std::size_t>(j) * n + i];
  } else {
    const std::size_t n1 = n, n2 = n1 * n, n3 = n2 * n;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int j1 = 0; j1 < n; ++j1)
          for (int j2 = 0; j2 < n; ++j2)
            out.amplitudes[i1 * n3 + i2 * n2 + j1 * n1 + j2] =
                state.amplitudes[j1 * n3 + j2 * n2 + i1 * n1 + i2];
  }
  return out;
}

MetaWavefunction symmetrize(const MetaWavefunction& state) {
  MetaWavefunction swapped = exchange_swap(state);
  MetaWavefunction out = state;
  for (std::size_t p = 0; p < out.amplitudes.size(); ++p)
    out.amplitudes[p] = 0.5 * (state.amplitudes[p] + swapped.amplitudes[p]);
  const double n = out.norm();
  if (n < 1e-12)
    throw std::domain_error(
        "symmetrize: null projection (exchange-antisymmetric input)");
  out.normalize();
  return out;
}

double l2_distance(const MetaWavefunction& a, const MetaWavefunction& b) {
  if (a.amplitudes.size() != b.amplitudes.size())
    throw std::domain_error("l2_distance: size mismatch");
  double s = 0.0;
  for (std::size_t p = 0; p < a.amplitudes.size(); ++p)
    s += std::norm(a.amplitudes[p] - b.amplitudes[p]);
  return std::sqrt(s * a.grid.measure());
}

// ---------------------------------------------------------------------------

struct Propagator::Impl {
  Grid grid;
  MetaHamiltonian ham;
  double dt;
  EvolutionMode mode;

  std::vector<double> sep_u;        // U(min_image(m dx)) per separation index m
  std::vector<Complex> exp_v;       // exp(c * V) per grid point
  // per-axis kinetic factors for half and full steps; the 1/N^dims backward
  // FFT normalization is folded into these tables.
  std::vector<std::vector<Complex>> kin_half, kin_full;

  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;

  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf) fftw_free(buf);
  }

  Complex* b() { return reinterpret_cast<Complex*>(buf); }

  double potential_at(std::size_t p) const {
    const int n = grid.points;
    if (grid.dims == 2) {
      if (ham.interactions.empty()) return 0.0;
      const int m = static_cast<int>(p / n) - static_cast<int>(p % n);
      return sep_u[(m + n) % n];
    }
    const std::size_t n1 = n, n2 = n1 * n, n3 = n2 * n;
    const int idx[4] = {static_cast<int>(p / n3), static_cast<int>((p / n2) % n1),
                        static_cast<int>((p / n1) % n1), static_cast<int>(p % n1)};
    double v = 0.0;
    for (auto [g, r] : ham.interactions) v += sep_u[(idx[g] - idx[r] + n) % n];
    return v;
  }

  void apply_kinetic(const std::vector<std::vector<Complex>>& tab) {
    const int n = grid.points;
    Complex* d = b();
    if (grid.dims == 2) {
      for (int i = 0; i < n; ++i) {
        const Complex fi = tab[0][i];
        Complex* row = d + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) row[j] *= fi * tab[1][j];
      }
    } else {
      const std::size_t n1 = n, n2 = n1 * n, n3 = n2 * n;
      for (int i1 = 0; i1 < n; ++i1) {
        const Complex f1 = tab[0][i1];
        for (int i2 = 0; i2 < n; ++i2) {
          const Complex f12 = f1 * tab[1][i2];
          for (int j1 = 0; j1 < n; ++j1) {
            const Complex f123 = f12 * tab[2][j1];
            Complex* row = d + i1 * n3 + i2 * n2 + j1 * n1;
            for (int j2 = 0; j2 < n; ++j2) row[j2] *= f123 * tab[3][j2];
          }
        }
      }
    }
  }

  void apply_potential() {
    Complex* d = b();
    const std::size_t total = grid.total();
    for (std::size_t p = 0; p < total; ++p) d[p] *= exp_v[p];
  }

  void kinetic_half() {
    fftw_execute(fwd);
    apply_kinetic(kin_half);
    fftw_execute(bwd);
  }
  void kinetic_full() {
    fftw_execute(fwd);
    apply_kinetic(kin_full);
    fftw_execute(bwd);
  }

  double buffer_norm2() const {
    const Complex* d = reinterpret_cast<const Complex*>(buf);
    double s = 0.0;
    const std::size_t total = grid.total();
    for (std::size_t p = 0; p < total; ++p) s += std::norm(d[p]);
    return s * grid.measure();
  }

  void renormalize_buffer() {
    const double inv = 1.0 / std::sqrt(buffer_norm2());
    Complex* d = b();
    const std::size_t total = grid.total();
    for (std::size_t p = 0; p < total; ++p) d[p] *= inv;
  }
};

Propagator::Propagator(const Grid& grid, const MetaHamiltonian& hamiltonian,
                       double dt, EvolutionMode mode)
    : impl_(std::make_unique<Impl>()) {
  hamiltonian.validate(grid.dims);
  if (!(dt > 0.0)) throw std::domain_error("Propagator: dt must be positive");
  impl_->grid = grid;
  impl_->ham = hamiltonian;
  impl_->dt = dt;
  impl_->mode = mode;

  const int n = grid.points;
  const int dims = grid.dims;
  const std::size_t total = grid.total();

  // Pairwise potential tabulated over the minimal-image separation index;
  // depending only on coordinate differences keeps the table invariant under
  // simultaneous grid translations.
  impl_->sep_u.assign(n, 0.0);
  if (hamiltonian.cross_potential)
    for (int m = 0; m < n; ++m)
      impl_->sep_u[m] = hamiltonian.cross_potential(
          std::abs(grid.min_image(m * grid.spacing())));
  if (hamiltonian.table_smoothing > 0.0 && hamiltonian.cross_potential) {
    // band-limit the table: Gaussian filter exp(-k^2 s^2 / 2) in the
    // separation wavenumber, computed with a deterministic 1D FFT pair
    fftw_complex* t = fftw_alloc_complex(n);
    for (int m = 0; m < n; ++m) {
      t[m][0] = impl_->sep_u[m];
      t[m][1] = 0.0;
    }
    fftw_plan f1 = fftw_plan_dft_1d(n, t, t, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan b1 = fftw_plan_dft_1d(n, t, t, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(f1);
    const double s = hamiltonian.table_smoothing;
    for (int q = 0; q < n; ++q) {
      const double k = fft_wavenumber(q, n, grid.extent);
      const double g = std::exp(-0.5 * k * k * s * s) / n;
      t[q][0] *= g;
      t[q][1] *= g;
    }
    fftw_execute(b1);
    for (int m = 0; m < n; ++m) impl_->sep_u[m] = t[m][0];
    fftw_destroy_plan(f1);
    fftw_destroy_plan(b1);
    fftw_free(t);
  }

  // exp(c V) table, c = -i dt (real time) or -dt (imaginary time)
  const Complex c = (mode == EvolutionMode::RealTime) ? Complex{0.0, -dt}
                                                      : Complex{-dt, 0.0};
  impl_->exp_v.resize(total);
  max_abs_v_ = 0.0;
  for (std::size_t p = 0; p < total; ++p) {
    const double v = impl_->potential_at(p);
    max_abs_v_ = std::max(max_abs_v_, std::abs(v));
    impl_->exp_v[p] = std::exp(c * v);
  }

  // per-axis kinetic factors exp(c k^2 / (2 m)); backward-FFT normalization
  // 1/N^dims folded in as N^-1 per axis
  const double inv_n = 1.0 / n;
  impl_->kin_half.resize(dims);
  impl_->kin_full.resize(dims);
  for (int a = 0; a < dims; ++a) {
    impl_->kin_half[a].resize(n);
    impl_->kin_full[a].resize(n);
    for (int i = 0; i < n; ++i) {
      const double k = fft_wavenumber(i, n, grid.extent);
      const Complex ek = c * (k * k / (2.0 * hamiltonian.masses[a]));
      impl_->kin_half[a][i] = std::exp(0.5 * ek) * inv_n;
      impl_->kin_full[a][i] = std::exp(ek) * inv_n;
    }
  }

  impl_->buf = fftw_alloc_complex(total);
  if (!impl_->buf) throw std::bad_alloc();
  std::vector<int> shape(dims, n);
  // FFTW_ESTIMATE keeps planning deterministic, which keeps reruns
  // byte-identical.
  impl_->fwd = fftw_plan_dft(dims, shape.data(), impl_->buf, impl_->buf,
                             FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft(dims, shape.data(), impl_->buf, impl_->buf,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->bwd)
    throw std::runtime_error("Propagator: FFTW planning failed");
}

Propagator::~Propagator() = default;

double Propagator::stability_dt_bound() const {
  const Grid& g = impl_->grid;
  const double k_max = std::numbers::pi / g.spacing();
  double bound = std::numeric_limits<double>::infinity();
  if (max_abs_v_ > 0.0) bound = std::min(bound, 0.1 / max_abs_v_);
  for (double m : impl_->ham.masses)
    bound = std::min(bound, 0.5 * 2.0 * m / (k_max * k_max));
  return bound;
}

double Propagator::potential_value(std::size_t flat_index) const {
  return impl_->potential_at(flat_index);
}

void Propagator::advance(MetaWavefunction& state, std::int64_t n_steps,
                         std::int64_t renormalize_every) {
  if (n_steps <= 0) return;
  Impl& im = *impl_;
  const std::size_t total = im.grid.total();
  if (state.amplitudes.size() != total)
    throw std::domain_error("advance: state does not match propagator grid");
  std::copy_n(state.amplitudes.data(), total, im.b());

  const bool imag = im.mode == EvolutionMode::ImaginaryTime;
  std::int64_t since_renorm = 0;
  // fused Strang chain: Kh V (Kf V)^{n-1} Kh, broken where renormalization
  // checkpoints require a completed step
  std::int64_t done = 0;
  while (done < n_steps) {
    std::int64_t chunk = n_steps - done;
    if (imag && renormalize_every > 0)
      chunk = std::min(chunk, renormalize_every - since_renorm);
    im.kinetic_half();
    im.apply_potential();
    for (std::int64_t s = 1; s < chunk; ++s) {
      im.kinetic_full();
      im.apply_potential();
    }
    im.kinetic_half();
    done += chunk;
    since_renorm += chunk;
    if (imag && renormalize_every > 0 && since_renorm >= renormalize_every) {
      im.renormalize_buffer();
      since_renorm = 0;
    }
  }
  if (imag) im.renormalize_buffer();
  std::copy_n(im.b(), total, state.amplitudes.data());
}

Observables Propagator::measure(const MetaWavefunction& state) {
  Impl& im = *impl_;
  const Grid& g = im.grid;
  const int n = g.points;
  const int dims = g.dims;
  const std::size_t total = g.total();
  if (state.amplitudes.size() != total)
    throw std::domain_error("measure: state does not match propagator grid");

  Observables obs;
  obs.mean_x.assign(dims, 0.0);
  obs.mean_p.assign(dims, 0.0);
  obs.var_x.assign(dims, 0.0);

  // position-space marginals and potential energy
  std::vector<std::vector<double>> marg(dims, std::vector<double>(n, 0.0));
  double norm2 = 0.0, vsum = 0.0;
  for (std::size_t p = 0; p < total; ++p) {
    const double w = std::norm(state.amplitudes[p]);
    norm2 += w;
    vsum += w * im.potential_at(p);
    std::size_t rem = p;
    for (int a = dims - 1; a >= 0; --a) {
      marg[a][rem % n] += w;
      rem /= n;
    }
  }
  const double meas = g.measure();
  obs.norm = std::sqrt(norm2 * meas);
  obs.potential = vsum * meas / (norm2 * meas);
  for (int a = 0; a < dims; ++a) {
    double mx = 0.0;
    for (int i = 0; i < n; ++i) mx += g.coord(i) * marg[a][i];
    mx /= norm2;
    double vx = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = g.coord(i) - mx;
      vx += d * d * marg[a][i];
    }
    obs.mean_x[a] = mx;
    obs.var_x[a] = vx / norm2;
  }

  // momentum-space expectations
  std::copy_n(state.amplitudes.data(), total, im.b());
  fftw_execute(im.fwd);
  const Complex* bh = reinterpret_cast<const Complex*>(im.buf);
  std::vector<std::vector<double>> kmarg(dims, std::vector<double>(n, 0.0));
  double knorm2 = 0.0, tsum = 0.0;
  std::vector<double> k2(n);
  for (int i = 0; i < n; ++i) {
    const double k = fft_wavenumber(i, n, g.extent);
    k2[i] = k * k;
  }
  for (std::size_t p = 0; p < total; ++p) {
    const double w = std::norm(bh[p]);
    knorm2 += w;
    std::size_t rem = p;
    for (int a = dims - 1; a >= 0; --a) {
      const int i = static_cast<int>(rem % n);
      kmarg[a][i] += w;
      tsum += w * k2[i] / (2.0 * im.ham.masses[a]);
      rem /= n;
    }
  }
  obs.kinetic = tsum / knorm2;
  for (int a = 0; a < dims; ++a) {
    double mp = 0.0;
    for (int i = 0; i < n; ++i)
      mp += fft_wavenumber(i, n, g.extent) * kmarg[a][i];
    obs.mean_p[a] = mp / knorm2;
    obs.total_momentum += obs.mean_p[a];
  }
  obs.energy = obs.kinetic + obs.potential;
  return obs;
}

EvolutionResult split_step_evolve(const MetaWavefunction& initial,
                                  const MetaHamiltonian& hamiltonian,
                                  const EvolutionParams& params) {
  if (!(params.dt > 0.0) || params.steps < 1)
    throw std::domain_error("split_step_evolve: dt > 0 and steps >= 1 required");
  Propagator prop(initial.grid, hamiltonian, params.dt, params.mode);
  if (params.mode == EvolutionMode::RealTime &&
      params.enforce_stability_bound && params.dt > prop.stability_dt_bound()) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "split_step_evolve: dt=%g exceeds stability bound %g "
                  "(dt*max|V|<=0.1, dt*k_max^2/2m<=0.5)",
                  params.dt, prop.stability_dt_bound());
    throw std::domain_error(msg);
  }

  EvolutionResult res;
  res.state = initial;
  const std::int64_t sample =
      params.sample_every > 0 ? params.sample_every : params.steps;
  res.series.push_back({0.0, 0, prop.measure(res.state)});
  std::int64_t done = 0;
  while (done < params.steps) {
    const std::int64_t chunk = std::min(sample, params.steps - done);
    prop.advance(res.state, chunk,
                 params.mode == EvolutionMode::ImaginaryTime
                     ? params.renormalize_every
                     : 0);
    done += chunk;
    Observables obs = prop.measure(res.state);
    if (params.mode == EvolutionMode::RealTime &&
        std::abs(obs.norm - 1.0) > 1e-4) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "split_step_evolve: instability detected at step %lld, "
                    "norm drift %.3e",
                    static_cast<long long>(done), obs.norm - 1.0);
      throw std::runtime_error(msg);
    }
    res.series.push_back({done * params.dt, done, obs});
  }
  return res;
}

GroundStateResult ground_state_imaginary_time(const MetaHamiltonian& hamiltonian,
                                              const MetaWavefunction& seed,
                                              const GroundStateParams& params) {
  Propagator prop(seed.grid, hamiltonian, params.dt, EvolutionMode::ImaginaryTime);
  GroundStateResult res;
  res.state = seed;
  res.state.normalize();
  double prev_e = prop.measure(res.state).energy;
  const std::int64_t chunk = std::max<std::int64_t>(1, params.renormalize_every);
  res.steps = 0;
  res.last_residual = std::numeric_limits<double>::infinity();
  while (res.steps < params.max_steps) {
    prop.advance(res.state, chunk, params.renormalize_every);
    res.steps += chunk;
    const double e = prop.measure(res.state).energy;
    const double denom = std::max(std::abs(e), 1e-300);
    res.last_residual = std::abs(e - prev_e) / denom / chunk;
    prev_e = e;
    if (res.last_residual < params.energy_tolerance) {
      res.energy = e;
      return res;
    }
  }
  char msg[160];
  std::snprintf(msg, sizeof msg,
                "ground_state_imaginary_time: not converged after %lld steps, "
                "residual %.3e",
                static_cast<long long>(res.steps), res.last_residual);
  throw std::runtime_error(msg);
}

Observables observables(const MetaWavefunction& state,
                        const MetaHamiltonian& hamiltonian) {
  Propagator prop(state.grid, hamiltonian, 1e-6, EvolutionMode::RealTime);
  return prop.measure(state);
}

// ---------------------------------------------------------------------------

namespace {
constexpr char kCheckpointMagic[4] = {'M', 'G', 'W', '1'};
}

void save_checkpoint(const MetaWavefunction& state, std::int64_t step_index,
                     double dt, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
  f.write(kCheckpointMagic, 4);
  const std::int32_t dims = state.grid.dims, pts = state.grid.points;
  const std::int32_t nm = static_cast<std::int32_t>(state.masses.size());
  f.write(reinterpret_cast<const char*>(&dims), 4);
  f.write(reinterpret_cast<const char*>(&pts), 4);
  f.write(reinterpret_cast<const char*>(&state.grid.extent), 8);
  f.write(reinterpret_cast<const char*>(&step_index), 8);
  f.write(reinterpret_cast<const char*>(&dt), 8);
  f.write(reinterpret_cast<const char*>(&nm), 4);
  f.write(reinterpret_cast<const char*>(state.masses.data()), 8 * nm);
  f.write(reinterpret_cast<const char*>(state.amplitudes.data()),
          static_cast<std::streamsize>(state.amplitudes.size() * sizeof(Complex)));
  if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw std::runtime_error("load_checkpoint: bad magic in " + path);
  std::int32_t dims = 0, pts = 0, nm = 0;
  double extent = 0.0;
  Checkpoint cp;
  f.read(reinterpret_cast<char*>(&dims), 4);
  f.read(reinterpret_cast<char*>(&pts), 4);
  f.read(reinterpret_cast<char*>(&extent), 8);
  f.read(reinterpret_cast<char*>(&cp.step_index), 8);
  f.read(reinterpret_cast<char*>(&cp.dt), 8);
  f.read(reinterpret_cast<char*>(&nm), 4);
  cp.state.grid = Grid(dims, pts, extent);
  cp.state.masses.resize(nm);
  f.read(reinterpret_cast<char*>(cp.state.masses.data()), 8 * nm);
  cp.state.amplitudes.resize(cp.state.grid.total());
  f.read(reinterpret_cast<char*>(cp.state.amplitudes.data()),
         static_cast<std::streamsize>(cp.state.amplitudes.size() * sizeof(Complex)));
  if (!f) throw std::runtime_error("load_checkpoint: truncated file " + path);
  return cp;
}

}  // namespace metagrav

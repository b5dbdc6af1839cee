#include "metagrav/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "metagrav/radial_solver.hpp"
#include "metagrav/reduced_state.hpp"

namespace metagrav {

namespace {

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(std::int64_t v) { return std::to_string(v); }

struct LinearFit {
  double slope;
  double intercept;
  double rms;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / d;
  f.intercept = (sy - f.slope * sx) / n;
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    sse += e * e;
  }
  f.rms = std::sqrt(sse / n);
  return f;
}

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Relative-motion harmonic ground-state width: psi ~ exp(-r^2 / (2 w^2)),
// w = (hbar^2 / (k mu))^(1/4).
double harmonic_ground_width(double spring_k, double reduced_mass) {
  return std::pow(1.0 / (spring_k * reduced_mass), 0.25);
}

// Natural -> CGS projection block: the laboratory-scale reference numbers every
// report carries alongside its natural-unit results.
void append_cgs_projection(ExperimentReport& rep) {
  const PhysicalConstants pc;
  const double rho = ordinary_density_g_cm3(pc);
  const auto b12 = BodySpec::from_density(1e12 * pc.m_p, rho);
  const auto b21 = BodySpec::from_density(1e21 * pc.m_p, rho);
  rep.fits.push_back({"cgs_lambda_1e12mp_cm",
                      {localization_length(b12, 1.0, pc), 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"cgs_freq_1e21mp_hz",
                      {coherence_frequency(b21, pc), 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"cgs_tau_ordinary_s",
                      {spreading_time(b12, 1.0, pc), 0.0, 0.0, 0.0, false}});
}

MetaHamiltonian cross_hamiltonian(int dims, double mass, double g_const,
                                  double radius) {
  std::function<double(double)> u;
  if (g_const > 0.0) {
    SpherePairPotential pot(mass, radius, g_const);
    u = [pot](double d) { return pot.mutual_energy(d); };
  } else {
    u = [](double) { return 0.0; };
  }
  return MetaHamiltonian::cross_pairs(dims, std::vector<double>(dims, mass),
                                      std::move(u));
}

Region packet_region(const Grid& g, double center, double half_width) {
  const double dx = g.spacing();
  int lo = static_cast<int>(std::floor((center - half_width + 0.5 * g.extent) / dx));
  int hi = static_cast<int>(std::ceil((center + half_width + 0.5 * g.extent) / dx));
  lo = std::clamp(lo, 0, g.points);
  hi = std::clamp(hi, 0, g.points);
  return {lo, hi};
}

}  // namespace

bool ExperimentReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void ExperimentReport::check(const std::string& name, double value, double lo,
                             double hi) {
  checks.push_back({name, value, lo, hi, value >= lo && value <= hi});
}

const FittedQuantity* ExperimentReport::fit(const std::string& name) const {
  for (const auto& [k, v] : fits)
    if (k == name) return &v;
  return nullptr;
}

const ToleranceCheck* ExperimentReport::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

CosineFit fit_cosine(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 8)
    throw std::domain_error("fit_cosine: need matching series of >= 8 samples");
  const std::size_t n = t.size();
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw std::domain_error("fit_cosine: degenerate time axis");

  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*ymax - *ymin < 1e-9 * std::max(1.0, std::abs(*ymax))) {
    double mean = 0.0;
    for (double v : y) mean += v;
    return {0.0, mean / n, 0.0, true};
  }

  const double rate = (n - 1) / span;
  const double w_min = 4.0 * std::numbers::pi / span;          // >= 2 periods
  const double w_max = 2.0 * std::numbers::pi * rate / 16.0;   // >= 16 per period
  if (!(w_min < w_max))
    throw std::domain_error(
        "fit_cosine: undersampled series (need >= 2 periods at >= 16 "
        "points/period)");

  auto sse_at = [&](double w, double* amp) {
    double scc = 0.0, syc = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::abs(std::cos(w * t[i]));
      scc += c * c;
      syc += y[i] * c;
      syy += y[i] * y[i];
    }
    const double a = scc > 0.0 ? syc / scc : 0.0;
    if (amp) *amp = a;
    // cancellation can push the algebraic SSE a hair below zero on an
    // exact fit; clamp so the RMS residual stays well defined
    return std::max(0.0, syy - 2.0 * a * syc + a * a * scc);
  };

  const int scan = 4096;
  double best_w = w_min, best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= scan; ++i) {
    const double w = w_min + (w_max - w_min) * i / scan;
    const double s = sse_at(w, nullptr);
    if (s < best_sse) {
      best_sse = s;
      best_w = w;
    }
  }
  double lo = std::max(w_min, best_w - (w_max - w_min) / scan);
  double hi = std::min(w_max, best_w + (w_max - w_min) / scan);
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (sse_at(m1, nullptr) < sse_at(m2, nullptr))
      hi = m2;
    else
      lo = m1;
    if (hi - lo < 1e-12 * best_w) break;
  }
  CosineFit fit;
  fit.frequency = 0.5 * (lo + hi);
  fit.residual = std::sqrt(sse_at(fit.frequency, &fit.amplitude) / n);
  return fit;
}

double relative_coordinate_variance(const MetaWavefunction& state) {
  const Grid& g = state.grid;
  if (g.dims != 2)
    throw std::domain_error("relative_coordinate_variance: 2-coordinate states only");
  const int n = g.points;
  double norm = 0.0, mean = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = std::norm(state.amplitudes[static_cast<std::size_t>(i) * n + j]);
      const double r = g.min_image(g.coord(i) - g.coord(j));
      norm += w;
      mean += w * r;
      m2 += w * r * r;
    }
  mean /= norm;
  return m2 / norm - mean * mean;
}

std::vector<double> position_marginal(const MetaWavefunction& state, int coord) {
  const Grid& g = state.grid;
  if (coord < 0 || coord >= g.dims)
    throw std::domain_error("position_marginal: coordinate out of range");
  const int n = g.points;
  std::vector<double> marg(n, 0.0);
  std::size_t stride = 1;
  for (int a = g.dims - 1; a > coord; --a) stride *= n;
  const std::size_t total = g.total();
  for (std::size_t p = 0; p < total; ++p)
    marg[(p / stride) % n] += std::norm(state.amplitudes[p]);
  double s = 0.0;
  for (double v : marg) s += v;
  for (double& v : marg) v /= s;
  return marg;
}

// ---------------------------------------------------------------------------

ExperimentReport run_localization(const LocalizationConfig& cfg) {
  WallClock clock;
  ExperimentReport rep;
  rep.scenario = "localization";
  rep.config_echo = {{"points", num(static_cast<std::int64_t>(cfg.points))},
                     {"extent", num(cfg.extent)},
                     {"mass", num(cfg.mass)},
                     {"radius", num(cfg.radius)},
                     {"g_const", num(cfg.g_const)},
                     {"alpha", num(cfg.alpha)},
                     {"potential", cfg.potential},
                     {"seed_rel_width", num(cfg.seed_rel_width)},
                     {"dt", num(cfg.dt)},
                     {"max_steps", num(cfg.max_steps)},
                     {"tolerance", num(cfg.tolerance)}};

  const double m = cfg.mass, R = cfg.radius, G = cfg.g_const;
  const double lambda_analytic =
      std::pow(R * R * R / (cfg.alpha * G * m * m * m), 0.25);
  if (!(lambda_analytic <= 0.3 * R)) {
    throw std::domain_error(
        "run_localization: plasma-regime violation, requires "
        "Lambda_analytic <= 0.3 R (Lambda=" +
        num(lambda_analytic) + ", R=" + num(R) + ")");
  }

  const Grid grid(2, cfg.points, cfg.extent);
  SpherePairPotential pot(m, R, G);
  const double k = cfg.alpha * G * m * m / (R * R * R);
  std::function<double(double)> u;
  if (cfg.potential == "harmonic")
    u = [k](double d) { return 0.5 * k * d * d; };
  else if (cfg.potential == "sphere")
    u = [pot](double d) { return pot.mutual_energy(d); };
  else
    throw std::domain_error("run_localization: potential must be sphere|harmonic");
  const MetaHamiltonian ham =
      MetaHamiltonian::cross_pairs(2, {m, m}, std::move(u));

  // relative-Gaussian seed, uniform in the center of metamass
  MetaWavefunction seed = MetaWavefunction::zero(grid);
  seed.masses = {m, m};
  const int n = grid.points;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = grid.min_image(grid.coord(i) - grid.coord(j));
      seed.amplitudes[static_cast<std::size_t>(i) * n + j] =
          std::exp(-r * r / (2.0 * cfg.seed_rel_width * cfg.seed_rel_width));
    }
  seed.normalize();

  GroundStateParams gp;
  gp.dt = cfg.dt;
  gp.max_steps = cfg.max_steps;
  gp.renormalize_every = cfg.renormalize_every;
  gp.energy_tolerance = cfg.tolerance;
  GroundStateResult gs = ground_state_imaginary_time(ham, seed, gp);
  rep.total_steps = gs.steps;

  const double mu = 0.5 * m;
  const double width = std::sqrt(2.0 * relative_coordinate_variance(gs.state));
  const double lambda_ho = harmonic_ground_width(k, mu);
  const double e_harmonic = 0.5 * std::sqrt(k / mu);
  const double e_offset =
      (cfg.potential == "sphere") ? pot.mutual_energy(0.0) : 0.0;

  rep.fits.push_back({"relative_width", {width, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"lambda_harmonic_oracle", {lambda_ho, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"lambda_analytic", {lambda_analytic, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back(
      {"width_over_lambda_oracle", {width / lambda_ho, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"width_over_lambda_analytic",
                      {width / lambda_analytic, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"ground_energy", {gs.energy, gs.last_residual, 0.0, 0.0, false}});
  rep.fits.push_back({"harmonic_energy_oracle",
                      {e_offset + e_harmonic, 0.0, 0.0, 0.0, false}});

  if (cfg.potential == "harmonic")
    rep.check("width_over_lambda_oracle", width / lambda_ho, 0.95, 1.05);
  else
    rep.check("width_over_lambda_oracle", width / lambda_ho, 0.90, 1.10);

  // Factorized-state check: a Gaussian center-of-metamass times the relative
  // ground state stays a Gaussian in (X+Y)/2 under brief real-time evolution.
  {
    const double sigma_cm = cfg.extent / 16.0;
    MetaWavefunction fact = MetaWavefunction::zero(grid);
    fact.masses = {m, m};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double r = grid.min_image(grid.coord(i) - grid.coord(j));
        // torus-consistent center of metamass: midpoint along the shortest
        // arc between the two coordinates, wrapped back into the box
        const double c = grid.min_image(grid.coord(j) + 0.5 * r);
        fact.amplitudes[static_cast<std::size_t>(i) * n + j] =
            std::exp(-c * c / (2.0 * sigma_cm * sigma_cm) -
                     r * r / (2.0 * width * width));
      }
    fact.normalize();

    double dtr;
    {
      Propagator probe(grid, ham, 1e-9, EvolutionMode::RealTime);
      dtr = 0.9 * probe.stability_dt_bound();
    }
    Propagator rt(grid, ham, dtr, EvolutionMode::RealTime);
    const std::int64_t steps = 200;
    rt.advance(fact, steps);

    // center-of-metamass marginal over (i + j) bins
    std::vector<double> cm(2 * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cm[i + j] += std::norm(fact.amplitudes[static_cast<std::size_t>(i) * n + j]);
    double tot = 0.0, mean = 0.0;
    const double half_dx = 0.5 * grid.spacing();
    auto cm_coord = [&](int b) { return -0.5 * cfg.extent + b * half_dx; };
    for (int b = 0; b < 2 * n; ++b) {
      tot += cm[b];
      mean += cm[b] * cm_coord(b);
    }
    mean /= tot;
    double var = 0.0;
    for (int b = 0; b < 2 * n; ++b) {
      const double d = cm_coord(b) - mean;
      var += cm[b] * d * d;
    }
    var /= tot;
    double l1 = 0.0;
    double gauss_norm = 0.0;
    std::vector<double> gauss(2 * n);
    for (int b = 0; b < 2 * n; ++b) {
      const double d = cm_coord(b) - mean;
      gauss[b] = std::exp(-0.5 * d * d / var);
      gauss_norm += gauss[b];
    }
    for (int b = 0; b < 2 * n; ++b)
      l1 += std::abs(cm[b] / tot - gauss[b] / gauss_norm);
    rep.fits.push_back({"cm_gaussian_l1_residual",
                        {l1, 0.0, 0.0, steps * dtr, false}});
    rep.check("cm_gaussian_l1_residual", l1, 0.0, 0.05);
    const double w2 = std::sqrt(2.0 * relative_coordinate_variance(fact));
    rep.check("relative_width_stationary", w2 / width, 0.9, 1.1);
  }

  append_cgs_projection(rep);
  rep.wall_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct BranchSetup {
  Grid grid;
  MetaHamiltonian ham;
  MetaWavefunction initial;
  double delta_e;        // measured branch energy gap on the grid
  double sigma;          // packet width
  Region region_a, region_b;
};

BranchSetup make_two_packet_setup(int points, double extent, double mass,
                                  double radius, double g_const, double sep,
                                  double packet_width) {
  BranchSetup s{Grid(2, points, extent), {}, {}, 0.0, 0.0, {}, {}};
  const double mu = 0.5 * mass;
  double sigma = packet_width;
  if (sigma <= 0.0) {
    if (g_const > 0.0) {
      SpherePairPotential pot(mass, radius, g_const);
      sigma = harmonic_ground_width(pot.spring_constant(), mu) / std::sqrt(2.0);
    } else {
      sigma = 0.05 * extent;
    }
  }
  s.sigma = sigma;
  if (g_const > 0.0 && !(sep >= 2.0 * radius + 6.0 * sigma))
    throw std::domain_error(
        "branch separation must satisfy Z >= 2R + 6 sigma (Z=" + num(sep) +
        ", R=" + num(radius) + ", sigma=" + num(sigma) + ")");

  s.ham = cross_hamiltonian(2, mass, g_const, radius);

  const double ca = -0.5 * sep, cb = 0.5 * sep;
  auto ga = gaussian_packet(points, extent, ca, sigma, 0.0);
  auto gb = gaussian_packet(points, extent, cb, sigma, 0.0);

  // measured branch gap: <H> difference between separated and
  // interpenetrating products
  MetaWavefunction baa = product_state(s.grid, {ga, ga});
  MetaWavefunction bab = product_state(s.grid, {ga, gb});
  baa.masses = bab.masses = {mass, mass};
  const double e_aa = observables(baa, s.ham).energy;
  const double e_ab = observables(bab, s.ham).energy;
  s.delta_e = e_ab - e_aa;

  // equal four-product superposition = product of 1D superpositions
  std::vector<Complex> f(points);
  for (int i = 0; i < points; ++i) f[i] = ga[i] + gb[i];
  s.initial = product_state(s.grid, {f, f});
  s.initial.masses = {mass, mass};

  s.region_a = packet_region(s.grid, ca, 0.25 * sep);
  s.region_b = packet_region(s.grid, cb, 0.25 * sep);
  return s;
}

// visibility(t) sampled on a uniform step schedule
void sample_visibility(BranchSetup& s, double dt, std::int64_t steps_per_sample,
                       std::int64_t n_samples, std::vector<double>& ts,
                       std::vector<double>& vis) {
  Propagator prop(s.grid, s.ham, dt, EvolutionMode::RealTime);
  MetaWavefunction state = s.initial;
  ts.clear();
  vis.clear();
  for (std::int64_t i = 0; i <= n_samples; ++i) {
    if (i > 0) prop.advance(state, steps_per_sample);
    const auto rho = partial_trace_red(state);
    ts.push_back(i * steps_per_sample * dt);
    vis.push_back(coherence_visibility(rho, s.region_a, s.region_b));
  }
}

}  // namespace

ExperimentReport run_decoherence_oscillation(const DecoherenceConfig& cfg) {
  WallClock clock;
  ExperimentReport rep;
  rep.scenario = "decohere";
  rep.config_echo = {{"points", num(static_cast<std::int64_t>(cfg.points))},
                     {"extent", num(cfg.extent)},
                     {"mass", num(cfg.mass)},
                     {"radius", num(cfg.radius)},
                     {"g_const", num(cfg.g_const)},
                     {"branch_separation", num(cfg.branch_separation)},
                     {"packet_width", num(cfg.packet_width)},
                     {"dt", num(cfg.dt)},
                     {"periods", num(cfg.periods)},
                     {"samples_per_period", num(cfg.samples_per_period)}};

  BranchSetup s = make_two_packet_setup(cfg.points, cfg.extent, cfg.mass,
                                        cfg.radius, cfg.g_const,
                                        cfg.branch_separation, cfg.packet_width);

  const double dt = cfg.dt;
  {
    Propagator probe(s.grid, s.ham, 1e-12, EvolutionMode::RealTime);
    const double bound = probe.stability_dt_bound();
    if (dt > bound)
      throw std::domain_error("run_decoherence_oscillation: dt=" + num(dt) +
                              " exceeds the stability bound " + num(bound));
  }

  std::vector<double> ts, vis;
  if (cfg.g_const > 0.0) {
    const double period = 2.0 * std::numbers::pi / std::abs(s.delta_e);
    const std::int64_t steps_per_sample = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(period / (cfg.samples_per_period * dt)));
    const std::int64_t n_samples = static_cast<std::int64_t>(
        cfg.periods * period / (steps_per_sample * dt)) + 1;
    sample_visibility(s, dt, steps_per_sample, n_samples, ts, vis);
    rep.total_steps = steps_per_sample * n_samples;

    CosineFit fit = fit_cosine(ts, vis);
    rep.fits.push_back({"visibility_frequency",
                        {fit.frequency, fit.residual, ts.front(), ts.back(),
                         fit.degenerate}});
    rep.fits.push_back({"measured_branch_gap", {s.delta_e, 0.0, 0.0, 0.0, false}});
    const double analytic_gap =
        cfg.g_const * cfg.mass * cfg.mass / cfg.radius;  // point-form |E_bind|
    rep.fits.push_back({"analytic_ebind_frequency",
                        {analytic_gap, 0.0, 0.0, 0.0, false}});
    rep.check("frequency_over_measured_gap", fit.frequency / s.delta_e, 0.95,
              1.05);
    rep.check("fit_residual", fit.residual, 0.0, 0.05);

    // first cosine zero: visibility ~ 0 at t = pi / (2 dE)
    const double t0 = 0.5 * std::numbers::pi / s.delta_e;
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < ts.size(); ++i)
      if (std::abs(ts[i] - t0) < std::abs(ts[nearest] - t0)) nearest = i;
    rep.check("visibility_at_first_zero", vis[nearest], -0.05, 0.05);
  } else {
    // zero-coupling control: free evolution keeps the superposition pure
    const std::int64_t steps_per_sample = 20;
    const std::int64_t n_samples = 40;
    sample_visibility(s, dt, steps_per_sample, n_samples, ts, vis);
    rep.total_steps = steps_per_sample * n_samples;
    const double vmin = *std::min_element(vis.begin(), vis.end());
    rep.check("control_visibility_min", vmin, 1.0 - 1e-6, 1.0 + 1e-6);
  }

  TimeSeries series;
  for (std::size_t i = 0; i < ts.size(); ++i) series.emplace_back(ts[i], vis[i]);
  rep.series.push_back({"visibility", std::move(series)});
  append_cgs_projection(rep);
  rep.wall_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_spreading_decoherence(const SpreadingConfig& cfg) {
  WallClock clock;
  ExperimentReport rep;
  rep.scenario = "spread";
  rep.config_echo = {{"points", num(static_cast<std::int64_t>(cfg.points))},
                     {"extent", num(cfg.extent)},
                     {"radius", num(cfg.radius)},
                     {"g_base", num(cfg.g_base)},
                     {"branch_separation", num(cfg.branch_separation)},
                     {"run_time_factor", num(cfg.run_time_factor)},
                     {"samples", num(cfg.samples)}};
  for (std::size_t i = 0; i < cfg.masses.size(); ++i)
    rep.config_echo.emplace_back("mass" + std::to_string(i), num(cfg.masses[i]));
  if (cfg.masses.size() < 3)
    throw std::domain_error("run_spreading_decoherence: need >= 3 masses");

  std::vector<double> log_mlam2, log_tau;
  for (double m : cfg.masses) {
    // G ~ 1/m^3 keeps k*mu and hence Lambda fixed across masses
    const double g_m = cfg.g_base / (m * m * m);
    BranchSetup s =
        make_two_packet_setup(cfg.points, cfg.extent, m, cfg.radius, g_m,
                              cfg.branch_separation, 0.0);
    double dt;
    {
      Propagator probe(s.grid, s.ham, 1e-12, EvolutionMode::RealTime);
      dt = 0.9 * probe.stability_dt_bound();
    }
    const double t_final = cfg.run_time_factor * m * s.sigma * s.sigma;
    const std::int64_t steps_per_sample = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(t_final / (cfg.samples * dt)));
    const std::int64_t n_samples =
        static_cast<std::int64_t>(t_final / (steps_per_sample * dt));

    std::vector<double> ts, vis;
    sample_visibility(s, dt, steps_per_sample, n_samples, ts, vis);
    rep.total_steps += steps_per_sample * n_samples;

    // envelope: per-oscillation-period maxima, then first 1/e crossing
    const double period = 2.0 * std::numbers::pi / std::abs(s.delta_e);
    std::vector<double> env_t, env_v;
    double cur_max = 0.0, cur_t = 0.0;
    double window_end = period;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] > window_end) {
        if (cur_max > 0.0) {
          env_t.push_back(cur_t);
          env_v.push_back(cur_max);
        }
        cur_max = 0.0;
        window_end += period;
      }
      if (vis[i] > cur_max) {
        cur_max = vis[i];
        cur_t = ts[i];
      }
    }
    if (cur_max > 0.0) {
      env_t.push_back(cur_t);
      env_v.push_back(cur_max);
    }

    const double v0 = env_v.front();
    const double target = v0 / std::numbers::e;
    double tau = -1.0;
    double model_residual = 0.0;
    for (std::size_t i = 1; i < env_v.size(); ++i) {
      if (env_v[i] <= target && env_v[i - 1] > target) {
        const double f =
            (env_v[i - 1] - target) / (env_v[i - 1] - env_v[i]);
        tau = env_t[i - 1] + f * (env_t[i] - env_t[i - 1]);
        break;
      }
    }
    if (tau < 0.0 && env_t.size() >= 4) {
      // The envelope follows the differential-spreading overlap law
      // v(t) = v0 (1 + (t/a)^2)^(-1/4), whose 1/e point sits far beyond any
      // affordable grid window. Fit the single scale a on the clean window
      // and read the declared 1/e crossing off the fitted model.
      auto rms = [&](double a) {
        double acc = 0.0;
        for (std::size_t i = 0; i < env_t.size(); ++i) {
          const double u = env_t[i] / a;
          const double model = v0 * std::pow(1.0 + u * u, -0.25);
          acc += (env_v[i] - model) * (env_v[i] - model);
        }
        return std::sqrt(acc / env_t.size());
      };
      double best_a = env_t.back(), best = rms(best_a);
      const double a_lo = 1e-2 * env_t.back(), a_hi = 1e2 * env_t.back();
      for (int i = 0; i <= 400; ++i) {
        const double a =
            a_lo * std::pow(a_hi / a_lo, static_cast<double>(i) / 400.0);
        const double r = rms(a);
        if (r < best) {
          best = r;
          best_a = a;
        }
      }
      double lo = best_a / 1.05, hi = best_a * 1.05;
      for (int i = 0; i < 100; ++i) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (rms(m1) < rms(m2)) hi = m2; else lo = m1;
      }
      best_a = 0.5 * (lo + hi);
      model_residual = rms(best_a);
      const double e4 = std::exp(4.0);  // model v/v0 = 1/e at t/a
      tau = best_a * std::sqrt(e4 - 1.0);
    }
    const std::string tag = "m" + num(m);
    TimeSeries series;
    for (std::size_t i = 0; i < ts.size(); ++i)
      series.emplace_back(ts[i], vis[i]);
    rep.series.push_back({"visibility_" + tag, std::move(series)});
    rep.fits.push_back(
        {"tau_" + tag, {tau, model_residual, ts.front(), ts.back(), tau < 0.0}});
    rep.check("tau_found_" + tag, tau > 0.0 ? 1.0 : 0.0, 1.0, 1.0);
    rep.check("envelope_model_residual_" + tag, model_residual, 0.0, 0.1);
    if (tau > 0.0) {
      const double lam2 = 2.0 * s.sigma * s.sigma;  // relative width squared
      log_mlam2.push_back(std::log(m * lam2));
      log_tau.push_back(std::log(tau));
    }
  }

  if (log_tau.size() >= 3) {
    const LinearFit lf = linear_fit(log_mlam2, log_tau);
    rep.fits.push_back({"tau_scaling_exponent",
                        {lf.slope, lf.rms, log_mlam2.front(), log_mlam2.back(),
                         false}});
    rep.check("tau_scaling_exponent", lf.slope, 0.9, 1.1);
  }

  // zero-coupling control at the first mass
  {
    BranchSetup s = make_two_packet_setup(cfg.points, cfg.extent, cfg.masses[0],
                                          cfg.radius, 0.0,
                                          cfg.branch_separation, 0.53);
    double dt;
    {
      Propagator probe(s.grid, s.ham, 1e-12, EvolutionMode::RealTime);
      dt = 0.9 * probe.stability_dt_bound();
    }
    std::vector<double> ts, vis;
    sample_visibility(s, dt, 50, 20, ts, vis);
    const double vmin = *std::min_element(vis.begin(), vis.end());
    rep.check("control_visibility_min", vmin, 1.0 - 1e-4, 1.0 + 1e-4);
  }

  append_cgs_projection(rep);
  rep.wall_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_ehrenfest(const EhrenfestConfig& cfg) {
  WallClock clock;
  ExperimentReport rep;
  rep.scenario = "ehrenfest";
  rep.config_echo = {{"points", num(static_cast<std::int64_t>(cfg.points))},
                     {"extent", num(cfg.extent)},
                     {"mass", num(cfg.mass)},
                     {"radius", num(cfg.radius)},
                     {"g_const", num(cfg.g_const)},
                     {"separation", num(cfg.separation)},
                     {"packet_width", num(cfg.packet_width)},
                     {"smoothing", num(cfg.smoothing)},
                     {"dt", num(cfg.dt)},
                     {"t_final", num(cfg.t_final)},
                     {"sample_every", num(cfg.sample_every)}};

  if (!(cfg.separation > 2.0 * cfg.radius))
    throw std::domain_error("run_ehrenfest: requires D > 2R");

  const Grid grid(4, cfg.points, cfg.extent);
  MetaHamiltonian ham = cross_hamiltonian(4, cfg.mass, cfg.g_const, cfg.radius);
  ham.table_smoothing = cfg.smoothing;
  SpherePairPotential pot(cfg.mass, cfg.radius, cfg.g_const);

  const double c1 = -0.5 * cfg.separation;
  auto g1 = gaussian_packet(cfg.points, cfg.extent, c1, cfg.packet_width, 0.0);
  // mirror instead of resampling: the four-product state is then exactly
  // invariant under the parity-plus-relabel symmetry that pins <P_total> to 0
  std::vector<Complex> g2(g1.size());
  for (std::size_t i = 0; i < g1.size(); ++i)
    g2[i] = g1[(g1.size() - i) % g1.size()];
  MetaWavefunction init = product_state(grid, {g1, g2, g1, g2});
  init.masses.assign(4, cfg.mass);

  EvolutionParams ep;
  ep.mode = EvolutionMode::RealTime;
  ep.dt = cfg.dt;
  ep.steps = static_cast<std::int64_t>(cfg.t_final / cfg.dt);
  ep.sample_every = cfg.sample_every;
  EvolutionResult res = split_step_evolve(init, ham, ep);
  rep.total_steps = ep.steps;

  std::vector<double> ts, p1, ptot, x1sum;
  TimeSeries sp1, sptot, sx1;
  for (const auto& smp : res.series) {
    ts.push_back(smp.t);
    p1.push_back(smp.obs.mean_p[0]);
    ptot.push_back(smp.obs.total_momentum);
    x1sum.push_back(smp.obs.mean_x[0] + smp.obs.mean_x[1]);
    sp1.emplace_back(smp.t, smp.obs.mean_p[0]);
    sptot.emplace_back(smp.t, smp.obs.total_momentum);
    sx1.emplace_back(smp.t, smp.obs.mean_x[0]);
  }
  rep.series.push_back({"p1", std::move(sp1)});
  rep.series.push_back({"total_momentum", std::move(sptot)});
  rep.series.push_back({"x1", std::move(sx1)});

  const LinearFit lf = linear_fit(ts, p1);
  // oracle: analytic sphere-pair force averaged over the initial relative
  // Gaussian. Each packet amplitude exp(-(x-c)^2/(2w^2)) has position variance
  // w^2/2, so the relative variance is w^2; the s^2 accounts for the table
  // filter, which acts as an extra Gaussian smearing of the pair separation.
  const double var_rel =
      cfg.packet_width * cfg.packet_width + cfg.smoothing * cfg.smoothing;
  const double sd_rel = std::sqrt(var_rel);
  double oracle = 0.0;
  {
    const int nq = 801;
    const double lo = cfg.separation - 6.0 * sd_rel;
    const double hi = cfg.separation + 6.0 * sd_rel;
    const double h = (hi - lo) / (nq - 1);
    double wsum = 0.0;
    for (int i = 0; i < nq; ++i) {
      const double u = lo + i * h;
      const double w = ((i == 0 || i == nq - 1) ? 0.5 : 1.0) *
                       std::exp(-0.5 * (u - cfg.separation) *
                                (u - cfg.separation) / var_rel);
      oracle += w * std::abs(pot.force(std::abs(u)));
      wsum += w;
    }
    oracle /= wsum;
  }
  rep.fits.push_back({"dp1_dt", {lf.slope, lf.rms, ts.front(), ts.back(), false}});
  rep.fits.push_back({"oracle_force", {oracle, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"point_force",
                      {std::abs(pot.force(cfg.separation)), 0.0, 0.0, 0.0,
                       false}});
  rep.fits.push_back({"dp1dt_over_force", {lf.slope / oracle, lf.rms / oracle,
                                           ts.front(), ts.back(), false}});
  // the free-space comparison is meaningful only when the pair separation
  // keeps a wide margin from the minimal-image wrap at extent/2
  if (0.5 * cfg.extent - cfg.separation >= 3.5 * sd_rel)
    rep.check("dp1dt_over_force", lf.slope / oracle, 0.95, 1.05);

  double drift = 0.0;
  for (double p : ptot) drift = std::max(drift, std::abs(p - ptot.front()));
  rep.fits.push_back({"total_momentum_drift", {drift, 0.0, ts.front(), ts.back(), false}});
  rep.check("total_momentum_drift", drift, 0.0, 1e-10);

  // bounded by boundary-point density times extent/2: the -extent/2 grid
  // point has no +extent/2 partner, so exact cancellation stops there
  double com = 0.0;
  for (double x : x1sum) com = std::max(com, std::abs(x));
  rep.check("green_com_symmetry", com, 0.0, 1e-6);

  append_cgs_projection(rep);
  rep.wall_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------

namespace {
const char* regime_name(Regime r) {
  switch (r) {
    case Regime::PlasmaOscillation: return "PlasmaOscillation";
    case Regime::PointLike: return "PointLike";
    default: return "Intermediate";
  }
}
}  // namespace

ExperimentReport run_threshold_scan(const ThresholdScanConfig& cfg) {
  WallClock clock;
  ExperimentReport rep;
  rep.scenario = "thresholds";
  const PhysicalConstants pc;
  const double density =
      cfg.density_g_cm3 > 0.0 ? cfg.density_g_cm3 : ordinary_density_g_cm3(pc);
  rep.config_echo = {{"density_g_cm3", num(density)},
                     {"mass_min_mp", num(cfg.mass_min_mp)},
                     {"mass_max_mp", num(cfg.mass_max_mp)},
                     {"points_per_decade",
                      num(static_cast<std::int64_t>(cfg.points_per_decade))},
                     {"alpha", num(cfg.alpha)},
                     {"observation_time_s", num(cfg.observation_time_s)}};

  rep.table_header = {"mass_mp", "lambda_cm", "ebind_erg", "freq_hz",
                      "coh_len_cm", "radius_cm", "tau_s", "a_cm", "regime"};
  const double lmin = std::log10(cfg.mass_min_mp);
  const double lmax = std::log10(cfg.mass_max_mp);
  const int steps = static_cast<int>((lmax - lmin) * cfg.points_per_decade);
  for (int i = 0; i <= steps; ++i) {
    const double mp = std::pow(10.0, lmin + (lmax - lmin) * i / steps);
    const auto body = BodySpec::from_density(mp * pc.m_p, density);
    const double eb = binding_energy(body, pc);
    rep.table_rows.push_back(
        {num(mp), num(localization_length(body, cfg.alpha, pc)), num(eb),
         num(coherence_frequency(body, pc)), num(pc.hbar * pc.c / std::abs(eb)),
         num(body.radius()), num(spreading_time(body, cfg.alpha, pc)),
         num(hydrogen_like_radius(body.mass(), pc)),
         regime_name(classify_regime(body, pc))});
  }

  const auto inst = classicality_threshold(
      density, {ThresholdKind::InstantaneousOscillation, 0.0}, pc);
  if (inst) {
    rep.fits.push_back(
        {"instantaneous_threshold_mp", {*inst / pc.m_p, 0.0, 0.0, 0.0, false}});
    rep.check("instantaneous_threshold_mp", *inst / pc.m_p, 1e19, 1e21);
  } else {
    rep.check("instantaneous_threshold_found", 0.0, 1.0, 1.0);
  }
  const auto spread = classicality_threshold(
      density, {ThresholdKind::SpreadingTime, cfg.observation_time_s}, pc);
  rep.fits.push_back({"spreading_threshold_mp",
                      {spread ? *spread / pc.m_p : -1.0, 0.0, 0.0, 0.0,
                       !spread.has_value()}});

  auto regime_at = [&](double mp) {
    return classify_regime(BodySpec::from_density(mp * pc.m_p, density), pc);
  };
  rep.check("regime_pointlike_below_1e10",
            regime_at(1e9) == Regime::PointLike ? 1.0 : 0.0, 1.0, 1.0);
  rep.check("regime_intermediate_1e11",
            regime_at(1e11) == Regime::Intermediate ? 1.0 : 0.0, 1.0, 1.0);
  rep.check("regime_plasma_at_1e12",
            regime_at(1e12) == Regime::PlasmaOscillation ? 1.0 : 0.0, 1.0, 1.0);

  append_cgs_projection(rep);
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport run_analytic(const AnalyticConfig& cfg) {
  WallClock clock;
  ExperimentReport rep;
  rep.scenario = "analytic";
  const PhysicalConstants pc;
  const double mass = cfg.mass_mp * pc.m_p;
  BodySpec body = cfg.radius_cm > 0.0
                      ? BodySpec::from_radius(mass, cfg.radius_cm)
                      : BodySpec::from_density(
                            mass, cfg.density_g_cm3 > 0.0
                                      ? cfg.density_g_cm3
                                      : ordinary_density_g_cm3(pc));
  rep.config_echo = {{"mass_mp", num(cfg.mass_mp)},
                     {"density_g_cm3", num(body.density())},
                     {"radius_cm", num(body.radius())},
                     {"alpha", num(cfg.alpha)}};
  rep.fits.push_back({"lambda_cm",
                      {localization_length(body, cfg.alpha, pc), 0.0, 0.0, 0.0,
                       false}});
  rep.fits.push_back({"ebind_erg", {binding_energy(body, pc), 0.0, 0.0, 0.0, false}});
  rep.fits.push_back(
      {"freq_hz", {coherence_frequency(body, pc), 0.0, 0.0, 0.0, false}});
  rep.fits.push_back(
      {"tau_s", {spreading_time(body, cfg.alpha, pc), 0.0, 0.0, 0.0, false}});
  rep.fits.push_back(
      {"a_cm", {hydrogen_like_radius(body.mass(), pc), 0.0, 0.0, 0.0, false}});
  rep.config_echo.emplace_back("regime", regime_name(classify_regime(body, pc)));
  append_cgs_projection(rep);
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport run_groundstate_radial(const RadialRunConfig& cfg) {
  WallClock clock;
  ExperimentReport rep;
  rep.scenario = "groundstate-radial";
  rep.config_echo = {{"reduced_mass", num(cfg.reduced_mass)},
                     {"coulomb_z", num(cfg.coulomb_z)},
                     {"r_max", num(cfg.r_max)},
                     {"mesh_points",
                      num(static_cast<std::int64_t>(cfg.mesh_points))},
                     {"mass_mp", num(cfg.mass_mp)}};

  RadialProblem prob;
  prob.reduced_mass = cfg.reduced_mass;
  const double z = cfg.coulomb_z;
  prob.potential = [z](double r) { return -z / r; };
  prob.r_max = cfg.r_max;
  prob.mesh_points = cfg.mesh_points;

  const auto st = ground_state(prob);
  if (!st)
    throw std::runtime_error(
        "run_groundstate_radial: no bound ground state in the bracket");

  // hydrogen-like oracles: E0 = -mu Z^2 / 2, a = 1/(mu Z), <r> = 3a/2
  const double e_oracle = -0.5 * cfg.reduced_mass * z * z;
  const double a_oracle = 1.0 / (cfg.reduced_mass * z);
  const double mean_r = expectation_radius(*st);

  rep.fits.push_back({"ground_energy",
                      {st->energy, st->tail_fraction, 0.0, cfg.r_max, false}});
  rep.fits.push_back({"energy_oracle", {e_oracle, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"mean_radius", {mean_r, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"bohr_radius", {2.0 * mean_r / 3.0, 0.0, 0.0, 0.0, false}});
  rep.fits.push_back({"bohr_radius_oracle", {a_oracle, 0.0, 0.0, 0.0, false}});
  rep.check("ground_energy_error", st->energy - e_oracle, -1e-6, 1e-6);
  rep.check("bohr_radius_ratio", 2.0 * mean_r / (3.0 * a_oracle), 0.999, 1.001);
  rep.check("node_count", st->nodes, 0.0, 0.0);
  rep.check("tail_fraction", st->tail_fraction, 0.0, 1e-8);

  // CGS projection: the hydrogen-like bound radius at the reference mass
  const PhysicalConstants pc;
  rep.fits.push_back({"cgs_a_cm",
                      {hydrogen_like_radius(cfg.mass_mp * pc.m_p, pc), 0.0, 0.0,
                       0.0, false}});
  append_cgs_projection(rep);
  rep.wall_seconds = clock.seconds();
  return rep;
}

}  // namespace metagrav

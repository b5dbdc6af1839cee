#include "metagrav/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace metagrav {

namespace {

struct Mesh {
  int n;
  double h;
  std::vector<double> v;  // V(r_i), r_i = (i+1) h
};

Mesh tabulate(const RadialProblem& p) {
  if (p.mesh_points < 1000)
    throw std::domain_error("radial solver: need at least 1e3 mesh points");
  if (!(p.r_max > 0.0) || !(p.reduced_mass > 0.0))
    throw std::domain_error("radial solver: r_max and reduced mass must be positive");
  Mesh m;
  m.n = p.mesh_points;
  m.h = p.r_max / p.mesh_points;
  m.v.resize(m.n);
  for (int i = 0; i < m.n; ++i) m.v[i] = p.potential((i + 1) * m.h);
  return m;
}

// Coulomb strength -lim r V(r); zero for potentials regular at the origin.
double coulomb_strength(const RadialProblem& p, double h) {
  const double eps = 1e-4 * h;
  return -p.potential(eps) * eps;
}

// Outward Numerov sweep; returns interior node count and fills u.
int sweep_outward(const RadialProblem& p, const Mesh& m, double E,
                  std::vector<double>& u) {
  const double mu = p.reduced_mass;
  const double h = m.h, h2_12 = m.h * m.h / 12.0;
  const double Z = coulomb_strength(p, h);
  // regular-series start u = r + c2 r^2 + c3 r^3, truncated at the cubic so
  // the start is consistent to the same order as the sweep: the eigenvalue
  // error is then cleanly O(h^4) instead of a mix of h^4 and h^5 terms
  const double W0 = m.v[0] + Z / h;  // regular part of V near the origin
  const double c2 = -mu * Z;
  const double c3 = (2.0 * mu * mu * Z * Z + 2.0 * mu * (W0 - E)) / 6.0;
  auto series = [&](double r) { return r * (1.0 + r * (c2 + r * c3)); };
  u.resize(m.n);
  u[0] = series(h);
  u[1] = series(2.0 * h);

  auto f = [&](int i) { return 2.0 * mu * (m.v[i] - E); };
  int nodes = 0;
  double a_prev = 1.0 - h2_12 * f(0);
  double a_cur = 1.0 - h2_12 * f(1);
  double umax = std::max(std::abs(u[0]), std::abs(u[1]));
  for (int i = 1; i + 1 < m.n; ++i) {
    const double a_next = 1.0 - h2_12 * f(i + 1);
    u[i + 1] =
        ((12.0 - 10.0 * a_cur) * u[i] - a_prev * u[i - 1]) / a_next;
    // genuine nodes sit in the classically allowed region where the
    // amplitude is comparable to the running maximum; a relative floor
    // keeps roundoff sign flips in a deeply decayed tail from counting
    if (std::abs(u[i]) > 1e-12 * umax && u[i + 1] * u[i] < 0.0) ++nodes;
    umax = std::max(umax, std::abs(u[i + 1]));
    a_prev = a_cur;
    a_cur = a_next;
    // rescale to dodge overflow in the classically forbidden tail
    if (std::abs(u[i + 1]) > 1e250) {
      const double s = 1e-250;
      for (int j = 0; j <= i + 1; ++j) u[j] *= s;
      umax *= s;
    }
  }
  return nodes;
}

std::optional<RadialEigenstate> solve(const RadialProblem& p, int target_nodes) {
  const Mesh m = tabulate(p);
  const double mu = p.reduced_mass;
  const double v_min = *std::min_element(m.v.begin(), m.v.end());
  const double v_end = m.v.back();
  std::vector<double> u;

  auto nodes_at = [&](double E) { return sweep_outward(p, m, E, u); };

  // bracket: hydrogen-form guess when a Coulomb tail is present, widened
  // geometrically; hard floor at min V, ceiling at V(r_max)
  const double Z = coulomb_strength(p, m.h);
  double lo;
  if (std::abs(Z) > 1e-12) {
    lo = std::max(v_min, -4.0 * mu * Z * Z / 2.0 /
                             ((target_nodes + 1.0) * (target_nodes + 1.0)));
    int guard = 0;
    while (nodes_at(lo) > target_nodes && ++guard < 64)
      lo = std::max(v_min, (lo - v_end) * 4.0 + v_end);
    if (nodes_at(lo) > target_nodes) lo = v_min;
  } else {
    lo = v_min;
  }
  double hi = v_end;
  if (nodes_at(lo) > target_nodes) return std::nullopt;
  if (nodes_at(hi) <= target_nodes) return std::nullopt;

  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (nodes_at(mid) <= target_nodes ? lo : hi) = mid;
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  const double E = 0.5 * (lo + hi);

  // reconstruct with a clean decaying tail: outward to the outermost
  // classical turning point, inward from r_max, matched there
  RadialEigenstate st;
  st.energy = E;
  st.mesh_spacing = m.h;
  sweep_outward(p, m, E, u);

  int turn = m.n - 1;
  while (turn > 1 && m.v[turn] > E) --turn;
  turn = std::clamp(turn, 2, m.n - 3);

  std::vector<double> w(m.n, 0.0);
  const double kappa = std::sqrt(std::max(1e-30, 2.0 * mu * (v_end - E)));
  w[m.n - 1] = 1e-120;
  w[m.n - 2] = w[m.n - 1] * std::exp(kappa * m.h);
  const double h2_12 = m.h * m.h / 12.0;
  auto f = [&](int i) { return 2.0 * mu * (m.v[i] - E); };
  for (int i = m.n - 2; i > turn - 1; --i) {
    const double a_prev = 1.0 - h2_12 * f(i - 1);
    w[i - 1] = ((12.0 - 10.0 * (1.0 - h2_12 * f(i))) * w[i] -
                (1.0 - h2_12 * f(i + 1)) * w[i + 1]) /
               a_prev;
    if (std::abs(w[i - 1]) > 1e250)
      for (int j = i - 1; j < m.n; ++j) w[j] *= 1e-250;
  }
  const double scale = u[turn] / w[turn];
  st.u = u;
  for (int i = turn; i < m.n; ++i) st.u[i] = w[i] * scale;

  if (st.u[0] < 0.0)
    for (auto& x : st.u) x = -x;

  // trapezoid normalization, u(0) = 0 endpoint included implicitly
  double nrm = 0.0;
  for (int i = 0; i < m.n; ++i) {
    const double wgt = (i == m.n - 1) ? 0.5 : 1.0;
    nrm += wgt * st.u[i] * st.u[i];
  }
  nrm = std::sqrt(nrm * m.h);
  for (auto& x : st.u) x /= nrm;

  double peak = 0.0;
  for (double x : st.u) peak = std::max(peak, std::abs(x));
  st.tail_fraction = std::abs(st.u.back()) / peak;

  // count nodes on the matched state (its tail decays cleanly, so only
  // genuine interior crossings remain above the relative floor)
  st.nodes = 0;
  for (int i = 0; i + 1 < m.n; ++i)
    if (std::abs(st.u[i]) > 1e-12 * peak && st.u[i + 1] * st.u[i] < 0.0)
      ++st.nodes;
  return st;
}

}  // namespace

std::optional<RadialEigenstate> ground_state(const RadialProblem& problem) {
  return solve(problem, 0);
}

std::optional<RadialEigenstate> bound_state(const RadialProblem& problem,
                                            int nodes) {
  if (nodes < 0 || nodes > 3)
    throw std::domain_error("bound_state: node count must be in [0, 3]");
  return solve(problem, nodes);
}

double expectation_radius(const RadialEigenstate& state) {
  const double h = state.mesh_spacing;
  double s = 0.0;
  const int n = static_cast<int>(state.u.size());
  for (int i = 0; i < n; ++i) {
    const double r = (i + 1) * h;
    const double wgt = (i == n - 1) ? 0.5 : 1.0;
    s += wgt * r * state.u[i] * state.u[i];
  }
  return s * h;
}

}  // namespace metagrav

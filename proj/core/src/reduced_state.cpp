#include "metagrav/reduced_state.hpp"

#include <cmath>
#include <stdexcept>

namespace metagrav {

double ReducedDensityMatrix::green_measure() const {
  return std::pow(spacing, green_dims);
}

double ReducedDensityMatrix::trace() const {
  double t = 0.0;
  for (int a = 0; a < dim; ++a) t += at(a, a).real();
  return t * green_measure();
}

double ReducedDensityMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b)
      d = std::max(d, std::abs(at(a, b) - std::conj(at(b, a))));
  return d;
}

ReducedDensityMatrix partial_trace_red(const MetaWavefunction& state) {
  const Grid& g = state.grid;
  const int n = g.points;
  ReducedDensityMatrix rho;
  rho.axis_points = n;
  rho.spacing = g.spacing();
  rho.green_dims = g.dims / 2;

  if (g.dims == 4 && n > 32)
    throw std::runtime_error(
        "partial_trace_red: 4-coordinate matrix above 32 points/axis is not "
        "materialized; use contraction-based diagnostics");

  // green rows index the first dims/2 coordinates, red columns the rest;
  // row-major layout makes the red block contiguous per green index
  const std::size_t rows = (g.dims == 2) ? n : static_cast<std::size_t>(n) * n;
  const std::size_t cols = rows;
  rho.dim = static_cast<int>(rows);
  rho.entries.assign(rows * rows, Complex{0.0, 0.0});
  const double red_measure = std::pow(g.spacing(), g.dims / 2);

  const Complex* amp = state.amplitudes.data();
  for (std::size_t a = 0; a < rows; ++a) {
    const Complex* ra = amp + a * cols;
    for (std::size_t b = a; b < rows; ++b) {
      const Complex* rb = amp + b * cols;
      Complex s{0.0, 0.0};
      for (std::size_t y = 0; y < cols; ++y) s += ra[y] * std::conj(rb[y]);
      s *= red_measure;
      rho.entries[a * rows + b] = s;
      rho.entries[b * rows + a] = std::conj(s);
    }
  }
  return rho;
}

double purity(const ReducedDensityMatrix& rho) {
  double s = 0.0;
  for (const auto& e : rho.entries) s += std::norm(e);
  const double m = rho.green_measure();
  return s * m * m;
}

double coherence_visibility(const ReducedDensityMatrix& rho, Region a, Region b) {
  if (a.lo < 0 || b.lo < 0 || a.hi > rho.dim || b.hi > rho.dim ||
      a.lo >= a.hi || b.lo >= b.hi)
    throw std::domain_error("coherence_visibility: invalid regions");
  if (std::max(a.lo, b.lo) < std::min(a.hi, b.hi))
    throw std::domain_error("coherence_visibility: regions must be disjoint");

  auto block_mass = [&](Region r, Region c) {
    double s = 0.0;
    for (int i = r.lo; i < r.hi; ++i)
      for (int j = c.lo; j < c.hi; ++j) s += std::abs(rho.at(i, j));
    return s;
  };
  const double ab = block_mass(a, b);
  const double aa = block_mass(a, a);
  const double bb = block_mass(b, b);
  if (!(aa > 0.0) || !(bb > 0.0))
    throw std::domain_error("coherence_visibility: empty diagonal block");
  return ab / std::sqrt(aa * bb);
}

double position_spread(const ReducedDensityMatrix& rho, double extent) {
  if (rho.green_dims != 1)
    throw std::domain_error("position_spread: single green coordinate only");
  const int n = rho.dim;
  const double dx = rho.spacing;
  double norm = 0.0, mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = rho.at(i, i).real();
    const double x = -0.5 * extent + i * dx;
    norm += w;
    mean += w * x;
  }
  mean /= norm;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -0.5 * extent + i * dx - mean;
    var += rho.at(i, i).real() * x * x;
  }
  return var / norm;
}

double smallest_eigenvalue(const ReducedDensityMatrix& rho, int iterations) {
  const int n = rho.dim;
  // Gershgorin upper bound, then power iteration on shift*I - rho.
  double shift = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(rho.at(i, j));
    shift = std::max(shift, row);
  }
  std::vector<Complex> v(n), w(n);
  for (int i = 0; i < n; ++i) v[i] = Complex{1.0 + 0.01 * i, 0.02 * i};
  double lam = 0.0;
  for (int it = 0; it < iterations; ++it) {
    for (int i = 0; i < n; ++i) {
      Complex s = shift * v[i];
      for (int j = 0; j < n; ++j) s -= rho.at(i, j) * v[j];
      w[i] = s;
    }
    double nw = 0.0;
    for (int i = 0; i < n; ++i) nw += std::norm(w[i]);
    nw = std::sqrt(nw);
    if (!(nw > 0.0)) break;
    double ray = 0.0;
    for (int i = 0; i < n; ++i) ray += (std::conj(v[i]) * w[i]).real();
    lam = ray;
    for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  return shift - lam;
}

}  // namespace metagrav

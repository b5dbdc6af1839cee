#include "metagrav/sphere_potential.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace metagrav {

SpherePairPotential::SpherePairPotential(double mass, double radius, double G)
    : mass_(mass), radius_(radius), G_(G) {
  if (!(mass > 0.0 && radius > 0.0 && G > 0.0))
    throw std::domain_error("SpherePairPotential: mass, radius, G must be positive");
}

double SpherePairPotential::mutual_energy(double d) const {
  if (d < 0.0) throw std::domain_error("mutual_energy: separation must be >= 0");
  const double GMM = G_ * mass_ * mass_;
  if (d >= 2.0 * radius_) return -GMM / d;
  const double s = d / (2.0 * radius_);
  const double s2 = s * s;
  return -(GMM / radius_) *
         (1.2 - 2.0 * s2 + 1.5 * s2 * s - 0.2 * s2 * s2 * s);
}

double SpherePairPotential::force(double d) const {
  if (d < 0.0) throw std::domain_error("force: separation must be >= 0");
  const double GMM = G_ * mass_ * mass_;
  if (d >= 2.0 * radius_) return -GMM / (d * d);
  const double s = d / (2.0 * radius_);
  // dU/dd = -(GMM/R) * (-4 s + 4.5 s^2 - s^4) / (2R)
  const double dUds = -(GMM / radius_) * (-4.0 * s + 4.5 * s * s - s * s * s * s);
  return -dUds / (2.0 * radius_);
}

double SpherePairPotential::spring_constant() const {
  // Only the s^2 term survives in d^2U/dd^2 at d = 0.
  return G_ * mass_ * mass_ / (radius_ * radius_ * radius_);
}

double SpherePairPotential::alpha() const {
  return spring_constant() * radius_ * radius_ * radius_ / (G_ * mass_ * mass_);
}

MonteCarloEnergy SpherePairPotential::numeric_energy(double d,
                                                     std::int64_t samples,
                                                     std::uint64_t seed) const {
  if (d < 0.0) throw std::domain_error("numeric_energy: separation must be >= 0");
  if (samples < 10000)
    throw std::domain_error("numeric_energy: need at least 1e4 samples");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto sample_in_sphere = [&](double cx, double& x, double& y, double& z) {
    const double r = radius_ * std::cbrt(unif(rng));
    const double ct = 2.0 * unif(rng) - 1.0;
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = 2.0 * std::numbers::pi * unif(rng);
    x = cx + r * st * std::cos(phi);
    y = r * st * std::sin(phi);
    z = r * ct;
  };

  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    double ax, ay, az, bx, by, bz;
    sample_in_sphere(0.0, ax, ay, az);
    sample_in_sphere(d, bx, by, bz);
    const double dx = ax - bx, dy = ay - by, dz = az - bz;
    const double inv = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
    sum += inv;
    sum2 += inv * inv;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  const double scale = G_ * mass_ * mass_;
  return {-scale * mean, scale * std::sqrt(var / n)};
}

}  // namespace metagrav

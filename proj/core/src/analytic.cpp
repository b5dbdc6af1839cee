#include "metagrav/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace metagrav {

namespace {
constexpr double kScanMinProtonMasses = 1e6;
constexpr double kScanMaxProtonMasses = 1e30;
}  // namespace

BodySpec BodySpec::from_radius(double mass_g, double radius_cm) {
  if (!(mass_g > 0.0)) throw std::domain_error("BodySpec: mass must be positive");
  if (!(radius_cm > 0.0))
    throw std::domain_error("BodySpec: radius must be positive");
  const double volume =
      4.0 / 3.0 * std::numbers::pi * radius_cm * radius_cm * radius_cm;
  return BodySpec(mass_g, radius_cm, mass_g / volume);
}

BodySpec BodySpec::from_density(double mass_g, double density_g_cm3) {
  if (!(mass_g > 0.0)) throw std::domain_error("BodySpec: mass must be positive");
  if (!(density_g_cm3 > 0.0))
    throw std::domain_error("BodySpec: density must be positive");
  const double radius =
      std::cbrt(3.0 * mass_g / (4.0 * std::numbers::pi * density_g_cm3));
  return BodySpec(mass_g, radius, density_g_cm3);
}

double ordinary_density_g_cm3(const PhysicalConstants& pc) {
  return kOrdinaryDensityProtonsPerCm3 * pc.m_p;
}

double localization_length(const BodySpec& body, double alpha,
                           const PhysicalConstants& pc) {
  if (!(alpha > 0.0))
    throw std::domain_error("localization_length: alpha must be positive");
  const double M = body.mass(), R = body.radius();
  return std::pow(pc.hbar * pc.hbar * R * R * R / (alpha * pc.G * M * M * M),
                  0.25);
}

double binding_energy(const BodySpec& body, const PhysicalConstants& pc) {
  return -pc.G * body.mass() * body.mass() / body.radius();
}

double coherence_frequency(const BodySpec& body, const PhysicalConstants& pc) {
  return std::abs(binding_energy(body, pc)) / pc.hbar;
}

double spreading_time(const BodySpec& body, double alpha,
                      const PhysicalConstants& pc) {
  const double lam = localization_length(body, alpha, pc);
  return body.mass() * lam * lam / (2.0 * std::numbers::pi * pc.hbar);
}

double hydrogen_like_radius(double mass_g, const PhysicalConstants& pc) {
  if (!(mass_g > 0.0))
    throw std::domain_error("hydrogen_like_radius: mass must be positive");
  return 2.0 * pc.hbar * pc.hbar / (pc.G * mass_g * mass_g * mass_g);
}

double default_plasma_mass_floor(const PhysicalConstants& pc) {
  return 1e12 * pc.m_p;
}

double default_point_mass_ceiling(const PhysicalConstants& pc) {
  return 1e10 * pc.m_p;
}

Regime classify_regime(const BodySpec& body, double plasma_mass_floor_g,
                       double point_mass_ceiling_g) {
  if (!(point_mass_ceiling_g < plasma_mass_floor_g))
    throw std::domain_error("classify_regime: ceiling must lie below floor");
  if (body.mass() >= plasma_mass_floor_g) return Regime::PlasmaOscillation;
  if (body.mass() <= point_mass_ceiling_g) return Regime::PointLike;
  return Regime::Intermediate;
}

Regime classify_regime(const BodySpec& body, const PhysicalConstants& pc) {
  return classify_regime(body, default_plasma_mass_floor(pc),
                         default_point_mass_ceiling(pc));
}

std::optional<double> classicality_threshold(double density_g_cm3,
                                             const ThresholdCriterion& criterion,
                                             const PhysicalConstants& pc) {
  if (!(density_g_cm3 > 0.0))
    throw std::domain_error("classicality_threshold: density must be positive");

  if (criterion.kind == ThresholdKind::SpreadingTime) {
    if (!(criterion.observation_time_s > 0.0))
      throw std::domain_error(
          "classicality_threshold: observation time must be positive");
    // tau at fixed density is mass independent, so the criterion either holds
    // for every plasma-regime mass or for none; the regime floor is the onset.
    const double floor = default_plasma_mass_floor(pc);
    const auto body = BodySpec::from_density(floor, density_g_cm3);
    const double tau = spreading_time(body, 1.0, pc);
    if (tau <= criterion.observation_time_s) return floor;
    return std::nullopt;
  }

  // InstantaneousOscillation: coherence length hbar c / |E_bind| falls below
  // the body radius. f(M) = hbar c R / (G M^2) - R is strictly decreasing in
  // log M; bisect for its root.
  auto f = [&](double mass) {
    const auto body = BodySpec::from_density(mass, density_g_cm3);
    return pc.hbar * pc.c / std::abs(binding_energy(body, pc)) - body.radius();
  };
  double lo = std::log(kScanMinProtonMasses * pc.m_p);
  double hi = std::log(kScanMaxProtonMasses * pc.m_p);
  if (f(std::exp(lo)) < 0.0 || f(std::exp(hi)) > 0.0) return std::nullopt;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(std::exp(mid)) > 0.0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace metagrav

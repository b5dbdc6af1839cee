#ifndef METAGRAV_ANALYTIC_HPP
#define METAGRAV_ANALYTIC_HPP

#include <optional>

#include "metagrav/units.hpp"

namespace metagrav {

// Homogeneous spherical body, specified by mass plus either an explicit
// radius or a mass density (radius then follows from the uniform sphere).
class BodySpec {
 public:
  static BodySpec from_radius(double mass_g, double radius_cm);
  static BodySpec from_density(double mass_g, double density_g_cm3);

  double mass() const { return mass_; }
  double radius() const { return radius_; }
  double density() const { return density_; }

 private:
  BodySpec(double m, double r, double rho)
      : mass_(m), radius_(r), density_(rho) {}
  double mass_;
  double radius_;
  double density_;
};

enum class Regime { PlasmaOscillation, PointLike, Intermediate };

enum class ThresholdKind { InstantaneousOscillation, SpreadingTime };

struct ThresholdCriterion {
  ThresholdKind kind;
  double observation_time_s = 0.0;  // used by SpreadingTime only
};

// Relative-motion localization length Lambda = (hbar^2 R^3 / (alpha G M^3))^(1/4).
double localization_length(const BodySpec& body, double alpha,
                           const PhysicalConstants& pc = {});

// Gap between interpenetrating and separated metabody pairs, -G M^2 / R.
double binding_energy(const BodySpec& body, const PhysicalConstants& pc = {});

// |E_bind| / hbar, the coherence oscillation frequency.
double coherence_frequency(const BodySpec& body,
                           const PhysicalConstants& pc = {});

// Spreading timescale tau = M Lambda^2 / (2 pi hbar); depends on density only.
double spreading_time(const BodySpec& body, double alpha,
                      const PhysicalConstants& pc = {});

// Point-metabody bound-state radius a = 2 hbar^2 / (G M^3).
double hydrogen_like_radius(double mass_g, const PhysicalConstants& pc = {});

// Default regime boundaries, in grams.
double default_plasma_mass_floor(const PhysicalConstants& pc = {});   // 1e12 m_p
double default_point_mass_ceiling(const PhysicalConstants& pc = {});  // 1e10 m_p

Regime classify_regime(const BodySpec& body, double plasma_mass_floor_g,
                       double point_mass_ceiling_g);
Regime classify_regime(const BodySpec& body, const PhysicalConstants& pc = {});

// Mass (g) at which the chosen classicality criterion first holds at the
// given density. Empty when no mass in the scan range satisfies it.
std::optional<double> classicality_threshold(double density_g_cm3,
                                             const ThresholdCriterion& criterion,
                                             const PhysicalConstants& pc = {});

double ordinary_density_g_cm3(const PhysicalConstants& pc = {});

}  // namespace metagrav

#endif

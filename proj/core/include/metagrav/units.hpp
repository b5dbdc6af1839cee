#ifndef METAGRAV_UNITS_HPP
#define METAGRAV_UNITS_HPP

namespace metagrav {

// Fixed CGS constants. Pinned literals, never fetched, so results are
// reproducible across environments.
struct PhysicalConstants {
  double G = 6.674e-8;       // cm^3 g^-1 s^-2
  double hbar = 1.0546e-27;  // erg s
  double c = 2.998e10;       // cm/s
  double m_p = 1.6726e-24;   // g
};

inline constexpr double kOrdinaryDensityProtonsPerCm3 = 1e24;  // m_p / cm^3

// Conversion factors between CGS and the natural system hbar = G = M = 1,
// where M is a chosen reference mass.
struct NaturalUnitScales {
  double length_scale;  // cm per natural length unit
  double time_scale;    // s per natural time unit
  double energy_scale;  // erg per natural energy unit
  double mass_scale;    // g per natural mass unit

  double to_cgs_length(double x) const { return x * length_scale; }
  double to_cgs_time(double t) const { return t * time_scale; }
  double to_cgs_energy(double e) const { return e * energy_scale; }
  double to_cgs_mass(double m) const { return m * mass_scale; }
  double to_natural_length(double cm) const { return cm / length_scale; }
  double to_natural_time(double s) const { return s / time_scale; }
  double to_natural_energy(double erg) const { return erg / energy_scale; }
  double to_natural_mass(double g) const { return g / mass_scale; }
};

// length = hbar^2/(G M^3), time = hbar^3/(G^2 M^5), energy = G^2 M^5/hbar^2.
NaturalUnitScales natural_scales(double reference_mass_g,
                                 const PhysicalConstants& pc = {});

}  // namespace metagrav

#endif

#include "metagrav/units.hpp"

#include <stdexcept>

namespace metagrav {

NaturalUnitScales natural_scales(double reference_mass_g,
                                 const PhysicalConstants& pc) {
  if (!(reference_mass_g > 0.0))
    throw std::domain_error("natural_scales: reference mass must be positive");
  const double M = reference_mass_g;
  NaturalUnitScales s;
  s.mass_scale = M;
  s.length_scale = pc.hbar * pc.hbar / (pc.G * M * M * M);
  s.time_scale = pc.hbar * pc.hbar * pc.hbar / (pc.G * pc.G * M * M * M * M * M);
  s.energy_scale = pc.hbar / s.time_scale;  // energy*time = hbar exactly
  return s;
}

}  // namespace metagrav

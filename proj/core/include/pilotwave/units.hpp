#pragma once

namespace pilotwave::si {

inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double electron_mass = 9.1093837015e-31;  // kg
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double julian_year = 3.15576e7;            // s

/// Length in nm, time in fs, mass in units of one particle mass. Energies are
/// then measured in m * nm^2 / fs^2.
struct NanoFemtoUnits {
  double particle_mass_kg = electron_mass;

  double hbar() const noexcept { return si::hbar * 1e-15 / (particle_mass_kg * 1e-18); }
  double energy_unit_joule() const noexcept { return particle_mass_kg * 1e-18 / 1e-30; }
  /// Potential slope (energy per nm) produced by charge [C] in field [V/m]:
  /// V(x) = -q E x.
  double field_slope(double charge_coulomb, double field_volt_per_meter) const noexcept {
    return -charge_coulomb * field_volt_per_meter * 1e-9 / energy_unit_joule();
  }
};

}  // namespace pilotwave::si

#pragma once

#include <numbers>

namespace davydov {

// hbar = 1 throughout. Energies and frequencies are carried internally in
// rad/ps, times in ps. Only the I/O layers see cm^-1, K and fs.
struct UnitSystem {
  // Boltzmann constant in cm^-1 / K.
  double kB_cm = 0.6950348;
  // 2*pi*c with c = 0.0299792458 cm/ps.
  double wavenumber_to_angular = 2.0 * std::numbers::pi * 0.0299792458;

  constexpr double to_angular(double wavenumber_cm) const {
    return wavenumber_cm * wavenumber_to_angular;
  }
  constexpr double to_wavenumber(double angular) const {
    return angular / wavenumber_to_angular;
  }
  // kB expressed in rad/ps per K.
  constexpr double kB_angular() const { return kB_cm * wavenumber_to_angular; }

  // Inverse temperature in ps/rad. Infinite at T = 0.
  double beta(double temperature_K) const;
};

inline constexpr UnitSystem kUnits{};

} // namespace davydov

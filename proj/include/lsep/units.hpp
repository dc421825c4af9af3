#pragma once

#include <cmath>
#include <numbers>

// SI constants (CODATA 2018) and the handful of unit conversions used across
// the project. Energies on spectral grids are carried in eV; dynamics run in
// SI with angular frequencies in rad/s.
namespace lsep::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double c0 = 299792458.0;                // m/s
inline constexpr double eps0 = 8.8541878128e-12;         // F/m
inline constexpr double mu0 = 1.25663706212e-6;          // H/m
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double e_charge = 1.602176634e-19;      // C, also J per eV
inline constexpr double debye = 3.33564095198152e-30;    // C m
inline constexpr double z0 = mu0 * c0;                   // vacuum impedance, ohm
inline constexpr double hc_ev_nm = 1239.8419843320026;   // h c in eV nm

inline constexpr double ev_to_rad_per_s(double ev) { return ev * e_charge / hbar; }
inline constexpr double rad_per_s_to_ev(double w) { return w * hbar / e_charge; }
inline constexpr double ev_to_joule(double ev) { return ev * e_charge; }
inline constexpr double debye_to_cm(double d) { return d * debye; }

inline constexpr double wavelength_nm_to_ev(double nm) { return hc_ev_nm / nm; }
inline constexpr double ev_to_wavelength_nm(double ev) { return hc_ev_nm / ev; }
inline constexpr double ev_to_wavelength_m(double ev) { return hc_ev_nm / ev * 1e-9; }

inline constexpr double fs = 1e-15;
inline constexpr double nm = 1e-9;

// Peak field of a beam of power `power_w` spread uniformly over a disc of
// diameter `spot_diameter_m`, using I = c eps0 E0^2. This is the relation that
// maps 1 mW over 1.5 mm onto 462 V/m.
inline double field_from_power(double power_w, double spot_diameter_m) {
  const double area = pi * 0.25 * spot_diameter_m * spot_diameter_m;
  return std::sqrt(power_w / (area * c0 * eps0));
}

}  // namespace lsep::units

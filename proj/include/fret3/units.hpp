#pragma once

// Interface units are h*MHz (energy), microseconds, micrometres and V/cm.
// Matrix-element arithmetic is done in atomic units.

namespace fret3::units {

inline constexpr double pi = 3.14159265358979323846;

/// Hartree energy expressed as a frequency, MHz.
inline constexpr double hartree_mhz = 6.579683920502e9;

/// Bohr radius, micrometres.
inline constexpr double bohr_um = 5.29177210903e-5;

/// Atomic unit of electric field, V/cm.
inline constexpr double field_au_vcm = 5.14220674763e9;

/// h*c*(1 cm^-1) as a frequency, MHz.
inline constexpr double wavenumber_mhz = 29979.2458;

inline constexpr double um_to_bohr(double um) { return um / bohr_um; }
inline constexpr double vcm_to_au(double vcm) { return vcm / field_au_vcm; }

}  // namespace fret3::units

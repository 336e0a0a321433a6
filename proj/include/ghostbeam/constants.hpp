#pragma once

// Unit system used throughout: lengths in nm, times in ns, energies in eV
// (electron kinetic energy in keV where noted), angular frequencies in rad/s.

namespace ghostbeam {

inline constexpr double kSpeedOfLight_nm_per_ns = 2.99792458e8;
inline constexpr double kSpeedOfLight_m_per_s = 2.99792458e8;
inline constexpr double kElectronCharge_C = 1.602176634e-19;
inline constexpr double kHbar_eVs = 6.582119569e-16;
inline constexpr double kElectronRestEnergy_keV = 510.99895;

// e/hbar in 1/(V s); multiplies integrated field (V) over omega (rad/s) in the
// coupling integral.
inline constexpr double kChargeOverHbar_per_Vs = 1.519267447e15;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace ghostbeam

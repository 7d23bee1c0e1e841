#pragma once

// Unit system used throughout: energies in ueV, lengths in nm, times in ns.
// Velocities in m/s are numerically identical to nm/ns.

namespace shuttlesim::units {

// hbar in ueV*ns
inline constexpr double hbar = 0.6582119569;

// free electron mass in ueV*ns^2/nm^2, from hbar^2/(2 m_e) = 3.809982e4 ueV*nm^2
inline constexpr double m_e = hbar * hbar / (2.0 * 3.8099821161548593e4);

// transverse effective mass in Si
inline constexpr double m_t = 0.19 * m_e;

// 1 kg = 6.241509e24 ueV*ns^2/nm^2
inline constexpr double kg = 6.241509074e24;

inline constexpr double eV = 1.0e6;   // ueV
inline constexpr double meV = 1.0e3;  // ueV
inline constexpr double neV = 1.0e-3; // ueV
inline constexpr double peV = 1.0e-6; // ueV

// angular frequency of an energy quantum: omega = E/hbar [rad/ns]
inline constexpr double omega_of(double energy_ueV) { return energy_ueV / hbar; }

} // namespace shuttlesim::units

#pragma once

#include <vector>

namespace shuttlesim {

// Electron-phonon parameters (SI values as published; converted to the
// ueV/nm/ns system internally).
struct PhononParams {
  double rho_si_kg_m3 = 2330.0;
  double c_l_m_s = 9330.0;
  double c_t_m_s = 5420.0;
  double xi_d_eV = 5.0;
  double xi_u_eV = 8.77;
  double l_dot = 14.0;  // nm
  double pitch = 50.0;  // nm

  void validate() const;
};

enum class FormFactorKind { SameDot, Neighbor };

// Squared orbital form factor for a 2D Gaussian dot of radius l_dot.
// Same-dot: exp(-q_par^2 l^2 / 2). Neighbor (dots 4P apart): the same with
// an extra factor exp(-8 P^2 / l^2).
double form_factor_sq(double q_parallel, double l_dot, FormFactorKind kind,
                      double pitch = 0.0);

// Deformation-potential spectral density S_eps(omega) [1/ns], omega in rad/ns.
// Angular quadrature order is the number of Gauss-Legendre nodes per axis.
double spectral_density_eps(double omega, const PhononParams& p, int quad_order = 48);

// S_t(omega) = S_eps(omega) * exp(-8 P^2 / l_dot^2)
double spectral_density_t(double omega, const PhononParams& p, int quad_order = 48);

// Precomputed S_eps on a log-spaced omega grid (energies 1 neV .. 10 meV,
// 400 points), with monotone piecewise-cubic interpolation in log-log space.
// Below the grid the exact low-frequency omega^3 law is used; S(0) = 0.
class SpectralTable {
public:
  SpectralTable() = default;
  explicit SpectralTable(const PhononParams& p, int n_points = 400, int quad_order = 48);

  double eps(double omega) const;
  double t(double omega) const { return eps(omega) * suppression_; }
  double neighbor_suppression() const { return suppression_; }

private:
  std::vector<double> log_omega_;
  std::vector<double> log_s_;
  std::vector<double> slope_;   // pchip derivatives d(logS)/d(logw)
  double suppression_ = 1.0;
  double omega_min_ = 0.0;
  double s_min_ = 0.0;
};

} // namespace shuttlesim

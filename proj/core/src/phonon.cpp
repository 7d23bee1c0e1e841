#include "shuttlesim/phonon.hpp"

#include "shuttlesim/units.hpp"

#include <cmath>
#include <stdexcept>

namespace shuttlesim {

void PhononParams::validate() const {
  if (rho_si_kg_m3 <= 0 || c_l_m_s <= 0 || c_t_m_s <= 0 || xi_d_eV <= 0 ||
      xi_u_eV <= 0 || l_dot <= 0 || pitch < 0) {
    throw std::invalid_argument("PhononParams: all parameters must be positive");
  }
}

double form_factor_sq(double q_parallel, double l_dot, FormFactorKind kind,
                      double pitch) {
  if (q_parallel < 0.0) throw std::invalid_argument("form_factor_sq: q must be >= 0");
  const double same = std::exp(-0.5 * q_parallel * q_parallel * l_dot * l_dot);
  if (kind == FormFactorKind::SameDot) return same;
  return same * std::exp(-8.0 * pitch * pitch / (l_dot * l_dot));
}

namespace {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev initial guess
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

} // namespace

double spectral_density_eps(double omega, const PhononParams& p, int quad_order) {
  p.validate();
  if (omega < 0.0) throw std::invalid_argument("spectral_density_eps: omega must be >= 0");
  if (omega == 0.0) return 0.0;

  // unit conversions
  const double rho = p.rho_si_kg_m3 * units::kg / 1e27; // ueV ns^2 / nm^5
  const double c_l = p.c_l_m_s;                          // nm/ns
  const double c_t = p.c_t_m_s;
  const double xi_d = p.xi_d_eV * units::eV;             // ueV
  const double xi_u = p.xi_u_eV * units::eV;

  const double q_l = omega / c_l; // 1/nm
  const double q_t = omega / c_t;

  std::vector<double> xu, wu, xp, wp;
  gauss_legendre(quad_order, xu, wu); // u = cos(theta) in [-1, 1]
  gauss_legendre(quad_order, xp, wp); // phi mapped to [0, 2 pi]

  double i0 = 0.0, i2 = 0.0, i4 = 0.0, jj = 0.0;
  for (int a = 0; a < quad_order; ++a) {
    const double u = xu[static_cast<std::size_t>(a)];
    const double sin2 = 1.0 - u * u;
    const double sin_t = std::sqrt(std::max(sin2, 0.0));
    const double ff_l = form_factor_sq(q_l * sin_t, p.l_dot, FormFactorKind::SameDot);
    const double ff_t = form_factor_sq(q_t * sin_t, p.l_dot, FormFactorKind::SameDot);
    double w_phi = 0.0;
    for (int b = 0; b < quad_order; ++b) w_phi += M_PI * wp[static_cast<std::size_t>(b)];
    const double wa = wu[static_cast<std::size_t>(a)] * w_phi;
    i0 += wa * ff_l;
    i2 += wa * u * u * ff_l;
    i4 += wa * u * u * u * u * ff_l;
    jj += wa * sin2 * u * u * ff_t;
  }

  const double bracket =
      (xi_d * xi_d * i0 + 2.0 * xi_d * xi_u * i2 + xi_u * xi_u * i4) / std::pow(c_l, 5) +
      xi_u * xi_u * jj / std::pow(c_t, 5);
  return omega * omega * omega / (8.0 * M_PI * M_PI * rho * units::hbar) * bracket;
}

double spectral_density_t(double omega, const PhononParams& p, int quad_order) {
  return spectral_density_eps(omega, p, quad_order) *
         std::exp(-8.0 * p.pitch * p.pitch / (p.l_dot * p.l_dot));
}

SpectralTable::SpectralTable(const PhononParams& p, int n_points, int quad_order) {
  p.validate();
  if (n_points < 4) throw std::invalid_argument("SpectralTable: too few points");
  suppression_ = std::exp(-8.0 * p.pitch * p.pitch / (p.l_dot * p.l_dot));

  const double e_lo = 1e-3; // ueV (1 neV)
  const double e_hi = 1e4;  // ueV (10 meV)
  log_omega_.resize(static_cast<std::size_t>(n_points));
  log_s_.resize(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double e = e_lo * std::pow(e_hi / e_lo, static_cast<double>(i) / (n_points - 1));
    const double omega = units::omega_of(e);
    log_omega_[static_cast<std::size_t>(i)] = std::log(omega);
    log_s_[static_cast<std::size_t>(i)] =
        std::log(spectral_density_eps(omega, p, quad_order));
  }
  omega_min_ = std::exp(log_omega_.front());
  s_min_ = std::exp(log_s_.front());

  // Fritsch-Carlson monotone cubic derivatives
  const auto n = static_cast<std::size_t>(n_points);
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = log_omega_[i + 1] - log_omega_[i];
    d[i] = (log_s_[i + 1] - log_s_[i]) / h[i];
  }
  slope_.resize(n);
  slope_[0] = d[0];
  slope_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      slope_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
}

double SpectralTable::eps(double omega) const {
  if (log_omega_.empty()) throw std::logic_error("SpectralTable: not initialized");
  if (omega <= 0.0) return 0.0;
  if (omega < omega_min_) {
    // low-frequency limit: form factors -> 1, pure omega^3 law
    const double r = omega / omega_min_;
    return s_min_ * r * r * r;
  }
  const double lw = std::log(omega);
  if (lw >= log_omega_.back()) return std::exp(log_s_.back());
  const auto it = std::upper_bound(log_omega_.begin(), log_omega_.end(), lw);
  const std::size_t i = static_cast<std::size_t>(it - log_omega_.begin()) - 1;
  const double h = log_omega_[i + 1] - log_omega_[i];
  const double t = (lw - log_omega_[i]) / h;
  const double y0 = log_s_[i], y1 = log_s_[i + 1];
  const double m0 = slope_[i] * h, m1 = slope_[i + 1] * h;
  const double t2 = t * t, t3 = t2 * t;
  const double v = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
                   (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  return std::exp(v);
}

} // namespace shuttlesim

#include "shuttlesim/lindblad.hpp"

#include "shuttlesim/rng.hpp"
#include "shuttlesim/units.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace shuttlesim {

void FivePocketModel::validate() const {
  for (double t : t_hop) {
    if (t < 0.0 || !std::isfinite(t)) {
      throw std::invalid_argument("FivePocketModel: t_hop must be >= 0 and finite");
    }
  }
  for (double e : eps) {
    if (!std::isfinite(e)) throw std::invalid_argument("FivePocketModel: eps not finite");
  }
}

Matrix10cd build_hamiltonian(const FivePocketModel& m) {
  m.validate();
  Matrix10cd h = Matrix10cd::Zero();
  for (int j = 0; j < kPockets; ++j) {
    h(2 * j, 2 * j) = m.eps[static_cast<std::size_t>(j)];
    h(2 * j + 1, 2 * j + 1) = m.eps[static_cast<std::size_t>(j)];
    h(2 * j, 2 * j + 1) = m.delta[static_cast<std::size_t>(j)];
    h(2 * j + 1, 2 * j) = std::conj(m.delta[static_cast<std::size_t>(j)]);
  }
  for (int j = 1; j < kPockets; ++j) {
    const double t = m.t_hop[static_cast<std::size_t>(j - 1)];
    for (int s = 0; s < 2; ++s) {
      h(s, 2 * j + s) += t;
      h(2 * j + s, s) += t;
    }
  }
  return h;
}

EigenSystem diagonalize(const Matrix10cd& h) {
  Eigen::SelfAdjointEigenSolver<Matrix10cd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("diagonalize failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

RateMatrix compute_rates(const EigenSystem& es, const SpectralTable& table) {
  RateMatrix out;
  // site dyads A_j = sum_s |s,j><s,j| and bond operators
  // B_j = sum_s (|s,0><s,j| + h.c.), expressed through eigenvector components.
  for (int n = 0; n < kLevels; ++n) {
    for (int m = 0; m < kLevels; ++m) {
      if (n == m) continue;
      const double gap = es.energies[n] - es.energies[m];
      if (gap <= 0.0) continue; // zero-temperature: emission only
      const double omega = gap / units::hbar;
      double me_eps = 0.0;
      double me_t = 0.0;
      for (int j = 0; j < kPockets; ++j) {
        std::complex<double> a{0.0, 0.0};
        for (int s = 0; s < 2; ++s) {
          a += std::conj(es.vectors(2 * j + s, n)) * es.vectors(2 * j + s, m);
        }
        me_eps += std::norm(a);
        if (j > 0) {
          std::complex<double> b{0.0, 0.0};
          for (int s = 0; s < 2; ++s) {
            b += std::conj(es.vectors(s, n)) * es.vectors(2 * j + s, m);
            b += std::conj(es.vectors(2 * j + s, n)) * es.vectors(s, m);
          }
          me_t += std::norm(b);
        }
      }
      out.gamma(n, m) = me_eps * table.eps(omega) + me_t * table.t(omega);
    }
  }
  return out;
}

Matrix10d population_generator(const RateMatrix& rates) {
  Matrix10d g = rates.gamma.transpose();
  for (int n = 0; n < kLevels; ++n) {
    g(n, n) = -rates.gamma.row(n).sum();
  }
  return g;
}

Matrix10cd lindblad_step(const Matrix10cd& rho, const EigenSystem& es,
                         const RateMatrix& rates, double dt) {
  const Matrix10cd rho_e = es.vectors.adjoint() * rho * es.vectors;

  Vector10d out_rate;
  for (int n = 0; n < kLevels; ++n) out_rate[n] = rates.gamma.row(n).sum();
  const double total_rate = out_rate.sum();

  Vector10d pops = rho_e.diagonal().real();
  if (total_rate * dt > 1e-14) {
    const Matrix10d prop = (population_generator(rates) * dt).exp();
    pops = prop * pops;
  }

  Matrix10cd next = Matrix10cd::Zero();
  for (int n = 0; n < kLevels; ++n) {
    next(n, n) = pops[n];
    for (int m = 0; m < kLevels; ++m) {
      if (n == m) continue;
      const double omega_nm = (es.energies[n] - es.energies[m]) / units::hbar;
      const double decay = 0.5 * (out_rate[n] + out_rate[m]);
      next(n, m) = rho_e(n, m) *
                   std::exp(std::complex<double>(-decay * dt, -omega_nm * dt));
    }
  }
  Matrix10cd back = es.vectors * next * es.vectors.adjoint();
  return 0.5 * (back + back.adjoint());
}

void ShuttleConfig::validate() const {
  if (velocity <= 0.0) throw std::invalid_argument("ShuttleConfig: velocity must be > 0");
  if (distance <= 0.0) throw std::invalid_argument("ShuttleConfig: distance must be > 0");
  if (t0 <= 0.0) throw std::invalid_argument("ShuttleConfig: t0 must be > 0");
  if (l_dot <= 0.0 || pitch <= 0.0) {
    throw std::invalid_argument("ShuttleConfig: lengths must be > 0");
  }
}

namespace {

struct ShuttleTracks {
  // epsilon and valley lines at y = 0, +4P, -4P; tunnel lines at y = 0, +2P, -2P
  std::array<SampledField1D, 3> eps;       // alloy + gate combined
  std::array<ComplexField1D, 3> valley;
  std::array<SampledField1D, 3> tunnel;
};

SampledField1D make_line(double x0, double dx, Eigen::VectorXd v) {
  SampledField1D f;
  f.x0 = x0;
  f.dx = dx;
  f.values = std::move(v);
  return f;
}

ShuttleTracks build_tracks(const ShuttleConfig& c) {
  const double dx = c.l_dot / 5.0;
  const double span = 4.0 * c.pitch + 4.0 * dx;
  const double x0 = -span;
  const double x1 = c.distance + span;
  const int n = static_cast<int>(std::ceil((x1 - x0) / dx)) + 1;

  const double sigma_t = (c.sigma_t < 0.0) ? c.t0 / 10.0 : c.sigma_t;
  const KernelSpec k_valley{c.sigma_delta * c.sigma_delta / 2.0, c.l_dot};
  const KernelSpec k_alloy{c.sigma_delta * c.sigma_delta, c.l_dot};
  const KernelSpec k_gate{c.sigma_eps * c.sigma_eps, c.pitch};
  const KernelSpec k_tun{std::log1p(sigma_t * sigma_t / (c.t0 * c.t0)), c.pitch};

  ShuttleTracks tr;
  for (std::size_t line = 0; line < 3; ++line) {
    const Eigen::VectorXd alloy =
        sample_gaussian_line(n, dx, k_alloy, derive_seed(c.seed, "eps_alloy", line));
    const Eigen::VectorXd gate =
        sample_gaussian_line(n, dx, k_gate, derive_seed(c.seed, "eps_gate", line));
    tr.eps[line] = make_line(x0, dx, alloy + gate);
    tr.valley[line].re = make_line(
        x0, dx, sample_gaussian_line(n, dx, k_valley, derive_seed(c.seed, "valley.re", line)));
    tr.valley[line].im = make_line(
        x0, dx, sample_gaussian_line(n, dx, k_valley, derive_seed(c.seed, "valley.im", line)));
    tr.tunnel[line] = make_line(
        x0, dx,
        (sample_gaussian_line(n, dx, k_tun, derive_seed(c.seed, "tunnel", line)).array())
                .exp()
                .matrix() *
            c.t0);
  }
  return tr;
}

FivePocketModel model_at(const ShuttleTracks& tr, const ShuttleConfig& c, double x) {
  const double p4 = 4.0 * c.pitch;
  const double p2 = 2.0 * c.pitch;
  FivePocketModel m;
  // pockets: 0 center (x,0); 1 (x+4P,0); 2 (x-4P,0); 3 (x,+4P); 4 (x,-4P)
  m.eps[0] = tr.eps[0].at(x);
  m.eps[1] = tr.eps[0].at(x + p4);
  m.eps[2] = tr.eps[0].at(x - p4);
  m.eps[3] = tr.eps[1].at(x);
  m.eps[4] = tr.eps[2].at(x);
  m.delta[0] = tr.valley[0].at(x);
  m.delta[1] = tr.valley[0].at(x + p4);
  m.delta[2] = tr.valley[0].at(x - p4);
  m.delta[3] = tr.valley[1].at(x);
  m.delta[4] = tr.valley[2].at(x);
  m.t_hop[0] = tr.tunnel[0].at(x + p2);
  m.t_hop[1] = tr.tunnel[0].at(x - p2);
  m.t_hop[2] = tr.tunnel[1].at(x);
  m.t_hop[3] = tr.tunnel[2].at(x);
  return m;
}

// local valley ground/excited projectors of the central pocket
std::pair<double, double> central_populations(const Matrix10cd& rho,
                                              std::complex<double> delta) {
  const double mag = std::abs(delta);
  Eigen::Vector2cd g, e;
  if (mag < 1e-300) {
    g << 1.0, 0.0;
    e << 0.0, 1.0;
  } else {
    const std::complex<double> ph = delta / mag;
    g << M_SQRT1_2, -M_SQRT1_2 * std::conj(ph);
    e << M_SQRT1_2, M_SQRT1_2 * std::conj(ph);
  }
  const Eigen::Matrix2cd block = rho.topLeftCorner<2, 2>();
  const double pg = std::real((g.adjoint() * block * g)(0, 0));
  const double pe = std::real((e.adjoint() * block * e)(0, 0));
  return {pg, pe};
}

} // namespace

ShuttleRun run_shuttle(const ShuttleConfig& config, const SpectralTable& table) {
  config.validate();
  const ShuttleTracks tracks = build_tracks(config);

  const double dx_step = std::min(config.l_dot, config.pitch) / 10.0;
  const double dt = dx_step / config.velocity;
  const auto n_steps = static_cast<long>(std::ceil(config.distance / dx_step));

  ShuttleRun run;
  run.config = config;
  run.min_eigenvalue = 0.0;

  Matrix10cd rho = Matrix10cd::Zero();
  {
    const std::complex<double> d0 = tracks.valley[0].at(0.0);
    const double mag = std::abs(d0);
    Eigen::Vector2cd g;
    if (mag < 1e-300) {
      g << 1.0, 0.0;
    } else {
      g << M_SQRT1_2, -M_SQRT1_2 * std::conj(d0 / mag);
    }
    rho.topLeftCorner<2, 2>() = g * g.adjoint();
  }

  double next_record = 0.0;
  const auto record = [&](double x, bool resonance) {
    ShuttleTraceRow row;
    row.x = x;
    const auto [pg, pe] = central_populations(rho, tracks.valley[0].at(x));
    row.pop_d1_g = pg;
    row.pop_d1_e = pe;
    for (int j = 1; j < kPockets; ++j) {
      row.pop_neighbor[static_cast<std::size_t>(j - 1)] =
          std::real(rho(2 * j, 2 * j) + rho(2 * j + 1, 2 * j + 1));
    }
    row.trace = std::real(rho.trace());
    Eigen::SelfAdjointEigenSolver<Matrix10cd> es(rho, Eigen::EigenvaluesOnly);
    row.min_eig = es.eigenvalues().minCoeff();
    row.resonance = resonance;
    run.min_eigenvalue = std::min(run.min_eigenvalue, row.min_eig);
    run.max_trace_error = std::max(run.max_trace_error, std::abs(row.trace - 1.0));
    run.max_hermiticity_error = std::max(
        run.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    run.trace.push_back(row);
  };
  record(0.0, false);
  next_record = config.record_stride;

  bool crossing_accum = false;
  for (long step = 0; step < n_steps; ++step) {
    const double x_begin = static_cast<double>(step) * dx_step;
    const double x_end = std::min(x_begin + dx_step, config.distance);
    const double x_mid = 0.5 * (x_begin + x_end);

    const FivePocketModel mid = model_at(tracks, config, x_mid);
    double min_gap = std::abs(mid.eps[1] - mid.eps[0]);
    for (int j = 2; j < kPockets; ++j) {
      min_gap = std::min(min_gap,
                         std::abs(mid.eps[static_cast<std::size_t>(j)] - mid.eps[0]));
    }
    const bool near_resonance = min_gap < config.resonance_window;
    const int subs = near_resonance ? config.resonance_substeps : 1;
    const double sub_dx = (x_end - x_begin) / subs;
    const double sub_dt = dt * (x_end - x_begin) / dx_step / subs;

    // a crossing happened if a center-neighbor detuning changes sign (or dips
    // within the hybridization width 2 t_p) inside this step
    const FivePocketModel mb = model_at(tracks, config, x_begin);
    const FivePocketModel me = model_at(tracks, config, x_end);
    for (int j = 1; j < kPockets; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double db = mb.eps[ju] - mb.eps[0];
      const double de = me.eps[ju] - me.eps[0];
      const double width = 2.0 * std::abs(mid.t_hop[ju - 1]);
      if (db * de <= 0.0 || std::abs(db) < width || std::abs(de) < width) {
        crossing_accum = true;
      }
    }

    for (int s = 0; s < subs; ++s) {
      const double xm = x_begin + (s + 0.5) * sub_dx;
      const FivePocketModel m = model_at(tracks, config, xm);
      const Matrix10cd h = build_hamiltonian(m);
      const EigenSystem es = diagonalize(h);
      const RateMatrix rates = compute_rates(es, table);
      rho = lindblad_step(rho, es, rates, sub_dt);
    }

    if (x_end >= next_record - 1e-9 || step + 1 == n_steps) {
      record(x_end, crossing_accum);
      crossing_accum = false;
      while (next_record <= x_end + 1e-9) next_record += config.record_stride;
    }
  }

  double leak = 0.0;
  for (int j = 1; j < kPockets; ++j) {
    leak += std::real(rho(2 * j, 2 * j) + rho(2 * j + 1, 2 * j + 1));
  }
  run.leakage = leak;
  run.fidelity =
      std::real(rho(0, 0) + rho(1, 1));
  return run;
}

ShuttleRun run_shuttle(const ShuttleConfig& config) {
  PhononParams p;
  p.l_dot = config.l_dot;
  p.pitch = config.pitch;
  return run_shuttle(config, SpectralTable(p));
}

} // namespace shuttlesim

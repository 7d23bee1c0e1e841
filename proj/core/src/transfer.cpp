#include "shuttlesim/transfer.hpp"

#include "shuttlesim/rng.hpp"
#include "shuttlesim/units.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace shuttlesim {

void TransferSchedule::validate() const {
  if (tau_tot <= 0.0) throw std::invalid_argument("TransferSchedule: tau_tot must be > 0");
  if (t0 < 0.0) throw std::invalid_argument("TransferSchedule: t0 must be >= 0");
  if (settle < 0.0) throw std::invalid_argument("TransferSchedule: settle must be >= 0");
}

std::pair<double, double> TransferSchedule::eval(double tau) const {
  if (tau < 0.0) throw std::invalid_argument("TransferSchedule: negative tau");
  if (tau >= tau_tot) return {epsilon0, 0.0};
  const double eps = epsilon0 * (-1.0 + 2.0 * tau / tau_tot);
  const double tc = t0 * std::sin(M_PI * tau / tau_tot);
  return {eps, tc};
}

Matrix4cd build_tilde_H(const ChannelValleyParams& p) {
  using namespace std::complex_literals;
  const double abs_L = std::abs(p.delta_L);
  const double abs_R = std::abs(p.delta_R);
  const double phi_L = std::arg(p.delta_L);
  const double phi_R = std::arg(p.delta_R);
  const double dphi = phi_L - phi_R;
  const double half_tc = 0.5 * p.t_c;

  const std::complex<double> t_gg = half_tc * (std::exp(-1i * dphi) + 1.0);
  const std::complex<double> t_ee = half_tc * (std::exp(1i * dphi) + 1.0);
  const std::complex<double> t_eg = half_tc * (std::exp(1i * phi_L) - std::exp(1i * phi_R));
  const std::complex<double> t_ge = half_tc * (std::exp(-1i * phi_R) - std::exp(-1i * phi_L));

  const double half_eps = 0.5 * p.epsilon;
  Matrix4cd h = Matrix4cd::Zero();
  h(0, 0) = half_eps + p.eps_offset_L + abs_L;
  h(1, 1) = half_eps + p.eps_offset_L - abs_L;
  h(2, 2) = -half_eps + p.eps_offset_R + abs_R;
  h(3, 3) = -half_eps + p.eps_offset_R - abs_R;
  h(0, 2) = t_ee;
  h(0, 3) = t_eg;
  h(1, 2) = t_ge;
  h(1, 3) = t_gg;
  h(2, 0) = std::conj(t_ee);
  h(3, 0) = std::conj(t_eg);
  h(2, 1) = std::conj(t_ge);
  h(3, 1) = std::conj(t_gg);
  return h;
}

Eigen::Matrix2cd valley_rotation(double phi) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd u;
  const double inv_sqrt2 = M_SQRT1_2;
  u << inv_sqrt2, inv_sqrt2 * std::exp(1i * phi),
      -inv_sqrt2 * std::exp(-1i * phi), inv_sqrt2;
  return u;
}

Eigen::Matrix2cd gauge_block(double phi, double phi_dot) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd g;
  const double a = -0.5 * units::hbar * phi_dot;
  g << a, a * std::exp(1i * phi), a * std::exp(-1i * phi), -a;
  return g;
}

namespace {

Eigen::Matrix2cd numeric_gauge_block(const ComplexField1D& valley, double x, double dx,
                                     double v) {
  const Eigen::Matrix2cd u = valley_rotation(valley.phase_at(x));
  const Eigen::Matrix2cd du_dag = (valley_rotation(valley.phase_at(x + dx)).adjoint() -
                                   valley_rotation(valley.phase_at(x - dx)).adjoint()) /
                                  (2.0 * dx);
  const Eigen::Matrix2cd a =
      std::complex<double>(0.0, -1.0) * units::hbar * v * (u * du_dag);
  return 0.5 * (a + a.adjoint());
}

} // namespace

Matrix4cd gauge_correction(const ChannelTrack& left, const ChannelTrack& right,
                           double x, double dx, double v) {
  const double grid = std::min(left.valley.re.dx, right.valley.re.dx);
  if (dx < 1e-6 * grid) {
    throw std::invalid_argument("gauge_correction: dx below interpolation resolution");
  }
  Matrix4cd g = Matrix4cd::Zero();
  if (v == 0.0) return g;
  g.block<2, 2>(0, 0) = numeric_gauge_block(left.valley, x, dx, v);
  g.block<2, 2>(2, 2) = numeric_gauge_block(right.valley, x, dx, v);
  return g;
}

namespace {

// One 4th-order Magnus step with exact (eigendecomposition) exponential.
Vector4cd magnus4_step(const std::function<Matrix4cd(double)>& hamiltonian,
                       const Vector4cd& psi, double tau, double dt) {
  constexpr double node = 0.2886751345948129; // sqrt(3)/6
  const Matrix4cd h1 = hamiltonian(tau + (0.5 - node) * dt);
  const Matrix4cd h2 = hamiltonian(tau + (0.5 + node) * dt);
  const Matrix4cd comm = h2 * h1 - h1 * h2;
  const Matrix4cd m = 0.5 * (h1 + h2) -
                      std::complex<double>(0.0, 1.0) *
                          (std::sqrt(3.0) * dt / (12.0 * units::hbar)) * comm;
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(m);
  const Eigen::Vector4d w = es.eigenvalues();
  Vector4cd phase;
  for (int i = 0; i < 4; ++i) {
    phase[i] = std::exp(std::complex<double>(0.0, -w[i] * dt / units::hbar));
  }
  return es.eigenvectors() * (phase.asDiagonal() * (es.eigenvectors().adjoint() * psi));
}

} // namespace

void propagate(const std::function<Matrix4cd(double)>& hamiltonian, Vector4cd& psi,
               double tau_begin, double tau_end, const IntegratorOptions& opt,
               std::vector<std::array<double, 5>>* trace, double trace_dt) {
  double tau = tau_begin;
  double dt = std::min(opt.dt_init, tau_end - tau_begin);
  double next_trace = tau_begin;
  const auto record = [&](double t) {
    if (!trace) return;
    trace->push_back({t, std::norm(psi[0]), std::norm(psi[1]), std::norm(psi[2]),
                      std::norm(psi[3])});
  };
  if (trace && trace_dt > 0.0) {
    record(tau);
    next_trace = tau_begin + trace_dt;
  }
  while (tau < tau_end - 1e-12) {
    dt = std::min(dt, tau_end - tau);
    const Vector4cd big = magnus4_step(hamiltonian, psi, tau, dt);
    Vector4cd small = magnus4_step(hamiltonian, psi, tau, 0.5 * dt);
    small = magnus4_step(hamiltonian, small, tau + 0.5 * dt, 0.5 * dt);
    const double err = (big - small).norm();
    const double tol_step = opt.tol * std::max(dt, 1e-6);
    if (err <= tol_step) {
      psi = small;
      tau += dt;
      if (trace && trace_dt > 0.0) {
        while (tau >= next_trace - 1e-12) {
          record(tau);
          next_trace += trace_dt;
        }
      }
      const double norm_err = std::abs(psi.norm() - 1.0);
      if (norm_err > opt.norm_drift_max) {
        throw std::runtime_error("propagate: norm drift exceeds tolerance");
      }
    }
    const double shrink =
        (err > 0.0) ? 0.9 * std::pow(tol_step / err, 0.2) : 2.0;
    dt *= std::clamp(shrink, 0.2, 2.0);
    dt = std::min(dt, opt.dt_max);
    if (dt < 1e-12) throw std::runtime_error("propagate: step size underflow");
  }
  record(tau);
}

TransferOutcome evolve_transfer(const TransferSchedule& s,
                                std::complex<double> delta_L,
                                std::complex<double> delta_R,
                                const EvolveOptions& opt) {
  s.validate();
  const auto hamiltonian = [&](double tau) {
    const auto [eps, tc] = s.eval(tau);
    ChannelValleyParams p;
    p.epsilon = eps;
    p.t_c = tc;
    p.delta_L = delta_L;
    p.delta_R = delta_R;
    return build_tilde_H(p);
  };
  Vector4cd psi = Vector4cd::Zero();
  psi[1] = 1.0; // |g, L>
  TransferOutcome out;
  propagate(hamiltonian, psi, 0.0, s.tau_tot + s.settle, opt.integrator,
            opt.trace_dt > 0.0 ? &out.trace : nullptr, opt.trace_dt);
  out.fidelity = std::norm(psi[3]);
  out.success = (1.0 - out.fidelity) <= opt.success_threshold;
  return out;
}

TransferOutcome evolve_transfer(const TransferSchedule& s, const MovingConfig& mv,
                                const EvolveOptions& opt) {
  s.validate();
  if (mv.v_x < 0.0) throw std::invalid_argument("MovingConfig: v_x must be >= 0");
  if (!mv.landscape || mv.landscape->channels.size() < 2) {
    throw std::invalid_argument("MovingConfig: landscape with two channels required");
  }
  const ChannelTrack& left = mv.landscape->channels[0];
  const ChannelTrack& right = mv.landscape->channels[1];
  const double grid = left.valley.re.dx;
  const double gauge_dx = 0.5 * grid;

  const auto hamiltonian = [&](double tau) {
    const auto [eps, tc] = s.eval(tau);
    const double x = mv.x_start + mv.v_x * tau;
    ChannelValleyParams p;
    p.epsilon = eps;
    p.t_c = tc;
    p.delta_L = left.valley.at(x);
    p.delta_R = right.valley.at(x);
    p.eps_offset_L = left.eps_alloy.at(x) + left.eps_gate.at(x);
    p.eps_offset_R = right.eps_alloy.at(x) + right.eps_gate.at(x);
    Matrix4cd h = build_tilde_H(p);
    if (mv.v_x > 0.0) h += gauge_correction(left, right, x, gauge_dx, mv.v_x);
    return h;
  };
  Vector4cd psi = Vector4cd::Zero();
  psi[1] = 1.0;
  TransferOutcome out;
  IntegratorOptions iopt = opt.integrator;
  if (mv.v_x > 0.0) iopt.dt_max = std::min(iopt.dt_max, grid / mv.v_x);
  propagate(hamiltonian, psi, 0.0, s.tau_tot + s.settle, iopt,
            opt.trace_dt > 0.0 ? &out.trace : nullptr, opt.trace_dt);
  out.fidelity = std::norm(psi[3]);
  out.success = (1.0 - out.fidelity) <= opt.success_threshold;
  return out;
}

TransferOutcome transfer_draw(const TransferSchedule& s, const TransferScenario& scenario,
                              std::uint64_t master_seed, int draw_index,
                              const EvolveOptions& opt) {
  const std::uint64_t seed =
      derive_seed(master_seed, "draw", static_cast<std::uint64_t>(draw_index));
  if (const auto* paused = std::get_if<PausedScenario>(&scenario)) {
    Rng rng(seed);
    const double comp_sigma = paused->sigma_delta * M_SQRT1_2;
    const std::complex<double> dl{comp_sigma * rng.gaussian(), comp_sigma * rng.gaussian()};
    const std::complex<double> dr{comp_sigma * rng.gaussian(), comp_sigma * rng.gaussian()};
    return evolve_transfer(s, dl, dr, opt);
  }
  const auto& moving = std::get<MovingScenario>(scenario);
  LandscapeConfig lc;
  lc.sigma_delta = moving.sigma_delta;
  lc.sigma_eps = moving.sigma_eps;
  lc.l_dot = moving.l_dot;
  lc.pitch = moving.pitch;
  lc.gate_correlated = moving.correlated;
  lc.channel_y = {0.0, moving.channel_separation};
  lc.master_seed = seed;
  const double span = moving.v_x * (s.tau_tot + s.settle);
  const double margin = 4.0 * lc.l_dot / 5.0 + 1.0;
  lc.x_min = -margin;
  lc.x_max = span + margin;
  const LandscapeBundle bundle = sample_landscape_bundle(lc);
  MovingConfig mv;
  mv.v_x = moving.v_x;
  mv.pitch = moving.pitch;
  mv.correlated = moving.correlated;
  mv.landscape = &bundle;
  mv.x_start = 0.0;
  return evolve_transfer(s, mv, opt);
}

McResult monte_carlo_success(const TransferSchedule& s, int n_draws,
                             const TransferScenario& scenario,
                             std::uint64_t master_seed, const EvolveOptions& opt) {
  if (n_draws < 1) throw std::invalid_argument("monte_carlo_success: N must be >= 1");
  McResult res;
  res.n_total = n_draws;
  res.fidelities.reserve(static_cast<std::size_t>(n_draws));
  for (int i = 0; i < n_draws; ++i) {
    const TransferOutcome outcome = transfer_draw(s, scenario, master_seed, i, opt);
    res.fidelities.push_back(outcome.fidelity);
    res.seeds.push_back(derive_seed(master_seed, "draw", static_cast<std::uint64_t>(i)));
    if (outcome.success) ++res.n_success;
  }
  res.p_suc = static_cast<double>(res.n_success) / n_draws;
  res.stderr_binomial = std::sqrt(std::max(res.p_suc * (1.0 - res.p_suc), 0.0) / n_draws);
  return res;
}

} // namespace shuttlesim

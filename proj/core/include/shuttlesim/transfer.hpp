#pragma once

#include "shuttlesim/disorder.hpp"

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace shuttlesim {

// ---------------------------------------------------------------------------
// Four-level channel x valley model for interchannel transfer.
// Basis ordering throughout: {|e,L>, |g,L>, |e,R>, |g,R>}.
// ---------------------------------------------------------------------------

using Matrix4cd = Eigen::Matrix4cd;
using Vector4cd = Eigen::Vector4cd;

struct ChannelValleyParams {
  double epsilon = 0.0;                  // ueV
  double t_c = 0.0;                      // ueV, >= 0
  std::complex<double> delta_L{0.0, 0.0}; // ueV
  std::complex<double> delta_R{0.0, 0.0}; // ueV
  double eps_offset_L = 0.0;             // ueV, channel-local potential disorder
  double eps_offset_R = 0.0;             // ueV
};

struct TransferSchedule {
  double epsilon0 = 500.0; // ueV
  double t0 = 100.0;       // ueV
  double tau_tot = 10.0;   // ns
  double settle = 5.0;     // ns

  void validate() const;
  // epsilon = eps0*(-1 + 2 tau/tau_tot), t_c = t0*sin(pi tau/tau_tot);
  // beyond tau_tot the endpoint values (eps0, 0) are held. Throws on tau < 0.
  std::pair<double, double> eval(double tau) const;
};

// H-tilde of the diagonalized-valley frame, with tunneling elements
// t_gg, t_ee, t_eg, t_ge assembled from the valley phases.
Matrix4cd build_tilde_H(const ChannelValleyParams& p);

// 2x2 valley-diagonalizing rotation for one channel.
Eigen::Matrix2cd valley_rotation(double phi);

// Dynamical frame correction -i hbar U_v dU_v^dag/dtau for a dot moving at
// velocity v through the valley landscape of the two channel tracks.
// The derivative is a central difference at scale `dx`, Hermitized.
Matrix4cd gauge_correction(const ChannelTrack& left, const ChannelTrack& right,
                           double x, double dx, double v);

// Analytic per-channel gauge block -(hbar dphi/dtau / 2) [[1, e^{i phi}],
// [e^{-i phi}, -1]], exposed for verification.
Eigen::Matrix2cd gauge_block(double phi, double phi_dot);

struct MovingConfig {
  double v_x = 1.0;             // m/s == nm/ns
  double pitch = 70.0;          // nm
  bool correlated = true;       // gate-disorder regime
  const LandscapeBundle* landscape = nullptr; // channels[0]=L, channels[1]=R
  double x_start = 0.0;         // nm
};

struct IntegratorOptions {
  double tol = 1e-9;        // local error per step (state 2-norm)
  double dt_init = 1e-2;    // ns
  double dt_max = 0.25;     // ns
  double norm_drift_max = 1e-6;
};

struct TransferOutcome {
  double fidelity = 0.0;
  bool success = false;
  // (tau, pop_eL, pop_gL, pop_eR, pop_gR) when tracing is enabled
  std::vector<std::array<double, 5>> trace;
};

struct EvolveOptions {
  IntegratorOptions integrator;
  double success_threshold = 1e-3; // on 1 - F
  double trace_dt = 0.0;           // ns; 0 disables the population trace
};

// Adaptive 4th-order Magnus propagation of a time-dependent 4x4 Hamiltonian.
// Each accepted step applies the exact exponential of the averaged generator,
// so the evolution is unitary to rounding.
void propagate(const std::function<Matrix4cd(double)>& hamiltonian, Vector4cd& psi,
               double tau_begin, double tau_end, const IntegratorOptions& opt,
               std::vector<std::array<double, 5>>* trace = nullptr, double trace_dt = 0.0);

// Paused transfer: fixed valley couplings per draw.
TransferOutcome evolve_transfer(const TransferSchedule& s,
                                std::complex<double> delta_L,
                                std::complex<double> delta_R,
                                const EvolveOptions& opt = {});

// Moving transfer: valley couplings, potential disorder and the frame
// correction all track the landscape as x = x_start + v tau.
TransferOutcome evolve_transfer(const TransferSchedule& s, const MovingConfig& mv,
                                const EvolveOptions& opt = {});

// ---------------------------------------------------------------------------
// Monte Carlo over disorder draws
// ---------------------------------------------------------------------------

struct PausedScenario {
  double sigma_delta = 56.4; // ueV
};

struct MovingScenario {
  double v_x = 1.0;          // m/s
  double pitch = 70.0;       // nm
  bool correlated = true;
  double sigma_delta = 56.4; // ueV
  double sigma_eps = 1000.0; // ueV
  double l_dot = 14.0;       // nm
  double channel_separation = 100.0; // nm
};

using TransferScenario = std::variant<PausedScenario, MovingScenario>;

struct McResult {
  double p_suc = 0.0;
  double stderr_binomial = 0.0;
  int n_success = 0;
  int n_total = 0;
  std::vector<double> fidelities;
  std::vector<std::uint64_t> seeds;
};

McResult monte_carlo_success(const TransferSchedule& s, int n_draws,
                             const TransferScenario& scenario,
                             std::uint64_t master_seed,
                             const EvolveOptions& opt = {});

// Single draw, exposed so sweep harnesses can fan out draw-by-draw while
// keeping the exact same per-draw sub-seeding.
TransferOutcome transfer_draw(const TransferSchedule& s, const TransferScenario& scenario,
                              std::uint64_t master_seed, int draw_index,
                              const EvolveOptions& opt = {});

} // namespace shuttlesim

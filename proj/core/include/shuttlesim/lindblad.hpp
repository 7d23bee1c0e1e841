#pragma once

#include "shuttlesim/disorder.hpp"
#include "shuttlesim/phonon.hpp"

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace shuttlesim {

// ---------------------------------------------------------------------------
// Ten-level five-pocket model: central pocket d1 plus four neighbors, two
// valley states per pocket. Basis index = 2*j + s with pocket j in 0..4
// (0 = center, 1 = +x, 2 = -x, 3 = +y, 4 = -y) and valley s (0 = z+, 1 = z-).
// ---------------------------------------------------------------------------

inline constexpr int kPockets = 5;
inline constexpr int kLevels = 2 * kPockets;

using Matrix10cd = Eigen::Matrix<std::complex<double>, kLevels, kLevels>;
using Matrix10d = Eigen::Matrix<double, kLevels, kLevels>;
using Vector10d = Eigen::Matrix<double, kLevels, 1>;

struct FivePocketModel {
  std::array<double, kPockets> eps{};                    // ueV
  std::array<double, kPockets - 1> t_hop{};              // ueV, center<->neighbor j+1
  std::array<std::complex<double>, kPockets> delta{};    // ueV

  void validate() const;
};

// H = H_os + H_hop + H_val
Matrix10cd build_hamiltonian(const FivePocketModel& m);

struct RateMatrix {
  Matrix10d gamma = Matrix10d::Zero(); // gamma(n, m): decay n -> m, 1/ns
};

struct EigenSystem {
  Vector10d energies;   // ascending, ueV
  Matrix10cd vectors;   // columns
};

EigenSystem diagonalize(const Matrix10cd& h);

// Fermi-golden-rule rates between instantaneous eigenstates: the on-site
// dyads couple through S_eps and the center<->neighbor bond operators through
// S_t. Zero-temperature bath, so only downhill transitions (E_n > E_m).
RateMatrix compute_rates(const EigenSystem& es, const SpectralTable& table);

// One quasi-static Lindblad step in the eigenbasis: populations evolve under
// the classical generator of the rates (matrix exponential), coherences pick
// up exact phases and decay at half the summed outflow rates of their two
// levels.
Matrix10cd lindblad_step(const Matrix10cd& rho, const EigenSystem& es,
                         const RateMatrix& rates, double dt);

// Classical population generator G of the rate matrix: dp/dt = G p.
// Off-diagonals >= 0, columns sum to zero.
Matrix10d population_generator(const RateMatrix& rates);

// ---------------------------------------------------------------------------
// 2D shuttle run
// ---------------------------------------------------------------------------

struct ShuttleConfig {
  double velocity = 10.0;     // m/s
  double distance = 10000.0;  // nm
  double t0 = 1e-6;           // ueV
  double sigma_t = -1.0;      // ueV; negative means t0/10
  double sigma_delta = 56.4;  // ueV
  double sigma_eps = 1000.0;  // ueV
  double l_dot = 14.0;        // nm
  double pitch = 50.0;        // nm
  std::uint64_t seed = 1;
  double record_stride = 50.0; // nm between recorded trace rows
  int resonance_substeps = 16;
  double resonance_window = 150.0; // ueV

  void validate() const;
};

struct ShuttleTraceRow {
  double x = 0.0;
  double pop_d1_g = 0.0;
  double pop_d1_e = 0.0;
  std::array<double, kPockets - 1> pop_neighbor{};
  double trace = 0.0;
  double min_eig = 0.0;
  bool resonance = false; // step contained a center-neighbor level crossing
};

struct ShuttleRun {
  ShuttleConfig config;
  double fidelity = 0.0;     // central-pocket population at the end
  double leakage = 0.0;      // summed neighbor population at the end
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<ShuttleTraceRow> trace;
};

ShuttleRun run_shuttle(const ShuttleConfig& config, const SpectralTable& table);

// Convenience overload building the spectral table from the config geometry.
ShuttleRun run_shuttle(const ShuttleConfig& config);

} // namespace shuttlesim

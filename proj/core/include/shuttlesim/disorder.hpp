#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shuttlesim {

// ---------------------------------------------------------------------------
// Correlated Gaussian disorder fields on arbitrary point sets.
//
// All fields share the same construction: a Gaussian covariance kernel
//   C(d) = variance * exp(-d^2 / (2 l^2))
// evaluated on a point set, factorized (Cholesky with escalating diagonal
// jitter), and applied to an i.i.d. standard-normal vector drawn from a
// per-field sub-seed.
// ---------------------------------------------------------------------------

struct PointSet {
  std::vector<Eigen::Vector2d> points;   // nm
  std::vector<std::string> labels;       // optional, per point (channel, pocket, ...)

  std::size_t size() const { return points.size(); }
  void validate() const;
};

struct KernelSpec {
  double variance = 0.0;          // ueV^2
  double correlation_length = 1.0; // nm

  void validate() const;
};

struct IllConditionedKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// C_ij = variance * exp(-d_ij^2 / (2 l^2))
Eigen::MatrixXd build_covariance(const PointSet& ps, const KernelSpec& k);

// Lower Cholesky factor of C + jitter*I, escalating jitter from
// 1e-12*variance to 1e-8*variance. Throws IllConditionedKernel on failure.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& cov, double variance);

// values = L * z, z standard normal from `seed`. Deterministic.
Eigen::VectorXd sample_gaussian_field(const PointSet& ps, const KernelSpec& k,
                                      std::uint64_t seed);

// Fast path for a regular 1D grid (n points spaced dx apart): banded
// Cholesky exploiting the decay of the Gaussian kernel. Bit-for-bit
// deterministic for a fixed seed; agrees with the dense route within
// factorization accuracy.
Eigen::VectorXd sample_gaussian_line(int n, double dx, const KernelSpec& k,
                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Concrete fields
// ---------------------------------------------------------------------------

struct ValleyCouplingField {
  PointSet ps;
  Eigen::VectorXcd values;   // Delta, ueV
  double sigma_delta = 0.0;  // ueV
  double l_dot = 0.0;        // nm
  std::uint64_t seed = 0;
};

enum class PotentialSource { Alloy, GateCorrelated, GateUncorrelated };

struct PotentialField {
  PointSet ps;
  Eigen::VectorXd values;    // ueV
  PotentialSource source = PotentialSource::Alloy;
  std::uint64_t seed = 0;
};

struct TunnelField {
  PointSet ps;
  Eigen::VectorXd values;    // ueV, strictly positive
  double t0_mean = 0.0;      // ueV
  double sigma_t = 0.0;      // ueV
  std::uint64_t seed = 0;
};

// Re and Im parts are independent Gaussian fields of variance sigma_delta^2/2
// and correlation length l_dot.
ValleyCouplingField sample_valley_coupling(const PointSet& ps, double sigma_delta,
                                           double l_dot, std::uint64_t seed);

// Alloy disorder: variance sigma_delta^2, length l_dot.
// Gate disorder: variance sigma_eps^2, length pitch.
PotentialField sample_potential(const PointSet& ps, PotentialSource source,
                                double sigma, double corr_length, std::uint64_t seed);

// ln(t_p/t0) is zero-mean Gaussian, variance ln(1 + sigma_t^2/t0^2), length pitch.
TunnelField sample_tunnel(const PointSet& ps, double t0, double sigma_t,
                          double pitch, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Regular 1D tracks with interpolation (what the time evolutions consume)
// ---------------------------------------------------------------------------

struct SampledField1D {
  double x0 = 0.0;           // nm
  double dx = 1.0;           // nm
  Eigen::VectorXd values;

  double x_max() const { return x0 + dx * static_cast<double>(values.size() - 1); }
  // piecewise-cubic (Catmull-Rom), exact at grid nodes; throws std::out_of_range
  double at(double x) const;
};

struct ComplexField1D {
  SampledField1D re, im;

  std::complex<double> at(double x) const { return {re.at(x), im.at(x)}; }
  double magnitude_at(double x) const { return std::abs(at(x)); }
  double phase_at(double x) const { return std::arg(at(x)); }
};

// One shuttling channel's view of the landscape along x.
struct ChannelTrack {
  double y = 0.0;            // nm, transverse position (informational)
  ComplexField1D valley;     // Delta(x), ueV
  SampledField1D eps_alloy;  // ueV
  SampledField1D eps_gate;   // ueV
  SampledField1D tunnel;     // t_p(x), ueV
};

struct LandscapeConfig {
  double sigma_delta = 56.4;   // ueV
  double sigma_eps = 1000.0;   // ueV
  double t0 = 0.1;             // ueV
  double sigma_t = 0.01;       // ueV (default t0/10)
  double l_dot = 14.0;         // nm
  double pitch = 70.0;         // nm
  double x_min = 0.0;          // nm
  double x_max = 1000.0;       // nm
  std::vector<double> channel_y = {0.0, 100.0};
  bool gate_correlated = true;
  bool allow_large_sigma_t = false;
  std::uint64_t master_seed = 1;

  void validate() const;
};

struct LandscapeBundle {
  LandscapeConfig config;
  std::vector<ChannelTrack> channels;
};

// All sub-fields carry independent sub-seeds derived from the master seed.
// Channels are fully independent in Delta and eps_alloy; eps_gate is shared
// across channels in correlated mode and independent otherwise.
LandscapeBundle sample_landscape_bundle(const LandscapeConfig& config);

// Grid spacing used for track fields (and enforced ceiling for interpolation
// quality): l_dot / 5.
double track_spacing(const LandscapeConfig& config);

} // namespace shuttlesim

#include "shuttlesim/disorder.hpp"

#include "shuttlesim/rng.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace shuttlesim {

void PointSet::validate() const {
  if (points.empty()) throw std::invalid_argument("PointSet: empty");
  for (const auto& p : points) {
    if (!p.allFinite()) throw std::invalid_argument("PointSet: non-finite coordinate");
  }
  if (!labels.empty() && labels.size() != points.size()) {
    throw std::invalid_argument("PointSet: label count mismatch");
  }
}

void KernelSpec::validate() const {
  if (variance < 0.0 || !std::isfinite(variance)) {
    throw std::invalid_argument("KernelSpec: variance must be >= 0");
  }
  if (correlation_length <= 0.0 || !std::isfinite(correlation_length)) {
    throw std::invalid_argument("KernelSpec: correlation_length must be > 0");
  }
}

Eigen::MatrixXd build_covariance(const PointSet& ps, const KernelSpec& k) {
  ps.validate();
  k.validate();
  const auto n = static_cast<Eigen::Index>(ps.size());
  const double inv_2l2 = 1.0 / (2.0 * k.correlation_length * k.correlation_length);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cov(i, i) = k.variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d2 = (ps.points[i] - ps.points[j]).squaredNorm();
      const double c = k.variance * std::exp(-d2 * inv_2l2);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  return cov;
}

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& cov, double variance) {
  if (variance == 0.0) return Eigen::MatrixXd::Zero(cov.rows(), cov.cols());
  for (double jitter = 1e-12; jitter <= 1e-8 * 1.0001; jitter *= 10.0) {
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += jitter * variance;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw IllConditionedKernel("covariance kernel not factorizable after jitter escalation");
}

namespace {

Eigen::VectorXd standard_normal(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.gaussian();
  return z;
}

} // namespace

Eigen::VectorXd sample_gaussian_field(const PointSet& ps, const KernelSpec& k,
                                      std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(ps.size());
  if (k.variance == 0.0) {
    k.validate();
    ps.validate();
    return Eigen::VectorXd::Zero(n);
  }
  const Eigen::MatrixXd cov = build_covariance(ps, k);
  const Eigen::MatrixXd L = cholesky_with_jitter(cov, k.variance);
  return L * standard_normal(n, seed);
}

Eigen::VectorXd sample_gaussian_line(int n, double dx, const KernelSpec& k,
                                     std::uint64_t seed) {
  k.validate();
  if (n <= 0) throw std::invalid_argument("sample_gaussian_line: n must be > 0");
  if (dx <= 0.0) throw std::invalid_argument("sample_gaussian_line: dx must be > 0");
  if (k.variance == 0.0) return Eigen::VectorXd::Zero(n);

  // Kernel support: exp(-d^2/2l^2) < 1e-16 beyond d = l*sqrt(32 ln 10) ~ 8.58 l
  const double l = k.correlation_length;
  const int band = std::min(n - 1, static_cast<int>(std::ceil(8.6 * l / dx)));

  // row-banded kernel values: kv[m] = C(m*dx)
  std::vector<double> kv(static_cast<std::size_t>(band) + 1);
  for (int m = 0; m <= band; ++m) {
    const double d = m * dx;
    kv[static_cast<std::size_t>(m)] = k.variance * std::exp(-d * d / (2.0 * l * l));
  }

  // banded Cholesky, packed lower storage: L(i, i-m) at Lb[i][m]
  for (double jitter = 1e-12; jitter <= 1e-8 * 1.0001; jitter *= 10.0) {
    std::vector<std::vector<double>> Lb(static_cast<std::size_t>(n));
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const int bi = std::min(i, band);
      auto& row = Lb[static_cast<std::size_t>(i)];
      row.assign(static_cast<std::size_t>(bi) + 1, 0.0);
      for (int m = bi; m >= 0; --m) {
        const int j = i - m;  // column
        double s = kv[static_cast<std::size_t>(m)];
        if (m == 0) s += jitter * k.variance;
        // subtract sum_k L(i,k) L(j,k) for k < j within both bands
        const int bj = std::min(j, band);
        const auto& rowj = Lb[static_cast<std::size_t>(j)];
        for (int kk = std::max(0, std::max(i - band, j - bj)); kk < j; ++kk) {
          s -= row[static_cast<std::size_t>(i - kk)] * rowj[static_cast<std::size_t>(j - kk)];
        }
        if (m == 0) {
          if (s <= 0.0) { ok = false; break; }
          row[0] = std::sqrt(s);
        } else {
          row[static_cast<std::size_t>(m)] = s / rowj[0];
        }
      }
    }
    if (!ok) continue;
    const Eigen::VectorXd z = standard_normal(n, seed);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
      const int bi = std::min(i, band);
      const auto& row = Lb[static_cast<std::size_t>(i)];
      double s = 0.0;
      for (int m = 0; m <= bi; ++m) s += row[static_cast<std::size_t>(m)] * z[i - m];
      out[i] = s;
    }
    return out;
  }
  throw IllConditionedKernel("1D kernel not factorizable after jitter escalation");
}

ValleyCouplingField sample_valley_coupling(const PointSet& ps, double sigma_delta,
                                           double l_dot, std::uint64_t seed) {
  if (sigma_delta < 0.0) throw std::invalid_argument("sigma_delta must be >= 0");
  KernelSpec k{sigma_delta * sigma_delta / 2.0, l_dot};
  const Eigen::VectorXd re = sample_gaussian_field(ps, k, derive_seed(seed, "valley.re"));
  const Eigen::VectorXd im = sample_gaussian_field(ps, k, derive_seed(seed, "valley.im"));
  ValleyCouplingField f;
  f.ps = ps;
  f.values = re.cast<std::complex<double>>() +
             std::complex<double>(0.0, 1.0) * im.cast<std::complex<double>>();
  f.sigma_delta = sigma_delta;
  f.l_dot = l_dot;
  f.seed = seed;
  return f;
}

PotentialField sample_potential(const PointSet& ps, PotentialSource source,
                                double sigma, double corr_length, std::uint64_t seed) {
  KernelSpec k{sigma * sigma, corr_length};
  PotentialField f;
  f.ps = ps;
  f.values = sample_gaussian_field(ps, k, seed);
  f.source = source;
  f.seed = seed;
  return f;
}

TunnelField sample_tunnel(const PointSet& ps, double t0, double sigma_t,
                          double pitch, std::uint64_t seed) {
  if (t0 <= 0.0) throw std::invalid_argument("sample_tunnel: t0 must be > 0");
  const double log_var = std::log1p(sigma_t * sigma_t / (t0 * t0));
  KernelSpec k{log_var, pitch};
  TunnelField f;
  f.ps = ps;
  f.values = (sample_gaussian_field(ps, k, seed).array()).exp() * t0;
  f.t0_mean = t0;
  f.sigma_t = sigma_t;
  f.seed = seed;
  return f;
}

double SampledField1D::at(double x) const {
  const auto n = values.size();
  if (n == 1) {
    if (std::abs(x - x0) > 1e-9 * std::max(1.0, std::abs(x0))) {
      throw std::out_of_range("SampledField1D: query outside sampled domain");
    }
    return values[0];
  }
  const double tol = 1e-9 * dx;
  if (x < x0 - tol || x > x_max() + tol) {
    throw std::out_of_range("SampledField1D: query outside sampled domain");
  }
  double s = (x - x0) / dx;
  auto i = static_cast<Eigen::Index>(std::floor(s));
  if (i < 0) i = 0;
  if (i > n - 2) i = n - 2;
  const double t = s - static_cast<double>(i);
  // Catmull-Rom with clamped end conditions
  const double p1 = values[i];
  const double p2 = values[i + 1];
  const double p0 = (i > 0) ? values[i - 1] : 2.0 * p1 - p2;
  const double p3 = (i + 2 < n) ? values[i + 2] : 2.0 * p2 - p1;
  const double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
  const double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
  const double c = -0.5 * p0 + 0.5 * p2;
  return ((a * t + b) * t + c) * t + p1;
}

void LandscapeConfig::validate() const {
  if (sigma_delta < 0.0 || sigma_eps < 0.0) {
    throw std::invalid_argument("LandscapeConfig: negative sigma");
  }
  if (l_dot <= 0.0 || pitch <= 0.0) {
    throw std::invalid_argument("LandscapeConfig: lengths must be > 0");
  }
  if (t0 <= 0.0) throw std::invalid_argument("LandscapeConfig: t0 must be > 0");
  if (sigma_t > t0 && !allow_large_sigma_t) {
    throw std::invalid_argument("LandscapeConfig: sigma_t > t0 requires explicit override");
  }
  if (x_max <= x_min) throw std::invalid_argument("LandscapeConfig: empty x range");
  if (channel_y.empty()) throw std::invalid_argument("LandscapeConfig: no channels");
}

double track_spacing(const LandscapeConfig& config) { return config.l_dot / 5.0; }

namespace {

SampledField1D make_track(double x0, double dx, Eigen::VectorXd v) {
  SampledField1D f;
  f.x0 = x0;
  f.dx = dx;
  f.values = std::move(v);
  return f;
}

} // namespace

LandscapeBundle sample_landscape_bundle(const LandscapeConfig& config) {
  config.validate();
  const double dx = track_spacing(config);
  const int n = static_cast<int>(std::ceil((config.x_max - config.x_min) / dx)) + 1;

  const KernelSpec k_valley{config.sigma_delta * config.sigma_delta / 2.0, config.l_dot};
  const KernelSpec k_alloy{config.sigma_delta * config.sigma_delta, config.l_dot};
  const KernelSpec k_gate{config.sigma_eps * config.sigma_eps, config.pitch};
  const KernelSpec k_tun{std::log1p(config.sigma_t * config.sigma_t / (config.t0 * config.t0)),
                         config.pitch};

  LandscapeBundle bundle;
  bundle.config = config;

  const std::uint64_t gate_shared = derive_seed(config.master_seed, "eps_gate.shared");
  for (std::size_t c = 0; c < config.channel_y.size(); ++c) {
    ChannelTrack tr;
    tr.y = config.channel_y[c];
    tr.valley.re = make_track(config.x_min, dx,
        sample_gaussian_line(n, dx, k_valley,
                             derive_seed(config.master_seed, "valley.re", c)));
    tr.valley.im = make_track(config.x_min, dx,
        sample_gaussian_line(n, dx, k_valley,
                             derive_seed(config.master_seed, "valley.im", c)));
    tr.eps_alloy = make_track(config.x_min, dx,
        sample_gaussian_line(n, dx, k_alloy,
                             derive_seed(config.master_seed, "eps_alloy", c)));
    const std::uint64_t gate_seed =
        config.gate_correlated ? gate_shared
                               : derive_seed(config.master_seed, "eps_gate", c);
    tr.eps_gate = make_track(config.x_min, dx,
        sample_gaussian_line(n, dx, k_gate, gate_seed));
    tr.tunnel = make_track(config.x_min, dx,
        (sample_gaussian_line(n, dx, k_tun,
                              derive_seed(config.master_seed, "tunnel", c))
             .array()).exp().matrix() * config.t0);
    bundle.channels.push_back(std::move(tr));
  }
  return bundle;
}

} // namespace shuttlesim

#include "shuttlesim/electrostatics.hpp"

#include "shuttlesim/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace shuttlesim {

namespace {
// hbar^2 / (2 m_e) in meV nm^2
constexpr double kHalfHbarSqOverMe = 38.099821161548593;
} // namespace

void GateLayout::validate() const {
  if (pitch <= 0.0 || gap < 0.0 || pitch <= gap) {
    throw std::invalid_argument("GateLayout: require P > W >= 0");
  }
  if (v_amp < 0.0) throw std::invalid_argument("GateLayout: V_amp must be >= 0");
}

double gate_voltage(const GateLayout& layout, int i, int j, double tau) {
  layout.validate();
  const double phase_x = layout.omega_x * tau - 0.5 * M_PI * i;
  if (layout.dim == GateDim::Clavier1D) {
    return 0.5 * layout.v_amp * std::cos(phase_x);
  }
  const double phase_y = layout.omega_y * tau - 0.5 * M_PI * j;
  return 0.5 * layout.v_amp * (std::cos(phase_x) + std::cos(phase_y));
}

namespace {

// Screened 1D profile: piecewise pattern sampled at spacing h, convolved with
// a normalized Gaussian of width sigma.
std::vector<double> gaussian_convolve(const std::vector<double>& f, double h,
                                      double sigma) {
  const int half = static_cast<int>(std::ceil(5.0 * sigma / h));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int m = -half; m <= half; ++m) {
    const double v = std::exp(-0.5 * (m * h) * (m * h) / (sigma * sigma));
    kernel[static_cast<std::size_t>(m + half)] = v;
    sum += v;
  }
  for (double& v : kernel) v /= sum;
  const int n = static_cast<int>(f.size());
  std::vector<double> out(f.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int m = -half; m <= half; ++m) {
      const int idx = i + m;
      if (idx < 0 || idx >= n) continue;
      acc += kernel[static_cast<std::size_t>(m + half)] * f[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

// per-axis gate coefficient: gate index at coordinate u, or nullopt in a gap
std::optional<int> gate_index(double u, const GateLayout& layout) {
  const double cell = std::floor(u / layout.pitch);
  const double local = u - cell * layout.pitch;
  if (local < 0.5 * layout.gap || local > layout.pitch - 0.5 * layout.gap) {
    return std::nullopt;
  }
  return static_cast<int>(cell);
}

} // namespace

PotentialGrid potential_from_gates(const GateLayout& layout, double tau,
                                   const GridWindow& window,
                                   const PotentialModel& model) {
  layout.validate();
  if (model.grid_h > 1.0 + 1e-12) {
    throw std::invalid_argument("potential_from_gates: grid spacing must be <= 1 nm");
  }
  const double h = model.grid_h;
  const double pad = 5.0 * model.screening_depth;
  const int nx = static_cast<int>(std::round((window.x1 - window.x0) / h)) + 1;
  const int ny = static_cast<int>(std::round((window.y1 - window.y0) / h)) + 1;
  const int px = static_cast<int>(std::ceil(pad / h));

  const int mx = nx + 2 * px;
  const int my = ny + 2 * px;

  // pattern(x, y) = A(x) gy(y) + gx(x) B(y) with A, B the per-axis gate
  // voltage profiles and gx, gy the gate footprint indicators
  std::vector<double> ax(static_cast<std::size_t>(mx), 0.0);
  std::vector<double> gx(static_cast<std::size_t>(mx), 0.0);
  std::vector<double> by(static_cast<std::size_t>(my), 0.0);
  std::vector<double> gy(static_cast<std::size_t>(my), 0.0);
  for (int i = 0; i < mx; ++i) {
    const double x = window.x0 + (i - px) * h;
    if (auto gi = gate_index(x, layout)) {
      gx[static_cast<std::size_t>(i)] = 1.0;
      ax[static_cast<std::size_t>(i)] =
          0.5 * layout.v_amp * std::cos(layout.omega_x * tau - 0.5 * M_PI * *gi);
    }
  }
  if (layout.dim == GateDim::Clavette2D) {
    for (int j = 0; j < my; ++j) {
      const double y = window.y0 + (j - px) * h;
      if (auto gj = gate_index(y, layout)) {
        gy[static_cast<std::size_t>(j)] = 1.0;
        by[static_cast<std::size_t>(j)] =
            0.5 * layout.v_amp * std::cos(layout.omega_y * tau - 0.5 * M_PI * *gj);
      }
    }
  } else {
    std::fill(gy.begin(), gy.end(), 1.0);
  }

  const double sigma = model.screening_depth;
  const auto axs = gaussian_convolve(ax, h, sigma);
  const auto gxs = gaussian_convolve(gx, h, sigma);
  const auto bys = (layout.dim == GateDim::Clavette2D)
                       ? gaussian_convolve(by, h, sigma)
                       : std::vector<double>(static_cast<std::size_t>(my), 0.0);
  const auto gys = (layout.dim == GateDim::Clavette2D)
                       ? gaussian_convolve(gy, h, sigma)
                       : std::vector<double>(static_cast<std::size_t>(my), 1.0);

  PotentialGrid grid;
  grid.x0 = window.x0;
  grid.y0 = window.y0;
  grid.h = h;
  grid.energy.resize(nx, ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = axs[static_cast<std::size_t>(i + px)] *
                           gys[static_cast<std::size_t>(j + px)] +
                       gxs[static_cast<std::size_t>(i + px)] *
                           bys[static_cast<std::size_t>(j + px)];
      grid.energy(i, j) = -model.lever_arm * v;
    }
  }
  return grid;
}

Eigen::Vector2d find_minimum(const PotentialGrid& grid) {
  Eigen::Index ix = 0, iy = 0;
  grid.energy.minCoeff(&ix, &iy);
  return {grid.x_at(static_cast<int>(ix)), grid.y_at(static_cast<int>(iy))};
}

SpectrumResult solve_2d_schrodinger(const PotentialGrid& grid, double mass_ratio,
                                    int k, const SolverOptions& opt) {
  if (k < 1) throw std::invalid_argument("solve_2d_schrodinger: k must be >= 1");
  const int nx = grid.nx();
  const int ny = grid.ny();
  const long n = static_cast<long>(nx) * ny;
  const double t = kHalfHbarSqOverMe / mass_ratio / (grid.h * grid.h); // meV

  using Sparse = Eigen::SparseMatrix<double>;
  Sparse ham(n, n);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(5 * n));
    const auto idx = [&](int i, int j) { return static_cast<long>(i) * ny + j; };
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const long me = idx(i, j);
        trips.emplace_back(me, me, 4.0 * t + grid.energy(i, j));
        if (i > 0) trips.emplace_back(me, idx(i - 1, j), -t);
        if (i < nx - 1) trips.emplace_back(me, idx(i + 1, j), -t);
        if (j > 0) trips.emplace_back(me, idx(i, j - 1), -t);
        if (j < ny - 1) trips.emplace_back(me, idx(i, j + 1), -t);
      }
    }
    ham.setFromTriplets(trips.begin(), trips.end());
  }

  const double sigma = grid.energy.minCoeff() - 1.0;
  Sparse shifted = ham;
  for (long i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLDLT<Sparse> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("solve_2d_schrodinger: factorization failed");
  }

  const int q = k + opt.block_extra;
  Eigen::MatrixXd basis(n, q);
  {
    Rng rng(0x5eed5eedULL);
    for (long i = 0; i < n; ++i) {
      for (int c = 0; c < q; ++c) basis(i, c) = rng.gaussian();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, q);
  }

  SpectrumResult res;
  Eigen::VectorXd ritz(q);
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::MatrixXd w = solver.solve(basis);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, q);
    const Eigen::MatrixXd hb = ham * basis;
    const Eigen::MatrixXd small = basis.transpose() * hb;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
    basis = basis * es.eigenvectors();
    ritz = es.eigenvalues();
    // residuals of the k requested levels
    const Eigen::MatrixXd hv = ham * basis.leftCols(k);
    double max_res = 0.0;
    for (int c = 0; c < k; ++c) {
      max_res = std::max(max_res, (hv.col(c) - ritz[c] * basis.col(c)).norm());
    }
    res.max_residual = max_res;
    if (max_res < opt.residual_tol) break;
  }
  if (res.max_residual >= opt.residual_tol * 10.0) {
    throw std::runtime_error("solve_2d_schrodinger: eigensolver did not converge");
  }
  res.energies.assign(ritz.data(), ritz.data() + k);
  res.e_orb = (k >= 2) ? res.energies[1] - res.energies[0] : 0.0;
  return res;
}

PotentialGrid with_lateral_field(PotentialGrid grid, double e_lat_v_per_m) {
  const double slope = 1e-6 * e_lat_v_per_m; // meV per nm
  const double xc = grid.x0 + 0.5 * grid.h * (grid.nx() - 1);
  for (int i = 0; i < grid.nx(); ++i) {
    const double dx = grid.x_at(i) - xc;
    for (int j = 0; j < grid.ny(); ++j) grid.energy(i, j) += slope * dx;
  }
  return grid;
}

namespace {

// local minima of the potential, clustered within 5 nm
int count_pockets(const PotentialGrid& grid) {
  const double vmin = grid.energy.minCoeff();
  const double vmax = grid.energy.maxCoeff();
  const double depth_cut = vmin + 0.5 * (vmax - vmin);
  std::vector<Eigen::Vector2d> minima;
  for (int i = 1; i + 1 < grid.nx(); ++i) {
    for (int j = 1; j + 1 < grid.ny(); ++j) {
      const double v = grid.energy(i, j);
      if (v > depth_cut) continue;
      if (v <= grid.energy(i - 1, j) && v <= grid.energy(i + 1, j) &&
          v <= grid.energy(i, j - 1) && v <= grid.energy(i, j + 1)) {
        const Eigen::Vector2d p(grid.x_at(i), grid.y_at(j));
        bool merged = false;
        for (const auto& m : minima) {
          if ((m - p).norm() < 5.0) { merged = true; break; }
        }
        if (!merged) minima.push_back(p);
      }
    }
  }
  return static_cast<int>(minima.size());
}

double gap_at(const std::function<PotentialGrid(double)>& builder, double e_lat,
              double mass_ratio, const SolverOptions& opt) {
  const SpectrumResult s = solve_2d_schrodinger(builder(e_lat), mass_ratio, 2, opt);
  return s.energies[1] - s.energies[0];
}

} // namespace

std::optional<TwoLevelFit> extract_tunnel_coupling(
    const std::function<PotentialGrid(double)>& builder, double e_lat_max,
    int n_sweep, double mass_ratio, const SolverOptions& opt) {
  if (n_sweep < 3) throw std::invalid_argument("extract_tunnel_coupling: n_sweep < 3");
  if (count_pockets(builder(0.0)) < 2) return std::nullopt;

  std::vector<double> field(static_cast<std::size_t>(n_sweep));
  std::vector<double> gap(static_cast<std::size_t>(n_sweep));
  int best = 0;
  for (int i = 0; i < n_sweep; ++i) {
    field[static_cast<std::size_t>(i)] =
        -e_lat_max + 2.0 * e_lat_max * i / (n_sweep - 1);
    gap[static_cast<std::size_t>(i)] =
        gap_at(builder, field[static_cast<std::size_t>(i)], mass_ratio, opt);
    if (gap[static_cast<std::size_t>(i)] < gap[static_cast<std::size_t>(best)]) best = i;
  }

  // golden-section refinement around the bracketing triple
  double a = field[static_cast<std::size_t>(std::max(0, best - 1))];
  double b = field[static_cast<std::size_t>(std::min(n_sweep - 1, best + 1))];
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = gap_at(builder, x1, mass_ratio, opt);
  double f2 = gap_at(builder, x2, mass_ratio, opt);
  for (int it = 0; it < 24 && (b - a) > 1e-10 * std::max(1.0, e_lat_max); ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = gap_at(builder, x1, mass_ratio, opt);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = gap_at(builder, x2, mass_ratio, opt);
    }
  }
  const double e_star = (f1 < f2) ? x1 : x2;
  const double min_gap = std::min(f1, f2);

  TwoLevelFit fit;
  fit.e_lat = e_star;
  fit.t_c = 0.5 * min_gap * 1e3;  // meV -> ueV
  fit.epsilon = 0.0;              // at the minimum by construction
  return fit;
}

namespace {

double e_orb_at_pocket(const GateLayout& layout, double tau,
                       Eigen::Vector2d center, const PotentialModel& model,
                       double mass_ratio) {
  const double hw = std::min(1.5 * layout.pitch, 80.0);
  GridWindow w{center.x() - hw, center.x() + hw, center.y() - hw, center.y() + hw};
  PotentialGrid grid = potential_from_gates(layout, tau, w, model);
  // recenter once on the actual minimum
  const Eigen::Vector2d m = find_minimum(grid);
  if ((m - center).norm() > 2.0) {
    w = GridWindow{m.x() - hw, m.x() + hw, m.y() - hw, m.y() + hw};
    grid = potential_from_gates(layout, tau, w, model);
  }
  const SpectrumResult s = solve_2d_schrodinger(grid, mass_ratio, 2);
  return s.e_orb;
}

} // namespace

std::vector<OrbitalScanPoint> orbital_scan(const GateLayout& layout,
                                           ScanTrajectory trajectory, int n_phases,
                                           const PotentialModel& model,
                                           double mass_ratio) {
  layout.validate();
  if (n_phases < 1) throw std::invalid_argument("orbital_scan: n_phases < 1");
  const bool move_x = trajectory != ScanTrajectory::AlongY;
  const bool move_y = trajectory != ScanTrajectory::AlongX;

  GateLayout drive = layout;
  drive.omega_x = move_x ? 1.0 : 0.0;
  drive.omega_y = move_y ? 1.0 : 0.0;

  std::vector<OrbitalScanPoint> out;
  for (int i = 0; i < n_phases; ++i) {
    const double phase = 2.0 * M_PI * i / n_phases;
    const double shift = 2.0 * layout.pitch * phase / M_PI;
    const Eigen::Vector2d center(0.5 * layout.pitch + (move_x ? shift : 0.0),
                                 0.5 * layout.pitch + (move_y ? shift : 0.0));
    OrbitalScanPoint pt;
    pt.phase = phase;
    pt.e_orb = e_orb_at_pocket(drive, phase, center, model, mass_ratio);
    out.push_back(pt);
  }
  return out;
}

WindowCell window_cell(double pitch, double v_amp, const WindowThresholds& thresholds,
                       const PotentialModel& model, double mass_ratio) {
  GateLayout layout;
  layout.pitch = pitch;
  layout.gap = std::min(5.0, 0.2 * pitch);
  layout.v_amp = v_amp;
  layout.dim = GateDim::Clavette2D;

  WindowCell cell;
  cell.pitch = pitch;
  cell.v_amp = v_amp;
  cell.e_orb = e_orb_at_pocket(layout, 0.0,
                               {0.5 * pitch, 0.5 * pitch}, model, mass_ratio);

  const double hw = std::min(1.2 * pitch, 70.0);
  const auto builder = [&](double e_lat) {
    const GridWindow w{0.5 * pitch - hw, 4.5 * pitch + hw,
                       0.5 * pitch - hw, 0.5 * pitch + hw};
    return with_lateral_field(potential_from_gates(layout, 0.0, w, model), e_lat);
  };
  // tiny tunnel gaps need eigenvalues well below the default tolerance
  SolverOptions tight;
  tight.residual_tol = 1e-10;
  const auto fit = extract_tunnel_coupling(builder, 500.0, 41, mass_ratio, tight);
  cell.t_p = fit ? fit->t_c * 1e-3 : 0.0; // ueV -> meV
  cell.in_window = cell.e_orb > thresholds.e_orb_min && cell.t_p < thresholds.t_p_max;
  return cell;
}

std::vector<WindowCell> operating_window(const std::vector<double>& pitches,
                                         const std::vector<double>& v_amps,
                                         const WindowThresholds& thresholds,
                                         const PotentialModel& model,
                                         double mass_ratio) {
  std::vector<WindowCell> cells;
  cells.reserve(pitches.size() * v_amps.size());
  for (double p : pitches) {
    for (double v : v_amps) {
      cells.push_back(window_cell(p, v, thresholds, model, mass_ratio));
    }
  }
  return cells;
}

} // namespace shuttlesim

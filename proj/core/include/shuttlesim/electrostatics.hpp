#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace shuttlesim {

// ---------------------------------------------------------------------------
// Model gate electrostatics: sinusoidal clavier/clavette voltages, a screened
// model potential in the quantum well, a 2D finite-difference Schrodinger
// solver, and two-level tunnel-coupling extraction.
// ---------------------------------------------------------------------------

enum class GateDim { Clavier1D, Clavette2D };

struct GateLayout {
  double pitch = 50.0;    // nm, P
  double gap = 5.0;       // nm, W
  double v_amp = 100.0;   // mV
  GateDim dim = GateDim::Clavette2D;
  double omega_x = 0.0;   // rad/ns
  double omega_y = 0.0;   // rad/ns

  void validate() const;
  // conveyor velocity of the moving pocket along each axis
  double v_x() const { return 2.0 * omega_x * pitch / M_PI; }
  double v_y() const { return 2.0 * omega_y * pitch / M_PI; }
};

// Eq.-style sinusoidal drive; phase steps of pi/2 between neighboring gates
// give a four-gate unit cell along each axis (V_i == V_{i+4}).
double gate_voltage(const GateLayout& layout, int i, int j, double tau);

struct PotentialGrid {
  double x0 = 0.0, y0 = 0.0; // nm, position of grid node (0,0)
  double h = 1.0;            // nm
  Eigen::MatrixXd energy;    // meV; energy(ix, iy)

  int nx() const { return static_cast<int>(energy.rows()); }
  int ny() const { return static_cast<int>(energy.cols()); }
  double x_at(int ix) const { return x0 + h * ix; }
  double y_at(int iy) const { return y0 + h * iy; }
};

struct PotentialModel {
  double screening_depth = 40.0;    // nm, gate-to-well distance
  double lever_arm = 0.1;           // meV per mV; positive V lowers energy
  double grid_h = 1.0;              // nm, must be <= 1
};

struct GridWindow {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0; // nm
};

// Piecewise-constant gate-voltage pattern convolved with a Gaussian screening
// kernel of width `screening_depth`, scaled by the lever arm.
PotentialGrid potential_from_gates(const GateLayout& layout, double tau,
                                   const GridWindow& window,
                                   const PotentialModel& model = {});

// position of the grid minimum (nm)
Eigen::Vector2d find_minimum(const PotentialGrid& grid);

struct SpectrumResult {
  std::vector<double> energies; // meV, ascending
  double e_orb = 0.0;           // E1 - E0, meV
  double max_residual = 0.0;    // ||H psi - E psi|| over reported levels
};

struct SolverOptions {
  int max_iterations = 400;
  double residual_tol = 1e-8; // meV
  int block_extra = 4;
};

// Lowest-k eigenvalues of -hbar^2/(2 m) Lap + V with Dirichlet boundary,
// 5-point Laplacian, shift-inverted block subspace iteration.
SpectrumResult solve_2d_schrodinger(const PotentialGrid& grid, double mass_ratio,
                                    int k, const SolverOptions& opt = {});

struct TwoLevelFit {
  double epsilon = 0.0;  // ueV, detuning offset at the sweep minimum
  double t_c = 0.0;      // ueV, min gap / 2
  double e_lat = 0.0;    // V/m at the minimum gap
};

// Builder returns the double-pocket potential with a lateral field applied
// (E_lat in V/m, tilt 1e-6 * E_lat meV/nm along x). Sweeps n_sweep values in
// [-e_lat_max, e_lat_max], then golden-section refines the minimum gap.
// Returns nullopt if the zero-field potential has no double-pocket structure.
std::optional<TwoLevelFit> extract_tunnel_coupling(
    const std::function<PotentialGrid(double)>& builder, double e_lat_max,
    int n_sweep = 41, double mass_ratio = 0.19, const SolverOptions& opt = {});

// Applies a lateral tilt to a grid (helper for tunnel extraction builders).
PotentialGrid with_lateral_field(PotentialGrid grid, double e_lat_v_per_m);

enum class ScanTrajectory { AlongX, AlongY, Diagonal };

struct OrbitalScanPoint {
  double phase = 0.0;  // drive phase in [0, 2 pi)
  double e_orb = 0.0;  // meV
};

// Orbital splitting of the moving pocket across one drive period.
std::vector<OrbitalScanPoint> orbital_scan(const GateLayout& layout,
                                           ScanTrajectory trajectory, int n_phases,
                                           const PotentialModel& model = {},
                                           double mass_ratio = 0.19);

struct WindowCell {
  double pitch = 0.0;    // nm
  double v_amp = 0.0;    // mV
  double e_orb = 0.0;    // meV
  double t_p = 0.0;      // meV
  bool in_window = false;
};

struct WindowThresholds {
  double e_orb_min = 1.5;  // meV
  double t_p_max = 1e-5;   // meV (10 neV)
};

std::vector<WindowCell> operating_window(const std::vector<double>& pitches,
                                         const std::vector<double>& v_amps,
                                         const WindowThresholds& thresholds = {},
                                         const PotentialModel& model = {},
                                         double mass_ratio = 0.19);

// E_orb and t_p for one (P, V_amp) cell; exposed for parallel sweeps.
WindowCell window_cell(double pitch, double v_amp, const WindowThresholds& thresholds,
                       const PotentialModel& model = {}, double mass_ratio = 0.19);

} // namespace shuttlesim

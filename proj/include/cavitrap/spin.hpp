#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cavitrap/modes.hpp"

namespace cavitrap {

enum class ModeSelection { OutOfPlane, InPlane, All };

const char* to_string(ModeSelection s);

struct SpinDriveConfig {
  std::vector<double> mu;  // drive frequencies, rad/s
  Eigen::MatrixXd rabi;    // N x n_drives, rad/s
  double recoil_energy = 0.0;  // J
  ModeSelection modes = ModeSelection::OutOfPlane;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();  // force direction projected onto the modes
  double resonance_tolerance = 0.0;  // rad/s; 0 means 1e-3 * highest used mode frequency

  /// One drive at mu with the same Rabi frequency on every ion.
  static SpinDriveConfig single(int n_ions, double mu, double rabi, double recoil_energy);
  void validate(int n_ions) const;
};

struct BetaFit {
  double beta = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
};

struct SpinGraph {
  Eigen::MatrixXd J;  // rad/s, symmetric, zero diagonal
  std::optional<BetaFit> beta_fit;
  double af_fraction = 0.0;  // share of pairs with J_ij > 0
};

/// b_im: amplitude of mode m on ion i along drive.direction, over the
/// selected partition. Returns (N x M amplitudes, M squared frequencies).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> selected_modes(const ModeSpectrum& spectrum,
                                                           const SpinDriveConfig& drive);

/// J_ij = E_rec sum_n O_in O_jn sum_m b_im b_jm / (mu_n^2 - w_m^2), divided by hbar.
/// Throws ResonanceError naming (n, m) when |mu_n - w_m| < tolerance.
SpinGraph compute_jij(const ModeSpectrum& spectrum, const EquilibriumResult& eq,
                      const SpinDriveConfig& drive);

double af_fraction(const Eigen::MatrixXd& J);

/// Least squares of ln|J_ij| against ln r_ij over all pairs; beta is minus the
/// slope. Throws FitError on zero couplings or fewer than three distinct
/// distances.
BetaFit fit_beta(const Eigen::MatrixXd& J, const CrystalPositions& pos);
BetaFit fit_beta(const SpinGraph& graph, const EquilibriumResult& eq);

struct BetaSweepEntry {
  double mu = 0.0;  // rad/s
  std::optional<BetaFit> fit;
  double af_fraction = 0.0;
  std::string error;
};

/// One J evaluation and fit per mu (first drive replaced). Failures are
/// recorded per entry.
std::vector<BetaSweepEntry> beta_sweep(const ModeSpectrum& spectrum, const EquilibriumResult& eq,
                                       const std::vector<double>& mu_values,
                                       const SpinDriveConfig& drive_template);

}  // namespace cavitrap

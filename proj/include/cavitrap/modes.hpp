#pragma once

#include <vector>

#include <Eigen/Core>

#include "cavitrap/equilibrium.hpp"

namespace cavitrap {

enum class Partition { OutOfPlane, InPlane };
enum class ModeLabel { None, COM, TiltX, TiltY, SaddleXY, Other };

const char* to_string(Partition p);
const char* to_string(ModeLabel l);

struct Mode {
  double omega_squared = 0.0;  // eigenvalue of the mass-weighted Hessian, rad^2/s^2
  double frequency = 0.0;      // sqrt(|omega_squared|), rad/s
  bool imaginary = false;      // omega_squared < 0
  Partition partition = Partition::InPlane;
  ModeLabel label = ModeLabel::None;
  Eigen::VectorXd vector;      // 3N, unit norm, mass-weighted
};

/// Out-of-plane modes first, then in-plane; each block sorted by descending
/// signed omega^2.
struct ModeSpectrum {
  int n_ions = 0;
  std::vector<Mode> modes;

  std::vector<Mode> partition(Partition p) const;
  /// 3N x 3N, column k is modes[k].vector.
  Eigen::MatrixXd eigenvectors() const;
  /// N x M matrix of z amplitudes b_im of the out-of-plane modes.
  Eigen::MatrixXd out_of_plane_amplitudes() const;
  std::vector<double> out_of_plane_frequencies() const;
};

ModeSpectrum normal_modes(const CrystalPositions& pos, const TrapConfig& trap,
                          const IonSpecies& species);
ModeSpectrum normal_modes(const EquilibriumResult& eq, const TrapConfig& trap,
                          const IonSpecies& species);

/// Eigenvalues of the mass-weighted out-of-plane block only, ascending.
Eigen::VectorXd out_of_plane_eigenvalues(const CrystalPositions& pos, const TrapConfig& trap,
                                         const IonSpecies& species);

struct LowestMode {
  double omega_squared;
  double frequency;  // |omega|
  bool imaginary;
};

LowestMode out_of_plane_lowest(const ModeSpectrum& spectrum);

/// Labels out-of-plane modes by their overlap with {1, x, y, xy} sampled at
/// the ion positions; near-degenerate modes are rotated within their subspace
/// first.
ModeSpectrum label_modes(ModeSpectrum spectrum, const CrystalPositions& pos);

/// min_i |b_i| / max_i |b_i| over the out-of-plane components of a mode.
double amplitude_ratio(const Mode& mode);

}  // namespace cavitrap

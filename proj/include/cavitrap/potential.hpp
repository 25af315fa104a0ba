#pragma once

#include <Eigen/Core>

#include "cavitrap/species.hpp"
#include "cavitrap/trap.hpp"

namespace cavitrap {

/// N ion positions, flat (x1, y1, z1, x2, ...), metres.
class CrystalPositions {
 public:
  CrystalPositions() = default;
  explicit CrystalPositions(Eigen::VectorXd coords);

  /// Embeds in-plane coordinates (x1, y1, x2, y2, ...) at z = 0.
  static CrystalPositions from_planar(const Eigen::VectorXd& xy);

  int n_ions() const { return static_cast<int>(coords_.size() / 3); }
  const Eigen::VectorXd& coords() const { return coords_; }
  double x(int i) const { return coords_[3 * i]; }
  double y(int i) const { return coords_[3 * i + 1]; }
  double z(int i) const { return coords_[3 * i + 2]; }

  /// (x1, y1, x2, y2, ...).
  Eigen::VectorXd planar() const;
  bool is_planar(double tol = 0.0) const;

 private:
  Eigen::VectorXd coords_;
};

struct EnergyBreakdown {
  double coulomb = 0.0;
  double dc = 0.0;
  double optical = 0.0;
  double total = 0.0;
};

EnergyBreakdown total_energy(const CrystalPositions& pos, const TrapConfig& trap,
                             const IonSpecies& species);
Eigen::VectorXd gradient(const CrystalPositions& pos, const TrapConfig& trap,
                         const IonSpecies& species);
Eigen::MatrixXd hessian(const CrystalPositions& pos, const TrapConfig& trap,
                        const IonSpecies& species);

/// Potential restricted to the z = 0 plane over (x1, y1, x2, y2, ...).
class PlanarPotential {
 public:
  PlanarPotential(TrapConfig trap, IonSpecies species);

  double energy(const Eigen::VectorXd& xy) const;
  /// Energy and in-plane gradient in one pass.
  double energy_and_gradient(const Eigen::VectorXd& xy, Eigen::VectorXd& grad) const;
  /// 2N x 2N in-plane block of the Hessian.
  Eigen::MatrixXd hessian(const Eigen::VectorXd& xy) const;

  const TrapConfig& trap() const { return trap_; }
  const IonSpecies& species() const { return species_; }

 private:
  TrapConfig trap_;
  IonSpecies species_;
};

/// Optical energy of one ion, J.
double optical_energy(double x, double y, double z, const OpticalTrapConfig& optical);

}  // namespace cavitrap

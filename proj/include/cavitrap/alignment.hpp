#pragma once

#include <vector>

#include <Eigen/Core>

// Rigid-motion and relabelling gauge for planar configurations
// (x1, y1, x2, y2, ...). Rotations are about the trap axis (origin).
namespace cavitrap {

/// Minimum-cost perfect assignment; result[row] = column.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

Eigen::VectorXd rotate_planar(const Eigen::VectorXd& xy, double angle, bool reflect);

/// Reorders ions: out ion i = in ion order[i].
Eigen::VectorXd permute_planar(const Eigen::VectorXd& xy, const std::vector<int>& order);

struct PlanarAlignment {
  Eigen::VectorXd xy;  // `moving` rotated, possibly reflected, and relabelled
  double angle = 0.0;
  bool reflected = false;
  double distance = 0.0;       // ||reference - xy||
  double max_deviation = 0.0;  // max per-ion displacement
};

/// Rotation/reflection plus ion assignment minimising ||reference - moving||.
PlanarAlignment align_planar(const Eigen::VectorXd& reference, const Eigen::VectorXd& moving);

/// True when the point sets coincide within `tol` after rotation/reflection,
/// using anchor-angle enumeration and greedy nearest-neighbour pairing.
bool same_point_set(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol);

}  // namespace cavitrap

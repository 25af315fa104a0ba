#include "cavitrap/alignment.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cavitrap/errors.hpp"

namespace cavitrap {

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DomainError("assignment cost matrix must be square");
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Potentials formulation, 1-based with a virtual column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> result(n, -1);
  for (int j = 1; j <= n; ++j) result[p[j] - 1] = j - 1;
  return result;
}

Eigen::VectorXd rotate_planar(const Eigen::VectorXd& xy, double angle, bool reflect) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::VectorXd out(xy.size());
  for (Eigen::Index i = 0; i < xy.size() / 2; ++i) {
    const double x = xy[2 * i];
    const double y = reflect ? -xy[2 * i + 1] : xy[2 * i + 1];
    out[2 * i] = c * x - s * y;
    out[2 * i + 1] = s * x + c * y;
  }
  return out;
}

Eigen::VectorXd permute_planar(const Eigen::VectorXd& xy, const std::vector<int>& order) {
  Eigen::VectorXd out(xy.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out[2 * i] = xy[2 * order[i]];
    out[2 * i + 1] = xy[2 * order[i] + 1];
  }
  return out;
}

namespace {

Eigen::MatrixXd squared_distances(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.size() / 2;
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dx = a[2 * i] - b[2 * j];
      const double dy = a[2 * i + 1] - b[2 * j + 1];
      d(i, j) = dx * dx + dy * dy;
    }
  }
  return d;
}

// Best rotation about the origin of `b` onto `a` for a fixed pairing.
double procrustes_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double cross = 0.0, dot = 0.0;
  for (Eigen::Index i = 0; i < a.size() / 2; ++i) {
    cross += b[2 * i] * a[2 * i + 1] - b[2 * i + 1] * a[2 * i];
    dot += b[2 * i] * a[2 * i] + b[2 * i + 1] * a[2 * i + 1];
  }
  return std::atan2(cross, dot);
}

int outermost(const Eigen::VectorXd& xy) {
  int best = 0;
  double r2 = -1.0;
  for (Eigen::Index i = 0; i < xy.size() / 2; ++i) {
    const double v = xy[2 * i] * xy[2 * i] + xy[2 * i + 1] * xy[2 * i + 1];
    if (v > r2) {
      r2 = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

PlanarAlignment align_planar(const Eigen::VectorXd& reference, const Eigen::VectorXd& moving) {
  if (reference.size() != moving.size() || reference.size() % 2 != 0) {
    throw DomainError("alignment needs planar configurations of equal size");
  }
  const int n = static_cast<int>(reference.size() / 2);
  PlanarAlignment best;
  best.distance = std::numeric_limits<double>::infinity();
  if (n == 0) return best;

  const int anchor = outermost(reference);
  const double anchor_angle = std::atan2(reference[2 * anchor + 1], reference[2 * anchor]);
  constexpr int kGrid = 36;
  for (bool reflect : {false, true}) {
    const Eigen::VectorXd base = rotate_planar(moving, 0.0, reflect);
    std::vector<double> seeds;
    for (int j = 0; j < n; ++j) seeds.push_back(anchor_angle - std::atan2(base[2 * j + 1], base[2 * j]));
    for (int k = 0; k < kGrid; ++k) seeds.push_back(2.0 * std::numbers::pi * k / kGrid);
    for (double angle : seeds) {
      std::vector<int> order;
      Eigen::VectorXd aligned;
      for (int refine = 0; refine < 4; ++refine) {
        const Eigen::VectorXd rotated = rotate_planar(base, angle, false);
        order = hungarian(squared_distances(reference, rotated));
        const Eigen::VectorXd paired = permute_planar(base, order);
        angle = procrustes_angle(reference, paired);
        aligned = rotate_planar(paired, angle, false);
      }
      const double dist = (reference - aligned).norm();
      if (dist < best.distance) {
        best.distance = dist;
        best.xy = aligned;
        best.angle = angle;
        best.reflected = reflect;
      }
    }
  }
  best.max_deviation = 0.0;
  for (int i = 0; i < n; ++i) {
    best.max_deviation = std::max(best.max_deviation, std::hypot(reference[2 * i] - best.xy[2 * i],
                                                                 reference[2 * i + 1] - best.xy[2 * i + 1]));
  }
  return best;
}

bool same_point_set(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  if (a.size() != b.size()) return false;
  const int n = static_cast<int>(a.size() / 2);
  if (n == 0) return true;
  const int anchor = outermost(a);
  const double ra = std::hypot(a[2 * anchor], a[2 * anchor + 1]);
  const double anchor_angle = std::atan2(a[2 * anchor + 1], a[2 * anchor]);
  for (bool reflect : {false, true}) {
    const Eigen::VectorXd base = rotate_planar(b, 0.0, reflect);
    for (int j = 0; j < n; ++j) {
      const double rb = std::hypot(base[2 * j], base[2 * j + 1]);
      if (std::abs(rb - ra) > tol) continue;
      const Eigen::VectorXd rotated =
          rotate_planar(base, anchor_angle - std::atan2(base[2 * j + 1], base[2 * j]), false);
      std::vector<char> used(n, 0);
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        int pick = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
          if (used[k]) continue;
          const double d = std::hypot(a[2 * i] - rotated[2 * k], a[2 * i + 1] - rotated[2 * k + 1]);
          if (d < best) {
            best = d;
            pick = k;
          }
        }
        if (best > tol) ok = false;
        else used[pick] = 1;
      }
      if (ok) return true;
    }
  }
  return false;
}

}  // namespace cavitrap

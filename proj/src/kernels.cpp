#include "cavitrap/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <omp.h>

#include "cavitrap/errors.hpp"

namespace cavitrap::kernels {

namespace {

int ion_count(std::span<const double> r) {
  if (r.size() % 3 != 0) throw DomainError("coordinate vector length is not a multiple of 3");
  return static_cast<int>(r.size() / 3);
}

[[noreturn]] void throw_singular(double dist) {
  throw SingularConfigurationError("ions coincide (pair distance " + std::to_string(dist) + " m)");
}

}  // namespace

double min_pair_distance(std::span<const double> r) {
  const int n = ion_count(r);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = r[3 * i] - r[3 * j];
      const double dy = r[3 * i + 1] - r[3 * j + 1];
      const double dz = r[3 * i + 2] - r[3 * j + 2];
      best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
  }
  return best;
}

namespace serial {

double coulomb_energy(std::span<const double> r, double k) {
  const int n = ion_count(r);
  double energy = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = r[3 * i] - r[3 * j];
      const double dy = r[3 * i + 1] - r[3 * j + 1];
      const double dz = r[3 * i + 2] - r[3 * j + 2];
      const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (dist < kMinPairDistance) throw_singular(dist);
      energy += k / dist;
    }
  }
  return energy;
}

void add_coulomb_gradient(std::span<const double> r, double k, std::span<double> g) {
  const int n = ion_count(r);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d[3];
      double dist2 = 0.0;
      for (int a = 0; a < 3; ++a) {
        d[a] = r[3 * i + a] - r[3 * j + a];
        dist2 += d[a] * d[a];
      }
      const double dist = std::sqrt(dist2);
      if (dist < kMinPairDistance) throw_singular(dist);
      const double s = k / (dist2 * dist);
      for (int a = 0; a < 3; ++a) {
        g[3 * i + a] -= s * d[a];
        g[3 * j + a] += s * d[a];
      }
    }
  }
}

void add_coulomb_hessian(std::span<const double> r, double k, Eigen::Ref<Eigen::MatrixXd> h) {
  const int n = ion_count(r);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d[3];
      double dist2 = 0.0;
      for (int a = 0; a < 3; ++a) {
        d[a] = r[3 * i + a] - r[3 * j + a];
        dist2 += d[a] * d[a];
      }
      const double dist = std::sqrt(dist2);
      if (dist < kMinPairDistance) throw_singular(dist);
      const double inv3 = k / (dist2 * dist);
      const double inv5 = 3.0 * inv3 / dist2;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const double block = inv5 * d[a] * d[b] - (a == b ? inv3 : 0.0);
          h(3 * i + a, 3 * i + b) += block;
          h(3 * j + a, 3 * j + b) += block;
          h(3 * i + a, 3 * j + b) -= block;
          h(3 * j + a, 3 * i + b) -= block;
        }
      }
    }
  }
}

void map_columns(const Eigen::MatrixXd& candidates,
                 const std::function<double(const Eigen::VectorXd&)>& f, std::span<double> out) {
  for (Eigen::Index c = 0; c < candidates.cols(); ++c) out[c] = f(candidates.col(c));
}

}  // namespace serial

namespace parallel {

double coulomb_energy(std::span<const double> r, double k) {
  const int n = ion_count(r);
  std::vector<double> rows(n, 0.0);
  double closest = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : closest) if (n >= kParallelThreshold)
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double dx = r[3 * i] - r[3 * j];
      const double dy = r[3 * i + 1] - r[3 * j + 1];
      const double dz = r[3 * i + 2] - r[3 * j + 2];
      const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
      closest = std::min(closest, dist);
      acc += k / dist;
    }
    rows[i] = acc;
  }
  if (closest < kMinPairDistance) throw_singular(closest);
  double energy = 0.0;
  for (double v : rows) energy += v;
  return energy;
}

void add_coulomb_gradient(std::span<const double> r, double k, std::span<double> g) {
  const int n = ion_count(r);
  double closest = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : closest) if (n >= kParallelThreshold)
  for (int i = 0; i < n; ++i) {
    double acc[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double d[3];
      double dist2 = 0.0;
      for (int a = 0; a < 3; ++a) {
        d[a] = r[3 * i + a] - r[3 * j + a];
        dist2 += d[a] * d[a];
      }
      const double dist = std::sqrt(dist2);
      closest = std::min(closest, dist);
      const double s = k / (dist2 * dist);
      for (int a = 0; a < 3; ++a) acc[a] -= s * d[a];
    }
    for (int a = 0; a < 3; ++a) g[3 * i + a] += acc[a];
  }
  if (closest < kMinPairDistance) throw_singular(closest);
}

void add_coulomb_hessian(std::span<const double> r, double k, Eigen::Ref<Eigen::MatrixXd> h) {
  const int n = ion_count(r);
  double closest = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : closest) if (n >= kParallelThreshold)
  for (int i = 0; i < n; ++i) {
    double diag[3][3] = {};
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double d[3];
      double dist2 = 0.0;
      for (int a = 0; a < 3; ++a) {
        d[a] = r[3 * i + a] - r[3 * j + a];
        dist2 += d[a] * d[a];
      }
      const double dist = std::sqrt(dist2);
      closest = std::min(closest, dist);
      const double inv3 = k / (dist2 * dist);
      const double inv5 = 3.0 * inv3 / dist2;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const double block = inv5 * d[a] * d[b] - (a == b ? inv3 : 0.0);
          diag[a][b] += block;
          h(3 * i + a, 3 * j + b) -= block;
        }
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) h(3 * i + a, 3 * i + b) += diag[a][b];
    }
  }
  if (closest < kMinPairDistance) throw_singular(closest);
}

void map_columns(const Eigen::MatrixXd& candidates,
                 const std::function<double(const Eigen::VectorXd&)>& f, std::span<double> out) {
  const Eigen::Index cols = candidates.cols();
  // Exceptions must not escape the parallel region.
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(cols));
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index c = 0; c < cols; ++c) {
    try {
      out[c] = f(candidates.col(c));
    } catch (...) {
      failures[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

}  // namespace parallel

}  // namespace cavitrap::kernels

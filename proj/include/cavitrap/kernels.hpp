#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

// Pairwise Coulomb kernels over flat (x1, y1, z1, x2, ...) coordinates with
// coupling constant `k` (energy = k / r per pair).
//
// serial:   textbook i<j pair loop, Newton's third law applied per pair.
// parallel: one OpenMP task per ion row; every row is summed in fixed j order
//           so the result does not depend on the thread count.
//
// Both throw SingularConfigurationError when any pair is closer than
// kMinPairDistance.
namespace cavitrap::kernels {

inline constexpr double kMinPairDistance = 1e-12;

/// Rows below this ion count run on one thread.
inline constexpr int kParallelThreshold = 24;

namespace serial {

double coulomb_energy(std::span<const double> r, double k);
/// Adds the Coulomb gradient into g (length 3N).
void add_coulomb_gradient(std::span<const double> r, double k, std::span<double> g);
/// Adds the Coulomb Hessian into h (3N x 3N).
void add_coulomb_hessian(std::span<const double> r, double k, Eigen::Ref<Eigen::MatrixXd> h);
/// out[c] = f(column c of candidates).
void map_columns(const Eigen::MatrixXd& candidates,
                 const std::function<double(const Eigen::VectorXd&)>& f,
                 std::span<double> out);

}  // namespace serial

namespace parallel {

double coulomb_energy(std::span<const double> r, double k);
void add_coulomb_gradient(std::span<const double> r, double k, std::span<double> g);
void add_coulomb_hessian(std::span<const double> r, double k, Eigen::Ref<Eigen::MatrixXd> h);
void map_columns(const Eigen::MatrixXd& candidates,
                 const std::function<double(const Eigen::VectorXd&)>& f,
                 std::span<double> out);

}  // namespace parallel

/// Smallest pairwise distance, +inf for fewer than two ions.
double min_pair_distance(std::span<const double> r);

}  // namespace cavitrap::kernels

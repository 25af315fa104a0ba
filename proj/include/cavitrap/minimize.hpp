#pragma once

#include <functional>

#include <Eigen/Core>

namespace cavitrap {

/// f(x) with gradient written into g. May throw; a throwing trial point is
/// treated as an infinitely high energy by the line search.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& g)>;

struct MinimizeOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 20000;
  int history = 12;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with a Wolfe line search.
MinimizeResult lbfgs(const Objective& f, Eigen::VectorXd x0, const MinimizeOptions& options);

/// Newton iterations on a symmetric Hessian with |lambda| clamped from below
/// at `floor * max|lambda|`, so flat directions take bounded steps. Each step
/// is halved until the gradient norm decreases.
MinimizeResult newton_polish(const Objective& f,
                             const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& hess,
                             Eigen::VectorXd x0, double gradient_tolerance, int max_iterations = 100,
                             double floor = 1e-6);

}  // namespace cavitrap

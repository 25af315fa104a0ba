#include "cavitrap/minimize.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/Eigenvalues>

#include "cavitrap/errors.hpp"

namespace cavitrap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  try {
    const double v = f(x, g);
    return std::isfinite(v) && g.allFinite() ? v : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

struct LineSearchResult {
  double step = 0.0;
  double value = kInf;
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  bool ok = false;
};

// Strong Wolfe conditions: bracketing phase followed by a bisection zoom.
LineSearchResult wolfe_search(const Objective& f, const Eigen::VectorXd& x, double f0,
                              const Eigen::VectorXd& g0, const Eigen::VectorXd& dir,
                              double initial_step) {
  constexpr double c1 = 1e-4;
  constexpr double c2 = 0.9;
  const double slope0 = g0.dot(dir);
  if (!(slope0 < 0.0)) return {};

  auto eval = [&](double step) {
    LineSearchResult r;
    r.step = step;
    r.x = x + step * dir;
    r.g.resize(x.size());
    r.value = safe_eval(f, r.x, r.g);
    return r;
  };
  auto sufficient = [&](const LineSearchResult& r) {
    return r.value <= f0 + c1 * r.step * slope0;
  };
  auto curvature = [&](const LineSearchResult& r) {
    return std::abs(r.g.dot(dir)) <= -c2 * slope0;
  };

  auto zoom = [&](LineSearchResult lo, double hi) {
    // lo always satisfies sufficient decrease (or is the origin, step 0).
    for (int j = 0; j < 60; ++j) {
      auto mid = eval(0.5 * (lo.step + hi));
      if (!sufficient(mid) || mid.value >= lo.value) {
        hi = mid.step;
      } else {
        if (curvature(mid)) {
          mid.ok = true;
          return mid;
        }
        if (mid.g.dot(dir) * (hi - lo.step) >= 0.0) hi = lo.step;
        lo = std::move(mid);
      }
      if (std::abs(hi - lo.step) <= 1e-15 * std::max(std::abs(hi), std::abs(lo.step))) break;
    }
    lo.ok = lo.step > 0.0;
    return lo;
  };

  LineSearchResult prev;
  prev.step = 0.0;
  prev.value = f0;
  prev.x = x;
  prev.g = g0;
  double step = initial_step;
  for (int i = 0; i < 60; ++i) {
    auto cur = eval(step);
    if (!sufficient(cur) || (i > 0 && cur.value >= prev.value)) return zoom(std::move(prev), step);
    if (curvature(cur)) {
      cur.ok = true;
      return cur;
    }
    if (cur.g.dot(dir) >= 0.0) {
      const double back = prev.step;
      return zoom(std::move(cur), back);
    }
    prev = std::move(cur);
    step *= 2.0;
  }
  prev.ok = prev.step > 0.0;
  return prev;
}

}  // namespace

MinimizeResult lbfgs(const Objective& f, Eigen::VectorXd x0, const MinimizeOptions& options) {
  MinimizeResult res;
  res.x = std::move(x0);
  Eigen::VectorXd g(res.x.size());
  res.value = safe_eval(f, res.x, g);
  if (!std::isfinite(res.value)) throw ConvergenceError("objective undefined at starting point");

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    res.gradient_norm = g.norm();
    if (res.gradient_norm < options.gradient_tolerance) {
      res.converged = true;
      return res;
    }
    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    Eigen::VectorXd dir = -gamma * q;
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(dir);
      dir -= (alpha[i] + beta) * s_hist[i];
    }
    double initial = 1.0;
    if (s_hist.empty()) {
      dir = -g;
      initial = 1.0 / std::max(1.0, g.norm());
    } else if (g.dot(dir) >= 0.0) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g;
      initial = 1.0 / std::max(1.0, g.norm());
    }

    auto ls = wolfe_search(f, res.x, res.value, g, dir, initial);
    if (!ls.ok) break;  // no further decrease representable

    Eigen::VectorXd s = ls.x - res.x;
    Eigen::VectorXd y = ls.g - g;
    const double sy = s.dot(y);
    res.x = std::move(ls.x);
    g = std::move(ls.g);
    res.value = ls.value;
    if (sy > 1e-300) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
  }
  res.gradient_norm = g.norm();
  res.converged = res.gradient_norm < options.gradient_tolerance;
  return res;
}

MinimizeResult newton_polish(const Objective& f,
                             const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& hess,
                             Eigen::VectorXd x0, double gradient_tolerance, int max_iterations,
                             double floor) {
  MinimizeResult res;
  res.x = std::move(x0);
  Eigen::VectorXd g(res.x.size());
  res.value = safe_eval(f, res.x, g);
  res.gradient_norm = g.norm();
  Eigen::VectorXd gt(res.x.size());
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    if (res.gradient_norm < gradient_tolerance || !std::isfinite(res.value)) break;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess(res.x));
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double lmin = floor * lam.cwiseAbs().maxCoeff();
    if (!(lmin > 0.0)) break;
    Eigen::VectorXd coeff = eig.eigenvectors().transpose() * g;
    for (Eigen::Index i = 0; i < lam.size(); ++i) coeff[i] /= std::max(std::abs(lam[i]), lmin);
    const Eigen::VectorXd step = eig.eigenvectors() * coeff;
    bool moved = false;
    for (double t = 1.0; t > 1e-4; t *= 0.5) {
      Eigen::VectorXd trial = res.x - t * step;
      const double ft = safe_eval(f, trial, gt);
      if (std::isfinite(ft) && gt.norm() < res.gradient_norm) {
        res.x = std::move(trial);
        res.value = ft;
        g = gt;
        res.gradient_norm = g.norm();
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  res.converged = res.gradient_norm < gradient_tolerance;
  return res;
}

}  // namespace cavitrap

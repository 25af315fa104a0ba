#include "cavitrap/transition.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include <Eigen/Eigenvalues>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/modes.hpp"

namespace cavitrap {

double lowest_out_of_plane_eigenvalue(const EquilibriumResult& eq, const TrapConfig& trap,
                                      const IonSpecies& species, double alpha) {
  const TrapConfig scanned = trap.with_depth(depth_for_aspect_ratio(alpha, trap, species));
  return out_of_plane_eigenvalues(eq.positions, scanned, species)[0];
}

double alpha_tr_uniform(const CrystalPositions& pos, const TrapConfig& trap,
                        const IonSpecies& species) {
  const int n = pos.n_ions();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double r = std::hypot(pos.x(i) - pos.x(j), pos.y(i) - pos.y(j));
      const double c = constants::coulomb_constant / (species.mass * r * r * r);
      a(i, j) = -c;
      a(i, i) += c;
    }
  }
  const double lmax =
      n > 0 ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly)
                  .eigenvalues()
                  .maxCoeff()
            : 0.0;
  // In the uniform limit the lattice adds no in-plane curvature.
  return std::sqrt(std::max(lmax, 0.0)) / trap.omega_x_dc();
}

TransitionPoint find_alpha_tr(const EquilibriumResult& eq, const TrapConfig& trap,
                              const IonSpecies& species) {
  TransitionPoint tp;
  tp.n_ions = eq.positions.n_ions();
  tp.stability = eq.stability;
  tp.waist = trap.optical().waist();
  tp.r_max = eq.r_max;
  tp.w0_over_rmax = eq.r_max > 0.0 ? tp.waist / eq.r_max : std::numeric_limits<double>::infinity();

  auto lowest = [&](double alpha) {
    return lowest_out_of_plane_eigenvalue(eq, trap, species, alpha);
  };
  if (tp.n_ions == 1 || lowest(0.0) >= 0.0) {
    tp.alpha_tr = 0.0;
    return tp;
  }
  double lo = 0.0;
  double hi = 0.5;
  while (lowest(hi) <= 0.0) {
    lo = hi;
    hi *= 1.5;
    if (hi > 10.0) {
      if (lowest(10.0) <= 0.0) throw BracketError("no out-of-plane stability for alpha <= 10");
      hi = 10.0;
      break;
    }
  }
  // Tight enough that |omega_lowest| at the root is negligible.
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (lowest(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  tp.alpha_tr = 0.5 * (lo + hi);
  return tp;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw FitError("power-law fit needs at least three points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, a] : points) {
    if (!(n > 0.0) || !(a > 0.0)) throw FitError("power-law fit needs positive data");
    const double x = std::log(n), y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(points.size());
  const double det = m * sxx - sx * sx;
  if (!(std::abs(det) > 1e-300)) throw FitError("power-law fit needs distinct N values");
  PowerLawFit fit;
  fit.exponent = (m * sxy - sx * sy) / det;
  const double intercept = (sy - fit.exponent * sx) / m;
  fit.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (const auto& [n, a] : points) {
    const double r = std::log(a) - intercept - fit.exponent * std::log(n);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

std::vector<WaistSweepEntry> waist_sweep(int n_ions, const TrapConfig& trap_template,
                                         const IonSpecies& species,
                                         const std::vector<double>& waists,
                                         const SweepOptions& options) {
  std::vector<WaistSweepEntry> out(waists.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < waists.size(); ++k) {
    out[k].waist = waists[k];
    try {
      if (!(waists[k] > 0.0)) throw DomainError("waist must be positive");
      const TrapConfig trap = trap_template.with_optical(trap_template.optical().with_waist(waists[k]));
      const auto eqs = find_equilibria(n_ions, trap, species, options.n_restarts, options.seed);
      out[k].point = find_alpha_tr(eqs.front(), trap, species);
    } catch (const std::exception& e) {
      out[k].error = e.what();
    }
  }
  return out;
}

std::vector<TransitionPoint> n_sweep(const std::vector<int>& ns, const TrapConfig& trap,
                                     const IonSpecies& species, const SweepOptions& options) {
  std::vector<TransitionPoint> out(ns.size());
  std::vector<std::exception_ptr> failures(ns.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < ns.size(); ++k) {
    try {
      const auto eqs = find_equilibria(ns[k], trap, species, options.n_restarts, options.seed);
      out[k] = find_alpha_tr(eqs.front(), trap, species);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

std::vector<WaistSweepEntry> alpha_tr_vs_waist(const EquilibriumResult& eq, const TrapConfig& trap,
                                               const IonSpecies& species,
                                               const std::vector<double>& waists) {
  std::vector<WaistSweepEntry> out(waists.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < waists.size(); ++k) {
    out[k].waist = waists[k];
    try {
      const auto t = trap.with_optical(trap.optical().with_waist(waists[k]));
      out[k].point = find_alpha_tr(eq, t, species);
    } catch (const std::exception& e) {
      out[k].error = e.what();
    }
  }
  return out;
}

std::optional<std::size_t> choose_waist(const std::vector<WaistSweepEntry>& entries,
                                        double asymptote, double rel_tol) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (!e.point) continue;
    if (std::abs(e.point->alpha_tr - asymptote) > rel_tol * asymptote) continue;
    if (!best || e.waist < entries[*best].waist) best = k;
  }
  return best;
}

}  // namespace cavitrap

#include "cavitrap/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>

#include "cavitrap/alignment.hpp"
#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/minimize.hpp"

namespace cavitrap {

const char* to_string(Stability s) { return s == Stability::Stable ? "stable" : "metastable"; }

double characteristic_force(const TrapConfig& trap, const IonSpecies& species) {
  const double l = characteristic_length(trap, species);
  return constants::coulomb_constant / (l * l);
}

double crystal_radius(const CrystalPositions& pos) {
  const int n = pos.n_ions();
  if (n == 0) return 0.0;
  double cx = 0.0, cy = 0.0;
  for (int i = 0; i < n; ++i) {
    cx += pos.x(i);
    cy += pos.y(i);
  }
  cx /= n;
  cy /= n;
  double r = 0.0;
  for (int i = 0; i < n; ++i) r = std::max(r, std::hypot(pos.x(i) - cx, pos.y(i) - cy));
  return r;
}

CrystalMetrics crystal_metrics(const CrystalPositions& pos) {
  const int n = pos.n_ions();
  if (n < 2) throw DomainError("minimum spacing needs at least two ions");
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d = std::min(d, std::hypot(pos.x(i) - pos.x(j), pos.y(i) - pos.y(j)));
    }
  }
  return {crystal_radius(pos), d};
}

RingConfiguration ring_configuration(const CrystalPositions& pos, double length_scale) {
  const int n = pos.n_ions();
  RingConfiguration out;
  if (n == 0) return out;
  double cx = 0.0, cy = 0.0;
  for (int i = 0; i < n; ++i) {
    cx += pos.x(i);
    cy += pos.y(i);
  }
  cx /= n;
  cy /= n;
  std::vector<double> radii;
  for (int i = 0; i < n; ++i) radii.push_back(std::hypot(pos.x(i) - cx, pos.y(i) - cy));
  std::sort(radii.begin(), radii.end());

  const double threshold = 0.25 * length_scale;
  int count = 1;
  for (int i = 1; i < n; ++i) {
    const double gap = radii[i] - radii[i - 1];
    if (gap > 0.8 * threshold && gap < 1.25 * threshold) {
      return {{n}, true};
    }
    if (gap > threshold) {
      out.counts.push_back(count);
      count = 1;
    } else {
      ++count;
    }
  }
  out.counts.push_back(count);
  return out;
}

bool is_planar_minimum(const CrystalPositions& pos, const TrapConfig& trap,
                       const IonSpecies& species, double rel_tol) {
  const PlanarPotential potential(trap, species);
  const Eigen::VectorXd lam =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(potential.hessian(pos.planar()),
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double scale = lam.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return false;
  return lam.minCoeff() >= -rel_tol * scale;
}

namespace {

struct Candidate {
  Eigen::VectorXd xy;
  double energy;
  double gradient_norm;
  int restart;
};

Eigen::VectorXd initial_guess(int n, double length, std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = 1.5 * length * std::sqrt(static_cast<double>(n));
  Eigen::VectorXd xy(2 * n);
  for (int i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(unit(rng));
    const double t = 2.0 * std::numbers::pi * unit(rng);
    xy[2 * i] = r * std::cos(t);
    xy[2 * i + 1] = r * std::sin(t);
  }
  return xy;
}

}  // namespace

std::vector<EquilibriumResult> deduplicate(std::vector<EquilibriumResult> results,
                                           double length_scale) {
  std::vector<EquilibriumResult> unique;
  for (auto& r : results) {
    bool merged = false;
    for (auto& u : unique) {
      const double scale = std::max(std::abs(u.energy), std::abs(r.energy));
      if (std::abs(u.energy - r.energy) > 1e-9 * scale) continue;
      // Shell rotation can be nearly free, so equal-energy points along that
      // valley differ in shape but share the ring structure.
      const bool same =
          ring_configuration(u.positions, length_scale).counts ==
              ring_configuration(r.positions, length_scale).counts ||
          same_point_set(u.positions.planar(), r.positions.planar(), 1e-3 * length_scale);
      if (!same) continue;
      u.n_found_duplicates += 1 + r.n_found_duplicates;
      merged = true;
      break;
    }
    if (!merged) unique.push_back(std::move(r));
  }
  return unique;
}

std::vector<EquilibriumResult> find_equilibria(int n_ions, const TrapConfig& trap,
                                               const IonSpecies& species, int n_restarts,
                                               std::uint64_t seed) {
  if (n_ions < 1) throw DomainError("need at least one ion");
  if (n_restarts < 1) throw DomainError("need at least one restart");

  const double length = characteristic_length(trap, species);
  const double energy_unit = constants::coulomb_constant / length;
  const double force_unit = energy_unit / length;
  const PlanarPotential potential(trap, species);

  // Dimensionless objective: coordinates in units of l, energy in e^2/(4 pi eps0 l).
  const Objective scaled = [&](const Eigen::VectorXd& u, Eigen::VectorXd& g) {
    const double e = potential.energy_and_gradient(u * length, g);
    g /= force_unit;
    return e / energy_unit;
  };
  const auto scaled_hessian = [&](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
    return potential.hessian(u * length) * (length * length / energy_unit);
  };
  constexpr double kTolerance = 1e-8;

  std::vector<std::optional<Candidate>> found(n_restarts);
#pragma omp parallel for schedule(dynamic)
  for (int restart = 0; restart < n_restarts; ++restart) {
    try {
      const Eigen::VectorXd start = initial_guess(n_ions, 1.0, seed, restart);
      MinimizeOptions opts;
      opts.gradient_tolerance = kTolerance;
      auto res = lbfgs(scaled, start, opts);
      if (!res.converged) {
        res = newton_polish(scaled, scaled_hessian, res.x, 0.1 * kTolerance);
      } else {
        // Push well below threshold so duplicates agree to 1e-9 in energy.
        auto polished = newton_polish(scaled, scaled_hessian, res.x, 0.1 * kTolerance);
        if (polished.gradient_norm <= res.gradient_norm) res = polished;
        res.converged = res.gradient_norm < kTolerance;
      }
      if (!res.converged) continue;
      const auto pos = CrystalPositions::from_planar(res.x * length);
      if (!is_planar_minimum(pos, trap, species)) continue;
      found[restart] = Candidate{res.x * length, res.value * energy_unit,
                                 res.gradient_norm * force_unit, restart};
    } catch (const Error&) {
      // Restart failed; others may still succeed.
    }
  }

  std::vector<Candidate> ok;
  for (auto& c : found) {
    if (c) ok.push_back(std::move(*c));
  }
  if (ok.empty()) throw ConvergenceError("no restart converged to a planar minimum");
  std::stable_sort(ok.begin(), ok.end(),
                   [](const Candidate& a, const Candidate& b) { return a.energy < b.energy; });

  std::vector<EquilibriumResult> results;
  for (auto& c : ok) {
    EquilibriumResult r;
    r.positions = CrystalPositions::from_planar(c.xy);
    r.energy = c.energy;
    r.gradient_norm = c.gradient_norm;
    results.push_back(std::move(r));
  }
  results = deduplicate(std::move(results), length);
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    r.stability = i == 0 ? Stability::Stable : Stability::Metastable;
    r.rings = ring_configuration(r.positions, length);
    r.r_max = crystal_radius(r.positions);
    r.d_min = n_ions >= 2 ? crystal_metrics(r.positions).d_min
                          : std::numeric_limits<double>::quiet_NaN();
  }
  return results;
}

}  // namespace cavitrap

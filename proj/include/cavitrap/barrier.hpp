#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "cavitrap/equilibrium.hpp"

namespace cavitrap {

/// Zero-valued lengths/limits are filled in from the endpoint distance by
/// resolve().
struct BarrierWalkParams {
  double step = 0.0;          // d, m (default ||x0 - xf|| / 20)
  double neighborhood = 0.0;  // epsilon, m, cube side (default 2.5 d)
  int n_samples = 1000;       // grey-region points per step
  double temperature = 1e-3;  // T_p, K
  int n_paths = 10;
  int max_iterations = 0;     // default 10 ceil(||x0 - xf|| / d)
  int max_batches = 50;       // proposal batches of n_samples per step
  std::uint64_t seed = 0;

  BarrierWalkParams resolve(double endpoint_distance) const;
  void validate() const;
};

struct BarrierPath {
  std::vector<Eigen::VectorXd> points;  // planar configurations (2N)
  std::vector<double> energies;         // J
  Eigen::VectorXd target;               // aligned end point
  double start_energy = 0.0;            // J
  double peak_energy = 0.0;             // J
  double barrier_from_start = 0.0;      // K
  bool converged = false;

  std::vector<double> distances_to(const Eigen::VectorXd& target) const;
  /// Cumulative arc length normalised to [0, 1].
  std::vector<double> arc_length_coordinate() const;
};

/// Uniform samples of {y : ||y - xi||_inf <= eps/2, ||y - xf|| <= ||xi - xf|| - d},
/// one per column. Rejection runs from whichever of the cube and the ball has
/// the smaller volume.
Eigen::MatrixXd sample_grey_region(const Eigen::VectorXd& xi, const Eigen::VectorXd& xf,
                                   const BarrierWalkParams& params, std::mt19937_64& rng);

/// p_j = normalize(exp(-(E_j - E_i) / k_B T)); infinite energies get zero weight.
std::vector<double> boltzmann_weights(const std::vector<double>& energies, double reference_energy,
                                      double temperature);

/// Inverse-CDF draw from normalised weights.
std::size_t select_candidate(const std::vector<double>& weights, std::mt19937_64& rng);

struct ProposedStep {
  Eigen::VectorXd point;
  double energy = 0.0;
  std::size_t n_candidates = 0;
};

/// One walk step from xi toward xf. Throws SamplingError when the grey region
/// yields no usable candidate.
ProposedStep propose_step(const Eigen::VectorXd& xi, double energy_i, const Eigen::VectorXd& xf,
                          const BarrierWalkParams& params, const PlanarPotential& potential,
                          std::mt19937_64& rng);

/// Walk from `start` toward `target` (already aligned). Uses RNG stream
/// (params.seed, path_index).
BarrierPath walk_path(const Eigen::VectorXd& start, const Eigen::VectorXd& target,
                      const BarrierWalkParams& params, const PlanarPotential& potential,
                      int path_index);

/// Aligns xf to x0 by rotation/reflection and relabelling, then walks.
BarrierPath optimize_path(const EquilibriumResult& x0, const EquilibriumResult& xf,
                          const BarrierWalkParams& params, const TrapConfig& trap,
                          const IonSpecies& species, int path_index = 0);

/// params.n_paths independent walks (parallel, per-path RNG streams).
std::vector<BarrierPath> optimize_paths(const EquilibriumResult& x0, const EquilibriumResult& xf,
                                        const BarrierWalkParams& params, const TrapConfig& trap,
                                        const IonSpecies& species);

struct BarrierBound {
  double barrier = 0.0;  // K
  BarrierPath best_path;
  std::size_t best_index = 0;
};

/// Smallest peak over converged paths, relative to the start energy.
/// Throws SamplingError when no path converged.
BarrierBound barrier_upper_bound(const std::vector<BarrierPath>& paths);

}  // namespace cavitrap

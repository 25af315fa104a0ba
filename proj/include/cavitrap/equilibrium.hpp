#pragma once

#include <cstdint>
#include <vector>

#include "cavitrap/potential.hpp"

namespace cavitrap {

enum class Stability { Stable, Metastable };

const char* to_string(Stability s);

struct RingConfiguration {
  std::vector<int> counts;  // innermost shell first
  bool ambiguous = false;   // gap criterion could not separate shells cleanly
};

struct CrystalMetrics {
  double r_max;  // max distance from the centroid, m
  double d_min;  // min pair spacing, m
};

struct EquilibriumResult {
  CrystalPositions positions;  // z = 0 for every ion
  double energy = 0.0;         // J
  Stability stability = Stability::Metastable;
  RingConfiguration rings;
  double r_max = 0.0;
  double d_min = 0.0;        // NaN for a single ion
  int n_found_duplicates = 0;  // further restarts that landed on this minimum
  double gradient_norm = 0.0;  // in-plane, J/m
};

/// Multistart search for planar minima. Results are sorted by energy; the
/// first one is labelled Stable. Deterministic for fixed (seed, n_restarts)
/// whatever the thread count. Throws ConvergenceError when no restart
/// converges to a strict minimum.
std::vector<EquilibriumResult> find_equilibria(int n_ions, const TrapConfig& trap,
                                               const IonSpecies& species, int n_restarts = 50,
                                               std::uint64_t seed = 0);

/// Merges entries describing the same minimum: energy within 1e-9 relative
/// and either the same ring configuration or point sets matching within
/// 1e-3 * length_scale. The lowest-index entry is kept.
std::vector<EquilibriumResult> deduplicate(std::vector<EquilibriumResult> results,
                                           double length_scale);

/// Radial shells about the centroid; a new shell starts where consecutive
/// sorted radii differ by more than 0.25 * length_scale.
RingConfiguration ring_configuration(const CrystalPositions& pos, double length_scale);

/// Throws DomainError for fewer than two ions.
CrystalMetrics crystal_metrics(const CrystalPositions& pos);

double crystal_radius(const CrystalPositions& pos);

/// No in-plane Hessian eigenvalue below -rel_tol * max|lambda|. Flat
/// directions (rigid rotation, nearly free shell rotation) pass; saddles do not.
bool is_planar_minimum(const CrystalPositions& pos, const TrapConfig& trap,
                       const IonSpecies& species, double rel_tol = 1e-6);

/// Force scale e^2 / (4 pi eps0 l^2) used for the convergence threshold.
double characteristic_force(const TrapConfig& trap, const IonSpecies& species);

}  // namespace cavitrap

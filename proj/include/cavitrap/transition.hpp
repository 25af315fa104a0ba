#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavitrap/equilibrium.hpp"

namespace cavitrap {

struct TransitionPoint {
  int n_ions = 0;
  double alpha_tr = 0.0;  // omega_z / omega_x at the origin
  Stability stability = Stability::Stable;
  double w0_over_rmax = 0.0;
  double waist = 0.0;  // m
  double r_max = 0.0;  // m
};

struct PowerLawFit {
  double prefactor = 0.0;
  double exponent = 0.0;
  double residual = 0.0;  // RMS of ln(alpha) - ln(a N^b)
};

/// Lowest eigenvalue of the mass-weighted out-of-plane block with the crystal
/// held at `eq` and the lattice depth chosen to give aspect ratio alpha.
double lowest_out_of_plane_eigenvalue(const EquilibriumResult& eq, const TrapConfig& trap,
                                      const IonSpecies& species, double alpha);

/// Aspect ratio where the lowest out-of-plane mode of the fixed planar
/// configuration softens to zero. Throws BracketError when there is no sign
/// change for alpha <= 10.
TransitionPoint find_alpha_tr(const EquilibriumResult& eq, const TrapConfig& trap,
                              const IonSpecies& species);

/// Uniform-illumination shortcut sqrt(lambda_max(A)) / omega_x with A the
/// mass-weighted Coulomb part of the out-of-plane block (sign flipped).
double alpha_tr_uniform(const CrystalPositions& pos, const TrapConfig& trap,
                        const IonSpecies& species);

/// Least squares of ln alpha against ln N. Throws FitError for fewer than three
/// points or non-positive values.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

struct WaistSweepEntry {
  double waist = 0.0;
  std::optional<TransitionPoint> point;
  std::string error;
};

struct SweepOptions {
  int n_restarts = 50;
  std::uint64_t seed = 0;
};

/// Re-solves the stable equilibrium and alpha_tr for each waist. Failures are
/// recorded per entry.
std::vector<WaistSweepEntry> waist_sweep(int n_ions, const TrapConfig& trap_template,
                                         const IonSpecies& species,
                                         const std::vector<double>& waists,
                                         const SweepOptions& options = {});

/// alpha_tr at each waist with the crystal fixed at `eq` (exact for the node
/// lattice, whose in-plane potential does not depend on the waist).
std::vector<WaistSweepEntry> alpha_tr_vs_waist(const EquilibriumResult& eq, const TrapConfig& trap,
                                               const IonSpecies& species,
                                               const std::vector<double>& waists);

/// Smallest-waist entry whose alpha_tr lies within rel_tol of `asymptote`;
/// nullopt when none does.
std::optional<std::size_t> choose_waist(const std::vector<WaistSweepEntry>& entries,
                                        double asymptote, double rel_tol = 0.02);

/// alpha_tr of the lowest-energy configuration found for each N (any stability).
std::vector<TransitionPoint> n_sweep(const std::vector<int>& ns, const TrapConfig& trap,
                                     const IonSpecies& species, const SweepOptions& options = {});

}  // namespace cavitrap

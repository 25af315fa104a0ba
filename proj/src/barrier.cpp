#include "cavitrap/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cavitrap/alignment.hpp"
#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/kernels.hpp"

namespace cavitrap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::mt19937_64 path_stream(std::uint64_t seed, int path_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path_index), 0xba77u};
  return std::mt19937_64(seq);
}

}  // namespace

BarrierWalkParams BarrierWalkParams::resolve(double endpoint_distance) const {
  BarrierWalkParams p = *this;
  if (p.step <= 0.0) p.step = endpoint_distance / 20.0;
  if (p.neighborhood <= 0.0) p.neighborhood = 2.5 * p.step;
  if (p.max_iterations <= 0) {
    p.max_iterations = 10 * static_cast<int>(std::ceil(endpoint_distance / p.step));
  }
  p.validate();
  return p;
}

void BarrierWalkParams::validate() const {
  if (!(step > 0.0) || !(neighborhood > step)) {
    throw ValidationError("barrier walk needs neighborhood > step > 0");
  }
  if (n_samples < 1 || n_paths < 1 || max_batches < 1) {
    throw ValidationError("barrier walk counts must be positive");
  }
  if (!(temperature > 0.0)) throw ValidationError("walk temperature must be positive");
}

std::vector<double> BarrierPath::distances_to(const Eigen::VectorXd& target) const {
  std::vector<double> d;
  for (const auto& p : points) d.push_back((p - target).norm());
  return d;
}

std::vector<double> BarrierPath::arc_length_coordinate() const {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t k = 1; k < points.size(); ++k) s[k] = s[k - 1] + (points[k] - points[k - 1]).norm();
  if (!s.empty() && s.back() > 0.0) {
    const double total = s.back();
    for (auto& v : s) v /= total;
  }
  return s;
}

Eigen::MatrixXd sample_grey_region(const Eigen::VectorXd& xi, const Eigen::VectorXd& xf,
                                   const BarrierWalkParams& params, std::mt19937_64& rng) {
  const Eigen::Index dim = xi.size();
  const double radius = (xi - xf).norm() - params.step;
  if (!(radius > 0.0)) throw DomainError("walk point is already within d of the target");
  const double half = 0.5 * params.neighborhood;
  const double n = static_cast<double>(dim);
  const double log_cube = n * std::log(params.neighborhood);
  const double log_ball =
      0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0) + n * std::log(radius);
  const bool from_cube = log_cube <= log_ball;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> accepted;
  Eigen::VectorXd y(dim);
  for (int batch = 0; batch < params.max_batches; ++batch) {
    for (int k = 0; k < params.n_samples; ++k) {
      bool inside;
      if (from_cube) {
        for (Eigen::Index a = 0; a < dim; ++a) y[a] = xi[a] + half * (2.0 * unit(rng) - 1.0);
        inside = (y - xf).norm() <= radius;
      } else {
        for (Eigen::Index a = 0; a < dim; ++a) y[a] = gauss(rng);
        const double r = radius * std::pow(unit(rng), 1.0 / n);
        y = xf + y * (r / y.norm());
        inside = (y - xi).cwiseAbs().maxCoeff() <= half;
      }
      if (inside) accepted.push_back(y);
      if (static_cast<int>(accepted.size()) == params.n_samples) break;
    }
    if (static_cast<int>(accepted.size()) == params.n_samples) break;
  }
  Eigen::MatrixXd out(dim, static_cast<Eigen::Index>(accepted.size()));
  for (std::size_t c = 0; c < accepted.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = accepted[c];
  return out;
}

std::vector<double> boltzmann_weights(const std::vector<double>& energies, double reference_energy,
                                      double temperature) {
  const double kt = constants::boltzmann * temperature;
  // Shifting by the minimum leaves the normalised weights unchanged.
  double emin = kInf;
  for (double e : energies) emin = std::min(emin, e);
  std::vector<double> w(energies.size(), 0.0);
  if (!std::isfinite(emin)) return w;
  double total = 0.0;
  for (std::size_t j = 0; j < energies.size(); ++j) {
    w[j] = std::isfinite(energies[j]) ? std::exp(-((energies[j] - reference_energy) -
                                                   (emin - reference_energy)) / kt)
                                      : 0.0;
    total += w[j];
  }
  for (auto& v : w) v /= total;
  return w;
}

std::size_t select_candidate(const std::vector<double>& weights, std::mt19937_64& rng) {
  if (weights.empty()) throw SamplingError("no candidates to select from");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] <= 0.0) continue;
    acc += weights[j];
    last = j;
    if (u < acc) return j;
  }
  return last;
}

ProposedStep propose_step(const Eigen::VectorXd& xi, double energy_i, const Eigen::VectorXd& xf,
                          const BarrierWalkParams& params, const PlanarPotential& potential,
                          std::mt19937_64& rng) {
  const Eigen::MatrixXd candidates = sample_grey_region(xi, xf, params, rng);
  if (candidates.cols() == 0) throw SamplingError("grey region yielded no samples");
  std::vector<double> energies(static_cast<std::size_t>(candidates.cols()));
  kernels::parallel::map_columns(
      candidates,
      [&](const Eigen::VectorXd& xy) {
        try {
          return potential.energy(xy);
        } catch (const SingularConfigurationError&) {
          return kInf;
        }
      },
      energies);
  const auto weights = boltzmann_weights(energies, energy_i, params.temperature);
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    throw SamplingError("every grey-region candidate is singular");
  }
  const std::size_t pick = select_candidate(weights, rng);
  return {candidates.col(static_cast<Eigen::Index>(pick)), energies[pick],
          static_cast<std::size_t>(candidates.cols())};
}

BarrierPath walk_path(const Eigen::VectorXd& start, const Eigen::VectorXd& target,
                      const BarrierWalkParams& params, const PlanarPotential& potential,
                      int path_index) {
  const auto p = params.resolve((start - target).norm());
  auto rng = path_stream(p.seed, path_index);
  BarrierPath path;
  path.target = target;
  path.points.push_back(start);
  path.start_energy = potential.energy(start);
  path.energies.push_back(path.start_energy);

  Eigen::VectorXd x = start;
  double e = path.start_energy;
  for (int it = 0; it < p.max_iterations; ++it) {
    if ((x - target).norm() < p.step) {
      path.converged = true;
      break;
    }
    try {
      auto step = propose_step(x, e, target, p, potential, rng);
      x = std::move(step.point);
      e = step.energy;
    } catch (const SamplingError&) {
      break;
    }
    path.points.push_back(x);
    path.energies.push_back(e);
  }
  if (!path.converged && (x - target).norm() < p.step) path.converged = true;
  path.peak_energy = *std::max_element(path.energies.begin(), path.energies.end());
  path.barrier_from_start = (path.peak_energy - path.start_energy) / constants::boltzmann;
  return path;
}

namespace {

Eigen::VectorXd aligned_target(const EquilibriumResult& x0, const EquilibriumResult& xf) {
  if (x0.positions.n_ions() != xf.positions.n_ions()) {
    throw DomainError("barrier endpoints have different ion counts");
  }
  if (!x0.positions.is_planar() || !xf.positions.is_planar()) {
    throw DomainError("barrier endpoints must be planar");
  }
  auto al = align_planar(x0.positions.planar(), xf.positions.planar());
  if (al.distance <= 0.0) throw DomainError("barrier endpoints are the same configuration");
  return al.xy;
}

}  // namespace

BarrierPath optimize_path(const EquilibriumResult& x0, const EquilibriumResult& xf,
                          const BarrierWalkParams& params, const TrapConfig& trap,
                          const IonSpecies& species, int path_index) {
  const Eigen::VectorXd target = aligned_target(x0, xf);
  const PlanarPotential potential(trap, species);
  return walk_path(x0.positions.planar(), target, params, potential, path_index);
}

std::vector<BarrierPath> optimize_paths(const EquilibriumResult& x0, const EquilibriumResult& xf,
                                        const BarrierWalkParams& params, const TrapConfig& trap,
                                        const IonSpecies& species) {
  const Eigen::VectorXd start = x0.positions.planar();
  const Eigen::VectorXd target = aligned_target(x0, xf);
  params.resolve((start - target).norm());
  const PlanarPotential potential(trap, species);
  std::vector<BarrierPath> paths(static_cast<std::size_t>(params.n_paths));
  std::vector<std::exception_ptr> failures(paths.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < params.n_paths; ++k) {
    try {
      paths[static_cast<std::size_t>(k)] = walk_path(start, target, params, potential, k);
    } catch (...) {
      failures[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return paths;
}

BarrierBound barrier_upper_bound(const std::vector<BarrierPath>& paths) {
  BarrierBound bound;
  bool any = false;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& p = paths[k];
    if (!p.converged) continue;
    if (!any || p.peak_energy < bound.best_path.peak_energy) {
      bound.best_path = p;
      bound.best_index = k;
      any = true;
    }
  }
  if (!any) throw SamplingError("no converged barrier path");
  bound.barrier =
      (bound.best_path.peak_energy - bound.best_path.start_energy) / constants::boltzmann;
  return bound;
}

}  // namespace cavitrap

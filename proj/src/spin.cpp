#include "cavitrap/spin.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"

namespace cavitrap {

const char* to_string(ModeSelection s) {
  switch (s) {
    case ModeSelection::OutOfPlane: return "out_of_plane";
    case ModeSelection::InPlane: return "in_plane";
    case ModeSelection::All: return "all";
  }
  return "?";
}

SpinDriveConfig SpinDriveConfig::single(int n_ions, double mu, double rabi, double recoil_energy) {
  SpinDriveConfig d;
  d.mu = {mu};
  d.rabi = Eigen::MatrixXd::Constant(n_ions, 1, rabi);
  d.recoil_energy = recoil_energy;
  return d;
}

void SpinDriveConfig::validate(int n_ions) const {
  if (mu.empty()) throw ValidationError("spin drive needs at least one frequency");
  if (rabi.rows() != n_ions || rabi.cols() != static_cast<Eigen::Index>(mu.size())) {
    throw ValidationError("Rabi matrix must be n_ions x n_drives");
  }
  if ((rabi.array() < 0.0).any() || !rabi.allFinite()) {
    throw ValidationError("Rabi frequencies must be finite and non-negative");
  }
  for (double m : mu) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("drive frequencies must be positive");
  }
  if (!(recoil_energy >= 0.0)) throw ValidationError("recoil energy must be non-negative");
  if (!(direction.norm() > 0.0)) throw ValidationError("drive direction must be non-zero");
  if (!(resonance_tolerance >= 0.0)) throw ValidationError("resonance tolerance must be >= 0");
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> selected_modes(const ModeSpectrum& spectrum,
                                                           const SpinDriveConfig& drive) {
  const int n = spectrum.n_ions;
  const Eigen::Vector3d e = drive.direction.normalized();
  std::vector<const Mode*> used;
  for (const auto& m : spectrum.modes) {
    const bool take = drive.modes == ModeSelection::All ||
                      (drive.modes == ModeSelection::OutOfPlane && m.partition == Partition::OutOfPlane) ||
                      (drive.modes == ModeSelection::InPlane && m.partition == Partition::InPlane);
    if (take) used.push_back(&m);
  }
  Eigen::MatrixXd b(n, static_cast<Eigen::Index>(used.size()));
  Eigen::VectorXd w2(static_cast<Eigen::Index>(used.size()));
  for (std::size_t k = 0; k < used.size(); ++k) {
    const auto& v = used[k]->vector;
    for (int i = 0; i < n; ++i) b(i, k) = e.dot(v.segment<3>(3 * i));
    w2[k] = used[k]->omega_squared;
  }
  return {b, w2};
}

double af_fraction(const Eigen::MatrixXd& J) {
  const Eigen::Index n = J.rows();
  if (n < 2) return 0.0;
  int pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) pos += J(i, j) > 0.0;
  }
  return static_cast<double>(pos) / static_cast<double>(n * (n - 1) / 2);
}

SpinGraph compute_jij(const ModeSpectrum& spectrum, const EquilibriumResult& eq,
                      const SpinDriveConfig& drive) {
  const int n = spectrum.n_ions;
  if (eq.positions.n_ions() != n) throw ValidationError("spectrum and crystal sizes differ");
  drive.validate(n);
  const auto [b, w2] = selected_modes(spectrum, drive);
  if (w2.size() == 0) throw DomainError("no modes in the selected partition");
  if ((w2.array() < 0.0).any()) throw DomainError("selected partition has imaginary modes");
  const Eigen::VectorXd w = w2.cwiseSqrt();
  const double tol =
      drive.resonance_tolerance > 0.0 ? drive.resonance_tolerance : 1e-3 * w.maxCoeff();

  // Per drive: M_n = B diag(1 / (mu_n^2 - w_m^2)) B^T, then J += E Om_n Om_n^T o M_n.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t dn = 0; dn < drive.mu.size(); ++dn) {
    const double mu = drive.mu[dn];
    Eigen::VectorXd inv(w.size());
    for (Eigen::Index m = 0; m < w.size(); ++m) {
      if (std::abs(mu - w[m]) < tol) {
        std::ostringstream msg;
        msg << "drive " << dn << " is within the resonance tolerance of mode " << m;
        throw ResonanceError(msg.str());
      }
      inv[m] = 1.0 / (mu * mu - w2[m]);
    }
    const Eigen::MatrixXd kernel = b * inv.asDiagonal() * b.transpose();
    const Eigen::VectorXd om = drive.rabi.col(static_cast<Eigen::Index>(dn));
    J.array() += (om * om.transpose()).array() * kernel.array();
  }
  J *= drive.recoil_energy / constants::hbar;
  J = 0.5 * (J + J.transpose()).eval();
  J.diagonal().setZero();

  SpinGraph g;
  g.J = J;
  g.af_fraction = af_fraction(J);
  try {
    g.beta_fit = fit_beta(J, eq.positions);
  } catch (const FitError&) {
  }
  return g;
}

BetaFit fit_beta(const Eigen::MatrixXd& J, const CrystalPositions& pos) {
  const int n = pos.n_ions();
  if (J.rows() != n || J.cols() != n) throw FitError("coupling matrix size mismatch");
  std::vector<double> lx, ly;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r = (pos.coords().segment<3>(3 * i) - pos.coords().segment<3>(3 * j)).norm();
      const double a = std::abs(J(i, j));
      if (!(a > 0.0) || !std::isfinite(a)) throw FitError("zero or non-finite coupling");
      lx.push_back(std::log(r));
      ly.push_back(std::log(a));
    }
  }
  std::vector<double> sorted = lx;
  std::sort(sorted.begin(), sorted.end());
  int distinct = sorted.empty() ? 0 : 1;
  for (std::size_t k = 1; k < sorted.size(); ++k) distinct += sorted[k] - sorted[k - 1] > 1e-9;
  if (distinct < 3) throw FitError("need at least three distinct pair distances");

  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ss = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double e = ly[k] - (icpt + slope * lx[k]);
    ss += e * e;
  }
  return {-slope, std::sqrt(ss / m)};
}

BetaFit fit_beta(const SpinGraph& graph, const EquilibriumResult& eq) {
  return fit_beta(graph.J, eq.positions);
}

std::vector<BetaSweepEntry> beta_sweep(const ModeSpectrum& spectrum, const EquilibriumResult& eq,
                                       const std::vector<double>& mu_values,
                                       const SpinDriveConfig& drive_template) {
  std::vector<BetaSweepEntry> out(mu_values.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < mu_values.size(); ++k) {
    auto& e = out[k];
    e.mu = mu_values[k];
    try {
      SpinDriveConfig d = drive_template;
      if (d.mu.empty()) throw ValidationError("drive template has no drives");
      d.mu[0] = mu_values[k];
      const auto g = compute_jij(spectrum, eq, d);
      e.af_fraction = g.af_fraction;
      e.fit = fit_beta(g.J, eq.positions);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  }
  return out;
}

}  // namespace cavitrap

#include "cavitrap/modes.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "cavitrap/errors.hpp"

namespace cavitrap {

const char* to_string(Partition p) { return p == Partition::OutOfPlane ? "out_of_plane" : "in_plane"; }

const char* to_string(ModeLabel l) {
  switch (l) {
    case ModeLabel::None: return "";
    case ModeLabel::COM: return "COM";
    case ModeLabel::TiltX: return "tilt_x";
    case ModeLabel::TiltY: return "tilt_y";
    case ModeLabel::SaddleXY: return "saddle_xy";
    case ModeLabel::Other: return "other";
  }
  return "";
}

std::vector<Mode> ModeSpectrum::partition(Partition p) const {
  std::vector<Mode> out;
  for (const auto& m : modes) {
    if (m.partition == p) out.push_back(m);
  }
  return out;
}

Eigen::MatrixXd ModeSpectrum::eigenvectors() const {
  Eigen::MatrixXd v(3 * n_ions, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t k = 0; k < modes.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = modes[k].vector;
  return v;
}

Eigen::MatrixXd ModeSpectrum::out_of_plane_amplitudes() const {
  const auto z = partition(Partition::OutOfPlane);
  Eigen::MatrixXd b(n_ions, static_cast<Eigen::Index>(z.size()));
  for (std::size_t m = 0; m < z.size(); ++m) {
    for (int i = 0; i < n_ions; ++i) b(i, static_cast<Eigen::Index>(m)) = z[m].vector[3 * i + 2];
  }
  return b;
}

std::vector<double> ModeSpectrum::out_of_plane_frequencies() const {
  std::vector<double> w;
  for (const auto& m : modes) {
    if (m.partition == Partition::OutOfPlane) w.push_back(m.frequency);
  }
  return w;
}

namespace {

Mode make_mode(double lambda, Eigen::VectorXd vec, Partition p) {
  Mode m;
  m.omega_squared = lambda;
  m.frequency = std::sqrt(std::abs(lambda));
  m.imaginary = lambda < 0.0;
  m.partition = p;
  m.vector = std::move(vec);
  return m;
}

}  // namespace

Eigen::VectorXd out_of_plane_eigenvalues(const CrystalPositions& pos, const TrapConfig& trap,
                                         const IonSpecies& species) {
  const int n = pos.n_ions();
  const Eigen::MatrixXd h = hessian(pos, trap, species) / species.mass;
  Eigen::MatrixXd zz(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) zz(i, j) = h(3 * i + 2, 3 * j + 2);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(zz, Eigen::EigenvaluesOnly).eigenvalues();
}

ModeSpectrum normal_modes(const CrystalPositions& pos, const TrapConfig& trap,
                          const IonSpecies& species) {
  const int n = pos.n_ions();
  // Single species: mass weighting is a uniform 1/m.
  const Eigen::MatrixXd h = hessian(pos, trap, species) / species.mass;
  ModeSpectrum spectrum;
  spectrum.n_ions = n;

  if (pos.is_planar()) {
    // z -> -z symmetry: the out-of-plane block decouples exactly.
    Eigen::MatrixXd zz(n, n), xy(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        zz(i, j) = h(3 * i + 2, 3 * j + 2);
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) xy(2 * i + a, 2 * j + b) = h(3 * i + a, 3 * j + b);
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ez(zz), exy(xy);
    for (int k = n - 1; k >= 0; --k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * n);
      for (int i = 0; i < n; ++i) v[3 * i + 2] = ez.eigenvectors()(i, k);
      spectrum.modes.push_back(make_mode(ez.eigenvalues()[k], std::move(v), Partition::OutOfPlane));
    }
    for (int k = 2 * n - 1; k >= 0; --k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * n);
      for (int i = 0; i < n; ++i) {
        v[3 * i] = exy.eigenvectors()(2 * i, k);
        v[3 * i + 1] = exy.eigenvectors()(2 * i + 1, k);
      }
      spectrum.modes.push_back(make_mode(exy.eigenvalues()[k], std::move(v), Partition::InPlane));
    }
    return spectrum;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  std::vector<Mode> z_modes, p_modes;
  for (int k = 3 * n - 1; k >= 0; --k) {
    Eigen::VectorXd v = eig.eigenvectors().col(k);
    double zw = 0.0;
    for (int i = 0; i < n; ++i) zw += v[3 * i + 2] * v[3 * i + 2];
    auto mode = make_mode(eig.eigenvalues()[k], std::move(v),
                          zw > 0.5 ? Partition::OutOfPlane : Partition::InPlane);
    (mode.partition == Partition::OutOfPlane ? z_modes : p_modes).push_back(std::move(mode));
  }
  spectrum.modes = std::move(z_modes);
  spectrum.modes.insert(spectrum.modes.end(), p_modes.begin(), p_modes.end());
  return spectrum;
}

ModeSpectrum normal_modes(const EquilibriumResult& eq, const TrapConfig& trap,
                          const IonSpecies& species) {
  return normal_modes(eq.positions, trap, species);
}

LowestMode out_of_plane_lowest(const ModeSpectrum& spectrum) {
  const Mode* lowest = nullptr;
  for (const auto& m : spectrum.modes) {
    if (m.partition != Partition::OutOfPlane) continue;
    if (!lowest || m.omega_squared < lowest->omega_squared) lowest = &m;
  }
  if (!lowest) throw DomainError("spectrum has no out-of-plane modes");
  return {lowest->omega_squared, lowest->frequency, lowest->imaginary};
}

ModeSpectrum label_modes(ModeSpectrum spectrum, const CrystalPositions& pos) {
  const int n = pos.n_ions();
  double cx = 0.0, cy = 0.0;
  for (int i = 0; i < n; ++i) {
    cx += pos.x(i);
    cy += pos.y(i);
  }
  cx /= n;
  cy /= n;

  constexpr std::array kLabels = {ModeLabel::COM, ModeLabel::TiltX, ModeLabel::TiltY,
                                  ModeLabel::SaddleXY};
  std::array<Eigen::VectorXd, 4> basis;
  for (auto& b : basis) b.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = pos.x(i) - cx, y = pos.y(i) - cy;
    basis[0][i] = 1.0;
    basis[1][i] = x;
    basis[2][i] = y;
    basis[3][i] = x * y;
  }
  std::array<bool, 4> usable{};
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const double nb = basis[b].norm();
    usable[b] = nb > 1e-12 * std::max(1.0, basis[1].norm() + basis[2].norm());
    if (b == 0) usable[b] = true;
    if (usable[b]) basis[b] /= nb;
  }

  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < spectrum.modes.size(); ++k) {
    if (spectrum.modes[k].partition == Partition::OutOfPlane) idx.push_back(k);
  }
  auto z_part = [&](std::size_t k) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = spectrum.modes[k].vector[3 * i + 2];
    return v;
  };
  auto set_z = [&](std::size_t k, const Eigen::VectorXd& v) {
    auto& vec = spectrum.modes[k].vector;
    for (int i = 0; i < n; ++i) vec[3 * i + 2] = v[i];
  };

  // Groups of consecutive out-of-plane modes with frequencies within 1e-6.
  std::size_t g0 = 0;
  while (g0 < idx.size()) {
    std::size_t g1 = g0 + 1;
    while (g1 < idx.size()) {
      const double a = spectrum.modes[idx[g1 - 1]].frequency;
      const double b = spectrum.modes[idx[g1]].frequency;
      if (std::abs(a - b) > 1e-6 * std::max(a, b)) break;
      ++g1;
    }
    const std::size_t size = g1 - g0;
    if (size > 1) {
      // Rotate the degenerate subspace onto the best-overlapping basis vectors.
      Eigen::MatrixXd q(n, static_cast<Eigen::Index>(size));
      for (std::size_t c = 0; c < size; ++c) q.col(static_cast<Eigen::Index>(c)) = z_part(idx[g0 + c]);
      std::array<bool, 4> taken{};
      for (std::size_t c = 0; c < size; ++c) {
        int best = -1;
        double best_overlap = 0.0;
        for (std::size_t b = 0; b < basis.size(); ++b) {
          if (!usable[b] || taken[b]) continue;
          const double ov = (q.transpose() * basis[b]).squaredNorm();
          if (ov > best_overlap) {
            best_overlap = ov;
            best = static_cast<int>(b);
          }
        }
        Eigen::VectorXd v;
        if (best >= 0 && best_overlap > 1e-12) {
          taken[best] = true;
          v = q * (q.transpose() * basis[best]);
          v.normalize();
        } else {
          v = q.col(0);
          v.normalize();
        }
        set_z(idx[g0 + c], v);
        // Deflate the subspace.
        q -= v * (v.transpose() * q);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(q);
        const Eigen::Index rank = static_cast<Eigen::Index>(size - c - 1);
        if (rank > 0) q = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
      }
    }
    g0 = g1;
  }

  for (std::size_t k : idx) {
    const Eigen::VectorXd v = z_part(k);
    ModeLabel label = ModeLabel::Other;
    double best = 0.5;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      if (!usable[b]) continue;
      const double ov = std::pow(basis[b].dot(v), 2);
      if (ov > best) {
        best = ov;
        label = kLabels[b];
      }
    }
    spectrum.modes[k].label = label;
  }
  return spectrum;
}

double amplitude_ratio(const Mode& mode) {
  const Eigen::Index n = mode.vector.size() / 3;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(mode.vector[3 * i + 2]);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return hi > 0.0 ? lo / hi : 0.0;
}

}  // namespace cavitrap

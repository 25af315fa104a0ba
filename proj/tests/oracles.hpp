#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "cavitrap/constants.hpp"
#include "cavitrap/species.hpp"
#include "cavitrap/trap.hpp"

namespace oracle {

using cavitrap::constants::coulomb_constant;

/// Direct transcription of the three-term potential, no shared code.
inline double total_energy(const Eigen::VectorXd& r, const cavitrap::TrapConfig& trap, double mass) {
  const long n = r.size() / 3;
  double coul = 0.0;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = r[3 * i] - r[3 * j], dy = r[3 * i + 1] - r[3 * j + 1],
                   dz = r[3 * i + 2] - r[3 * j + 2];
      coul += 0.5 * coulomb_constant / std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  }
  const double wx = trap.omega_x_dc(), wy = trap.omega_y_dc();
  const double wz2 = wx * wx + wy * wy;
  const auto& o = trap.optical();
  const double k = 2.0 * std::numbers::pi / o.wavelength();
  const double zr = std::numbers::pi * o.waist() * o.waist() / o.wavelength();
  double dc = 0.0, opt = 0.0;
  for (long i = 0; i < n; ++i) {
    const double x = r[3 * i], y = r[3 * i + 1], z = r[3 * i + 2];
    dc += 0.5 * mass * (wx * wx * x * x + wy * wy * y * y - wz2 * z * z);
    const double w2 = o.waist() * o.waist() * (1.0 + (z / zr) * (z / zr));
    const double env = o.waist() * o.waist() / w2 * std::exp(-2.0 * (x * x + y * y) / w2);
    if (o.variant() == cavitrap::LatticeVariant::NodeSin2) {
      opt += o.depth() * env * std::pow(std::sin(k * z), 2);
    } else {
      opt -= o.depth() * env * std::pow(std::cos(k * z), 2);
    }
  }
  return coul + dc + opt;
}

/// Central differences of f.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    Eigen::VectorXd p = x, m = x;
    p[a] += h;
    m[a] -= h;
    g[a] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

/// Central differences of a gradient.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::MatrixXd out(x.size(), x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    Eigen::VectorXd p = x, m = x;
    p[a] += h;
    m[a] -= h;
    out.col(a) = (g(p) - g(m)) / (2.0 * h);
  }
  return out;
}

/// J_ij by explicit loops over drives n and modes m.
inline Eigen::MatrixXd brute_jij(const Eigen::MatrixXd& b, const Eigen::VectorXd& omega,
                                 const std::vector<double>& mu, const Eigen::MatrixXd& rabi,
                                 double recoil_energy, double hbar) {
  const long n = b.rows();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      long double s = 0.0L;
      for (std::size_t d = 0; d < mu.size(); ++d) {
        long double inner = 0.0L;
        for (long m = 0; m < b.cols(); ++m) {
          inner += static_cast<long double>(b(i, m)) * b(j, m) /
                   (static_cast<long double>(mu[d]) * mu[d] -
                    static_cast<long double>(omega[m]) * omega[m]);
        }
        s += static_cast<long double>(rabi(i, d)) * rabi(j, d) * inner;
      }
      J(i, j) = static_cast<double>(s * recoil_energy / hbar);
    }
  }
  return J;
}

/// Two ions along x in a harmonic well: spacing (2 k_c / (m w^2))^(1/3).
inline double two_ion_spacing(double mass, double omega) {
  return std::cbrt(2.0 * coulomb_constant / (mass * omega * omega));
}

inline Eigen::VectorXd random_positions(int n, double scale, std::uint64_t seed, bool planar) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd r(3 * n);
  for (int i = 0; i < n; ++i) {
    r[3 * i] = u(rng);
    r[3 * i + 1] = u(rng);
    r[3 * i + 2] = planar ? 0.0 : 0.05 * u(rng);
  }
  return r;
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace oracle

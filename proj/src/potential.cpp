#include "cavitrap/potential.hpp"

#include <cmath>
#include <span>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/kernels.hpp"

namespace cavitrap {

CrystalPositions::CrystalPositions(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  if (coords_.size() % 3 != 0) throw DomainError("position vector length must be 3N");
  if (!coords_.allFinite()) throw DomainError("positions must be finite");
}

CrystalPositions CrystalPositions::from_planar(const Eigen::VectorXd& xy) {
  if (xy.size() % 2 != 0) throw DomainError("planar vector length must be 2N");
  const Eigen::Index n = xy.size() / 2;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c[3 * i] = xy[2 * i];
    c[3 * i + 1] = xy[2 * i + 1];
  }
  return CrystalPositions(std::move(c));
}

Eigen::VectorXd CrystalPositions::planar() const {
  const int n = n_ions();
  Eigen::VectorXd xy(2 * n);
  for (int i = 0; i < n; ++i) {
    xy[2 * i] = x(i);
    xy[2 * i + 1] = y(i);
  }
  return xy;
}

bool CrystalPositions::is_planar(double tol) const {
  for (int i = 0; i < n_ions(); ++i) {
    if (std::abs(z(i)) > tol) return false;
  }
  return true;
}

namespace {

// Single-ion optical term: value, gradient and Hessian in (x, y, z).
struct OpticalLocal {
  double value = 0.0;
  double grad[3] = {};
  double hess[3][3] = {};
};

OpticalLocal optical_local(double x, double y, double z, const OpticalTrapConfig& optical,
                           bool want_derivatives) {
  OpticalLocal out;
  const double depth = optical.depth();
  if (depth == 0.0) return out;

  const double k = optical.wavenumber();
  const double w0sq = optical.waist() * optical.waist();
  const double zr = optical.rayleigh_range();
  const double s = 1.0 + z * z / (zr * zr);
  const double ds = 2.0 * z / (zr * zr);
  const double dds = 2.0 / (zr * zr);
  const double rho2 = x * x + y * y;

  // g = (w0/w)^2 exp(-2 rho^2 / w^2) and L = ln g.
  const double g = std::exp(-2.0 * rho2 / (w0sq * s)) / s;

  const bool node = optical.variant() == LatticeVariant::NodeSin2;
  const double sign = node ? 1.0 : -1.0;
  const double sn = std::sin(k * z);
  const double cs = std::cos(k * z);
  const double h = node ? sn * sn : cs * cs;
  out.value = sign * depth * g * h;
  if (!want_derivatives) return out;

  const double dh = (node ? 1.0 : -1.0) * k * std::sin(2.0 * k * z);
  const double ddh = (node ? 2.0 : -2.0) * k * k * std::cos(2.0 * k * z);

  const double L[3] = {-4.0 * x / (w0sq * s), -4.0 * y / (w0sq * s),
                       -ds / s + 2.0 * rho2 * ds / (w0sq * s * s)};
  double LL[3][3] = {};
  LL[0][0] = -4.0 / (w0sq * s);
  LL[1][1] = -4.0 / (w0sq * s);
  LL[0][2] = LL[2][0] = 4.0 * x * ds / (w0sq * s * s);
  LL[1][2] = LL[2][1] = 4.0 * y * ds / (w0sq * s * s);
  LL[2][2] = -dds / s + ds * ds / (s * s) +
             2.0 * rho2 / w0sq * (dds / (s * s) - 2.0 * ds * ds / (s * s * s));

  const double hz[3] = {0.0, 0.0, dh};
  for (int a = 0; a < 3; ++a) {
    const double ga = g * L[a];
    out.grad[a] = sign * depth * (ga * h + g * hz[a]);
    for (int b = 0; b < 3; ++b) {
      const double gb = g * L[b];
      const double gab = g * (LL[a][b] + L[a] * L[b]);
      double v = gab * h + ga * hz[b] + gb * hz[a];
      if (a == 2 && b == 2) v += g * ddh;
      out.hess[a][b] = sign * depth * v;
    }
  }
  return out;
}

void check_singular(std::span<const double> r) {
  const double closest = kernels::min_pair_distance(r);
  if (closest < kernels::kMinPairDistance) {
    throw SingularConfigurationError("ions coincide");
  }
}

}  // namespace

double optical_energy(double x, double y, double z, const OpticalTrapConfig& optical) {
  return optical_local(x, y, z, optical, false).value;
}

EnergyBreakdown total_energy(const CrystalPositions& pos, const TrapConfig& trap,
                             const IonSpecies& species) {
  const auto& c = pos.coords();
  std::span<const double> r(c.data(), static_cast<std::size_t>(c.size()));
  EnergyBreakdown e;
  e.coulomb = kernels::parallel::coulomb_energy(r, constants::coulomb_constant);
  const double wx2 = trap.omega_x_dc() * trap.omega_x_dc();
  const double wy2 = trap.omega_y_dc() * trap.omega_y_dc();
  const double wz2 = trap.omega_z_dc_squared();
  for (int i = 0; i < pos.n_ions(); ++i) {
    const double x = pos.x(i), y = pos.y(i), z = pos.z(i);
    e.dc += 0.5 * species.mass * (wx2 * x * x + wy2 * y * y - wz2 * z * z);
    e.optical += optical_local(x, y, z, trap.optical(), false).value;
  }
  e.total = e.coulomb + e.dc + e.optical;
  return e;
}

Eigen::VectorXd gradient(const CrystalPositions& pos, const TrapConfig& trap,
                         const IonSpecies& species) {
  const auto& c = pos.coords();
  std::span<const double> r(c.data(), static_cast<std::size_t>(c.size()));
  Eigen::VectorXd g = Eigen::VectorXd::Zero(c.size());
  kernels::parallel::add_coulomb_gradient(r, constants::coulomb_constant,
                                          std::span<double>(g.data(), r.size()));
  const double m = species.mass;
  const double wx2 = trap.omega_x_dc() * trap.omega_x_dc();
  const double wy2 = trap.omega_y_dc() * trap.omega_y_dc();
  const double wz2 = trap.omega_z_dc_squared();
  for (int i = 0; i < pos.n_ions(); ++i) {
    const auto opt = optical_local(pos.x(i), pos.y(i), pos.z(i), trap.optical(), true);
    g[3 * i] += m * wx2 * pos.x(i) + opt.grad[0];
    g[3 * i + 1] += m * wy2 * pos.y(i) + opt.grad[1];
    g[3 * i + 2] += -m * wz2 * pos.z(i) + opt.grad[2];
  }
  return g;
}

Eigen::MatrixXd hessian(const CrystalPositions& pos, const TrapConfig& trap,
                        const IonSpecies& species) {
  const auto& c = pos.coords();
  std::span<const double> r(c.data(), static_cast<std::size_t>(c.size()));
  check_singular(r);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(c.size(), c.size());
  kernels::parallel::add_coulomb_hessian(r, constants::coulomb_constant, h);
  const double m = species.mass;
  const double dc[3] = {m * trap.omega_x_dc() * trap.omega_x_dc(),
                        m * trap.omega_y_dc() * trap.omega_y_dc(),
                        -m * trap.omega_z_dc_squared()};
  for (int i = 0; i < pos.n_ions(); ++i) {
    const auto opt = optical_local(pos.x(i), pos.y(i), pos.z(i), trap.optical(), true);
    for (int a = 0; a < 3; ++a) {
      h(3 * i + a, 3 * i + a) += dc[a];
      for (int b = 0; b < 3; ++b) h(3 * i + a, 3 * i + b) += opt.hess[a][b];
    }
  }
  return h;
}

PlanarPotential::PlanarPotential(TrapConfig trap, IonSpecies species)
    : trap_(std::move(trap)), species_(std::move(species)) {}

double PlanarPotential::energy(const Eigen::VectorXd& xy) const {
  return total_energy(CrystalPositions::from_planar(xy), trap_, species_).total;
}

double PlanarPotential::energy_and_gradient(const Eigen::VectorXd& xy,
                                            Eigen::VectorXd& grad) const {
  const auto pos = CrystalPositions::from_planar(xy);
  const Eigen::VectorXd g = gradient(pos, trap_, species_);
  const int n = pos.n_ions();
  grad.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    grad[2 * i] = g[3 * i];
    grad[2 * i + 1] = g[3 * i + 1];
  }
  return total_energy(pos, trap_, species_).total;
}

Eigen::MatrixXd PlanarPotential::hessian(const Eigen::VectorXd& xy) const {
  const auto pos = CrystalPositions::from_planar(xy);
  const Eigen::MatrixXd h = cavitrap::hessian(pos, trap_, species_);
  const int n = pos.n_ions();
  Eigen::MatrixXd out(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) out(2 * i + a, 2 * j + b) = h(3 * i + a, 3 * j + b);
      }
    }
  }
  return out;
}

}  // namespace cavitrap

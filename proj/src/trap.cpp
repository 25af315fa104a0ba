#include "cavitrap/trap.hpp"

#include <cmath>
#include <numbers>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"

namespace cavitrap {

using std::numbers::pi;

OpticalTrapConfig::OpticalTrapConfig(double wavelength, double waist, double depth,
                                     LatticeVariant variant, double finesse, double input_power)
    : wavelength_(wavelength),
      waist_(waist),
      depth_(depth),
      variant_(variant),
      finesse_(finesse),
      input_power_(input_power) {
  if (!(wavelength > 0.0) || !(waist > 0.0)) {
    throw DomainError("optical trap needs positive wavelength and waist");
  }
  if (!(depth >= 0.0)) throw DomainError("optical depth must be non-negative");
  if (!(finesse >= 0.0) || !(input_power >= 0.0)) {
    throw DomainError("finesse and input power must be non-negative");
  }
}

double OpticalTrapConfig::wavenumber() const { return 2.0 * pi / wavelength_; }

double OpticalTrapConfig::rayleigh_range() const { return pi * waist_ * waist_ / wavelength_; }

double OpticalTrapConfig::beam_radius(double z) const {
  const double q = z / rayleigh_range();
  return waist_ * std::sqrt(1.0 + q * q);
}

OpticalTrapConfig OpticalTrapConfig::with_depth(double depth) const {
  return {wavelength_, waist_, depth, variant_, finesse_, input_power_};
}

OpticalTrapConfig OpticalTrapConfig::with_waist(double waist) const {
  return {wavelength_, waist, depth_, variant_, finesse_, input_power_};
}

TrapConfig::TrapConfig(double omega_x_dc, double anisotropy, OpticalTrapConfig optical)
    : omega_x_dc_(omega_x_dc), anisotropy_(anisotropy), optical_(optical) {
  if (!(omega_x_dc >= 0.0) || !(1.0 + anisotropy >= 0.0)) {
    throw DomainError("DC trap frequencies must be non-negative");
  }
}

double TrapConfig::omega_z_dc_squared() const {
  const double wx = omega_x_dc();
  const double wy = omega_y_dc();
  return wx * wx + wy * wy;
}

TrapConfig TrapConfig::with_optical(OpticalTrapConfig optical) const {
  return {omega_x_dc_, anisotropy_, optical};
}

TrapConfig TrapConfig::with_depth(double depth) const {
  return with_optical(optical_.with_depth(depth));
}

double intensity_from_power(double input_power, double finesse, double waist) {
  if (!(waist > 0.0)) throw DomainError("waist must be positive");
  if (!(input_power >= 0.0) || !(finesse >= 0.0)) {
    throw DomainError("power and finesse must be non-negative");
  }
  return 2.0 * finesse * input_power / (pi * pi * waist * waist);
}

double power_from_intensity(double intensity, double finesse, double waist) {
  if (!(waist > 0.0) || !(finesse > 0.0)) throw DomainError("waist and finesse must be positive");
  if (!(intensity >= 0.0)) throw DomainError("intensity must be non-negative");
  return intensity * pi * pi * waist * waist / (2.0 * finesse);
}

double trap_depth(const IonSpecies& species, double laser_angular_frequency, double intensity) {
  if (!(laser_angular_frequency > 0.0)) throw DomainError("laser frequency must be positive");
  if (!(intensity >= 0.0)) throw DomainError("intensity must be non-negative");
  const double c = constants::speed_of_light;
  double per_intensity = 0.0;
  for (const auto& line : species.lines) {
    const double wa = line.angular_frequency;
    if (std::abs(wa - laser_angular_frequency) <= 1e-6 * wa) {
      throw ResonanceError("laser frequency is within 1e-6 of an atomic transition");
    }
    per_intensity -= 3.0 * pi * c * c / (2.0 * wa * wa * wa) *
                     (line.linewidth / (wa - laser_angular_frequency) +
                      line.linewidth / (wa + laser_angular_frequency));
  }
  return std::abs(per_intensity * intensity);
}

namespace {

// Second derivative of the single-ion optical potential along z at the
// origin, divided by the depth.
double optical_z_curvature_per_depth(const OpticalTrapConfig& optical) {
  const double k = optical.wavenumber();
  if (optical.variant() == LatticeVariant::NodeSin2) return 2.0 * k * k;
  const double zr = optical.rayleigh_range();
  return 2.0 * (k * k + 1.0 / (zr * zr));
}

double optical_radial_curvature_per_depth(const OpticalTrapConfig& optical) {
  if (optical.variant() == LatticeVariant::NodeSin2) return 0.0;
  const double w0 = optical.waist();
  return 4.0 / (w0 * w0);
}

}  // namespace

double effective_omega_z_squared(const TrapConfig& trap, const IonSpecies& species) {
  const auto& optical = trap.optical();
  return optical.depth() * optical_z_curvature_per_depth(optical) / species.mass -
         trap.omega_z_dc_squared();
}

TrapFrequencies effective_frequencies(const TrapConfig& trap, const IonSpecies& species) {
  const double wz2 = effective_omega_z_squared(trap, species);
  if (!(wz2 > 0.0)) {
    throw AntiTrappedError("out-of-plane curvature at the origin is not confining");
  }
  const double radial =
      trap.optical().depth() * optical_radial_curvature_per_depth(trap.optical()) / species.mass;
  const double wx = trap.omega_x_dc();
  const double wy = trap.omega_y_dc();
  return {std::sqrt(wx * wx + radial), std::sqrt(wy * wy + radial), std::sqrt(wz2)};
}

double depth_for_aspect_ratio(double alpha, const TrapConfig& trap, const IonSpecies& species) {
  if (!(alpha >= 0.0)) throw DomainError("aspect ratio must be non-negative");
  const auto& optical = trap.optical();
  const double m = species.mass;
  const double z_per_depth = optical_z_curvature_per_depth(optical) / m;
  const double r_per_depth = optical_radial_curvature_per_depth(optical) / m;
  const double wx2 = trap.omega_x_dc() * trap.omega_x_dc();
  const double denom = z_per_depth - alpha * alpha * r_per_depth;
  if (!(denom > 0.0)) throw DomainError("aspect ratio not reachable for this optical geometry");
  return (alpha * alpha * wx2 + trap.omega_z_dc_squared()) / denom;
}

double depth_for_omega_z(double omega_z, const TrapConfig& trap, const IonSpecies& species) {
  if (!(omega_z >= 0.0)) throw DomainError("frequency must be non-negative");
  const double zc = optical_z_curvature_per_depth(trap.optical()) / species.mass;
  return (omega_z * omega_z + trap.omega_z_dc_squared()) / zc;
}

double characteristic_length(const TrapConfig& trap, const IonSpecies& species) {
  const auto& optical = trap.optical();
  const double wx2 = trap.omega_x_dc() * trap.omega_x_dc() +
                     optical.depth() * optical_radial_curvature_per_depth(optical) / species.mass;
  if (!(wx2 > 0.0)) throw DomainError("no in-plane confinement");
  return std::cbrt(constants::coulomb_constant / (species.mass * wx2));
}

double laser_angular_frequency(double wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  return constants::two_pi * constants::speed_of_light / wavelength;
}

}  // namespace cavitrap

#pragma once

#include "cavitrap/species.hpp"

namespace cavitrap {

/// Which standing-wave phase sits at z = 0.
///  NodeSin2:      +U_depth (w0/w)^2 exp(-2 rho^2/w^2) sin^2(kz)   (ions at a node)
///  AntinodeCos2:  -U_depth (w0/w)^2 exp(-2 rho^2/w^2) cos^2(kz)   (ions at an antinode)
enum class LatticeVariant { NodeSin2, AntinodeCos2 };

class OpticalTrapConfig {
 public:
  OpticalTrapConfig() = default;
  OpticalTrapConfig(double wavelength, double waist, double depth,
                    LatticeVariant variant = LatticeVariant::NodeSin2,
                    double finesse = 3000.0, double input_power = 0.0);

  double wavelength() const { return wavelength_; }
  double waist() const { return waist_; }
  double depth() const { return depth_; }
  LatticeVariant variant() const { return variant_; }
  double finesse() const { return finesse_; }
  double input_power() const { return input_power_; }

  double wavenumber() const;       // 2 pi / lambda
  double rayleigh_range() const;   // pi w0^2 / lambda
  double beam_radius(double z) const;

  OpticalTrapConfig with_depth(double depth) const;
  OpticalTrapConfig with_waist(double waist) const;

 private:
  double wavelength_ = 1064e-9;
  double waist_ = 100e-6;
  double depth_ = 0.0;
  LatticeVariant variant_ = LatticeVariant::NodeSin2;
  double finesse_ = 3000.0;
  double input_power_ = 0.0;
};

/// DC quadrupole plus cavity lattice. omega_z^DC is derived from Laplace's
/// equation, (omega_z^DC)^2 = (omega_x^DC)^2 + (omega_y^DC)^2.
class TrapConfig {
 public:
  TrapConfig() = default;
  /// omega_y^DC = omega_x^DC (1 + anisotropy).
  TrapConfig(double omega_x_dc, double anisotropy, OpticalTrapConfig optical);

  double omega_x_dc() const { return omega_x_dc_; }
  double omega_y_dc() const { return omega_x_dc_ * (1.0 + anisotropy_); }
  double omega_z_dc_squared() const;
  double anisotropy() const { return anisotropy_; }
  const OpticalTrapConfig& optical() const { return optical_; }

  TrapConfig with_optical(OpticalTrapConfig optical) const;
  TrapConfig with_depth(double depth) const;

 private:
  double omega_x_dc_ = 0.0;
  double anisotropy_ = 0.0;
  OpticalTrapConfig optical_;
};

struct TrapFrequencies {
  double x;  // rad/s
  double y;
  double z;
};

/// Peak intra-cavity intensity I = 2 F P / (pi^2 w0^2).
double intensity_from_power(double input_power, double finesse, double waist);
/// Inverse of intensity_from_power.
double power_from_intensity(double intensity, double finesse, double waist);

/// |sum_a 3 pi c^2 / (2 w_a^3) (G_a/(w_a - w_l) + G_a/(w_a + w_l))| I.
double trap_depth(const IonSpecies& species, double laser_angular_frequency, double intensity);

/// Harmonic single-ion frequencies at the origin. Throws AntiTrappedError when
/// omega_z^2 <= 0.
TrapFrequencies effective_frequencies(const TrapConfig& trap, const IonSpecies& species);

/// omega_z^2 at the origin, may be negative.
double effective_omega_z_squared(const TrapConfig& trap, const IonSpecies& species);

/// Depth that yields aspect ratio omega_z / omega_x = alpha at the origin.
double depth_for_aspect_ratio(double alpha, const TrapConfig& trap, const IonSpecies& species);

/// Depth that yields out-of-plane frequency omega_z at the origin.
double depth_for_omega_z(double omega_z, const TrapConfig& trap, const IonSpecies& species);

/// (e^2 / (4 pi eps0 m omega^2))^(1/3) with omega the x trap frequency.
double characteristic_length(const TrapConfig& trap, const IonSpecies& species);

double laser_angular_frequency(double wavelength);

}  // namespace cavitrap

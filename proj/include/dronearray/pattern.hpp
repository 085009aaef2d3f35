#ifndef DRONEARRAY_PATTERN_HPP
#define DRONEARRAY_PATTERN_HPP

#include <functional>
#include <vector>

#include "dronearray/geometry.hpp"

namespace dronearray::pattern {

using geom::SphDirection;
using geom::Vec3;

// Symmetric linear array described by its positive half. Element n of the
// half sits at distance d[n] from the array center with excitation
// amplitude a[n] and phase beta[n]; its mirror sits at -d[n] with phase
// -beta[n]. Full element count M = 2 * half_count().
struct ArrayConfig {
  std::vector<double> d;     // meters, strictly increasing, > 0
  std::vector<double> a;     // dimensionless, > 0
  std::vector<double> beta;  // radians
  double wavelength = 1.0;   // meters
  double efficiency = 1.0;   // in [0, 1]

  std::size_t half_count() const { return d.size(); }
  std::size_t element_count() const { return 2 * d.size(); }
  double wavenumber() const;

  // Throws validation_error on any violated invariant.
  void validate() const;
};

// Far-field magnitude of a single element, w(theta, phi) >= 0.
struct ElementPattern {
  std::function<double(const SphDirection&)> eval;

  double operator()(const SphDirection& dir) const { return eval(dir); }
  static ElementPattern isotropic();
};

struct QuadratureSpec {
  int n_theta = 256;
  int n_phi = 512;

  void validate() const;  // enforces n_theta >= 64, n_phi >= 128
};

// Array factor of the symmetric array laid along the x-axis:
//   F = 2 sum_n a_n cos(k d_n sin(theta) cos(phi) + beta_n).
// Real-valued; may be negative. |F| <= 2 sum a_n.
double array_factor(const ArrayConfig& cfg, const SphDirection& dir);

// Same array rigidly rotated so its line lies along `axis` (unit vector):
// the x-axis projection sin(theta)cos(phi) generalizes to <axis, u(dir)>.
double array_factor_axis(const ArrayConfig& cfg, const Vec3& axis, const SphDirection& dir);

// Total radiated power integral over the sphere of F^2 w^2 with the
// sin(theta) Jacobian, composite trapezoid in theta, periodic uniform rule
// in phi. Row sums are accumulated in fixed order.
double radiated_power_integral(const ArrayConfig& cfg, const ElementPattern& w,
                               const QuadratureSpec& quad);
double radiated_power_integral_axis(const ArrayConfig& cfg, const ElementPattern& w,
                                    const Vec3& axis, const QuadratureSpec& quad);

// D(dir) = 4 pi F(dir)^2 w(dir)^2 / radiated_power_integral.
// Throws numeric_error("null pattern") if the total radiated power vanishes.
double directivity(const ArrayConfig& cfg, const ElementPattern& w, const SphDirection& dir,
                   const QuadratureSpec& quad);
double gain(const ArrayConfig& cfg, const ElementPattern& w, const SphDirection& dir,
            const QuadratureSpec& quad);
double directivity_axis(const ArrayConfig& cfg, const ElementPattern& w, const Vec3& axis,
                        const SphDirection& dir, const QuadratureSpec& quad);

// Grid-searched (1 degree) then golden-section refined maximizer of
// |F * w|. Ties break to the smallest theta, then smallest phi; at the
// poles phi is canonicalized to 0.
SphDirection find_peak_direction(const ArrayConfig& cfg, const ElementPattern& w);

}  // namespace dronearray::pattern

#endif

#include "dronearray/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dronearray/errors.hpp"
#include "dronearray/parallel.hpp"

namespace dronearray::pattern {

double ArrayConfig::wavenumber() const { return 2.0 * M_PI / wavelength; }

void ArrayConfig::validate() const {
  const std::size_t n = d.size();
  if (n == 0) throw validation_error("array config: empty half-array");
  if (a.size() != n || beta.size() != n)
    throw validation_error("array config: d, a, beta must have equal length");
  if (!(wavelength > 0.0)) throw validation_error("array config: wavelength must be positive");
  if (efficiency < 0.0 || efficiency > 1.0)
    throw validation_error("array config: efficiency must be in [0, 1]");
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d[i] > prev)) throw validation_error("array config: spacings must be strictly increasing and positive");
    if (!(a[i] > 0.0)) throw validation_error("array config: amplitudes must be positive");
    prev = d[i];
  }
}

ElementPattern ElementPattern::isotropic() {
  return ElementPattern{[](const SphDirection&) { return 1.0; }};
}

void QuadratureSpec::validate() const {
  if (n_theta < 64 || n_phi < 128)
    throw validation_error("quadrature spec below minimum resolution (64 x 128)");
}

namespace {

double factor_from_projection(const ArrayConfig& cfg, double proj) {
  const double k = cfg.wavenumber();
  double f = 0.0;
  for (std::size_t n = 0; n < cfg.d.size(); ++n)
    f += cfg.a[n] * std::cos(k * cfg.d[n] * proj + cfg.beta[n]);
  return 2.0 * f;
}

// Radiated power of F^2 w^2 where the array line points along `axis`.
// Composite trapezoid in theta with the Euler-Maclaurin endpoint correction:
// the integrand is sin(theta) * h(theta), so its derivative at the poles is
// just h evaluated there, which the pole rows already provide. This restores
// O(h^4) convergence that the sin(theta) boundary would otherwise break.
double power_integral(const ArrayConfig& cfg, const ElementPattern& w, const Vec3& axis,
                      const QuadratureSpec& quad) {
  cfg.validate();
  quad.validate();
  const int nt = quad.n_theta;
  const int np = quad.n_phi;
  const double ht = M_PI / nt;
  const double hp = 2.0 * M_PI / np;

  std::vector<double> row(static_cast<std::size_t>(nt) + 1, 0.0);
  parallel_for(static_cast<std::size_t>(nt) + 1, [&](std::size_t i) {
    const double theta = static_cast<double>(i) * ht;
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    double acc = 0.0;
    for (int j = 0; j < np; ++j) {
      const double phi = -M_PI + j * hp;
      const SphDirection dir{theta, phi};
      const double proj = axis.x * st * std::cos(phi) + axis.y * st * std::sin(phi) + axis.z * ct;
      const double f = factor_from_projection(cfg, proj);
      const double we = w(dir);
      acc += f * f * we * we;
    }
    row[i] = acc;
  });
  double total = 0.0;
  for (int i = 0; i <= nt; ++i) {
    const double tw = (i == 0 || i == nt) ? 0.5 : 1.0;
    total += tw * row[static_cast<std::size_t>(i)] * std::sin(i * ht);
  }
  total *= ht * hp;
  total += ht * ht / 12.0 * hp * (row.front() + row.back());
  return total;
}

double directivity_impl(const ArrayConfig& cfg, const ElementPattern& w, const Vec3& axis,
                        const SphDirection& dir, const QuadratureSpec& quad) {
  const double denom = power_integral(cfg, w, axis, quad);
  const double f = array_factor_axis(cfg, axis, dir);
  const double we = w(dir);
  const double num = 4.0 * M_PI * f * f * we * we;
  if (!(denom > 0.0) || denom < 1e-300) throw numeric_error("null pattern");
  return num / denom;
}

}  // namespace

double array_factor(const ArrayConfig& cfg, const SphDirection& dir) {
  return factor_from_projection(cfg, std::sin(dir.theta) * std::cos(dir.phi));
}

double array_factor_axis(const ArrayConfig& cfg, const Vec3& axis, const SphDirection& dir) {
  return factor_from_projection(cfg, geom::dot(axis, geom::unit_vector(dir)));
}

double radiated_power_integral(const ArrayConfig& cfg, const ElementPattern& w,
                               const QuadratureSpec& quad) {
  return power_integral(cfg, w, Vec3{1, 0, 0}, quad);
}

double radiated_power_integral_axis(const ArrayConfig& cfg, const ElementPattern& w,
                                    const Vec3& axis, const QuadratureSpec& quad) {
  return power_integral(cfg, w, axis, quad);
}

double directivity(const ArrayConfig& cfg, const ElementPattern& w, const SphDirection& dir,
                   const QuadratureSpec& quad) {
  return directivity_impl(cfg, w, Vec3{1, 0, 0}, dir, quad);
}

double gain(const ArrayConfig& cfg, const ElementPattern& w, const SphDirection& dir,
            const QuadratureSpec& quad) {
  return directivity(cfg, w, dir, quad) * cfg.efficiency;
}

double directivity_axis(const ArrayConfig& cfg, const ElementPattern& w, const Vec3& axis,
                        const SphDirection& dir, const QuadratureSpec& quad) {
  return directivity_impl(cfg, w, axis, dir, quad);
}

namespace {

double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters,
                  double fallback_x) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return f(xm) >= f(fallback_x) ? xm : fallback_x;
}

}  // namespace

SphDirection find_peak_direction(const ArrayConfig& cfg, const ElementPattern& w) {
  cfg.validate();
  auto objective = [&](double theta, double phi) {
    const SphDirection dir{theta, phi};
    return std::fabs(array_factor(cfg, dir) * w(dir));
  };

  // Coarse 1-degree scan; strict > keeps the smallest theta then phi on ties.
  const double dtheta = M_PI / 180.0;
  const double dphi = 2.0 * M_PI / 360.0;
  double best = -1.0;
  double th_c = 0.0, ph_c = 0.0;
  for (int i = 0; i <= 180; ++i) {
    const double theta = i * dtheta;
    for (int j = 0; j < 360; ++j) {
      const double phi = -M_PI + (j + 1) * dphi;
      const double v = objective(theta, phi);
      if (v > best) {
        best = v;
        th_c = theta;
        ph_c = phi;
      }
    }
  }

  // Golden-section refinement, 20 iterations per axis.
  auto refine = [&](double th0, double ph0) {
    const double th_lo = std::max(0.0, th0 - dtheta);
    const double th_hi = std::min(M_PI, th0 + dtheta);
    const double th =
        golden_max([&](double t) { return objective(t, ph0); }, th_lo, th_hi, 20, th0);
    const double ph =
        golden_max([&](double p) { return objective(th, p); }, ph0 - dphi, ph0 + dphi, 20, ph0);
    return SphDirection{th, ph};
  };
  SphDirection out = refine(th_c, ph_c);

  // The maximizer may be non-unique (for the x-axis array the maxima form a
  // cone sin(theta)cos(phi) = u*). Ties break to the smallest theta: adopt
  // the level set's smallest-theta representative when it attains the same
  // value.
  const double u_star = std::sin(out.theta) * std::cos(out.phi);
  const SphDirection canonical{std::asin(std::min(1.0, std::fabs(u_star))),
                               u_star >= 0.0 ? 0.0 : M_PI};
  if (objective(canonical.theta, canonical.phi) >=
      objective(out.theta, out.phi) * (1.0 - 1e-9)) {
    const double th_lo = std::max(0.0, canonical.theta - dtheta);
    const double th_hi = std::min(M_PI, canonical.theta + dtheta);
    out.theta = golden_max([&](double t) { return objective(t, canonical.phi); }, th_lo, th_hi,
                           20, canonical.theta);
    out.phi = canonical.phi;
  }
  if (out.theta < 1e-9) {
    out.theta = 0.0;
    out.phi = 0.0;
  } else if (out.theta > M_PI - 1e-9) {
    out.theta = M_PI;
    out.phi = 0.0;
  } else {
    if (out.phi > M_PI) out.phi -= 2.0 * M_PI;
    if (out.phi <= -M_PI) out.phi += 2.0 * M_PI;
  }
  return out;
}

}  // namespace dronearray::pattern

#include "dronearray/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "dronearray/errors.hpp"

namespace dronearray::geom {

namespace {
constexpr double kUnitTol = 1e-9;        // rotation_between input norm check
constexpr double kAntiParallel = 1e-12;  // dot <= -1 + this -> pi rotation
constexpr double kParallel = 1e-11;      // cross norm below this -> identity
}  // namespace

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (n == 0.0) throw validation_error("degenerate direction");
  return v * (1.0 / n);
}

Mat3 Mat3::transposed() const {
  Mat3 t;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
  return t;
}

double Mat3::determinant() const {
  const auto& a = m;
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(r, k) * b(k, c);
      out(r, c) = s;
    }
  return out;
}

SphResult cart_to_sph(const Vec3& p, const Vec3& origin) {
  const Vec3 d = p - origin;
  const double r = norm(d);
  if (r == 0.0) throw validation_error("degenerate direction");
  SphResult out;
  out.r = r;
  out.dir.theta = std::acos(std::clamp(d.z / r, -1.0, 1.0));
  const double rho = std::hypot(d.x, d.y);
  out.dir.phi = (rho == 0.0) ? 0.0 : std::atan2(d.y, d.x);
  if (out.dir.phi <= -M_PI) out.dir.phi = M_PI;  // keep phi in (-pi, pi]
  return out;
}

Vec3 unit_vector(const SphDirection& dir) {
  const double st = std::sin(dir.theta);
  return {st * std::cos(dir.phi), st * std::sin(dir.phi), std::cos(dir.theta)};
}

Vec3 sph_to_cart(double r, const SphDirection& dir, const Vec3& origin) {
  return origin + r * unit_vector(dir);
}

namespace {

// Rodrigues rotation about unit axis a by angle with cosine c, sine s.
Mat3 rodrigues(const Vec3& a, double c, double s) {
  Mat3 R;
  const double k = 1.0 - c;
  R(0, 0) = a.x * a.x * k + c;
  R(0, 1) = a.x * a.y * k - a.z * s;
  R(0, 2) = a.x * a.z * k + a.y * s;
  R(1, 0) = a.x * a.y * k + a.z * s;
  R(1, 1) = a.y * a.y * k + c;
  R(1, 2) = a.y * a.z * k - a.x * s;
  R(2, 0) = a.x * a.z * k - a.y * s;
  R(2, 1) = a.y * a.z * k + a.x * s;
  R(2, 2) = a.z * a.z * k + c;
  return R;
}

Vec3 orthogonal_axis(const Vec3& v) {
  // Cross with the basis vector along v's smallest-magnitude component.
  const double ax = std::fabs(v.x), ay = std::fabs(v.y), az = std::fabs(v.z);
  Vec3 basis{0, 0, 0};
  if (ax <= ay && ax <= az)
    basis.x = 1.0;
  else if (ay <= az)
    basis.y = 1.0;
  else
    basis.z = 1.0;
  return normalized(cross(v, basis));
}

}  // namespace

Mat3 rotation_between(const Vec3& q_from, const Vec3& q_to) {
  if (std::fabs(norm(q_from) - 1.0) > kUnitTol || std::fabs(norm(q_to) - 1.0) > kUnitTol)
    throw validation_error("rotation_between requires unit vectors");

  const double c = std::clamp(dot(q_from, q_to), -1.0, 1.0);
  if (c <= -1.0 + kAntiParallel) {
    return rodrigues(orthogonal_axis(q_from), -1.0, 0.0);
  }
  const Vec3 cr = cross(q_from, q_to);
  const double s = norm(cr);
  if (s < kParallel && c > 0.0) return Mat3::identity();
  return rodrigues(cr * (1.0 / s), c, s);
}

}  // namespace dronearray::geom

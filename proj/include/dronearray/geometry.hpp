#ifndef DRONEARRAY_GEOMETRY_HPP
#define DRONEARRAY_GEOMETRY_HPP

#include <array>
#include <cmath>

namespace dronearray::geom {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
Vec3 normalized(const Vec3& v);

// Polar angle theta in [0, pi] from +z, azimuth phi in (-pi, pi].
struct SphDirection {
  double theta = 0.0;
  double phi = 0.0;
};

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
  double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 transposed() const;
  double determinant() const;
  static Mat3 identity() { return Mat3{}; }
};

Mat3 operator*(const Mat3& a, const Mat3& b);

// Spherical decomposition of p relative to origin. Throws validation_error
// ("degenerate direction") if p coincides with origin. phi uses full-circle
// quadrant resolution; at the poles phi is defined as 0.
struct SphResult {
  double r = 0.0;
  SphDirection dir;
};
SphResult cart_to_sph(const Vec3& p, const Vec3& origin);

Vec3 unit_vector(const SphDirection& dir);
Vec3 sph_to_cart(double r, const SphDirection& dir, const Vec3& origin);

// Rotation taking unit vector q_from onto q_to: R * q_from = q_to.
// Axis is the normalized cross product, angle acos(q_from . q_to).
// Near-parallel inputs return the identity. Anti-parallel inputs rotate by
// pi about a fixed axis orthogonal to q_from (cross with the basis vector
// of q_from's smallest-magnitude component).
Mat3 rotation_between(const Vec3& q_from, const Vec3& q_to);

}  // namespace dronearray::geom

#endif

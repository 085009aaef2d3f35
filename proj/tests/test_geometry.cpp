#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dronearray/errors.hpp"
#include "dronearray/geometry.hpp"
#include "dronearray/rng.hpp"

using namespace dronearray;
using geom::Mat3;
using geom::Vec3;

namespace {

Vec3 random_unit(Rng& rng) {
  // Rejection sampling inside the unit ball keeps the distribution uniform.
  for (;;) {
    Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double n = geom::norm(v);
    if (n > 1e-3 && n <= 1.0) return v * (1.0 / n);
  }
}

double max_abs_entry(const Mat3& m) {
  double out = 0.0;
  for (double v : m.m) out = std::max(out, std::fabs(v));
  return out;
}

Mat3 minus_identity(const Mat3& m) {
  Mat3 out = m;
  out(0, 0) -= 1.0;
  out(1, 1) -= 1.0;
  out(2, 2) -= 1.0;
  return out;
}

}  // namespace

TEST_CASE("cart_to_sph: polar axis") {
  const auto r = geom::cart_to_sph({0, 0, 1}, {0, 0, 0});
  CHECK(r.r == doctest::Approx(1.0));
  CHECK(r.dir.theta == doctest::Approx(0.0));
  CHECK(r.dir.phi == doctest::Approx(0.0));
}

TEST_CASE("cart_to_sph: equatorial axis") {
  const auto r = geom::cart_to_sph({1, 0, 0}, {0, 0, 0});
  CHECK(r.r == doctest::Approx(1.0));
  CHECK(r.dir.theta == doctest::Approx(M_PI / 2));
  CHECK(r.dir.phi == doctest::Approx(0.0));
}

TEST_CASE("cart_to_sph: hand-evaluated diagonal") {
  // r = sqrt(3), theta = acos(1/sqrt(3)), phi = pi/4.
  const auto r = geom::cart_to_sph({1, 1, 1}, {0, 0, 0});
  CHECK(r.r == doctest::Approx(1.7320508075688772));
  CHECK(r.dir.theta == doctest::Approx(0.9553166181245093));
  CHECK(r.dir.phi == doctest::Approx(M_PI / 4));
}

TEST_CASE("cart_to_sph: negative-x quadrant resolved") {
  const auto r = geom::cart_to_sph({-1, -1, 0}, {0, 0, 0});
  CHECK(r.dir.phi == doctest::Approx(-3.0 * M_PI / 4));
}

TEST_CASE("cart_to_sph: coincident point rejected") {
  CHECK_THROWS_WITH_AS(geom::cart_to_sph({1, 2, 3}, {1, 2, 3}), "degenerate direction",
                       validation_error);
}

TEST_CASE("rotation_between: zero angle gives identity") {
  const Mat3 r = geom::rotation_between({0, 0, 1}, {0, 0, 1});
  CHECK(max_abs_entry(minus_identity(r)) == doctest::Approx(0.0));
}

TEST_CASE("rotation_between: x to z is a 90-degree rotation about -y") {
  const Mat3 r = geom::rotation_between({1, 0, 0}, {0, 0, 1});
  const double expect[9] = {0, 0, -1, 0, 1, 0, 1, 0, 0};
  for (int i = 0; i < 9; ++i)
    CHECK(r.m[static_cast<std::size_t>(i)] == doctest::Approx(expect[i]).epsilon(1e-12));
  const Vec3 mapped = r * Vec3{1, 0, 0};
  CHECK(geom::norm(mapped - Vec3{0, 0, 1}) < 1e-12);
}

TEST_CASE("rotation_between: x to y rotates about +z") {
  const Mat3 r = geom::rotation_between({1, 0, 0}, {0, 1, 0});
  CHECK(geom::norm(r * Vec3{1, 0, 0} - Vec3{0, 1, 0}) < 1e-12);
  CHECK(r(2, 2) == doctest::Approx(1.0));  // z-axis fixed
  CHECK((r * Vec3{0, 0, 1}).z == doctest::Approx(1.0));
}

TEST_CASE("rotation_between: anti-parallel input maps q to -q") {
  const Vec3 q{0.6, 0.0, 0.8};
  const Mat3 r = geom::rotation_between(q, -q);
  CHECK(geom::norm(r * q - (-q)) < 1e-10);
  // Deterministic: repeated calls give the same matrix.
  const Mat3 r2 = geom::rotation_between(q, -q);
  for (int i = 0; i < 9; ++i)
    CHECK(r.m[static_cast<std::size_t>(i)] == r2.m[static_cast<std::size_t>(i)]);
}

TEST_CASE("rotation_between: non-unit input rejected") {
  CHECK_THROWS_AS(geom::rotation_between({2, 0, 0}, {0, 0, 1}), validation_error);
}

TEST_CASE("rotation_between: random pairs are orthonormal and exact") {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 a = random_unit(rng);
    const Vec3 b = random_unit(rng);
    const Mat3 r = geom::rotation_between(a, b);
    CHECK(geom::norm(r * a - b) <= 1e-10);
    const Mat3 rtr = r.transposed() * r;
    CHECK(max_abs_entry(minus_identity(rtr)) <= 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cart_to_sph round-trips with sph_to_cart") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 origin{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Vec3 p{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
    if (geom::norm(p - origin) < 1e-6) continue;
    const auto sph = geom::cart_to_sph(p, origin);
    const Vec3 back = geom::sph_to_cart(sph.r, sph.dir, origin);
    CHECK(geom::norm(back - p) <= 1e-12 * std::max(1.0, geom::norm(p)));
  }
}

TEST_CASE("pole convention: phi is zero on the polar axis") {
  const auto up = geom::cart_to_sph({0, 0, 5}, {0, 0, 0});
  const auto down = geom::cart_to_sph({0, 0, -5}, {0, 0, 0});
  CHECK(up.dir.phi == 0.0);
  CHECK(down.dir.phi == 0.0);
  CHECK(down.dir.theta == doctest::Approx(M_PI));
}

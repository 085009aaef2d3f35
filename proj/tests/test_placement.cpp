#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "dronearray/errors.hpp"
#include "dronearray/placement.hpp"
#include "dronearray/rng.hpp"

using namespace dronearray;
using geom::SphDirection;
using geom::Vec3;
using pattern::ArrayConfig;
using pattern::ElementPattern;
using pattern::QuadratureSpec;
using placement::ArrayPose;
using placement::UserSite;

namespace {

constexpr double kLambda = 0.42857142857142855;

ArrayConfig table_config(int drone_count) {
  ArrayConfig cfg;
  cfg.wavelength = kLambda;
  const int n = drone_count / 2;
  const double step = M_PI / (5.0 * (drone_count - 1));
  for (int i = 0; i < n; ++i) {
    cfg.d.push_back((i + 0.5) * kLambda / 2.0);
    cfg.a.push_back(1.0);
    cfg.beta.push_back((i + 0.5) * step);
  }
  return cfg;
}

// Oracle: directivity of the array at explicit drone positions, from the
// general complex-exponential sum over all elements (positions relative to
// the pose origin, mirror phases negated).
double directivity_at_positions(const ArrayConfig& cfg, const ArrayPose& pose,
                                const SphDirection& dir) {
  const double k = 2.0 * M_PI / cfg.wavelength;
  const std::size_t n = cfg.d.size();
  auto factor = [&](const SphDirection& sd) {
    const Vec3 u = geom::unit_vector(sd);
    std::complex<double> f{0.0, 0.0};
    for (std::size_t m = 0; m < pose.positions.size(); ++m) {
      const Vec3 rel = pose.positions[m] - pose.origin;
      const double amp = cfg.a[m < n ? m : 2 * n - 1 - m];
      const double phase = m < n ? cfg.beta[m] : -cfg.beta[2 * n - 1 - m];
      f += amp * std::exp(std::complex<double>(0.0, k * geom::dot(rel, u) + phase));
    }
    return f;
  };
  const int nt = 256, np = 512;
  const double ht = M_PI / nt, hp = 2.0 * M_PI / np;
  double denom = 0.0;
  for (int i = 0; i <= nt; ++i) {
    const double theta = i * ht;
    double row = 0.0;
    for (int j = 0; j < np; ++j)
      row += std::norm(factor({theta, -M_PI + j * hp}));
    denom += (i == 0 || i == nt ? 0.5 : 1.0) * row * std::sin(theta);
    if (i == 0 || i == nt) denom += row * ht / 12.0;
  }
  denom *= ht * hp;
  return 4.0 * M_PI * std::norm(factor(dir)) / denom;
}

}  // namespace

TEST_CASE("user_angles: straight below the array center") {
  const UserSite user{{0, 0, 0}, 1.0};
  const auto dir = placement::user_angles(user, {0, 0, 100});
  CHECK(dir.theta == doctest::Approx(M_PI));
}

TEST_CASE("user_angles: horizontal user") {
  const UserSite user{{100, 0, 100}, 1.0};
  const auto dir = placement::user_angles(user, {0, 0, 100});
  CHECK(dir.theta == doctest::Approx(M_PI / 2));
  CHECK(dir.phi == doctest::Approx(0.0));
}

TEST_CASE("user_angles: hand-evaluated general position") {
  // Offset (100, 100, -100): r = 100 sqrt(3), theta = acos(-1/sqrt(3)),
  // phi = pi/4.
  const UserSite user{{100, 100, 0}, 1.0};
  const auto dir = placement::user_angles(user, {0, 0, 100});
  CHECK(dir.theta == doctest::Approx(std::acos(-1.0 / std::sqrt(3.0))));
  CHECK(dir.phi == doctest::Approx(M_PI / 4));
}

TEST_CASE("user_angles: coincident user rejected") {
  CHECK_THROWS_AS(placement::user_angles(UserSite{{0, 0, 100}, 1.0}, {0, 0, 100}),
                  validation_error);
}

TEST_CASE("place_drones: identity when the target equals the peak") {
  const std::vector<double> d_star{0.1, 0.3};
  const ArrayPose base = placement::axis_pose({0, 0, 100}, M_PI / 2, 0.0, d_star);
  const SphDirection peak{0.4, 0.2};
  const auto placed = placement::place_drones(d_star, base, peak, peak);
  for (std::size_t i = 0; i < base.positions.size(); ++i)
    CHECK(geom::norm(placed.pose.positions[i] - base.positions[i]) < 1e-12);
}

TEST_CASE("place_drones: axis swap case") {
  // Peak along +z rotated onto +x swaps the position coordinates accordingly.
  const std::vector<double> d_star{0.25};
  ArrayPose base = placement::axis_pose({0, 0, 0}, 0.0, 0.0, d_star);  // axis +z
  const auto placed =
      placement::place_drones(d_star, base, SphDirection{0.0, 0.0}, SphDirection{M_PI / 2, 0.0});
  CHECK(geom::norm(placed.rotation * Vec3{0, 0, 1} - Vec3{1, 0, 0}) < 1e-10);
  CHECK(geom::norm(placed.pose.positions[0] - Vec3{0.25, 0, 0}) < 1e-10);
  CHECK(geom::norm(placed.pose.positions[1] - Vec3{-0.25, 0, 0}) < 1e-10);
}

TEST_CASE("place_drones: pairwise symmetry about the origin") {
  Rng rng(211);
  const std::vector<double> d_star{0.11, 0.33, 0.56};
  const ArrayPose base = placement::axis_pose({5, -3, 40}, M_PI / 2, 0.0, d_star);
  for (int trial = 0; trial < 20; ++trial) {
    const SphDirection peak{rng.uniform(0.1, M_PI - 0.1), rng.uniform(-M_PI, M_PI)};
    const SphDirection target{rng.uniform(0.1, M_PI - 0.1), rng.uniform(-M_PI, M_PI)};
    const auto placed = placement::place_drones(d_star, base, peak, target);
    const std::size_t m = placed.pose.positions.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3 a = placed.pose.positions[i] - base.origin;
      const Vec3 b = placed.pose.positions[m - 1 - i] - base.origin;
      CHECK(geom::norm(a + b) < 1e-12);
    }
    // Rigid rotation preserves adjacent spacings exactly.
    for (std::size_t i = 1; i < m / 2; ++i) {
      const double gap = geom::norm(placed.pose.positions[i] - placed.pose.positions[i - 1]);
      CHECK(gap == doctest::Approx(d_star[i] - d_star[i - 1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("place_drones: rotation points the pattern peak at the target") {
  const auto cfg = table_config(10);
  const auto peak = pattern::find_peak_direction(cfg, ElementPattern::isotropic());
  const ArrayPose base = placement::axis_pose({0, 0, 100}, M_PI / 2, 0.0, cfg.d);
  Rng rng(223);
  for (int trial = 0; trial < 5; ++trial) {
    const SphDirection target{rng.uniform(0.2, M_PI - 0.2), rng.uniform(-M_PI, M_PI)};
    const auto placed = placement::place_drones(cfg.d, base, peak, target);
    // The rotated-axis projection form must peak at the target direction.
    const double at_target =
        pattern::directivity_axis(cfg, ElementPattern::isotropic(), placed.rotated_axis, target,
                                  QuadratureSpec{});
    const double ref =
        pattern::directivity(cfg, ElementPattern::isotropic(), peak, QuadratureSpec{});
    CHECK(at_target == doctest::Approx(ref).epsilon(1e-4));
    // And the explicit-position oracle agrees.
    const double oracle = directivity_at_positions(cfg, placed.pose, target);
    CHECK(oracle == doctest::Approx(ref).epsilon(1e-4));
  }
}

TEST_CASE("plan_array_for_user: user on the current peak axis leaves the pose direction fixed") {
  const auto cfg = table_config(4);
  spacing::OptimizerSettings settings;
  settings.max_outer_iters = 3;
  const placement::ArrayPlanner planner(cfg, ElementPattern::isotropic(), settings, {64, 128},
                                        0.1);
  const Vec3 origin{0, 0, 100};
  const ArrayPose base = placement::axis_pose(origin, M_PI / 2, 0.0, planner.d_star());
  // Put the user along the peak direction of the optimized array.
  const Vec3 u = geom::unit_vector(planner.peak());
  const UserSite user{origin + 500.0 * u, 1e8};
  const auto placed = planner.place_for_user(user, base);
  for (std::size_t i = 0; i < base.positions.size(); ++i)
    CHECK(geom::norm(placed.pose.positions[i] - base.positions[i]) < 1e-6);
}

TEST_CASE("plan_array_for_user: mirrored users produce mirrored poses") {
  const auto cfg = table_config(4);
  spacing::OptimizerSettings settings;
  settings.max_outer_iters = 3;
  const placement::ArrayPlanner planner(cfg, ElementPattern::isotropic(), settings, {64, 128},
                                        0.1);
  const Vec3 origin{0, 0, 100};
  const ArrayPose base = placement::axis_pose(origin, M_PI / 2, 0.0, planner.d_star());
  const auto up = planner.place_for_user(UserSite{{300, 200, 0}, 1.0}, base);
  const auto down = planner.place_for_user(UserSite{{300, -200, 0}, 1.0}, base);
  for (std::size_t i = 0; i < up.pose.positions.size(); ++i) {
    const Vec3 a = up.pose.positions[i] - origin;
    const Vec3 b = down.pose.positions[i] - origin;
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-9));
    CHECK(a.y == doctest::Approx(-b.y).epsilon(1e-9));
    CHECK(a.z == doctest::Approx(b.z).epsilon(1e-9));
  }
}

TEST_CASE("plan_array_for_user: gain toward the user matches the global peak") {
  const auto cfg = table_config(10);
  spacing::OptimizerSettings settings;
  const QuadratureSpec quad{128, 256};
  const placement::ArrayPlanner planner(cfg, ElementPattern::isotropic(), settings, quad, 0.1);
  const Vec3 origin{0, 0, 100};
  const ArrayPose base = placement::axis_pose(origin, M_PI / 2, 0.0, planner.d_star());
  Rng rng(227);
  const UserSite user{{rng.uniform(-500, 500), rng.uniform(-500, 500), 0}, 1e8};
  const auto placed = planner.place_for_user(user, base);
  const auto target = placement::user_angles(user, origin);

  // Directivity toward the user on the rotated array vs. the cached peak.
  ArrayConfig optimized = cfg;
  optimized.d = planner.d_star();
  const double toward_user = pattern::directivity_axis(
      optimized, ElementPattern::isotropic(), placed.rotated_axis, target, quad);
  CHECK(toward_user == doctest::Approx(planner.peak_directivity()).epsilon(1e-4));

  // Re-found peak of the rotated array coincides with the user direction.
  const Vec3 ut = geom::unit_vector(target);
  const Vec3 mapped = placed.rotation * geom::unit_vector(planner.peak());
  CHECK(geom::norm(mapped - ut) < 1e-10);
}

TEST_CASE("low altitude placements are flagged") {
  const std::vector<double> d_star{10.0};  // exaggerated arm to cross z = 5
  const ArrayPose base = placement::axis_pose({0, 0, 12}, M_PI / 2, 0.0, d_star);
  const auto placed = placement::place_drones(d_star, base, SphDirection{M_PI / 2, 0.0},
                                              SphDirection{0.0, 0.0});
  CHECK(placed.low_altitude);  // one end dips to z = 2
}

TEST_CASE("pose CSV layout") {
  const ArrayPose pose = placement::axis_pose({0, 0, 100}, M_PI / 2, 0.0, {0.1, 0.2});
  std::string body = placement::pose_csv_header();
  placement::append_pose_csv(body, 1, pose);
  CHECK(body.rfind("user_index,drone_index,x,y,z\n", 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 5);
}

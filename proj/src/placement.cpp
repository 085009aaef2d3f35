#include "dronearray/placement.hpp"

#include <cmath>

#include "dronearray/csv.hpp"
#include "dronearray/errors.hpp"

namespace dronearray::placement {

namespace {
constexpr double kMinSafeAltitude = 5.0;  // meters
}

Vec3 ArrayPose::axis_unit() const {
  return geom::unit_vector(SphDirection{alpha0, gamma0});
}

SphDirection user_angles(const UserSite& user, const Vec3& origin) {
  return geom::cart_to_sph(user.position, origin).dir;
}

PlacementResult place_drones(const std::vector<double>& d_star, const ArrayPose& pose,
                             const SphDirection& peak, const SphDirection& target) {
  if (d_star.empty()) throw validation_error("place_drones: empty spacing vector");

  PlacementResult out;
  out.rotation = geom::rotation_between(geom::unit_vector(peak), geom::unit_vector(target));
  out.rotated_axis = out.rotation * pose.axis_unit();

  const std::size_t n = d_star.size();
  out.pose = pose;
  out.pose.positions.assign(2 * n, Vec3{});
  for (std::size_t m = 0; m < n; ++m) {
    const Vec3 offset = d_star[m] * out.rotated_axis;
    out.pose.positions[m] = pose.origin + offset;           // drone m+1
    out.pose.positions[2 * n - 1 - m] = pose.origin - offset;  // drone M-m
  }
  for (const auto& p : out.pose.positions)
    if (p.z < kMinSafeAltitude) out.low_altitude = true;
  return out;
}

ArrayPlanner::ArrayPlanner(ArrayConfig cfg, ElementPattern w, OptimizerSettings settings,
                           QuadratureSpec quad, double d_min)
    : cfg_(std::move(cfg)), w_(std::move(w)), quad_(quad) {
  const auto d_init = spacing::initial_spacing(cfg_.d.empty() ? cfg_.a.size() : cfg_.d.size(),
                                               cfg_.wavelength, d_min);
  spacing_ = spacing::optimize_spacing(cfg_, w_, cfg_.d.empty() ? d_init : cfg_.d, d_min,
                                       settings, quad_);
  cfg_.d = spacing_.d_star;
}

PlacementResult ArrayPlanner::place_for_user(const UserSite& user, const ArrayPose& pose) const {
  const SphDirection target = user_angles(user, pose.origin);
  return place_drones(spacing_.d_star, pose, spacing_.peak, target);
}

PlacementResult plan_array_for_user(const ArrayConfig& cfg, const UserSite& user,
                                    const ArrayPose& pose, const OptimizerSettings& settings,
                                    const QuadratureSpec& quad, double d_min) {
  const ArrayPlanner planner(cfg, ElementPattern::isotropic(), settings, quad, d_min);
  return planner.place_for_user(user, pose);
}

ArrayPose axis_pose(const Vec3& origin, double alpha0, double gamma0,
                    const std::vector<double>& d_star) {
  ArrayPose pose;
  pose.origin = origin;
  pose.alpha0 = alpha0;
  pose.gamma0 = gamma0;
  const Vec3 axis = pose.axis_unit();
  const std::size_t n = d_star.size();
  pose.positions.assign(2 * n, Vec3{});
  for (std::size_t m = 0; m < n; ++m) {
    const Vec3 offset = d_star[m] * axis;
    pose.positions[m] = origin + offset;
    pose.positions[2 * n - 1 - m] = origin - offset;
  }
  return pose;
}

std::string pose_csv_header() { return "user_index,drone_index,x,y,z\n"; }

void append_pose_csv(std::string& out, int user_index, const ArrayPose& pose) {
  for (std::size_t i = 0; i < pose.positions.size(); ++i) {
    const auto& p = pose.positions[i];
    out += csv::field(user_index) + ',' + csv::field(static_cast<int>(i + 1)) + ',' +
           csv::field(p.x) + ',' + csv::field(p.y) + ',' + csv::field(p.z) + '\n';
  }
}

}  // namespace dronearray::placement

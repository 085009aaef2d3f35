#ifndef DRONEARRAY_PLACEMENT_HPP
#define DRONEARRAY_PLACEMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "dronearray/spacing_opt.hpp"

namespace dronearray::placement {

using geom::Mat3;
using geom::SphDirection;
using geom::Vec3;
using pattern::ArrayConfig;
using pattern::ElementPattern;
using pattern::QuadratureSpec;
using spacing::OptimizerSettings;

struct UserSite {
  Vec3 position;          // meters
  double load_bits = 0.0; // > 0
};

// Pose of the full array: origin plus the M drone positions, stored in
// Theorem-2 order (drones 1..M/2 on the + side outward, drone M+1-m mirrors
// drone m through the origin). alpha0/gamma0 give the unrotated axis.
struct ArrayPose {
  Vec3 origin;
  double alpha0 = M_PI / 2.0;  // initial polar angle of the axis (x-axis default)
  double gamma0 = 0.0;         // initial azimuthal angle
  std::vector<Vec3> positions;

  Vec3 axis_unit() const;  // unit vector from (alpha0, gamma0)
};

struct PlacementResult {
  ArrayPose pose;
  Mat3 rotation;        // maps the peak direction onto the user direction
  Vec3 rotated_axis;    // array line after rotation
  bool low_altitude = false;  // some drone below 5 m altitude
};

// Spherical angles of the user in the array-centered frame (Eqs. of the
// coordinate translation; full-quadrant azimuth).
SphDirection user_angles(const UserSite& user, const Vec3& origin);

// Rigidly rotates the optimized axis placement so the pattern peak points at
// `target`. Adjacent spacings are preserved exactly; positions come in
// symmetric pairs about the pose origin.
PlacementResult place_drones(const std::vector<double>& d_star, const ArrayPose& pose,
                             const SphDirection& peak, const SphDirection& target);

// Caches the spacing optimization and peak search for one array
// configuration; per-user placement then reduces to one rotation. The
// per-user results are identical to re-running the optimizer each time.
class ArrayPlanner {
public:
  ArrayPlanner(ArrayConfig cfg, ElementPattern w, OptimizerSettings settings,
               QuadratureSpec quad, double d_min);

  const spacing::SpacingResult& spacing_result() const { return spacing_; }
  const std::vector<double>& d_star() const { return spacing_.d_star; }
  const SphDirection& peak() const { return spacing_.peak; }
  double peak_directivity() const { return spacing_.peak_directivity; }
  double peak_gain() const { return spacing_.peak_directivity * cfg_.efficiency; }
  const ArrayConfig& config() const { return cfg_; }

  PlacementResult place_for_user(const UserSite& user, const ArrayPose& pose) const;

private:
  ArrayConfig cfg_;
  ElementPattern w_;
  QuadratureSpec quad_;
  spacing::SpacingResult spacing_;
};

// One-shot wrapper: optimize spacing, find the peak, rotate toward the user.
PlacementResult plan_array_for_user(const ArrayConfig& cfg, const UserSite& user,
                                    const ArrayPose& pose, const OptimizerSettings& settings,
                                    const QuadratureSpec& quad, double d_min);

// Unrotated placement along the pose axis (identity rotation).
ArrayPose axis_pose(const Vec3& origin, double alpha0, double gamma0,
                    const std::vector<double>& d_star);

std::string pose_csv_header();
void append_pose_csv(std::string& out, int user_index, const ArrayPose& pose);

}  // namespace dronearray::placement

#endif

#ifndef DRONEARRAY_CONTROL_HPP
#define DRONEARRAY_CONTROL_HPP

#include <array>
#include <string>
#include <vector>

#include "dronearray/quadrotor.hpp"

namespace dronearray::control {

using geom::Vec3;
using quadrotor::DronePhysParams;
using quadrotor::RotorSpeeds;

// Attitude (yaw fixed at zero) plus the magnitude of the resulting net force.
struct Orientation {
  double pitch = 0.0;
  double roll = 0.0;
  double yaw = 0.0;
  double total_force = 0.0;  // N, along the requested direction
};

// Orientation at which thrust of magnitude `thrust_n` combines with the
// external force `f_ext` (wind plus gravity) into a net force collinear with
// `target`, with the largest achievable magnitude. Throws
// numeric_error("cannot align thrust") when no such orientation exists.
Orientation max_accel_orientation(const Vec3& f_ext, const Vec3& target, double thrust_n);

// Attitude whose thrust direction opposes f_ext (net zero force at the
// matching rotor speed). Level when f_ext vanishes.
Orientation hover_attitude(const Vec3& f_ext);

// Rotor speed at which total thrust balances |f_ext| (wind plus gravity).
// Throws numeric_error("wind exceeds authority") if that needs more than
// v_max on each rotor.
double stable_hover_speed(const Vec3& f_ext, const DronePhysParams& p);

// Rest-to-rest double integrator: accelerate at a_max until tau, then at
// a_min until T. T = sqrt(2 d (1/a_max - 1/a_min)), tau = a_min/(a_min-a_max) T.
struct BangBangTimes {
  double tau = 0.0;
  double total = 0.0;
};
BangBangTimes bang_bang_times(double distance, double a_max, double a_min);

struct ManeuverRequest {
  Vec3 start;
  Vec3 goal;
  DronePhysParams params;
};

struct PlannerOptions {
  // Orientation stages translate the drone; with compensation on, the
  // switching times absorb the predicted drift so the plan closes on the
  // goal. Off reproduces the pure decomposition (orientation stages treated
  // as translation-free).
  bool drift_compensation = true;
  double predictor_dt = 5e-4;  // s, internal drift predictor step
  int max_iterations = 14;
};

// Signed pitch/roll change of one orientation stage and its quarter times.
struct OrientationStage {
  double d_pitch = 0.0;
  double d_roll = 0.0;
  double pitch_quarter = 0.0;  // s, one of the two pitch quarters
  double roll_quarter = 0.0;

  double duration() const { return 2.0 * (pitch_quarter + roll_quarter); }
};

struct PlanSegment {
  int stage = 0;  // 1..6
  double t_start = 0.0;
  double t_end = 0.0;
  RotorSpeeds speeds;
};

struct ControlPlan {
  std::vector<PlanSegment> segments;        // positive-duration segments, stages 1..5
  std::array<double, 14> switching_times{}; // tau_1..tau_14; repeats mark empty quarters
  double total_time = 0.0;                  // = tau_14

  OrientationStage stage1, stage3, stage5;
  double a_s2 = 0.0;   // net force along the goal direction in stage 2 (N, > 0)
  double a_s4 = 0.0;   // same for stage 4 (N, < 0)
  double t_s2 = 0.0, t_s4 = 0.0;
  double hover_speed = 0.0;  // v_F, stage-6 rotor speed
  Orientation att2, att4, att6;
  Vec3 goal_direction;  // unit, zero for degenerate plans
  double distance = 0.0;

  // Boundary terms of the translation solve, along the goal direction.
  // All zero for uncompensated plans, which collapses the solve to
  // T = sqrt(2 d (m/A_s2 - m/A_s4)).
  double u1_par = 0.0, u3_par = 0.0, u5_par = 0.0;  // m/s
  double s_off_par = 0.0;                           // m
  double coast3 = 0.0, coast5 = 0.0;                // s

  bool compensated = false;
  Vec3 predicted_miss;               // predicted endpoint error (m)
  Vec3 predicted_residual_velocity;  // predicted terminal velocity (m/s)
  DronePhysParams params;

  std::vector<quadrotor::Segment> schedule() const;
  quadrotor::Segment hover_segment(double duration) const;  // appended stage 6
};

// Six-stage minimum-time plan from rest and level attitude at `start` to
// rest at `goal` under the given wind force.
ControlPlan plan_maneuver(const ManeuverRequest& req, const Vec3& wind,
                          const PlannerOptions& options = {});

// Closed-form total: orientation-stage terms from the recorded angle
// changes plus the translation time re-solved from the recorded boundary
// terms. Equals the stage sum tau_14 up to roundoff.
double total_control_time(const ControlPlan& plan);

std::string plan_csv(const ControlPlan& plan);

}  // namespace dronearray::control

#endif

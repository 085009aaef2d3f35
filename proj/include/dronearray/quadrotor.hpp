#ifndef DRONEARRAY_QUADROTOR_HPP
#define DRONEARRAY_QUADROTOR_HPP

#include <array>
#include <string>
#include <vector>

#include "dronearray/geometry.hpp"

namespace dronearray::quadrotor {

using geom::Vec3;

struct DronePhysParams {
  double mass_kg = 0.5;
  double arm_m = 0.2;              // rotor distance from center
  double lift_coeff = 2.9e-5;      // rho1, N s^2
  double torque_coeff = 1.1e-6;    // rho2, N m s^2; yaw is held at zero so this
                                   // only enters the (identically zero) yaw torque
  double inertia_x = 4.9e-3;       // kg m^2
  double inertia_y = 4.9e-3;
  double inertia_z = 8.8e-3;       // unused while yaw stays zero
  double max_rotor_speed = 300.0;  // rad/s
  double gravity = 9.81;           // m/s^2

  double max_thrust() const { return 4.0 * lift_coeff * max_rotor_speed * max_rotor_speed; }
  Vec3 gravity_force() const { return {0.0, 0.0, -mass_kg * gravity}; }
  void validate() const;
};

struct RotorSpeeds {
  std::array<double, 4> v{0, 0, 0, 0};

  double operator[](std::size_t i) const { return v[i]; }
  void validate(double v_max) const;  // 0 <= v_i <= v_max
};

struct RigidState {
  Vec3 position;
  Vec3 velocity;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;             // psi_r, psi_p, psi_y
  double roll_rate = 0.0, pitch_rate = 0.0, yaw_rate = 0.0;

  void wrap_angles();  // into (-pi, pi]
};

// Thrust and body torques from squared rotor speeds. kappa1 drives the pitch
// acceleration (kappa1 / I_y), kappa2 the roll acceleration (kappa2 / I_x),
// kappa3 the yaw acceleration (kappa3 / I_z).
struct MixerOutput {
  double thrust = 0.0;  // N
  double kappa1 = 0.0;  // N m
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};
MixerOutput mixer(const RotorSpeeds& speeds, const DronePhysParams& p);

// Direction the thrust acts along for attitude (roll, pitch) at zero yaw:
//   (cos r sin p, sin r, cos r cos p).
Vec3 thrust_direction(double roll, double pitch);

struct StateDerivative {
  Vec3 velocity;
  Vec3 acceleration;
  double roll_rate, pitch_rate, yaw_rate;
  double roll_accel, pitch_accel, yaw_accel;
};

// Translational and rotational accelerations; wind is a force in newtons.
StateDerivative derivatives(const RigidState& s, const RotorSpeeds& speeds, const Vec3& wind,
                            const DronePhysParams& p);

// Piecewise-constant rotor command over [t_start, t_end).
struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  RotorSpeeds speeds;
};

struct TrajectorySample {
  double t = 0.0;
  RigidState state;
  RotorSpeeds speeds;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  const RigidState& final_state() const { return samples.back().state; }
  double peak_speed() const;
  std::string csv() const;  // t,x,y,z,vx,vy,vz,roll,pitch,yaw,v1..v4
};

// Fixed-step RK4 under the segment schedule, stepping exactly onto each
// segment boundary. Samples are stored every `sample_stride` steps plus at
// every boundary. Throws numeric_error("unstable trajectory") if the
// position norm exceeds 1e6 m. dt must be <= 1e-3 s.
Trajectory integrate(const RigidState& s0, const std::vector<Segment>& schedule, const Vec3& wind,
                     const DronePhysParams& p, double dt = 1e-3, int sample_stride = 10);

}  // namespace dronearray::quadrotor

#endif

#include "dronearray/quadrotor.hpp"

#include <cmath>

#include "dronearray/csv.hpp"
#include "dronearray/errors.hpp"

namespace dronearray::quadrotor {

void DronePhysParams::validate() const {
  const double vals[] = {mass_kg,   arm_m,     lift_coeff,      torque_coeff, inertia_x,
                         inertia_y, inertia_z, max_rotor_speed, gravity};
  for (double v : vals)
    if (!(v > 0.0)) throw validation_error("drone params: all physical constants must be positive");
}

void RotorSpeeds::validate(double v_max) const {
  for (double s : v)
    if (s < 0.0 || s > v_max) throw validation_error("rotor speed outside [0, v_max]");
}

void RigidState::wrap_angles() {
  auto wrap = [](double a) {
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
  };
  roll = wrap(roll);
  pitch = wrap(pitch);
  yaw = wrap(yaw);
}

MixerOutput mixer(const RotorSpeeds& s, const DronePhysParams& p) {
  const double v1 = s.v[0] * s.v[0];
  const double v2 = s.v[1] * s.v[1];
  const double v3 = s.v[2] * s.v[2];
  const double v4 = s.v[3] * s.v[3];
  MixerOutput out;
  out.thrust = p.lift_coeff * (v1 + v2 + v3 + v4);
  out.kappa1 = p.lift_coeff * p.arm_m * (v4 - v2);
  out.kappa2 = p.lift_coeff * p.arm_m * (v3 - v1);
  out.kappa3 = p.torque_coeff * (-v1 + v2 - v3 + v4);
  return out;
}

Vec3 thrust_direction(double roll, double pitch) {
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  return {cr * sp, sr, cr * cp};
}

StateDerivative derivatives(const RigidState& s, const RotorSpeeds& speeds, const Vec3& wind,
                            const DronePhysParams& p) {
  const MixerOutput mix = mixer(speeds, p);
  const double cr = std::cos(s.roll), sr = std::sin(s.roll);
  const double cp = std::cos(s.pitch), sp = std::sin(s.pitch);
  const double cy = std::cos(s.yaw), sy = std::sin(s.yaw);
  const double tm = mix.thrust / p.mass_kg;

  StateDerivative d;
  d.velocity = s.velocity;
  d.acceleration.x = (cr * sp * cy + sr * sy) * tm + wind.x / p.mass_kg;
  d.acceleration.y = (cr * sp * sy + sr * cy) * tm + wind.y / p.mass_kg;
  d.acceleration.z = (cr * cp) * tm - p.gravity + wind.z / p.mass_kg;
  d.roll_rate = s.roll_rate;
  d.pitch_rate = s.pitch_rate;
  d.yaw_rate = s.yaw_rate;
  d.roll_accel = mix.kappa2 / p.inertia_x;
  d.pitch_accel = mix.kappa1 / p.inertia_y;
  d.yaw_accel = mix.kappa3 / p.inertia_z;
  return d;
}

namespace {

RigidState advance(const RigidState& s, const StateDerivative& d, double h) {
  RigidState out = s;
  out.position += h * d.velocity;
  out.velocity += h * d.acceleration;
  out.roll += h * d.roll_rate;
  out.pitch += h * d.pitch_rate;
  out.yaw += h * d.yaw_rate;
  out.roll_rate += h * d.roll_accel;
  out.pitch_rate += h * d.pitch_accel;
  out.yaw_rate += h * d.yaw_accel;
  return out;
}

StateDerivative combine_rk4(const StateDerivative& k1, const StateDerivative& k2,
                            const StateDerivative& k3, const StateDerivative& k4) {
  auto mix3 = [](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (1.0 / 6.0) * (a + 2.0 * b + 2.0 * c + d);
  };
  auto mix1 = [](double a, double b, double c, double d) {
    return (a + 2.0 * b + 2.0 * c + d) / 6.0;
  };
  StateDerivative out;
  out.velocity = mix3(k1.velocity, k2.velocity, k3.velocity, k4.velocity);
  out.acceleration = mix3(k1.acceleration, k2.acceleration, k3.acceleration, k4.acceleration);
  out.roll_rate = mix1(k1.roll_rate, k2.roll_rate, k3.roll_rate, k4.roll_rate);
  out.pitch_rate = mix1(k1.pitch_rate, k2.pitch_rate, k3.pitch_rate, k4.pitch_rate);
  out.yaw_rate = mix1(k1.yaw_rate, k2.yaw_rate, k3.yaw_rate, k4.yaw_rate);
  out.roll_accel = mix1(k1.roll_accel, k2.roll_accel, k3.roll_accel, k4.roll_accel);
  out.pitch_accel = mix1(k1.pitch_accel, k2.pitch_accel, k3.pitch_accel, k4.pitch_accel);
  out.yaw_accel = mix1(k1.yaw_accel, k2.yaw_accel, k3.yaw_accel, k4.yaw_accel);
  return out;
}

RigidState rk4_step(const RigidState& s, const RotorSpeeds& u, const Vec3& wind,
                    const DronePhysParams& p, double h) {
  const StateDerivative k1 = derivatives(s, u, wind, p);
  const StateDerivative k2 = derivatives(advance(s, k1, 0.5 * h), u, wind, p);
  const StateDerivative k3 = derivatives(advance(s, k2, 0.5 * h), u, wind, p);
  const StateDerivative k4 = derivatives(advance(s, k3, h), u, wind, p);
  return advance(s, combine_rk4(k1, k2, k3, k4), h);
}

}  // namespace

double Trajectory::peak_speed() const {
  double peak = 0.0;
  for (const auto& s : samples) peak = std::max(peak, geom::norm(s.state.velocity));
  return peak;
}

std::string Trajectory::csv() const {
  std::string out = "t,x,y,z,vx,vy,vz,roll,pitch,yaw,v1,v2,v3,v4\n";
  for (const auto& s : samples) {
    RigidState st = s.state;
    st.wrap_angles();
    out += csv::field(s.t) + ',' + csv::field(st.position.x) + ',' + csv::field(st.position.y) +
           ',' + csv::field(st.position.z) + ',' + csv::field(st.velocity.x) + ',' +
           csv::field(st.velocity.y) + ',' + csv::field(st.velocity.z) + ',' +
           csv::field(st.roll) + ',' + csv::field(st.pitch) + ',' + csv::field(st.yaw);
    for (double v : s.speeds.v) out += ',' + csv::field(v);
    out += '\n';
  }
  return out;
}

Trajectory integrate(const RigidState& s0, const std::vector<Segment>& schedule, const Vec3& wind,
                     const DronePhysParams& p, double dt, int sample_stride) {
  p.validate();
  if (!(dt > 0.0) || dt > 1e-3 + 1e-15) throw validation_error("integrate: dt must be in (0, 1e-3]");
  if (sample_stride < 1) throw validation_error("integrate: sample stride must be >= 1");

  Trajectory traj;
  RigidState s = s0;
  double t = schedule.empty() ? 0.0 : schedule.front().t_start;
  traj.samples.push_back({t, s, schedule.empty() ? RotorSpeeds{} : schedule.front().speeds});

  for (const auto& seg : schedule) {
    const double span = seg.t_end - seg.t_start;
    if (span < 0.0) throw validation_error("integrate: segment with negative duration");
    if (span == 0.0) continue;
    const long steps = std::max(1L, std::lround(std::ceil(span / dt - 1e-12)));
    const double h = span / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
      s = rk4_step(s, seg.speeds, wind, p, h);
      t = seg.t_start + static_cast<double>(i + 1) * h;
      if (geom::norm(s.position) > 1e6) throw numeric_error("unstable trajectory");
      if ((i + 1) % sample_stride == 0 && i + 1 != steps) traj.samples.push_back({t, s, seg.speeds});
    }
    t = seg.t_end;
    traj.samples.push_back({t, s, seg.speeds});
  }
  traj.samples.back().state.wrap_angles();
  return traj;
}

}  // namespace dronearray::quadrotor

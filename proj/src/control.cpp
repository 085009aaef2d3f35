#include "dronearray/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dronearray/csv.hpp"
#include "dronearray/errors.hpp"

namespace dronearray::control {

namespace {

double wrap_signed(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

Orientation attitude_from_thrust_dir(const Vec3& f_hat, double force) {
  Orientation out;
  out.total_force = force;
  const double fy = std::clamp(f_hat.y, -1.0, 1.0);
  out.roll = std::asin(fy);
  const double cr = std::cos(out.roll);
  out.pitch = (cr < 1e-12) ? 0.0 : std::atan2(f_hat.x, f_hat.z);
  return out;
}

RotorSpeeds pitch_quarter_speeds(bool positive, bool second, double vmax) {
  const double s = vmax / std::sqrt(2.0);
  const bool v4_max = positive != second;
  return v4_max ? RotorSpeeds{{s, 0.0, s, vmax}} : RotorSpeeds{{s, vmax, s, 0.0}};
}

RotorSpeeds roll_quarter_speeds(bool positive, bool second, double vmax) {
  const double s = vmax / std::sqrt(2.0);
  const bool v3_max = positive != second;
  return v3_max ? RotorSpeeds{{0.0, s, vmax, s}} : RotorSpeeds{{vmax, s, 0.0, s}};
}

// Shifts `angle` by whole turns so it lands within half a turn of `anchor`.
// Keeps the attitude chain continuous within a plan and across compensation
// iterations; otherwise the atan2 branch cut near a flipped thrust flips the
// rotation direction between iterations and the aim correction two-cycles.
double unwrap_near(double angle, double anchor) {
  return anchor + wrap_signed(angle - anchor);
}

// Callers maintain continuous attitude chains, so differences are used raw.
OrientationStage make_stage(const Orientation& from, const Orientation& to,
                            const DronePhysParams& p) {
  OrientationStage st;
  st.d_pitch = to.pitch - from.pitch;
  st.d_roll = to.roll - from.roll;
  const double denom = p.arm_m * p.lift_coeff;
  st.pitch_quarter = std::sqrt(std::fabs(st.d_pitch) * p.inertia_y / denom) / p.max_rotor_speed;
  st.roll_quarter = std::sqrt(std::fabs(st.d_roll) * p.inertia_x / denom) / p.max_rotor_speed;
  return st;
}

// Appends the up-to-four quarters of one orientation stage and records the
// four switching times (cumulative, repeats where a quarter is empty).
void append_stage(std::vector<PlanSegment>& segs, int stage_id, double& t,
                  const OrientationStage& st, const DronePhysParams& p, double* tau4) {
  auto push = [&](double dur, const RotorSpeeds& speeds) {
    if (dur > 0.0) {
      segs.push_back({stage_id, t, t + dur, speeds});
      t += dur;
    }
  };
  push(st.pitch_quarter, pitch_quarter_speeds(st.d_pitch > 0.0, false, p.max_rotor_speed));
  tau4[0] = t;
  push(st.pitch_quarter, pitch_quarter_speeds(st.d_pitch > 0.0, true, p.max_rotor_speed));
  tau4[1] = t;
  push(st.roll_quarter, roll_quarter_speeds(st.d_roll > 0.0, false, p.max_rotor_speed));
  tau4[2] = t;
  push(st.roll_quarter, roll_quarter_speeds(st.d_roll > 0.0, true, p.max_rotor_speed));
  tau4[3] = t;
}

// Net displacement and velocity gained over one orientation stage, starting
// at rest from `from` attitude. Independent of the entry velocity because
// the model has no drag.
struct Drift {
  Vec3 displacement;
  Vec3 velocity;
};

Drift stage_drift(const Orientation& from, const OrientationStage& st, const Vec3& wind,
                  const DronePhysParams& p, double dt) {
  if (st.duration() <= 0.0) return {};
  std::vector<quadrotor::Segment> quarters;
  double t = 0.0;
  auto add = [&](double dur, const RotorSpeeds& speeds) {
    if (dur > 0.0) {
      quarters.push_back({t, t + dur, speeds});
      t += dur;
    }
  };
  add(st.pitch_quarter, pitch_quarter_speeds(st.d_pitch > 0.0, false, p.max_rotor_speed));
  add(st.pitch_quarter, pitch_quarter_speeds(st.d_pitch > 0.0, true, p.max_rotor_speed));
  add(st.roll_quarter, roll_quarter_speeds(st.d_roll > 0.0, false, p.max_rotor_speed));
  add(st.roll_quarter, roll_quarter_speeds(st.d_roll > 0.0, true, p.max_rotor_speed));

  quadrotor::RigidState s0;
  s0.roll = from.roll;
  s0.pitch = from.pitch;
  const auto traj = quadrotor::integrate(s0, quarters, wind, p, dt, 1 << 28);
  return {traj.final_state().position, traj.final_state().velocity};
}

struct TranslationCoeffs {
  double alpha2 = 0.0;  // along-goal acceleration, stage 2 (> 0)
  double alpha4 = 0.0;  // along-goal deceleration magnitude, stage 4 (> 0)
  double u1 = 0.0, u3 = 0.0, u5 = 0.0;
  double r_off = 0.0;
  double coast3 = 0.0, coast5 = 0.0;
  double distance = 0.0;
};

// Durations (t2, t4) such that the along-goal displacement equals the
// distance and the along-goal terminal velocity vanishes.
std::optional<std::pair<double, double>> solve_translation(const TranslationCoeffs& c) {
  if (!(c.alpha2 > 0.0) || !(c.alpha4 > 0.0)) return std::nullopt;
  const double c0 = c.u1 + c.u3 + c.u5;
  const double A = 0.5 * c.alpha2 + c.alpha2 * c.alpha2 / (2.0 * c.alpha4);
  const double B = c.u1 + c.alpha2 * c.coast3 + c.alpha2 * (c0 - c.u5) / c.alpha4;
  const double C = c.r_off + c.u1 * c.coast3 - c.u5 * c.coast5 +
                   (0.5 * c0 * c0 - c.u5 * c0) / c.alpha4 - c.distance;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return std::nullopt;
  const double t2 = (-B + std::sqrt(disc)) / (2.0 * A);
  if (!(t2 >= 0.0)) return std::nullopt;
  const double t4 = (c0 + c.alpha2 * t2) / c.alpha4;
  if (!(t4 >= 0.0)) return std::nullopt;
  return std::make_pair(t2, t4);
}

Vec3 perpendicular_unit(const Vec3& v) {
  const double ax = std::fabs(v.x), ay = std::fabs(v.y), az = std::fabs(v.z);
  Vec3 basis{0, 0, 0};
  if (ax <= ay && ax <= az)
    basis.x = 1.0;
  else if (ay <= az)
    basis.y = 1.0;
  else
    basis.z = 1.0;
  return geom::normalized(geom::cross(v, basis));
}

}  // namespace

Orientation max_accel_orientation(const Vec3& f_ext, const Vec3& target, double thrust_n) {
  if (!(thrust_n > 0.0)) throw validation_error("max_accel_orientation: thrust must be positive");
  if (geom::norm(target) == 0.0)
    throw validation_error("max_accel_orientation: zero target direction");
  const Vec3 p_hat = geom::normalized(target);
  const double fe = geom::norm(f_ext);
  if (fe == 0.0) return attitude_from_thrust_dir(p_hat, thrust_n);

  const double c = geom::dot(p_hat, f_ext);
  const double disc = c * c - fe * fe + thrust_n * thrust_n;
  if (disc < 0.0) throw numeric_error("cannot align thrust");
  const double a = c + std::sqrt(disc);
  if (!(a > 0.0)) throw numeric_error("cannot align thrust");
  const Vec3 f_hat = (a * p_hat - f_ext) * (1.0 / thrust_n);
  Orientation out = attitude_from_thrust_dir(f_hat, a);
  return out;
}

Orientation hover_attitude(const Vec3& f_ext) {
  const double fe = geom::norm(f_ext);
  if (fe == 0.0) return Orientation{0.0, 0.0, 0.0, 0.0};
  Orientation out = attitude_from_thrust_dir(-f_ext * (1.0 / fe), fe);
  out.total_force = 0.0;  // net force at the matching hover speed
  return out;
}

double stable_hover_speed(const Vec3& f_ext, const DronePhysParams& p) {
  p.validate();
  const double fe = geom::norm(f_ext);
  const double v = std::sqrt(fe / (4.0 * p.lift_coeff));
  if (v > p.max_rotor_speed) throw numeric_error("wind exceeds authority");
  return v;
}

BangBangTimes bang_bang_times(double distance, double a_max, double a_min) {
  if (!(distance > 0.0)) throw validation_error("bang_bang_times: distance must be positive");
  if (!(a_max > 0.0) || !(a_min < 0.0))
    throw validation_error("bang_bang_times: need a_max > 0 > a_min");
  BangBangTimes out;
  out.total = std::sqrt(2.0 * distance * (1.0 / a_max - 1.0 / a_min));
  out.tau = a_min / (a_min - a_max) * out.total;
  return out;
}

std::vector<quadrotor::Segment> ControlPlan::schedule() const {
  std::vector<quadrotor::Segment> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back({s.t_start, s.t_end, s.speeds});
  return out;
}

quadrotor::Segment ControlPlan::hover_segment(double duration) const {
  const double v = hover_speed;
  return {total_time, total_time + duration, RotorSpeeds{{v, v, v, v}}};
}

ControlPlan plan_maneuver(const ManeuverRequest& req, const Vec3& wind,
                          const PlannerOptions& options) {
  req.params.validate();
  const DronePhysParams& p = req.params;
  const Vec3 f_ext = wind + p.gravity_force();

  ControlPlan plan;
  plan.params = p;
  plan.compensated = options.drift_compensation;
  plan.hover_speed = stable_hover_speed(f_ext, p);  // throws on excessive wind
  plan.att6 = hover_attitude(f_ext);

  const Vec3 disp = req.goal - req.start;
  const double d = geom::norm(disp);
  plan.distance = d;
  if (d == 0.0) {
    plan.total_time = 0.0;
    plan.switching_times.fill(0.0);
    return plan;
  }
  const Vec3 d_hat = disp * (1.0 / d);
  plan.goal_direction = d_hat;
  const double f_max = p.max_thrust();
  const Orientation level{0.0, 0.0, 0.0, 0.0};

  const Vec3 b1 = perpendicular_unit(d_hat);
  const Vec3 b2 = geom::cross(d_hat, b1);

  Vec3 aim2 = d_hat;
  Vec3 aim4 = -d_hat;
  Orientation o2, o4;
  OrientationStage st1, st3, st5;
  Drift dr1, dr3, dr5;
  double t2 = 0.0, t4 = 0.0;
  Vec3 miss, vres;

  const int iters = options.drift_compensation ? std::max(1, options.max_iterations) : 1;
  for (int iter = 0; iter < iters; ++iter) {
    const Orientation prev2 = o2, prev4 = o4;
    o2 = max_accel_orientation(f_ext, aim2, f_max);
    o4 = max_accel_orientation(f_ext, aim4, f_max);
    // Continuous pitch chain: within the first pass each stage takes the
    // short way; later passes stay on the branch already chosen.
    o2.pitch = unwrap_near(o2.pitch, iter == 0 ? level.pitch : prev2.pitch);
    o4.pitch = unwrap_near(o4.pitch, iter == 0 ? o2.pitch : prev4.pitch);
    Orientation att6_c = plan.att6;
    att6_c.pitch = unwrap_near(att6_c.pitch, o4.pitch);
    st1 = make_stage(level, o2, p);
    st3 = make_stage(o2, o4, p);
    st5 = make_stage(o4, att6_c, p);
    dr1 = stage_drift(level, st1, wind, p, options.predictor_dt);
    dr3 = stage_drift(o2, st3, wind, p, options.predictor_dt);
    dr5 = stage_drift(o4, st5, wind, p, options.predictor_dt);

    TranslationCoeffs c;
    c.alpha2 = (o2.total_force / p.mass_kg) * geom::dot(aim2, d_hat);
    c.alpha4 = -(o4.total_force / p.mass_kg) * geom::dot(aim4, d_hat);
    c.distance = d;
    if (options.drift_compensation) {
      c.u1 = geom::dot(dr1.velocity, d_hat);
      c.u3 = geom::dot(dr3.velocity, d_hat);
      c.u5 = geom::dot(dr5.velocity, d_hat);
      c.r_off = geom::dot(dr1.displacement + dr3.displacement + dr5.displacement, d_hat);
      c.coast3 = st3.duration();
      c.coast5 = st5.duration();
    }

    auto solved = solve_translation(c);
    if (!solved) {
      // Drift alone overshoots the goal (very short hops): fall back to the
      // uncompensated split.
      TranslationCoeffs plain;
      plain.alpha2 = o2.total_force / p.mass_kg;
      plain.alpha4 = o4.total_force / p.mass_kg;
      plain.distance = d;
      solved = solve_translation(plain);
      if (!solved) throw numeric_error("cannot align thrust");
      t2 = solved->first;
      t4 = solved->second;
      plan.u1_par = plan.u3_par = plan.u5_par = plan.s_off_par = 0.0;
      plan.coast3 = plan.coast5 = 0.0;
      plan.a_s2 = o2.total_force;
      plan.a_s4 = -o4.total_force;
      const Vec3 a2 = (o2.total_force / p.mass_kg) * aim2;
      const Vec3 a4 = (o4.total_force / p.mass_kg) * aim4;
      const double dt3 = st3.duration();
      const double dt5 = st5.duration();
      miss = dr1.displacement + dr1.velocity * (t2 + dt3 + t4 + dt5) + 0.5 * t2 * t2 * a2 +
             (a2 * t2) * (dt3 + t4 + dt5) + dr3.displacement + dr3.velocity * (t4 + dt5) +
             0.5 * t4 * t4 * a4 + (a4 * t4) * dt5 + dr5.displacement - disp;
      vres = dr1.velocity + dr3.velocity + dr5.velocity + a2 * t2 + a4 * t4;
      break;
    }
    t2 = solved->first;
    t4 = solved->second;
    plan.u1_par = c.u1;
    plan.u3_par = c.u3;
    plan.u5_par = c.u5;
    plan.s_off_par = c.r_off;
    plan.coast3 = c.coast3;
    plan.coast5 = c.coast5;
    plan.a_s2 = p.mass_kg * c.alpha2;
    plan.a_s4 = -p.mass_kg * c.alpha4;

    // Predicted endpoint using the full drift vectors.
    const Vec3 a2 = (o2.total_force / p.mass_kg) * aim2;
    const Vec3 a4 = (o4.total_force / p.mass_kg) * aim4;
    const double dt3 = st3.duration();
    const double dt5 = st5.duration();
    const Vec3 pos = dr1.displacement + dr1.velocity * (t2 + dt3 + t4 + dt5) +
                     0.5 * t2 * t2 * a2 + (a2 * t2) * (dt3 + t4 + dt5) + dr3.displacement +
                     dr3.velocity * (t4 + dt5) + 0.5 * t4 * t4 * a4 + (a4 * t4) * dt5 +
                     dr5.displacement;
    miss = pos - disp;
    vres = dr1.velocity + dr3.velocity + dr5.velocity + a2 * t2 + a4 * t4;

    if (!options.drift_compensation) break;
    const double vscale = std::max(1.0, c.alpha2 * t2);
    if (geom::norm(miss) < 1e-4 * std::max(d, 1.0) && geom::norm(vres) < 1e-4 * vscale) break;
    if (iter + 1 == iters) break;

    // Tilt the stage-2/4 aims within the plane orthogonal to the goal
    // direction to cancel the transverse endpoint and velocity residuals.
    const double g2 = o2.total_force / p.mass_kg;
    const double g4 = o4.total_force / p.mass_kg;
    const double c2v = g2 * t2;
    const double c4v = g4 * t4;
    const double c2p = g2 * (0.5 * t2 * t2 + t2 * (dt3 + t4 + dt5));
    const double c4p = g4 * (0.5 * t4 * t4 + t4 * dt5);
    const double det = c2v * c4p - c4v * c2p;
    if (std::fabs(det) < 1e-12) break;
    Vec3 delta2{}, delta4{};
    for (const Vec3& axis : {b1, b2}) {
      const double rv = -geom::dot(vres, axis);
      const double rp = -geom::dot(miss, axis);
      const double d2 = (rv * c4p - rp * c4v) / det;
      const double d4 = (c2v * rp - c2p * rv) / det;
      delta2 += d2 * axis;
      delta4 += d4 * axis;
    }
    // Damped, trust-region-capped update: the drift itself shifts with the
    // aims, which the 2x2 model ignores.
    const double damping = 0.6;
    auto capped = [&](Vec3 d) {
      d = damping * d;
      const double n = geom::norm(d);
      return n > 0.5 ? d * (0.5 / n) : d;
    };
    aim2 = geom::normalized(aim2 + capped(delta2));
    aim4 = geom::normalized(aim4 + capped(delta4));
  }

  plan.att2 = o2;
  plan.att4 = o4;
  plan.stage1 = st1;
  plan.stage3 = st3;
  plan.stage5 = st5;
  plan.t_s2 = t2;
  plan.t_s4 = t4;
  plan.predicted_miss = miss;
  plan.predicted_residual_velocity = vres;

  // Assemble segments and the switching-time table.
  double t = 0.0;
  auto& tau = plan.switching_times;
  append_stage(plan.segments, 1, t, st1, p, &tau[0]);
  const double vmax = p.max_rotor_speed;
  if (t2 > 0.0) plan.segments.push_back({2, t, t + t2, RotorSpeeds{{vmax, vmax, vmax, vmax}}});
  t += t2;
  tau[4] = t;
  append_stage(plan.segments, 3, t, st3, p, &tau[5]);
  if (t4 > 0.0) plan.segments.push_back({4, t, t + t4, RotorSpeeds{{vmax, vmax, vmax, vmax}}});
  t += t4;
  tau[9] = t;
  append_stage(plan.segments, 5, t, st5, p, &tau[10]);
  plan.total_time = t;
  return plan;
}

double total_control_time(const ControlPlan& plan) {
  if (plan.distance == 0.0) return 0.0;
  const DronePhysParams& p = plan.params;
  const double denom = p.arm_m * p.lift_coeff;
  double t_orient = 0.0;
  for (const auto* st : {&plan.stage1, &plan.stage3, &plan.stage5}) {
    t_orient += std::sqrt(std::fabs(st->d_pitch) * p.inertia_y / denom);
    t_orient += std::sqrt(std::fabs(st->d_roll) * p.inertia_x / denom);
  }
  t_orient *= 2.0 / p.max_rotor_speed;

  TranslationCoeffs c;
  c.alpha2 = plan.a_s2 / p.mass_kg;
  c.alpha4 = -plan.a_s4 / p.mass_kg;
  c.u1 = plan.u1_par;
  c.u3 = plan.u3_par;
  c.u5 = plan.u5_par;
  c.r_off = plan.s_off_par;
  c.coast3 = plan.coast3;
  c.coast5 = plan.coast5;
  c.distance = plan.distance;
  const auto solved = solve_translation(c);
  if (!solved) throw numeric_error("total_control_time: inconsistent plan metadata");
  return t_orient + solved->first + solved->second;
}

std::string plan_csv(const ControlPlan& plan) {
  std::string out = "stage,t_start,t_end,v1,v2,v3,v4,d_psi_p,d_psi_r\n";
  auto stage_angles = [&](int stage) -> std::pair<double, double> {
    if (stage == 1) return {plan.stage1.d_pitch, plan.stage1.d_roll};
    if (stage == 3) return {plan.stage3.d_pitch, plan.stage3.d_roll};
    if (stage == 5) return {plan.stage5.d_pitch, plan.stage5.d_roll};
    return {0.0, 0.0};
  };
  for (const auto& s : plan.segments) {
    const auto [dp, dr] = stage_angles(s.stage);
    out += csv::field(s.stage) + ',' + csv::field(s.t_start) + ',' + csv::field(s.t_end);
    for (double v : s.speeds.v) out += ',' + csv::field(v);
    out += ',' + csv::field(dp) + ',' + csv::field(dr) + '\n';
  }
  out += csv::field(6) + ',' + csv::field(plan.total_time) + ',' + csv::field(plan.total_time);
  for (int i = 0; i < 4; ++i) out += ',' + csv::field(plan.hover_speed);
  out += ",0,0\n";
  return out;
}

}  // namespace dronearray::control

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dronearray/control.hpp"
#include "dronearray/errors.hpp"
#include "dronearray/rng.hpp"

using namespace dronearray;
using control::ControlPlan;
using control::ManeuverRequest;
using control::PlannerOptions;
using geom::Vec3;
using quadrotor::DronePhysParams;

namespace {

struct Closure {
  double miss_m = 0.0;
  double terminal_speed = 0.0;
  double peak_speed = 0.0;
};

Closure integrate_plan(const ManeuverRequest& req, const ControlPlan& plan, const Vec3& wind) {
  quadrotor::RigidState s0;
  s0.position = req.start;
  const auto traj = quadrotor::integrate(s0, plan.schedule(), wind, req.params, 1e-3, 50);
  Closure c;
  c.miss_m = geom::norm(traj.final_state().position - req.goal);
  c.terminal_speed = geom::norm(traj.final_state().velocity);
  c.peak_speed = traj.peak_speed();
  return c;
}

bool is_orientation_quadruple(const quadrotor::RotorSpeeds& u, double vmax) {
  int zeros = 0, maxes = 0, mids = 0;
  for (double v : u.v) {
    if (v == 0.0) ++zeros;
    else if (v == vmax) ++maxes;
    else if (std::fabs(v - vmax / std::sqrt(2.0)) < 1e-12) ++mids;
  }
  return zeros == 1 && maxes == 1 && mids == 2;
}

}  // namespace

TEST_CASE("max_accel_orientation: no external force, horizontal target") {
  const auto o = control::max_accel_orientation({0, 0, 0}, {1, 0, 0}, 10.0);
  CHECK(o.pitch == doctest::Approx(M_PI / 2));
  CHECK(o.roll == doctest::Approx(0.0));
  CHECK(o.yaw == 0.0);
  CHECK(o.total_force == doctest::Approx(10.0));
}

TEST_CASE("max_accel_orientation: no external force, vertical target") {
  const auto o = control::max_accel_orientation({0, 0, 0}, {0, 0, 1}, 10.0);
  CHECK(o.pitch == doctest::Approx(0.0));
  CHECK(o.roll == doctest::Approx(0.0));
  CHECK(o.total_force == doctest::Approx(10.0));
}

TEST_CASE("max_accel_orientation: gravity, vertical climb (Table parameters)") {
  DronePhysParams p;
  const double f_max = p.max_thrust();  // 4 rho1 vmax^2 = 10.44 N
  const auto o = control::max_accel_orientation(p.gravity_force(), {0, 0, 1}, f_max);
  CHECK(o.total_force == doctest::Approx(f_max - p.mass_kg * p.gravity).epsilon(1e-12));
  CHECK(o.total_force == doctest::Approx(5.535).epsilon(1e-3));
  CHECK(o.pitch == doctest::Approx(0.0));
  CHECK(o.roll == doctest::Approx(0.0));
}

TEST_CASE("max_accel_orientation: net force is collinear with the target") {
  Rng rng(61);
  DronePhysParams p;
  const double f_max = p.max_thrust();
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 wind{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec3 f_ext = wind + p.gravity_force();
    const Vec3 target{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (geom::norm(target) < 0.1) continue;
    const auto o = control::max_accel_orientation(f_ext, target, f_max);
    const Vec3 thrust = f_max * quadrotor::thrust_direction(o.roll, o.pitch);
    const Vec3 net = thrust + f_ext;
    const Vec3 expect = o.total_force * geom::normalized(target);
    CHECK(geom::norm(net - expect) < 1e-9 * f_max);
    CHECK(o.total_force > 0.0);
  }
}

TEST_CASE("max_accel_orientation: excessive transverse force rejected") {
  CHECK_THROWS_WITH_AS(control::max_accel_orientation({0, 50.0, 0}, {1, 0, 0}, 10.0),
                       "cannot align thrust", numeric_error);
}

TEST_CASE("bang_bang_times: symmetric example") {
  const auto bb = control::bang_bang_times(10.0, 2.0, -2.0);
  CHECK(bb.total == doctest::Approx(2.0 * std::sqrt(5.0)));
  CHECK(bb.tau == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("bang_bang_times: infinitely strong braking limit") {
  const auto bb = control::bang_bang_times(10.0, 2.0, -1e12);
  CHECK(bb.total == doctest::Approx(std::sqrt(10.0)).epsilon(1e-6));
  CHECK(bb.tau == doctest::Approx(bb.total).epsilon(1e-6));
}

TEST_CASE("bang_bang_times: displacement and stop identities hold") {
  Rng rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    const double d = rng.uniform(0.1, 500.0);
    const double amax = rng.uniform(0.5, 30.0);
    const double amin = -rng.uniform(0.5, 30.0);
    const auto bb = control::bang_bang_times(d, amax, amin);
    const double t1 = bb.tau, t2 = bb.total - bb.tau;
    CHECK(amax * t1 + amin * t2 == doctest::Approx(0.0).epsilon(1e-9));
    const double disp = 0.5 * amax * t1 * t1 + amax * t1 * t2 + 0.5 * amin * t2 * t2;
    CHECK(disp == doctest::Approx(d).epsilon(1e-9));
    if (std::fabs(amax + amin) < 1e-12) CHECK(bb.tau == doctest::Approx(bb.total / 2.0));
  }
}

TEST_CASE("bang_bang_times: sign violations rejected") {
  CHECK_THROWS_AS(control::bang_bang_times(-1.0, 2.0, -2.0), validation_error);
  CHECK_THROWS_AS(control::bang_bang_times(1.0, -2.0, -2.0), validation_error);
  CHECK_THROWS_AS(control::bang_bang_times(1.0, 2.0, 2.0), validation_error);
}

TEST_CASE("stable_hover_speed: Table parameters, no wind") {
  DronePhysParams p;
  const double v = control::stable_hover_speed(p.gravity_force(), p);
  CHECK(v == doctest::Approx(std::sqrt(p.mass_kg * p.gravity / (4.0 * p.lift_coeff))));
  CHECK(v == doctest::Approx(205.6).epsilon(1e-3));
}

TEST_CASE("stable_hover_speed: weightless limit") {
  DronePhysParams p;
  CHECK(control::stable_hover_speed({0, 0, 0}, p) == 0.0);
}

TEST_CASE("stable_hover_speed: wind beyond rotor authority") {
  DronePhysParams p;
  CHECK_THROWS_WITH_AS(control::stable_hover_speed({50.0, 0, 0}, p), "wind exceeds authority",
                       numeric_error);
}

TEST_CASE("hover speed has an interior minimum for diagonal wind") {
  DronePhysParams p;
  const Vec3 dir = geom::normalized(Vec3{1, 1, 1});
  double best_w = 0.0, best_v = 1e9;
  for (double w = 0.0; w <= 6.0; w += 0.01) {
    const double v = control::stable_hover_speed(dir * w + p.gravity_force(), p);
    if (v < best_v) {
      best_v = v;
      best_w = w;
    }
  }
  CHECK(best_w == doctest::Approx(p.mass_kg * p.gravity / std::sqrt(3.0)).epsilon(0.01));
}

TEST_CASE("plan_maneuver: degenerate zero-displacement plan") {
  DronePhysParams p;
  const ManeuverRequest req{{1, 2, 3}, {1, 2, 3}, p};
  const auto plan = control::plan_maneuver(req, {0, 0, 0});
  CHECK(plan.total_time == 0.0);
  CHECK(plan.segments.empty());
  CHECK(control::total_control_time(plan) == 0.0);
  CHECK(plan.hover_speed == doctest::Approx(205.6).epsilon(1e-3));
}

TEST_CASE("plan_maneuver: vertical climb records the paper's stage forces") {
  DronePhysParams p;
  const double f_max = p.max_thrust();
  const ManeuverRequest req{{0, 0, 100}, {0, 0, 150}, p};

  // The uncompensated split carries the literal stage forces: full thrust
  // minus weight going up, and the flipped thrust plus weight braking.
  PlannerOptions naive;
  naive.drift_compensation = false;
  const auto plain = control::plan_maneuver(req, {0, 0, 0}, naive);
  CHECK(plain.stage1.d_pitch == doctest::Approx(0.0));
  CHECK(plain.stage1.d_roll == doctest::Approx(0.0));
  CHECK(plain.a_s2 == doctest::Approx(f_max - p.mass_kg * p.gravity).epsilon(1e-9));
  CHECK(plain.a_s4 == doctest::Approx(-(f_max + p.mass_kg * p.gravity)).epsilon(1e-9));
  CHECK(std::fabs(plain.stage3.d_pitch) == doctest::Approx(M_PI));
  CHECK(plain.total_time ==
        doctest::Approx(std::sqrt(2.0 * 50.0 * (p.mass_kg / plain.a_s2 - p.mass_kg / plain.a_s4)) +
                        plain.stage3.duration() + plain.stage5.duration()));

  // The default planner absorbs the flip drift and closes on the goal.
  const auto plan = control::plan_maneuver(req, {0, 0, 0});
  CHECK(plan.stage1.d_pitch == doctest::Approx(0.0).epsilon(0.1));
  const auto c = integrate_plan(req, plan, {0, 0, 0});
  CHECK(c.miss_m < 0.01 * 50.0);
  CHECK(c.terminal_speed < 0.01 * c.peak_speed);
}

TEST_CASE("plan_maneuver: horizontal 100 m closes within 1%") {
  DronePhysParams p;
  const ManeuverRequest req{{0, 0, 100}, {100, 0, 100}, p};
  const auto plan = control::plan_maneuver(req, {0, 0, 0});
  CHECK(std::fabs(plan.stage1.d_pitch) > 0.8);  // pi/2-scale tilt
  CHECK(plan.stage1.d_roll == doctest::Approx(0.0));
  const auto c = integrate_plan(req, plan, {0, 0, 0});
  CHECK(c.miss_m < 1.0);
  CHECK(c.terminal_speed < 0.01 * c.peak_speed);
}

TEST_CASE("plan_maneuver: pitch-only maneuver has three nonzero orientation terms") {
  DronePhysParams p;
  const ManeuverRequest req{{0, 0, 100}, {80, 0, 120}, p};
  const auto plan = control::plan_maneuver(req, {0, 0, 0});
  CHECK(plan.stage1.d_roll == doctest::Approx(0.0));
  CHECK(plan.stage3.d_roll == doctest::Approx(0.0));
  CHECK(plan.stage5.d_roll == doctest::Approx(0.0));
  CHECK(std::fabs(plan.stage1.d_pitch) > 0.0);
  CHECK(std::fabs(plan.stage3.d_pitch) > 0.0);
  CHECK(std::fabs(plan.stage5.d_pitch) > 0.0);
}

TEST_CASE("plan_maneuver: stage templates and rotor bounds") {
  DronePhysParams p;
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec3 goal{rng.uniform(-200, 200), rng.uniform(-200, 200), rng.uniform(50, 250)};
    const Vec3 wind{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 1)};
    const ManeuverRequest req{{0, 0, 100}, goal, p};
    const auto plan = control::plan_maneuver(req, wind);
    double prev_end = 0.0;
    for (const auto& seg : plan.segments) {
      CHECK(seg.t_start == doctest::Approx(prev_end));
      CHECK(seg.t_end > seg.t_start);
      prev_end = seg.t_end;
      seg.speeds.validate(p.max_rotor_speed);
      const auto mix = quadrotor::mixer(seg.speeds, p);
      CHECK(mix.kappa3 == doctest::Approx(0.0));  // yaw torque identically zero
      if (seg.stage == 2 || seg.stage == 4) {
        for (double v : seg.speeds.v) CHECK(v == p.max_rotor_speed);
      } else {
        CHECK(is_orientation_quadruple(seg.speeds, p.max_rotor_speed));
      }
    }
    CHECK(prev_end == doctest::Approx(plan.total_time));
    // Switching times are non-decreasing and tau_14 is the total.
    for (std::size_t i = 1; i < plan.switching_times.size(); ++i)
      CHECK(plan.switching_times[i] >= plan.switching_times[i - 1] - 1e-12);
    CHECK(plan.switching_times.back() == doctest::Approx(plan.total_time));
  }
}

TEST_CASE("total_control_time equals the switching-time sum") {
  DronePhysParams p;
  Rng rng(73);
  for (int trial = 0; trial < 15; ++trial) {
    const Vec3 goal{rng.uniform(-300, 300), rng.uniform(-300, 300), rng.uniform(20, 300)};
    const Vec3 wind{rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0};
    const ManeuverRequest req{{0, 0, 100}, goal, p};
    for (const bool compensate : {true, false}) {
      PlannerOptions opts;
      opts.drift_compensation = compensate;
      const auto plan = control::plan_maneuver(req, wind, opts);
      const double closed = control::total_control_time(plan);
      CHECK(std::fabs(closed - plan.switching_times.back()) <=
            1e-9 * std::max(1.0, plan.switching_times.back()));
    }
  }
}

TEST_CASE("uncompensated plan reproduces the literal closed form") {
  DronePhysParams p;
  const ManeuverRequest req{{0, 0, 100}, {60, 80, 100}, p};
  PlannerOptions opts;
  opts.drift_compensation = false;
  const auto plan = control::plan_maneuver(req, {0, 0, 0}, opts);
  const double d = 100.0;
  const double trans =
      std::sqrt(2.0 * d * (p.mass_kg / plan.a_s2 - p.mass_kg / plan.a_s4));
  const double denom = p.arm_m * p.lift_coeff;
  double t_o = 0.0;
  for (const auto* st : {&plan.stage1, &plan.stage3, &plan.stage5}) {
    t_o += std::sqrt(std::fabs(st->d_pitch) * p.inertia_y / denom);
    t_o += std::sqrt(std::fabs(st->d_roll) * p.inertia_x / denom);
  }
  t_o *= 2.0 / p.max_rotor_speed;
  CHECK(control::total_control_time(plan) == doctest::Approx(trans + t_o).epsilon(1e-12));
  CHECK(plan.total_time == doctest::Approx(trans + t_o).epsilon(1e-9));
}

TEST_CASE("plan closure on random maneuvers with wind") {
  DronePhysParams p;
  Rng rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    Vec3 dir{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (geom::norm(dir) < 0.1) dir = Vec3{1, 0, 0};
    dir = geom::normalized(dir);
    const double dist = rng.uniform(10.0, 500.0);
    const Vec3 start{0, 0, 600};
    const Vec3 goal = start + dist * dir;
    Vec3 wind{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    wind = wind * (rng.uniform(0.0, 2.0) / std::max(1e-9, geom::norm(wind)));
    const ManeuverRequest req{start, goal, p};
    const auto plan = control::plan_maneuver(req, wind);
    const auto c = integrate_plan(req, plan, wind);
    CHECK(c.miss_m <= 0.01 * dist);
    CHECK(c.terminal_speed <= 0.01 * c.peak_speed);
  }
}

TEST_CASE("control time does not increase with rotor authority") {
  DronePhysParams p;
  Rng rng(83);
  for (int trial = 0; trial < 6; ++trial) {
    const Vec3 goal{rng.uniform(-300, 300), rng.uniform(-300, 300), rng.uniform(50, 400)};
    const Vec3 wind{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), 0.0};
    double prev_naive = 1e300, prev_comp = 1e300;
    for (const double vmax : {300.0, 350.0, 400.0, 450.0, 500.0}) {
      DronePhysParams q = p;
      q.max_rotor_speed = vmax;
      const ManeuverRequest req{{0, 0, 100}, goal, q};
      PlannerOptions naive;
      naive.drift_compensation = false;
      const double t_naive = control::plan_maneuver(req, wind, naive).total_time;
      const double t_comp = control::plan_maneuver(req, wind).total_time;
      CHECK(t_naive <= prev_naive + 1e-12);
      CHECK(t_comp <= prev_comp * (1.0 + 5e-3));
      prev_naive = t_naive;
      prev_comp = t_comp;
    }
  }
}

TEST_CASE("strong wind rejected with the authority message") {
  DronePhysParams p;
  const ManeuverRequest req{{0, 0, 100}, {50, 0, 100}, p};
  CHECK_THROWS_WITH_AS(control::plan_maneuver(req, {50.0, 0, 0}), "wind exceeds authority",
                       numeric_error);
}

TEST_CASE("plan CSV has one row per segment plus the hover row") {
  DronePhysParams p;
  const ManeuverRequest req{{0, 0, 100}, {30, 40, 120}, p};
  const auto plan = control::plan_maneuver(req, {0, 0, 0});
  const std::string csv = control::plan_csv(plan);
  CHECK(csv.rfind("stage,t_start,t_end,v1,v2,v3,v4,d_psi_p,d_psi_r\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(plan.segments.size()) + 2);
}

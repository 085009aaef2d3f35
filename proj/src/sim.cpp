#include "dronearray/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include "dronearray/csv.hpp"
#include "dronearray/errors.hpp"
#include "dronearray/parallel.hpp"
#include "dronearray/rng.hpp"

namespace dronearray::sim {

void LinkParams::validate() const {
  const double vals[] = {bandwidth_hz,          tx_power_w,        noise_density_w_hz,
                         pathloss_coefficient,  pathloss_exponent, carrier_hz};
  for (double v : vals)
    if (!(v > 0.0)) throw validation_error("link params: all values must be positive");
}

double free_space_k_o(double carrier_hz) {
  const double c = kSpeedOfLight / (4.0 * M_PI * carrier_hz);
  return c * c;
}

double rate_bps(double gain, double distance_m, const LinkParams& link) {
  link.validate();
  if (!(distance_m > 0.0)) throw validation_error("rate: distance must be positive");
  const double snr = std::pow(distance_m, -link.pathloss_exponent) * link.tx_power_w *
                     link.pathloss_coefficient * gain / link.noise_power();
  return link.bandwidth_hz * std::log2(1.0 + snr);
}

void Scenario::validate() const {
  if (drone_count < 2 || drone_count % 2 != 0) throw validation_error("M must be even");
  if (!(region_m > 0.0)) throw validation_error("scenario: region size must be positive");
  if (!(load_bits > 0.0)) throw validation_error("scenario: user load must be positive");
  if (!(d_min > 0.0)) throw validation_error("scenario: d_min must be positive");
  if (users.empty() && user_count <= 0)
    throw validation_error("scenario: user count must be positive");
  link.validate();
  drone.validate();
  quad.validate();
  const double half = region_m / 2.0 + 1e-9;
  for (const auto& u : users) {
    if (!(u.load_bits > 0.0)) throw validation_error("scenario: user load must be positive");
    if (std::fabs(u.position.x - origin.x) > half || std::fabs(u.position.y - origin.y) > half)
      throw validation_error("scenario: user outside configured region");
  }
  if (!d_init.empty() && d_init.size() != static_cast<std::size_t>(drone_count) / 2)
    throw validation_error("scenario: d_init length must equal M/2");
}

pattern::ArrayConfig Scenario::array_config() const {
  const std::size_t n = static_cast<std::size_t>(drone_count) / 2;
  pattern::ArrayConfig cfg;
  cfg.wavelength = link.wavelength();
  cfg.efficiency = efficiency;
  cfg.a.assign(n, 1.0);
  const double step = phase_step < 0.0 ? M_PI / (5.0 * (drone_count - 1)) : phase_step;
  cfg.beta.resize(n);
  for (std::size_t i = 0; i < n; ++i) cfg.beta[i] = (static_cast<double>(i) + 0.5) * step;
  cfg.d = d_init.empty() ? spacing::initial_spacing(n, cfg.wavelength, d_min) : d_init;
  return cfg;
}

std::vector<UserSite> generate_users(const Scenario& s, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<UserSite> users(static_cast<std::size_t>(s.user_count));
  const double half = s.region_m / 2.0;
  for (auto& u : users) {
    u.position.x = s.origin.x + rng.uniform(-half, half);
    u.position.y = s.origin.y + rng.uniform(-half, half);
    u.position.z = 0.0;
    u.load_bits = s.load_bits;
  }
  return users;
}

namespace {

std::vector<std::size_t> service_order(const Scenario& s, const std::vector<UserSite>& users,
                                       const geom::SphDirection& start_dir) {
  std::vector<std::size_t> order(users.size());
  std::iota(order.begin(), order.end(), 0u);
  if (s.order == ServiceOrder::input) return order;

  // Greedy nearest angle: repeatedly serve the user whose direction is
  // closest to the direction served last.
  std::vector<Vec3> dirs(users.size());
  for (std::size_t i = 0; i < users.size(); ++i)
    dirs[i] = geom::unit_vector(placement::user_angles(users[i], s.origin));
  Vec3 current = geom::unit_vector(start_dir);
  std::vector<bool> used(users.size(), false);
  std::vector<std::size_t> out;
  out.reserve(users.size());
  for (std::size_t step = 0; step < users.size(); ++step) {
    std::size_t best = users.size();
    double best_dot = -2.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      if (used[i]) continue;
      const double d = geom::dot(current, dirs[i]);
      if (d > best_dot) {
        best_dot = d;
        best = i;
      }
    }
    used[best] = true;
    out.push_back(best);
    current = dirs[best];
  }
  return out;
}

void finalize_totals(ScenarioResult& r) {
  double mean_rate = 0.0, mean_gain = 0.0;
  for (const auto& u : r.per_user) {
    r.total_transmission_s += u.transmission_s;
    r.total_control_s += u.control_s;
    mean_rate += u.rate_bps;
    mean_gain += u.gain;
  }
  if (!r.per_user.empty()) {
    mean_rate /= static_cast<double>(r.per_user.size());
    mean_gain /= static_cast<double>(r.per_user.size());
  }
  r.mean_rate_bps = mean_rate;
  r.mean_gain = mean_gain;
}

}  // namespace

ScenarioResult run_array_scenario(const Scenario& s) {
  const placement::ArrayPlanner planner(s.array_config(), pattern::ElementPattern::isotropic(),
                                        s.opt, s.quad, s.d_min);
  return run_array_scenario(s, planner);
}

ScenarioResult run_array_scenario(const Scenario& s, const placement::ArrayPlanner& planner,
                                  std::vector<placement::ArrayPose>* pose_log) {
  s.validate();
  const std::vector<UserSite> users = s.users.empty() ? generate_users(s, s.seed) : s.users;

  // Gain toward each served user: the rotation points the pattern peak at the
  // user, so it equals the peak directivity times the efficiency.
  const double gain = planner.peak_gain();

  // Eq.-(1) transmit power is the array total; each of the M drones radiates
  // the configured per-drone power coherently.
  LinkParams array_link = s.link;
  array_link.tx_power_w *= static_cast<double>(s.drone_count);

  ScenarioResult result;
  placement::ArrayPose pose =
      placement::axis_pose(s.origin, s.alpha0, s.gamma0, planner.d_star());
  const auto order = service_order(s, users, planner.peak());

  for (const std::size_t idx : order) {
    const UserSite& user = users[idx];
    UserResult ur;
    ur.user = user;
    const auto sph = geom::cart_to_sph(user.position, s.origin);
    ur.distance_m = sph.r;
    ur.gain = gain;
    ur.rate_bps = rate_bps(gain, sph.r, array_link);
    ur.transmission_s = user.load_bits / ur.rate_bps;

    const auto placed = planner.place_for_user(user, pose);
    result.low_altitude_flagged = result.low_altitude_flagged || placed.low_altitude;

    std::vector<double> times(placed.pose.positions.size(), 0.0);
    parallel_for(times.size(), [&](std::size_t m) {
      const Vec3& from = pose.positions[m];
      const Vec3& to = placed.pose.positions[m];
      if (geom::norm(to - from) == 0.0) return;
      control::ManeuverRequest req{from, to, s.drone};
      times[m] = control::plan_maneuver(req, s.wind, s.planner).total_time;
    });
    ur.control_s = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());

    pose = placed.pose;
    if (pose_log) pose_log->push_back(pose);
    result.per_user.push_back(ur);
  }

  finalize_totals(result);
  result.total_service_s = result.total_transmission_s + result.total_control_s;
  return result;
}

std::vector<Vec3> baseline_grid(int drone_count, double region_m, const Vec3& origin) {
  int rows = 1;
  for (int r = 1; r * r <= drone_count; ++r)
    if (drone_count % r == 0) rows = r;
  const int cols = drone_count / rows;
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(drone_count));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      Vec3 p;
      p.x = origin.x - region_m / 2.0 + (j + 0.5) * region_m / cols;
      p.y = origin.y - region_m / 2.0 + (i + 0.5) * region_m / rows;
      p.z = origin.z;
      out.push_back(p);
    }
  return out;
}

ScenarioResult run_multidrone_baseline(const Scenario& s) {
  s.validate();
  const std::vector<UserSite> users = s.users.empty() ? generate_users(s, s.seed) : s.users;
  const auto grid = baseline_grid(s.drone_count, s.region_m, s.origin);

  ScenarioResult result;
  std::vector<double> queue(grid.size(), 0.0);
  for (const auto& user : users) {
    UserResult ur;
    ur.user = user;
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double dist = geom::norm(user.position - grid[g]);
      if (dist < best) {
        best = dist;
        nearest = static_cast<int>(g);
      }
    }
    ur.served_by = nearest;
    ur.distance_m = best;
    ur.gain = s.efficiency;  // isotropic single antenna
    ur.rate_bps = rate_bps(ur.gain, best, s.link);
    ur.transmission_s = user.load_bits / ur.rate_bps;
    ur.control_s = 0.0;
    queue[static_cast<std::size_t>(nearest)] += ur.transmission_s;
    result.per_user.push_back(ur);
  }

  finalize_totals(result);
  result.total_service_s = s.baseline_mode == BaselineMode::max
                               ? *std::max_element(queue.begin(), queue.end())
                               : result.total_transmission_s;
  return result;
}

std::string ScenarioResult::csv() const {
  std::string out = "user_index,x,y,z,r_m,gain,rate_bps,transmission_s,control_s\n";
  for (std::size_t i = 0; i < per_user.size(); ++i) {
    const auto& u = per_user[i];
    out += csv::field(static_cast<int>(i + 1)) + ',' + csv::field(u.user.position.x) + ',' +
           csv::field(u.user.position.y) + ',' + csv::field(u.user.position.z) + ',' +
           csv::field(u.distance_m) + ',' + csv::field(u.gain) + ',' + csv::field(u.rate_bps) +
           ',' + csv::field(u.transmission_s) + ',' + csv::field(u.control_s) + '\n';
  }
  out += "total,,,,,,," + csv::field(total_transmission_s) + ',' + csv::field(total_control_s) +
         '\n';
  return out;
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
  if (name == "bandwidth") return SweepParameter::bandwidth;
  if (name == "user_count") return SweepParameter::user_count;
  if (name == "drone_count") return SweepParameter::drone_count;
  if (name == "v_max") return SweepParameter::v_max;
  if (name == "wind_magnitude") return SweepParameter::wind_magnitude;
  throw validation_error("unknown sweep parameter: " + name);
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::bandwidth: return "bandwidth";
    case SweepParameter::user_count: return "user_count";
    case SweepParameter::drone_count: return "drone_count";
    case SweepParameter::v_max: return "v_max";
    case SweepParameter::wind_magnitude: return "wind_magnitude";
  }
  return "?";
}

namespace {

Scenario apply_parameter(const Scenario& base, SweepParameter p, double value) {
  Scenario s = base;
  switch (p) {
    case SweepParameter::bandwidth:
      s.link.bandwidth_hz = value;
      break;
    case SweepParameter::user_count:
      s.user_count = static_cast<int>(std::lround(value));
      s.users.clear();
      break;
    case SweepParameter::drone_count:
      s.drone_count = static_cast<int>(std::lround(value));
      s.d_init.clear();
      break;
    case SweepParameter::v_max:
      s.drone.max_rotor_speed = value;
      break;
    case SweepParameter::wind_magnitude: {
      Vec3 dir = base.wind;
      if (geom::norm(dir) == 0.0) dir = Vec3{1.0, 0.0, 0.0};
      s.wind = geom::normalized(dir) * value;
      break;
    }
  }
  return s;
}

}  // namespace

SweepTable sweep(const Scenario& base, SweepParameter parameter, const std::vector<double>& values,
                 int repetitions, SimMode mode) {
  if (values.empty()) throw validation_error("sweep: empty value list");
  if (repetitions < 1) throw validation_error("sweep: repetitions must be >= 1");

  SweepTable table;
  table.parameter = parameter;
  std::map<int, std::unique_ptr<placement::ArrayPlanner>> planners;

  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    Scenario s0 = apply_parameter(base, parameter, values[vi]);
    const placement::ArrayPlanner* planner = nullptr;
    if (mode == SimMode::array) {
      auto& slot = planners[s0.drone_count];
      if (!slot)
        slot = std::make_unique<placement::ArrayPlanner>(
            s0.array_config(), pattern::ElementPattern::isotropic(), s0.opt, s0.quad, s0.d_min);
      planner = slot.get();
    }
    for (int rep = 0; rep < repetitions; ++rep) {
      Scenario s = s0;
      s.seed = derive_seed(base.seed, vi, static_cast<std::uint64_t>(rep));
      s.users.clear();
      const ScenarioResult r = mode == SimMode::array ? run_array_scenario(s, *planner)
                                                      : run_multidrone_baseline(s);
      SweepRow row;
      row.value = values[vi];
      row.repetition = rep + 1;
      row.seed = s.seed;
      row.total_service_s = r.total_service_s;
      row.total_transmission_s = r.total_transmission_s;
      row.total_control_s = r.total_control_s;
      row.mean_rate_bps = r.mean_rate_bps;
      row.mean_gain = r.mean_gain;
      table.rows.push_back(row);
    }
  }
  return table;
}

namespace {

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats st;
  if (xs.empty()) return st;
  for (double x : xs) st.mean += x;
  st.mean /= static_cast<double>(xs.size());
  for (double x : xs) st.stddev += (x - st.mean) * (x - st.mean);
  st.stddev = std::sqrt(st.stddev / static_cast<double>(xs.size()));
  return st;
}

}  // namespace

std::string SweepTable::csv() const {
  std::string out =
      "sweep_param,value,repetition,seed,total_service_s,total_transmission_s,total_control_s,"
      "mean_rate_bps,mean_gain\n";
  const std::string pname = to_string(parameter);
  std::vector<double> values;
  for (const auto& r : rows)
    if (values.empty() || values.back() != r.value) values.push_back(r.value);

  for (const double v : values) {
    std::vector<const SweepRow*> group;
    for (const auto& r : rows)
      if (r.value == v) group.push_back(&r);
    for (const auto* r : group) {
      out += pname + ',' + csv::field(r->value) + ',' + csv::field(r->repetition) + ',' +
             csv::field(static_cast<unsigned long long>(r->seed)) + ',' +
             csv::field(r->total_service_s) + ',' + csv::field(r->total_transmission_s) + ',' +
             csv::field(r->total_control_s) + ',' + csv::field(r->mean_rate_bps) + ',' +
             csv::field(r->mean_gain) + '\n';
    }
    std::vector<double> svc, trans, ctl, rate, gn;
    for (const auto* r : group) {
      svc.push_back(r->total_service_s);
      trans.push_back(r->total_transmission_s);
      ctl.push_back(r->total_control_s);
      rate.push_back(r->mean_rate_bps);
      gn.push_back(r->mean_gain);
    }
    for (const char* label : {"mean", "std"}) {
      const bool mean = std::string(label) == "mean";
      auto pick = [&](const std::vector<double>& xs) {
        const Stats st = stats_of(xs);
        return mean ? st.mean : st.stddev;
      };
      out += pname + ',' + csv::field(v) + ',' + label + ",," + csv::field(pick(svc)) + ',' +
             csv::field(pick(trans)) + ',' + csv::field(pick(ctl)) + ',' + csv::field(pick(rate)) +
             ',' + csv::field(pick(gn)) + '\n';
    }
  }
  return out;
}

namespace {
double group_mean(const SweepTable& t, double value, double SweepRow::*member) {
  std::vector<double> xs;
  for (const auto& r : t.rows)
    if (r.value == value) xs.push_back(r.*member);
  if (xs.empty()) throw validation_error("sweep table: no rows for requested value");
  double m = 0.0;
  for (double x : xs) m += x;
  return m / static_cast<double>(xs.size());
}
}  // namespace

double SweepTable::mean_service(double value) const {
  return group_mean(*this, value, &SweepRow::total_service_s);
}
double SweepTable::mean_transmission(double value) const {
  return group_mean(*this, value, &SweepRow::total_transmission_s);
}
double SweepTable::mean_control(double value) const {
  return group_mean(*this, value, &SweepRow::total_control_s);
}

std::string hover_curve_csv(const quadrotor::DronePhysParams& p,
                            const std::vector<std::pair<std::string, Vec3>>& directions,
                            const std::vector<double>& magnitudes) {
  std::string out = "direction,wind_n,hover_speed_rad_s\n";
  for (const auto& [label, dir] : directions) {
    const Vec3 unit = geom::norm(dir) > 0.0 ? geom::normalized(dir) : Vec3{1, 0, 0};
    for (const double w : magnitudes) {
      const Vec3 f_ext = unit * w + p.gravity_force();
      std::string value;
      try {
        value = csv::field(control::stable_hover_speed(f_ext, p));
      } catch (const numeric_error&) {
        value = "inf";
      }
      out += label + ',' + csv::field(w) + ',' + value + '\n';
    }
  }
  return out;
}

}  // namespace dronearray::sim

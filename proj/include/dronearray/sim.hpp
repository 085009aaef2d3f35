#ifndef DRONEARRAY_SIM_HPP
#define DRONEARRAY_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dronearray/control.hpp"
#include "dronearray/placement.hpp"

namespace dronearray::sim {

using geom::Vec3;
using placement::UserSite;

// Propagation constant used for wavelength and the free-space reference.
inline constexpr double kSpeedOfLight = 3e8;

struct LinkParams {
  double bandwidth_hz = 2e6;
  double tx_power_w = 0.1;            // per-drone transmit power
  double noise_density_w_hz = 1e-19;  // -160 dBm/Hz
  double pathloss_coefficient = 2.0e-4;  // K_o; see free_space_k_o()
  double pathloss_exponent = 3.0;
  double carrier_hz = 7e8;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double noise_power() const { return noise_density_w_hz * bandwidth_hz; }
  void validate() const;
};

// Free-space reference coefficient at 1 m, (c / 4 pi f_c)^2. The default
// pathloss_coefficient above folds roughly -7.6 dB of excess propagation
// and implementation loss on top of this reference; both are plain config
// numbers.
double free_space_k_o(double carrier_hz);

// Shannon rate of the link: B log2(1 + r^-alpha P_t K_o G / (N_o B)).
// tx_power_w here is the total radiated power behind the gain G.
double rate_bps(double gain, double distance_m, const LinkParams& link);

enum class ServiceOrder { input, nearest_angle };
enum class BaselineMode { sum, max };

struct Scenario {
  std::vector<UserSite> users;  // generated from the seed when empty
  int user_count = 100;
  double load_bits = 1e8;  // per user
  double region_m = 1000.0;
  Vec3 origin{0.0, 0.0, 100.0};
  int drone_count = 10;  // M, even >= 2
  double d_min = 0.1;    // m
  Vec3 wind;             // N
  LinkParams link;
  quadrotor::DronePhysParams drone;
  std::uint64_t seed = 1;
  ServiceOrder order = ServiceOrder::input;
  BaselineMode baseline_mode = BaselineMode::sum;

  double efficiency = 1.0;
  double alpha0 = M_PI / 2.0;  // unrotated array axis (x-axis)
  double gamma0 = 0.0;
  double phase_step = -1.0;  // adjacent phase difference; < 0 -> pi / (5 (M-1))
  std::vector<double> d_init;  // explicit initial spacing (half-array); optional

  spacing::OptimizerSettings opt;
  pattern::QuadratureSpec quad;
  control::PlannerOptions planner;

  void validate() const;
  pattern::ArrayConfig array_config() const;
};

std::vector<UserSite> generate_users(const Scenario& s, std::uint64_t seed);

struct UserResult {
  UserSite user;
  double distance_m = 0.0;
  double gain = 0.0;
  double rate_bps = 0.0;
  double transmission_s = 0.0;
  double control_s = 0.0;
  int served_by = -1;  // baseline drone index; -1 for the array
};

struct ScenarioResult {
  std::vector<UserResult> per_user;  // in service order
  double total_service_s = 0.0;
  double total_transmission_s = 0.0;
  double total_control_s = 0.0;
  double mean_rate_bps = 0.0;
  double mean_gain = 0.0;
  bool low_altitude_flagged = false;

  std::string csv() const;  // per-user rows plus one total row
};

// Sequential service of all users by the steered array: per user, rotate the
// optimized placement toward the user, charge the slowest drone's maneuver
// as control time and load/rate as transmission time.
ScenarioResult run_array_scenario(const Scenario& s);
ScenarioResult run_array_scenario(const Scenario& s, const placement::ArrayPlanner& planner,
                                  std::vector<placement::ArrayPose>* pose_log = nullptr);

// M separate single-antenna drones on a near-square grid at the array
// altitude, nearest-drone association, zero control time. Queues are served
// drone-by-drone; the headline time is the queue sum (BaselineMode::sum) or
// the slowest queue (BaselineMode::max).
ScenarioResult run_multidrone_baseline(const Scenario& s);

std::vector<Vec3> baseline_grid(int drone_count, double region_m, const Vec3& origin);

enum class SweepParameter { bandwidth, user_count, drone_count, v_max, wind_magnitude };
enum class SimMode { array, baseline };

SweepParameter sweep_parameter_from_string(const std::string& name);
std::string to_string(SweepParameter p);

struct SweepRow {
  double value = 0.0;
  int repetition = 0;
  std::uint64_t seed = 0;
  double total_service_s = 0.0;
  double total_transmission_s = 0.0;
  double total_control_s = 0.0;
  double mean_rate_bps = 0.0;
  double mean_gain = 0.0;
};

struct SweepTable {
  SweepParameter parameter = SweepParameter::bandwidth;
  std::vector<SweepRow> rows;  // repetition-major within each value

  std::string csv() const;  // per-repetition rows plus mean/std summary rows
  double mean_service(double value) const;
  double mean_transmission(double value) const;
  double mean_control(double value) const;
};

// Runs the scenario per (value, repetition) with seeds derived from the base
// seed; spacing optimizations are cached per drone count.
SweepTable sweep(const Scenario& base, SweepParameter parameter, const std::vector<double>& values,
                 int repetitions, SimMode mode);

// Rotor speed holding the drone still versus wind magnitude, for a set of
// labeled wind directions (gravity included internally).
std::string hover_curve_csv(const quadrotor::DronePhysParams& p,
                            const std::vector<std::pair<std::string, Vec3>>& directions,
                            const std::vector<double>& magnitudes);

}  // namespace dronearray::sim

#endif

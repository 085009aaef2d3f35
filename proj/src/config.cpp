#include "dronearray/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dronearray/errors.hpp"

namespace dronearray::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw validation_error("config key " + key + ": invalid number '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw validation_error("config key " + key + ": expected integer, got '" + v + "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw validation_error("config key " + key + ": invalid boolean '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw validation_error("config key " + key + ": empty list");
  return out;
}

geom::Vec3 parse_vec3(const std::string& key, const std::string& v) {
  const auto xs = parse_list(key, v);
  if (xs.size() != 3) throw validation_error("config key " + key + ": expected 3 components");
  return {xs[0], xs[1], xs[2]};
}

std::vector<std::string> parse_names(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto& s = cfg.scenario;
  if (key == "sim.users") s.user_count = parse_int(key, value);
  else if (key == "sim.load_bits") s.load_bits = parse_double(key, value);
  else if (key == "sim.region_m") s.region_m = parse_double(key, value);
  else if (key == "sim.origin_m") s.origin = parse_vec3(key, value);
  else if (key == "sim.wind_n") s.wind = parse_vec3(key, value);
  else if (key == "sim.seed") s.seed = static_cast<std::uint64_t>(parse_double(key, value));
  else if (key == "sim.mode") {
    if (value == "array") cfg.mode = RunMode::array;
    else if (value == "baseline") cfg.mode = RunMode::baseline;
    else if (value == "both") cfg.mode = RunMode::both;
    else if (value == "hover_curve") cfg.mode = RunMode::hover_curve;
    else throw validation_error("config key sim.mode: unknown mode '" + value + "'");
  } else if (key == "sim.baseline_mode") {
    if (value == "sum") s.baseline_mode = sim::BaselineMode::sum;
    else if (value == "max") s.baseline_mode = sim::BaselineMode::max;
    else throw validation_error("config key sim.baseline_mode: expected sum or max");
  } else if (key == "sim.service_order") {
    if (value == "input") s.order = sim::ServiceOrder::input;
    else if (value == "nearest_angle") s.order = sim::ServiceOrder::nearest_angle;
    else throw validation_error("config key sim.service_order: expected input or nearest_angle");
  }
  else if (key == "array.count_m") s.drone_count = parse_int(key, value);
  else if (key == "array.d_min_m") s.d_min = parse_double(key, value);
  else if (key == "array.efficiency") s.efficiency = parse_double(key, value);
  else if (key == "array.alpha0_rad") s.alpha0 = parse_double(key, value);
  else if (key == "array.gamma0_rad") s.gamma0 = parse_double(key, value);
  else if (key == "array.phase_step_rad") s.phase_step = parse_double(key, value);
  else if (key == "array.d_init_m") s.d_init = parse_list(key, value);
  else if (key == "link.bandwidth_hz") s.link.bandwidth_hz = parse_double(key, value);
  else if (key == "link.tx_power_w") s.link.tx_power_w = parse_double(key, value);
  else if (key == "link.noise_density_w_hz") s.link.noise_density_w_hz = parse_double(key, value);
  else if (key == "link.pathloss_coefficient") s.link.pathloss_coefficient = parse_double(key, value);
  else if (key == "link.pathloss_exponent") s.link.pathloss_exponent = parse_double(key, value);
  else if (key == "link.carrier_hz") s.link.carrier_hz = parse_double(key, value);
  else if (key == "drone.mass_kg") s.drone.mass_kg = parse_double(key, value);
  else if (key == "drone.arm_m") s.drone.arm_m = parse_double(key, value);
  else if (key == "drone.lift_coeff") s.drone.lift_coeff = parse_double(key, value);
  else if (key == "drone.torque_coeff") s.drone.torque_coeff = parse_double(key, value);
  else if (key == "drone.inertia_x") s.drone.inertia_x = parse_double(key, value);
  else if (key == "drone.inertia_y") s.drone.inertia_y = parse_double(key, value);
  else if (key == "drone.inertia_z") s.drone.inertia_z = parse_double(key, value);
  else if (key == "drone.max_rotor_speed") s.drone.max_rotor_speed = parse_double(key, value);
  else if (key == "drone.gravity") s.drone.gravity = parse_double(key, value);
  else if (key == "opt.perturbation_cap_m") s.opt.perturbation_cap = parse_double(key, value);
  else if (key == "opt.rel_tol") s.opt.rel_tol = parse_double(key, value);
  else if (key == "opt.max_outer_iters") s.opt.max_outer_iters = parse_int(key, value);
  else if (key == "opt.refresh_peak") s.opt.refresh_peak = parse_bool(key, value);
  else if (key == "quad.n_theta") s.quad.n_theta = parse_int(key, value);
  else if (key == "quad.n_phi") s.quad.n_phi = parse_int(key, value);
  else if (key == "control.drift_compensation") s.planner.drift_compensation = parse_bool(key, value);
  else if (key == "control.predictor_dt_s") s.planner.predictor_dt = parse_double(key, value);
  else if (key == "control.max_iterations") s.planner.max_iterations = parse_int(key, value);
  else if (key == "sweep.parameter") cfg.sweep_parameter = sim::sweep_parameter_from_string(value);
  else if (key == "sweep.values") cfg.sweep_values = parse_list(key, value);
  else if (key == "sweep.repetitions") cfg.sweep_repetitions = parse_int(key, value);
  else if (key == "hover.directions") cfg.hover_directions = parse_names(value);
  else throw validation_error("unknown config key: " + key);
}

void apply_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw validation_error(origin + ":" + std::to_string(lineno) + ": empty key");
    apply_key(cfg, key, value);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  apply_text(cfg, text, "<inline>");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  apply_text(cfg, read_file(path), path);
  return cfg;
}

void merge_config_file(RunConfig& cfg, const std::string& path) {
  apply_text(cfg, read_file(path), path);
}

std::string derived_path(const std::string& base, const std::string& suffix) {
  const std::size_t dot = base.find_last_of('.');
  const std::size_t slash = base.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return base + suffix;
  return base.substr(0, dot) + suffix + base.substr(dot);
}

}  // namespace dronearray::config

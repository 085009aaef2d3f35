// Command-line front end: spacing optimization, maneuver planning, and the
// service-time simulator with figure-preset sweeps.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <string>

#include "dronearray/config.hpp"
#include "dronearray/csv.hpp"
#include "dronearray/errors.hpp"
#include "dronearray/parallel.hpp"

namespace da = dronearray;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string preset;
  std::string preset_dir = "presets";
  long long seed = -1;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& default_out) {
  cmd->add_option("--config", args.config_path, "config file (key = value)")->required();
  cmd->add_option("--out", args.out_path, "output CSV path")->default_val(default_out);
  cmd->add_option("--preset", args.preset, "figure preset name (overlays <preset-dir>/NAME.cfg)");
  cmd->add_option("--preset-dir", args.preset_dir, "directory with preset configs");
  cmd->add_option("--seed", args.seed, "override sim.seed");
  cmd->add_option("--threads", args.threads, "worker thread cap (0 = hardware)");
}

da::config::RunConfig load(const CommonArgs& args) {
  auto cfg = da::config::load_config(args.config_path);
  if (!args.preset.empty()) {
    std::string path = args.preset;
    if (path.find('/') == std::string::npos)
      path = args.preset_dir + "/" + args.preset + ".cfg";
    da::config::merge_config_file(cfg, path);
  }
  if (args.seed >= 0) cfg.scenario.seed = static_cast<std::uint64_t>(args.seed);
  da::set_thread_budget(args.threads);
  return cfg;
}

da::geom::Vec3 parse_vec(const std::string& text, const std::string& what) {
  da::geom::Vec3 v;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) != 3)
    throw da::validation_error(what + ": expected x,y,z");
  return v;
}

int cmd_optimize_array(const CommonArgs& args) {
  const auto cfg = load(args);
  const auto& s = cfg.scenario;
  s.validate();
  const auto array = s.array_config();
  const auto result = da::spacing::optimize_spacing(array, da::pattern::ElementPattern::isotropic(),
                                                    array.d, s.d_min, s.opt, s.quad);

  std::string spacing_csv = "n,d_m\n";
  for (std::size_t i = 0; i < result.d_star.size(); ++i)
    spacing_csv += da::csv::field(static_cast<int>(i + 1)) + ',' +
                   da::csv::field(result.d_star[i]) + '\n';
  da::csv::write_file(args.out_path, spacing_csv);
  da::csv::write_file(da::config::derived_path(args.out_path, "_trace"),
                      da::spacing::trace_csv(result.trace));

  std::printf("iterations: %d (%s)\n", result.iterations,
              result.converged ? "converged" : "iteration cap");
  std::printf("peak direction: theta=%.6f phi=%.6f rad\n", result.peak.theta, result.peak.phi);
  std::printf("peak directivity: %.6f (%.3f dBi)\n", result.peak_directivity,
              10.0 * std::log10(result.peak_directivity));
  std::printf("final objective integral: %.9e\n", result.trace.back().objective_integral);
  return 0;
}

int cmd_plan_control(const CommonArgs& args, const std::string& start_s, const std::string& goal_s) {
  const auto cfg = load(args);
  const auto& s = cfg.scenario;
  const da::geom::Vec3 start = parse_vec(start_s, "--start");
  const da::geom::Vec3 goal = parse_vec(goal_s, "--goal");

  da::control::ManeuverRequest req{start, goal, s.drone};
  const auto plan = da::control::plan_maneuver(req, s.wind, s.planner);
  da::csv::write_file(args.out_path, da::control::plan_csv(plan));

  da::quadrotor::RigidState s0;
  s0.position = start;
  auto schedule = plan.schedule();
  schedule.push_back(plan.hover_segment(1.0));  // brief stage-6 tail
  const auto traj = da::quadrotor::integrate(s0, schedule, s.wind, s.drone, 1e-3, 10);
  da::csv::write_file(da::config::derived_path(args.out_path, "_trajectory"), traj.csv());

  // Closure measured at the end of stage 5 (hover onset).
  da::quadrotor::RigidState at_end;
  for (const auto& sample : traj.samples)
    if (sample.t <= plan.total_time + 1e-12) at_end = sample.state;
  const double dist = da::geom::norm(goal - start);
  const double miss = da::geom::norm(at_end.position - goal);
  const double peak = traj.peak_speed();
  std::printf("total control time: %.6f s\n", plan.total_time);
  std::printf("analytic total (closed form): %.6f s\n", da::control::total_control_time(plan));
  if (dist > 0.0)
    std::printf("closure error: %.4f m (%.3f%% of distance)\n", miss, 100.0 * miss / dist);
  else
    std::printf("closure error: %.4f m\n", miss);
  if (peak > 0.0)
    std::printf("terminal speed: %.4f m/s (%.3f%% of peak %.3f m/s)\n",
                da::geom::norm(at_end.velocity), 100.0 * da::geom::norm(at_end.velocity) / peak,
                peak);
  return 0;
}

int cmd_simulate(const CommonArgs& args, const std::string& poses_path) {
  const auto cfg = load(args);
  const auto& s = cfg.scenario;
  s.validate();

  auto print_summary = [](const char* label, const da::sim::ScenarioResult& r) {
    std::printf("%-9s service %.3f s (transmission %.3f s, control %.3f s), mean rate %.3f Mb/s\n",
                label, r.total_service_s, r.total_transmission_s, r.total_control_s,
                r.mean_rate_bps / 1e6);
  };

  const bool want_array = cfg.mode != da::config::RunMode::baseline;
  const bool want_baseline =
      cfg.mode == da::config::RunMode::baseline || cfg.mode == da::config::RunMode::both;
  const bool both = want_array && want_baseline;

  if (want_array) {
    const da::placement::ArrayPlanner planner(s.array_config(),
                                              da::pattern::ElementPattern::isotropic(), s.opt,
                                              s.quad, s.d_min);
    std::vector<da::placement::ArrayPose> poses;
    const auto r = da::sim::run_array_scenario(s, planner, poses_path.empty() ? nullptr : &poses);
    da::csv::write_file(both ? da::config::derived_path(args.out_path, "_array") : args.out_path,
                        r.csv());
    if (!poses_path.empty()) {
      std::string body = da::placement::pose_csv_header();
      for (std::size_t i = 0; i < poses.size(); ++i)
        da::placement::append_pose_csv(body, static_cast<int>(i + 1), poses[i]);
      da::csv::write_file(poses_path, body);
    }
    if (r.low_altitude_flagged)
      std::fprintf(stderr, "warning: placement drops a drone below 5 m altitude\n");
    print_summary("array", r);
  }
  if (want_baseline) {
    const auto r = da::sim::run_multidrone_baseline(s);
    da::csv::write_file(both ? da::config::derived_path(args.out_path, "_baseline") : args.out_path,
                        r.csv());
    print_summary("baseline", r);
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const auto cfg = load(args);
  const auto& s = cfg.scenario;

  if (cfg.mode == da::config::RunMode::hover_curve) {
    std::vector<std::pair<std::string, da::geom::Vec3>> dirs;
    for (const auto& name : cfg.hover_directions) {
      if (name == "x") dirs.emplace_back("x", da::geom::Vec3{1, 0, 0});
      else if (name == "y") dirs.emplace_back("y", da::geom::Vec3{0, 1, 0});
      else if (name == "z") dirs.emplace_back("z", da::geom::Vec3{0, 0, 1});
      else if (name == "xyz")
        dirs.emplace_back("xyz", da::geom::Vec3{1, 1, 1} * (1.0 / std::sqrt(3.0)));
      else throw da::validation_error("hover.directions: unknown direction '" + name + "'");
    }
    if (cfg.sweep_values.empty()) throw da::validation_error("sweep.values required for hover curve");
    da::csv::write_file(args.out_path,
                        da::sim::hover_curve_csv(s.drone, dirs, cfg.sweep_values));
    std::printf("hover curve written to %s\n", args.out_path.c_str());
    return 0;
  }

  if (cfg.sweep_values.empty()) throw da::validation_error("sweep.values must be set");
  s.validate();

  auto run_one = [&](da::sim::SimMode mode, const std::string& path) {
    const auto table =
        da::sim::sweep(s, cfg.sweep_parameter, cfg.sweep_values, cfg.sweep_repetitions, mode);
    da::csv::write_file(path, table.csv());
    std::printf("%-9s %s sweep: ", mode == da::sim::SimMode::array ? "array" : "baseline",
                da::sim::to_string(cfg.sweep_parameter).c_str());
    for (const double v : cfg.sweep_values)
      std::printf("%g -> %.2f s  ", v, table.mean_service(v));
    std::printf("\n");
  };

  const bool want_array = cfg.mode != da::config::RunMode::baseline;
  const bool want_baseline =
      cfg.mode == da::config::RunMode::baseline || cfg.mode == da::config::RunMode::both;
  const bool both = want_array && want_baseline;
  if (want_array)
    run_one(da::sim::SimMode::array,
            both ? da::config::derived_path(args.out_path, "_array") : args.out_path);
  if (want_baseline)
    run_one(da::sim::SimMode::baseline,
            both ? da::config::derived_path(args.out_path, "_baseline") : args.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drone antenna array service-time simulator"};
  app.require_subcommand(1);

  CommonArgs opt_args, plan_args, sim_args, sweep_args;
  std::string start_s, goal_s, poses_path;

  auto* opt_cmd = app.add_subcommand("optimize-array", "optimize element spacing");
  add_common(opt_cmd, opt_args, "spacing.csv");

  auto* plan_cmd = app.add_subcommand("plan-control", "plan and verify one maneuver");
  add_common(plan_cmd, plan_args, "plan.csv");
  plan_cmd->add_option("--start", start_s, "start position x,y,z (m)")->required();
  plan_cmd->add_option("--goal", goal_s, "goal position x,y,z (m)")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "run one service-time scenario");
  add_common(sim_cmd, sim_args, "simulate.csv");
  sim_cmd->add_option("--poses", poses_path, "also write per-user drone positions CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep with repetitions");
  add_common(sweep_cmd, sweep_args, "sweep.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt_cmd->parsed()) return cmd_optimize_array(opt_args);
    if (plan_cmd->parsed()) return cmd_plan_control(plan_args, start_s, goal_s);
    if (sim_cmd->parsed()) return cmd_simulate(sim_args, poses_path);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
  } catch (const da::validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const da::numeric_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

// Command-line front end: plan, experiment, costmap, validate.

#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "hamp/error.hpp"
#include "hamp/experiment.hpp"

namespace {

using namespace hamp;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitAllFailed = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string scenario;
  std::vector<std::string> methods;
  int trials = 0;
  std::optional<std::uint64_t> seed;
  int waypoints = 0;
  std::string out;
  int jobs = 0;
  bool debug = false;
  std::string field = "all";
  std::string axis = "z";
  std::vector<int> slices;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return kExitIo;
    case ErrorCode::PlanningFailed:
    case ErrorCode::PlanningTimeout:
      return kExitAllFailed;
    default: return kExitValidation;
  }
}

Scenario load(const Options& o) {
  Scenario sc = load_scenario(o.scenario);
  if (o.waypoints > 0) {
    sc.waypoints = o.waypoints;
    sc.planner.num_waypoints = o.waypoints;
    sc.rrt.num_waypoints = o.waypoints;
  }
  if (o.seed) {
    sc.base_seed = *o.seed;
    sc.seeds.clear();
  }
  if (o.trials > 0) sc.trials = o.trials;
  sc.validate();
  return sc;
}

std::vector<Method> methods_of(const Options& o) {
  if (o.methods.empty()) return {std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<Method> out;
  for (const auto& name : o.methods) {
    auto m = parse_method(name);
    if (!m) throw Error(ErrorCode::ValidationError, "unknown method '" + name + "'");
    out.push_back(*m);
  }
  return out;
}

int run_plan(const Options& o) {
  const Scenario sc = load(o);
  const auto methods = methods_of(o);
  if (methods.size() != 1) throw Error(ErrorCode::ValidationError, "plan takes exactly one --method");
  const CostMaps maps = build_cost_maps(sc);
  const std::uint64_t seed = sc.trial_seed(0);
  PlannedTrial planned;
  try {
    planned = plan_trial(sc, maps, methods.front(), seed);
  } catch (const Error& e) {
    std::cerr << "planning failed: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitAllFailed;
  }
  const TrialReport r = evaluate_trial(sc, maps, methods.front(), 0, seed, planned.trajectory);
  const std::string csv = report_csv(std::span<const TrialReport>(&r, 1));
  std::cout << csv;
  if (!o.out.empty()) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + o.out);
    write_text(fs::path(o.out) / "report.csv", csv);
    write_text(fs::path(o.out) / "trajectory.csv", trajectory_csv(sc.robot, planned.trajectory));
  }
  return kExitOk;
}

int run_experiment_cmd(const Options& o) {
  const Scenario sc = load(o);
  ExperimentOptions eo;
  eo.methods = methods_of(o);
  eo.jobs = o.jobs > 0 ? o.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const CostMaps maps = build_cost_maps(sc);
  const ExperimentResult result = run_experiment(sc, maps, eo);
  if (o.debug) {
    for (const auto& r : result.reads) {
      std::cerr << "[debug] planning reads " << to_string(r.method) << ": occ=" << r.occ << " sdfh=" << r.sdfh
                << " composed=" << r.composed << " obstacle=" << r.obstacle << "\n";
    }
  }
  if (!o.out.empty()) write_experiment(o.out, sc, result);
  std::cout << summary_table(result.summary());
  for (Method m : result.exhausted) std::cerr << to_string(m) << ": all trials failed\n";
  return result.exhausted.empty() ? kExitOk : kExitAllFailed;
}

int run_costmap(const Options& o) {
  const Scenario sc = load(o);
  if (o.out.empty()) throw Error(ErrorCode::ValidationError, "costmap requires --out");
  const CostMaps maps = build_cost_maps(sc);
  std::vector<std::pair<std::string, const CostField*>> fields{
      {"occ", &maps.occ_sdf.occ()},
      {"sdfh", &*maps.occ_sdf.sdfh()},
      {"obstacle", &maps.occ_sdf.obstacle()},
      {"occ_composed", &maps.occ_only.combined()},
      {"occ_sdf_composed", &maps.occ_sdf.combined()},
  };
  if (o.field != "all") {
    std::erase_if(fields, [&](const auto& f) { return f.first != o.field; });
    if (fields.empty()) throw Error(ErrorCode::ValidationError, "unknown --field '" + o.field + "'");
  }
  SliceAxis axis = SliceAxis::Z;
  if (o.axis == "x") axis = SliceAxis::X;
  else if (o.axis == "y") axis = SliceAxis::Y;
  else if (o.axis != "z") throw Error(ErrorCode::ValidationError, "--axis must be x, y or z");

  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + o.out);
  for (const auto& [name, field] : fields) {
    write_cost_field_binary(fs::path(o.out) / (name + ".hcf"), *field);
    if (!o.slices.empty()) export_slices(*field, axis, o.slices, o.out, name);
  }
  std::cout << "wrote " << fields.size() << " field(s) to " << o.out << "\n";
  return kExitOk;
}

int run_validate(const Options& o) {
  const Scenario sc = load(o);
  const CostMaps maps = build_cost_maps(sc);
  std::cout << "scenario " << sc.name << ": grid " << sc.grid.dims[0] << "x" << sc.grid.dims[1] << "x"
            << sc.grid.dims[2] << " @ " << sc.grid.resolution << " m, " << sc.obstacles.size() << " obstacle(s), "
            << sc.human.frame_count() << " human frame(s), max occupancy " << maps.occupancy.max_count() << ", "
            << sc.robot.dof() << "-dof robot with " << sc.robot.sample_count() << " samples\n";
  bool ok = true;
  for (const auto& [label, pose] : {std::pair{"start", &sc.start}, std::pair{"goal", &sc.goal}}) {
    if (!configuration_free(maps.occ_sdf.obstacle(), sc.robot, pose->joint_values)) {
      std::cout << label << ": robot overlaps obstacle cells or leaves the grid\n";
      ok = false;
    }
  }
  std::cout << (ok ? "ok\n" : "invalid\n");
  return ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-aware motion planning: occupancy and signed-distance cost maps, STOMP and RRT planners."};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", o.scenario, "Scenario file (YAML, schema_version 1)")->required();
    cmd->add_option("--seed", o.seed, "Base seed; replaces the scenario's seeds");
    cmd->add_option("--waypoints", o.waypoints,
                    "Trajectory states per plan and in the cost sum (default 30 states, i.e. 29 segments)");
  };

  auto* plan = app.add_subcommand("plan", "Plan one trial with a single method");
  add_common(plan);
  plan->add_option("--method", o.methods, "rrt | stomp-occ | stomp-occ-sdf")->required()->expected(1);
  plan->add_option("--out", o.out, "Directory for report.csv and trajectory.csv");

  auto* exp = app.add_subcommand("experiment", "Compare methods over repeated seeded trials");
  add_common(exp);
  exp->add_option("--method", o.methods, "Methods to run (repeatable; default all three)");
  exp->add_option("--trials", o.trials, "Trials per method (overrides the scenario)")->check(CLI::PositiveNumber);
  exp->add_option("--out", o.out, "Output directory for reports and trajectories");
  exp->add_option("--jobs", o.jobs, "Concurrent trials (default: hardware threads)")->check(CLI::PositiveNumber);
  exp->add_flag("--debug", o.debug, "Print per-method cost-field read counters");

  auto* cm = app.add_subcommand("costmap", "Build cost fields and export binaries and slices");
  add_common(cm);
  cm->add_option("--out", o.out, "Output directory")->required();
  cm->add_option("--field", o.field, "occ | sdfh | obstacle | occ_composed | occ_sdf_composed | all");
  cm->add_option("--axis", o.axis, "Slice axis x | y | z");
  cm->add_option("--slices", o.slices, "Slice indices along --axis")->delimiter(',');

  auto* val = app.add_subcommand("validate", "Check a scenario file and its start/goal configurations");
  add_common(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (plan->parsed()) return run_plan(o);
    if (exp->parsed()) return run_experiment_cmd(o);
    if (cm->parsed()) return run_costmap(o);
    return run_validate(o);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

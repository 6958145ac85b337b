#include "hamp/experiment.hpp"

#include <atomic>
#include <functional>
#include <thread>

#include "hamp/error.hpp"

namespace hamp {

const char* to_string(Method m) {
  switch (m) {
    case Method::Rrt: return "rrt";
    case Method::StompOcc: return "stomp-occ";
    case Method::StompOccSdf: return "stomp-occ-sdf";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view s) {
  for (Method m : kAllMethods) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

CostMaps build_cost_maps(const Scenario& scenario) {
  CostMaps maps;
  maps.occupancy = build_occupancy(scenario);
  const CostField occ = occ_cost(maps.occupancy);
  maps.sd = signed_distance(maps.occupancy);
  const CostField sdfh = sdfh_cost(maps.sd);
  const CostField obstacle = obstacle_cost(scenario.grid, scenario.obstacles);
  maps.occ_only = compose(occ, std::nullopt, obstacle, CostMode::OccOnly, scenario.out_of_bounds_cost);
  maps.occ_sdf = compose(occ, sdfh, obstacle, CostMode::OccSdf, scenario.out_of_bounds_cost);
  return maps;
}

PlannedTrial plan_trial(const Scenario& scenario, const CostMaps& maps, Method method, std::uint64_t seed) {
  PlannedTrial out;
  Trajectory raw;
  if (method == Method::Rrt) {
    raw = rrt_plan(scenario.robot, scenario.start, scenario.goal, maps.occ_sdf.obstacle(), scenario.rrt,
                   derive_seed(seed, 7));
  } else {
    const ComposedCostMap& map = method == Method::StompOcc ? maps.occ_only : maps.occ_sdf;
    const std::array<std::uint64_t, 3> seeds{derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3)};
    MultiStartResult r = multi_start_plan(map, scenario.robot, scenario.start, scenario.goal, scenario.planner,
                                          scenario.constraints, scenario.rrt, seeds);
    raw = std::move(r.trajectory);
    out.selected_start = r.selected;
  }
  raw.dt = scenario.nominal_dt;
  out.trajectory = enforce_kinodynamic_limits(raw, scenario.constraints);
  return out;
}

TrialReport evaluate_trial(const Scenario& scenario, const CostMaps& maps, Method method, int trial,
                           std::uint64_t seed, const Trajectory& trajectory) {
  TrialReport r;
  r.planner_label = to_string(method);
  r.trial = trial;
  r.seed = seed;
  r.trajectory_cost = trajectory_cost(maps.occ_sdf, scenario.robot, trajectory, scenario.waypoints);
  r.path_length = trajectory_length(scenario.robot, trajectory);
  r.duration = trajectory.duration();
  r.obstacle_hits = obstacle_hits(maps.occ_sdf.obstacle(), scenario.robot, trajectory);
  return r;
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

PlanningReads snapshot(const CostMaps& maps, Method m) {
  PlanningReads r;
  r.method = m;
  r.occ = maps.occ_only.occ().read_count() + maps.occ_sdf.occ().read_count();
  r.sdfh = maps.occ_sdf.sdfh() ? maps.occ_sdf.sdfh()->read_count() : 0;
  r.composed = maps.occ_only.combined().read_count() + maps.occ_sdf.combined().read_count();
  r.obstacle = maps.occ_only.obstacle().read_count() + maps.occ_sdf.obstacle().read_count();
  return r;
}

}  // namespace

AggregateReport ExperimentResult::summary() const {
  std::vector<TrialReport> kept;
  for (const auto& r : reports) {
    const auto m = parse_method(r.planner_label);
    if (m && std::find(exhausted.begin(), exhausted.end(), *m) != exhausted.end()) continue;
    kept.push_back(r);
  }
  if (kept.empty()) return {};
  return aggregate(kept);
}

ExperimentResult run_experiment(const Scenario& scenario, const CostMaps& maps, const ExperimentOptions& options) {
  if (options.methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods selected");
  ExperimentResult result;
  const int n = scenario.trials;

  for (Method method : options.methods) {
    std::vector<std::optional<Trajectory>> planned(static_cast<std::size_t>(n));
    std::vector<std::string> failures(static_cast<std::size_t>(n));

    const PlanningReads before = snapshot(maps, method);
    parallel_for(n, options.jobs, [&](int t) {
      const auto i = static_cast<std::size_t>(t);
      try {
        planned[i] = plan_trial(scenario, maps, method, scenario.trial_seed(t)).trajectory;
      } catch (const Error& e) {
        failures[i] = std::string(to_string(e.code())) + ": " + e.what();
      }
    });
    const PlanningReads after = snapshot(maps, method);
    result.reads.push_back({method, after.occ - before.occ, after.sdfh - before.sdfh,
                            after.composed - before.composed, after.obstacle - before.obstacle});

    std::vector<TrialReport> reports(static_cast<std::size_t>(n));
    parallel_for(n, options.jobs, [&](int t) {
      const auto i = static_cast<std::size_t>(t);
      const std::uint64_t seed = scenario.trial_seed(t);
      if (planned[i]) {
        reports[i] = evaluate_trial(scenario, maps, method, t, seed, *planned[i]);
      } else {
        reports[i].planner_label = to_string(method);
        reports[i].trial = t;
        reports[i].seed = seed;
        reports[i].success = false;
        reports[i].failure = failures[i];
      }
    });

    int successes = 0;
    for (int t = 0; t < n; ++t) {
      const auto i = static_cast<std::size_t>(t);
      successes += reports[i].success ? 1 : 0;
      result.reports.push_back(std::move(reports[i]));
      result.trajectories.push_back(planned[i] ? std::move(*planned[i]) : Trajectory{});
    }
    if (successes == 0) result.exhausted.push_back(method);
  }
  return result;
}

}  // namespace hamp

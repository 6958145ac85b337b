#include <limits>

#include "hamp/error.hpp"
#include "hamp/planners.hpp"

namespace hamp {

MultiStartResult multi_start_plan(const ComposedCostMap& map, const BodyModel& robot, const PoseFrame& start,
                                  const PoseFrame& goal, const StompParams& params, const Constraints& constraints,
                                  const RrtParams& rrt, std::array<std::uint64_t, 3> seeds) {
  MultiStartResult result;
  double best = std::numeric_limits<double>::infinity();

  for (int c = 0; c < 3; ++c) {
    auto& cand = result.candidates[static_cast<std::size_t>(c)];
    const auto seed = seeds[static_cast<std::size_t>(c)];
    Trajectory initial;
    if (c == 0) {
      initial = linear_trajectory(start.joint_values, goal.joint_values, params.num_waypoints, rrt.dt);
    } else {
      RrtParams seeded = rrt;
      seeded.num_waypoints = params.num_waypoints;
      try {
        initial = rrt_plan(robot, start, goal, map.obstacle(), seeded, derive_seed(seed, 0x5252u));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InfeasibleEndpoint) throw;
        cand.note = e.what();
        continue;
      }
    }

    StompResult run = stomp_plan(map, robot, start, goal, params, constraints, initial, seed);
    cand.cost = run.final_cost;
    if (constraints.obstacle_clearance && obstacle_hits(map, robot, run.trajectory) > 0) {
      cand.rejected_obstacle = true;
      cand.note = "touches obstacle cells";
      continue;
    }
    cand.feasible = true;
    if (run.final_cost < best) {
      best = run.final_cost;
      result.trajectory = run.trajectory;
      result.cost = run.final_cost;
      result.selected = c;
    }
  }

  if (result.selected < 0) {
    throw Error(ErrorCode::PlanningFailed, "all three STOMP initializations were infeasible");
  }
  return result;
}

}  // namespace hamp

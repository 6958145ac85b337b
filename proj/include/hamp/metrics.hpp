#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hamp/bodies.hpp"
#include "hamp/costmap.hpp"
#include "hamp/planners.hpp"

namespace hamp {

struct TrialReport {
  std::string planner_label;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = true;
  double trajectory_cost = 0.0;
  double path_length = 0.0;
  double duration = 0.0;
  int obstacle_hits = 0;
  std::string failure;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (N-1) standard deviation; 0 when N = 1
};

MeanStd mean_std(std::span<const double> values);

struct AggregateRow {
  std::string planner_label;
  int trials = 0;    // successful trials
  int failures = 0;
  MeanStd cost;
  MeanStd length;
  MeanStd duration;
};

struct AggregateReport {
  std::vector<AggregateRow> rows;

  const AggregateRow* find(const std::string& label) const;
};

/// Sum of state costs over every waypoint. The map must be the Occ+SDF
/// composition; the trajectory must already have `expected_waypoints` rows
/// (ResampleRequired otherwise).
double trajectory_cost(const ComposedCostMap& map, const BodyModel& robot, const Trajectory& traj,
                       int expected_waypoints);

/// Sum of Cartesian chord lengths between consecutive end-effector positions.
double trajectory_length(const BodyModel& robot, const Trajectory& traj);

/// Groups reports by planner label (first-appearance order) and summarizes the
/// successful ones. Throws EmptyGroup for no reports or a group with no successes.
AggregateReport aggregate(std::span<const TrialReport> reports);

}  // namespace hamp

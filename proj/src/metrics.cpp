#include "hamp/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hamp/error.hpp"

namespace hamp {

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyGroup, "mean of an empty set");
  MeanStd out;
  // Shifted by the first value so identical inputs give an exact mean and zero spread.
  const double k = values.front();
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v - k;
  const double shift = sum / n;
  out.mean = k + shift;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - k - shift) * (v - k - shift);
    out.std = std::sqrt(ss / (n - 1));
  }
  return out;
}

const AggregateRow* AggregateReport::find(const std::string& label) const {
  auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.planner_label == label; });
  return it == rows.end() ? nullptr : &*it;
}

double trajectory_cost(const ComposedCostMap& map, const BodyModel& robot, const Trajectory& traj,
                       int expected_waypoints) {
  if (map.mode() != CostMode::OccSdf) {
    throw Error(ErrorCode::InvalidArgument, "trajectories are evaluated on the occ+sdf map");
  }
  if (traj.size() != expected_waypoints) {
    throw Error(ErrorCode::ResampleRequired, "trajectory has " + std::to_string(traj.size()) +
                                                 " waypoints, evaluation expects " +
                                                 std::to_string(expected_waypoints));
  }
  StateCostEvaluator eval(map, robot);
  double sum = 0.0;
  for (int i = 0; i < traj.size(); ++i) {
    PoseFrame s(traj.at(i));
    robot.check_pose(s);
    sum += eval(s.joint_values);
  }
  return sum;
}

double trajectory_length(const BodyModel& robot, const Trajectory& traj) {
  double length = 0.0;
  LinkTransforms transforms;
  Eigen::Vector3d prev = Eigen::Vector3d::Zero();
  for (int i = 0; i < traj.size(); ++i) {
    PoseFrame s(traj.at(i));
    robot.check_pose(s);
    forward_kinematics_unchecked(robot, s.joint_values, transforms);
    const Eigen::Vector3d x = end_effector_position(robot, transforms);
    if (i > 0) length += (x - prev).norm();
    prev = x;
  }
  return length;
}

AggregateReport aggregate(std::span<const TrialReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyGroup, "no trial reports to aggregate");
  std::vector<std::string> labels;
  for (const auto& r : reports) {
    if (std::find(labels.begin(), labels.end(), r.planner_label) == labels.end()) labels.push_back(r.planner_label);
  }
  AggregateReport out;
  for (const auto& label : labels) {
    std::vector<double> cost, length, duration;
    AggregateRow row;
    row.planner_label = label;
    for (const auto& r : reports) {
      if (r.planner_label != label) continue;
      if (!r.success) {
        ++row.failures;
        continue;
      }
      cost.push_back(r.trajectory_cost);
      length.push_back(r.path_length);
      duration.push_back(r.duration);
    }
    if (cost.empty()) throw Error(ErrorCode::EmptyGroup, "no successful trials for '" + label + "'");
    row.trials = static_cast<int>(cost.size());
    row.cost = mean_std(cost);
    row.length = mean_std(length);
    row.duration = mean_std(duration);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace hamp

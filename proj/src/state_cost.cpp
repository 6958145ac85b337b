#include "hamp/error.hpp"
#include "hamp/planners.hpp"

namespace hamp {

StateCostEvaluator::StateCostEvaluator(const ComposedCostMap& map, const BodyModel& robot)
    : map_(map), robot_(robot) {}

double StateCostEvaluator::operator()(const Eigen::VectorXd& q) {
  forward_kinematics_unchecked(robot_, q, transforms_);
  const auto links = robot_.links();
  const CostField& field = map_.combined();
  const GridSpec& spec = field.spec();
  const double oob = map_.out_of_bounds_cost();
  double sum = 0.0;
  std::uint64_t reads = 0;
  for (std::size_t l = 0; l < links.size(); ++l) {
    const auto& t = transforms_[l];
    for (const auto& s : links[l].local_samples) {
      if (auto offset = map_point_flat(spec, t * s)) {
        sum += field.value_unrecorded(*offset);
        ++reads;
      } else {
        sum += oob;
      }
    }
  }
  field.note_reads(reads);
  return sum;
}

int StateCostEvaluator::obstacle_hits(const Eigen::VectorXd& q) {
  forward_kinematics_unchecked(robot_, q, transforms_);
  const auto links = robot_.links();
  const auto& obstacle = map_.obstacle();
  int hits = 0;
  std::uint64_t reads = 0;
  for (std::size_t l = 0; l < links.size(); ++l) {
    const auto& t = transforms_[l];
    for (const auto& s : links[l].local_samples) {
      if (auto offset = map_point_flat(obstacle.spec(), t * s)) {
        ++reads;
        if (obstacle.value_unrecorded(*offset) >= 1.0) ++hits;
      }
    }
  }
  obstacle.note_reads(reads);
  return hits;
}

double state_cost(const ComposedCostMap& map, const BodyModel& robot, const PoseFrame& s) {
  robot.check_pose(s);
  StateCostEvaluator eval(map, robot);
  return eval(s.joint_values);
}

double control_cost(const Trajectory& traj, double weight) {
  double sum = 0.0;
  const auto& w = traj.waypoints;
  for (Eigen::Index i = 1; i + 1 < w.rows(); ++i) {
    sum += (w.row(i - 1) - 2.0 * w.row(i) + w.row(i + 1)).squaredNorm();
  }
  return weight * sum;
}

double total_cost(const ComposedCostMap& map, const BodyModel& robot, const Trajectory& traj,
                  double control_cost_weight) {
  StateCostEvaluator eval(map, robot);
  double sum = control_cost(traj, control_cost_weight);
  for (int i = 0; i < traj.size(); ++i) sum += eval(traj.at(i));
  return sum;
}

int obstacle_hits(const ComposedCostMap& map, const BodyModel& robot, const Trajectory& traj) {
  return obstacle_hits(map.obstacle(), robot, traj);
}

int obstacle_hits(const CostField& obstacle, const BodyModel& robot, const Trajectory& traj) {
  LinkTransforms transforms;
  const auto links = robot.links();
  int hits = 0;
  std::uint64_t reads = 0;
  for (int i = 0; i < traj.size(); ++i) {
    forward_kinematics_unchecked(robot, traj.at(i), transforms);
    for (std::size_t l = 0; l < links.size(); ++l) {
      for (const auto& s : links[l].local_samples) {
        if (auto offset = map_point_flat(obstacle.spec(), transforms[l] * s)) {
          ++reads;
          if (obstacle.value_unrecorded(*offset) >= 1.0) ++hits;
        }
      }
    }
  }
  obstacle.note_reads(reads);
  return hits;
}

}  // namespace hamp

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hamp/error.hpp"
#include "hamp/planners.hpp"

namespace hamp {

bool configuration_free(const CostField& obstacle, const BodyModel& robot, const Eigen::VectorXd& q) {
  thread_local LinkTransforms transforms;
  forward_kinematics_unchecked(robot, q, transforms);
  const auto links = robot.links();
  std::uint64_t reads = 0;
  bool free = true;
  for (std::size_t l = 0; l < links.size() && free; ++l) {
    for (const auto& s : links[l].local_samples) {
      auto offset = map_point_flat(obstacle.spec(), transforms[l] * s);
      if (!offset) {
        free = false;
        break;
      }
      ++reads;
      if (obstacle.value_unrecorded(*offset) >= 1.0) {
        free = false;
        break;
      }
    }
  }
  obstacle.note_reads(reads);
  return free;
}

namespace {

class EdgeChecker {
 public:
  EdgeChecker(const CostField& obstacle, const BodyModel& robot, double resolution)
      : obstacle_(obstacle), robot_(robot), resolution_(resolution) {}

  // `a` is assumed free; checks interior points and `b`.
  bool free(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    const double span = (b - a).cwiseAbs().maxCoeff();
    const int steps = std::max(1, static_cast<int>(std::ceil(span / resolution_)));
    for (int s = 1; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      if (!configuration_free(obstacle_, robot_, a + t * (b - a))) return false;
    }
    return true;
  }

 private:
  const CostField& obstacle_;
  const BodyModel& robot_;
  double resolution_;
};

}  // namespace

Trajectory rrt_plan(const BodyModel& robot, const PoseFrame& start, const PoseFrame& goal, const CostField& obstacle,
                    const RrtParams& params, std::uint64_t rng_seed) {
  robot.check_pose(start);
  robot.check_pose(goal);
  if (!(params.step > 0.0) || !(params.collision_resolution > 0.0) || params.max_samples < 1 ||
      params.num_waypoints < 2) {
    throw Error(ErrorCode::InvalidArgument, "invalid RRT parameters");
  }
  const double resolution = std::min(params.collision_resolution, params.step);
  if (!configuration_free(obstacle, robot, start.joint_values)) {
    throw Error(ErrorCode::InfeasibleEndpoint, "RRT start configuration is in collision");
  }
  if (!configuration_free(obstacle, robot, goal.joint_values)) {
    throw Error(ErrorCode::InfeasibleEndpoint, "RRT goal configuration is in collision");
  }

  const EdgeChecker edge(obstacle, robot, resolution);
  const Eigen::VectorXd& q_goal = goal.joint_values;
  const auto& limits = robot.limits();
  const int dof = robot.dof();

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Eigen::VectorXd> nodes{start.joint_values};
  std::vector<int> parent{-1};
  int goal_node = -1;

  if (edge.free(start.joint_values, q_goal)) {
    nodes.push_back(q_goal);
    parent.push_back(0);
    goal_node = 1;
  }

  Eigen::VectorXd target(dof);
  for (int sample = 0; sample < params.max_samples && goal_node < 0; ++sample) {
    if (unit(rng) < params.goal_bias) {
      target = q_goal;
    } else {
      for (int d = 0; d < dof; ++d) target[d] = limits.lower[d] + unit(rng) * (limits.upper[d] - limits.lower[d]);
    }
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d2 = (nodes[i] - target).squaredNorm();
      if (d2 < best) {
        best = d2;
        nearest = i;
      }
    }
    const Eigen::VectorXd from = nodes[nearest];
    const double dist = std::sqrt(best);
    const Eigen::VectorXd to = dist <= params.step ? target : Eigen::VectorXd(from + (target - from) * (params.step / dist));
    if (!edge.free(from, to)) continue;
    nodes.push_back(to);
    parent.push_back(static_cast<int>(nearest));
    const int added = static_cast<int>(nodes.size()) - 1;
    if ((to - q_goal).norm() <= params.step && edge.free(to, q_goal)) {
      if ((to - q_goal).norm() > 0.0) {
        nodes.push_back(q_goal);
        parent.push_back(added);
        goal_node = added + 1;
      } else {
        goal_node = added;
      }
    }
  }
  if (goal_node < 0) {
    throw Error(ErrorCode::PlanningTimeout,
                "RRT found no path within " + std::to_string(params.max_samples) + " samples");
  }

  std::vector<Eigen::VectorXd> path;
  for (int i = goal_node; i >= 0; i = parent[static_cast<std::size_t>(i)]) path.push_back(nodes[static_cast<std::size_t>(i)]);
  std::reverse(path.begin(), path.end());
  path.front() = start.joint_values;
  path.back() = q_goal;

  // Random shortcuts, then a greedy pass that always jumps to the farthest visible vertex.
  for (int a = 0; a < params.shortcut_attempts && path.size() > 2; ++a) {
    const auto n = path.size();
    std::size_t i = static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
    std::size_t j = static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
    i = std::min(i, n - 1);
    j = std::min(j, n - 1);
    if (i > j) std::swap(i, j);
    if (j < i + 2) continue;
    if (edge.free(path[i], path[j])) {
      path.erase(path.begin() + static_cast<std::ptrdiff_t>(i + 1), path.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
  std::vector<Eigen::VectorXd> smoothed{path.front()};
  for (std::size_t i = 0; i + 1 < path.size();) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && !edge.free(path[i], path[j])) --j;
    smoothed.push_back(path[j]);
    i = j;
  }

  return resample_polyline(smoothed, params.num_waypoints, params.dt);
}

}  // namespace hamp

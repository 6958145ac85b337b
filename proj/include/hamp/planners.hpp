#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "hamp/bodies.hpp"
#include "hamp/costmap.hpp"

namespace hamp {

/// Joint-space waypoints (one row per waypoint) with uniform spacing dt.
struct Trajectory {
  Eigen::MatrixXd waypoints;
  double dt = 0.1;

  int size() const { return static_cast<int>(waypoints.rows()); }
  int dof() const { return static_cast<int>(waypoints.cols()); }
  Eigen::VectorXd at(int i) const { return waypoints.row(i).transpose(); }
  double duration() const { return size() > 1 ? dt * (size() - 1) : 0.0; }
};

Trajectory linear_trajectory(const Eigen::VectorXd& start, const Eigen::VectorXd& goal, int num_waypoints,
                             double dt = 0.1);

/// Resamples at num_waypoints instants evenly spread over the trajectory's
/// duration, interpolating linearly in joint space. Endpoints are copied exactly.
Trajectory resample_uniform_time(const Trajectory& traj, int num_waypoints);

/// Resamples a joint-space polyline at num_waypoints points evenly spaced in
/// joint-space arc length (constant joint speed). Endpoints are copied exactly.
Trajectory resample_polyline(std::span<const Eigen::VectorXd> path, int num_waypoints, double dt = 0.1);

struct StompParams {
  int num_rollouts = 20;
  int num_iterations = 100;
  Eigen::VectorXd noise_stddev;  // per joint; empty means 0.05 for every joint
  double temperature = 10.0;
  double control_cost_weight = 1e-4;
  int num_waypoints = 30;
  double convergence_tol = 1e-5;
  int convergence_window = 10;

  /// Throws InvalidArgument when a positivity constraint is violated.
  void validate(int dof) const;
  double noise_for(int joint) const { return noise_stddev.size() == 0 ? 0.05 : noise_stddev[joint]; }
};

struct Constraints {
  Eigen::VectorXd max_joint_velocity;      // rad/s per joint
  Eigen::VectorXd max_joint_acceleration;  // rad/s^2 per joint
  std::optional<Eigen::Isometry3d> goal_pose;
  bool obstacle_clearance = true;

  void validate(int dof) const;
};

/// Tolerances for matching a goal configuration against a goal_pose constraint.
inline constexpr double kGoalPositionTol = 1e-3;
inline constexpr double kGoalOrientationTol = 1e-2;

/// Throws InfeasibleEndpoint when the goal configuration's tool pose misses the constraint.
void check_goal_pose(const BodyModel& robot, const PoseFrame& goal, const Constraints& constraints);

/// Reusable evaluator of the summed cost-map value over all robot samples.
/// Holds scratch buffers, so use one instance per thread.
class StateCostEvaluator {
 public:
  StateCostEvaluator(const ComposedCostMap& map, const BodyModel& robot);

  /// No joint-limit check.
  double operator()(const Eigen::VectorXd& q);

  /// Robot samples landing in cells with obstacle value 1.
  int obstacle_hits(const Eigen::VectorXd& q);

 private:
  const ComposedCostMap& map_;
  const BodyModel& robot_;
  LinkTransforms transforms_;
};

/// Sum over every robot link and sample of the composed cost at the sample's
/// world position. Out-of-bounds samples add the map's out-of-bounds cost.
double state_cost(const ComposedCostMap& map, const BodyModel& robot, const PoseFrame& s);

/// weight * sum over interior waypoints of |q[i-1] - 2 q[i] + q[i+1]|^2.
/// Accelerations are taken per waypoint interval, independent of dt.
double control_cost(const Trajectory& traj, double weight);

/// Control cost plus the state cost of every waypoint.
double total_cost(const ComposedCostMap& map, const BodyModel& robot, const Trajectory& traj,
                  double control_cost_weight);

/// Number of (waypoint, sample) pairs inside obstacle cells.
int obstacle_hits(const ComposedCostMap& map, const BodyModel& robot, const Trajectory& traj);
int obstacle_hits(const CostField& obstacle, const BodyModel& robot, const Trajectory& traj);

struct StompResult {
  Trajectory trajectory;
  std::vector<double> cost_history;  // best total cost after each iteration
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
};

/// Stochastic trajectory optimization over interior waypoints. Rollouts use
/// smooth noise with covariance proportional to R^-1 (R = A^T A, A the
/// second-difference operator); updates are per-waypoint exponentiated-cost
/// averages of the noise, projected through R^-1. The best trajectory seen is
/// returned, so its cost never exceeds the initial cost.
StompResult stomp_plan(const ComposedCostMap& map, const BodyModel& robot, const PoseFrame& start,
                       const PoseFrame& goal, const StompParams& params, const Constraints& constraints,
                       const Trajectory& initial, std::uint64_t rng_seed);

struct RrtParams {
  double step = 0.2;                  // extension step, rad (Euclidean in joint space)
  double collision_resolution = 0.02;  // max joint-space gap between checked configurations
  int max_samples = 20000;
  double goal_bias = 0.1;
  int shortcut_attempts = 200;
  int num_waypoints = 30;
  double dt = 0.1;
};

/// Joint-space RRT against the obstacle field only, followed by shortcut
/// smoothing and arc-length resampling. Configurations with any sample in an
/// obstacle cell or outside the grid are in collision.
Trajectory rrt_plan(const BodyModel& robot, const PoseFrame& start, const PoseFrame& goal, const CostField& obstacle,
                    const RrtParams& params, std::uint64_t rng_seed);

/// True when no robot sample at q is in an obstacle cell or outside the grid.
bool configuration_free(const CostField& obstacle, const BodyModel& robot, const Eigen::VectorXd& q);

/// Smallest uniform dt meeting the velocity and acceleration bounds.
double minimum_uniform_dt(const Trajectory& traj, const Constraints& constraints);

/// Stretches dt (never shrinks it) until finite-difference velocities and
/// accelerations respect the bounds. Waypoints are unchanged.
Trajectory enforce_kinodynamic_limits(const Trajectory& traj, const Constraints& constraints);

struct MultiStartCandidate {
  bool feasible = false;
  bool rejected_obstacle = false;
  double cost = 0.0;
  std::string note;
};

struct MultiStartResult {
  Trajectory trajectory;
  double cost = 0.0;
  int selected = -1;  // 0 linear, 1-2 RRT-seeded
  std::array<MultiStartCandidate, 3> candidates;
};

/// STOMP from a linear initialization and from two RRT-seeded initializations;
/// keeps the cheapest result that does not touch obstacle cells.
MultiStartResult multi_start_plan(const ComposedCostMap& map, const BodyModel& robot, const PoseFrame& start,
                                  const PoseFrame& goal, const StompParams& params, const Constraints& constraints,
                                  const RrtParams& rrt, std::array<std::uint64_t, 3> seeds);

/// Splitmix64-style mixing for deriving independent stream seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace hamp

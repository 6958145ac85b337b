#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "hamp/error.hpp"
#include "hamp/planners.hpp"

namespace hamp {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

void StompParams::validate(int dof) const {
  if (num_rollouts < 1 || num_iterations < 1 || num_waypoints < 2) {
    throw Error(ErrorCode::InvalidArgument, "STOMP rollouts, iterations and waypoints must be positive");
  }
  if (!(temperature > 0.0) || !(control_cost_weight >= 0.0) || !(convergence_tol >= 0.0) ||
      convergence_window < 1) {
    throw Error(ErrorCode::InvalidArgument, "STOMP temperature/weights out of range");
  }
  if (noise_stddev.size() != 0 && noise_stddev.size() != dof) {
    throw Error(ErrorCode::InvalidArgument, "noise_stddev must have one entry per joint");
  }
  if (noise_stddev.size() != 0 && (noise_stddev.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "noise_stddev must be positive");
  }
}

namespace {

struct StompMatrices {
  Eigen::MatrixXd noise_factor;  // L with L L^T = R^-1 / max(diag(R^-1))
  Eigen::MatrixXd projection;    // R^-1, columns scaled to max 1/K
};

StompMatrices build_matrices(int interior) {
  const int k = interior;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    a(i, i) = -2.0;
    if (i > 0) a(i, i - 1) = 1.0;
    if (i + 1 < k) a(i, i + 1) = 1.0;
  }
  // Endpoints are fixed, so their columns drop out of the second-difference operator.
  const Eigen::MatrixXd r = a.transpose() * a;
  const Eigen::MatrixXd r_inv = r.inverse();

  StompMatrices m;
  const Eigen::MatrixXd cov = r_inv / r_inv.diagonal().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  m.noise_factor = llt.matrixL();
  m.projection = r_inv;
  for (int c = 0; c < k; ++c) {
    m.projection.col(c) *= 1.0 / (k * r_inv.col(c).maxCoeff());
  }
  return m;
}

void clamp_to_limits(Eigen::MatrixXd& theta, const JointLimits& limits) {
  for (Eigen::Index d = 0; d < theta.cols(); ++d) {
    theta.col(d) = theta.col(d).cwiseMax(limits.lower[d]).cwiseMin(limits.upper[d]);
  }
}

}  // namespace

StompResult stomp_plan(const ComposedCostMap& map, const BodyModel& robot, const PoseFrame& start,
                       const PoseFrame& goal, const StompParams& params, const Constraints& constraints,
                       const Trajectory& initial, std::uint64_t rng_seed) {
  const int dof = robot.dof();
  params.validate(dof);
  robot.check_pose(start);
  robot.check_pose(goal);
  check_goal_pose(robot, goal, constraints);
  if (initial.size() != params.num_waypoints || initial.dof() != dof) {
    throw Error(ErrorCode::InvalidArgument, "initial trajectory must have num_waypoints rows of robot dof");
  }
  constexpr double kEndpointTol = 1e-9;
  if ((initial.at(0) - start.joint_values).cwiseAbs().maxCoeff() > kEndpointTol ||
      (initial.at(initial.size() - 1) - goal.joint_values).cwiseAbs().maxCoeff() > kEndpointTol) {
    throw Error(ErrorCode::InvalidArgument, "initial trajectory endpoints do not match start/goal");
  }

  StateCostEvaluator eval(map, robot);
  if (eval.obstacle_hits(start.joint_values) > 0) {
    throw Error(ErrorCode::InfeasibleEndpoint, "start configuration intersects an obstacle");
  }
  if (eval.obstacle_hits(goal.joint_values) > 0) {
    throw Error(ErrorCode::InfeasibleEndpoint, "goal configuration intersects an obstacle");
  }

  const int n = params.num_waypoints;
  const int k = n - 2;
  const double w = params.control_cost_weight;

  Trajectory current = initial;
  current.waypoints.row(0) = start.joint_values.transpose();
  current.waypoints.row(n - 1) = goal.joint_values.transpose();

  const double endpoint_cost = eval(start.joint_values) + eval(goal.joint_values);
  auto trajectory_cost = [&](const Eigen::MatrixXd& wp) {
    double sum = endpoint_cost;
    for (int i = 1; i + 1 < n; ++i) sum += eval(wp.row(i).transpose());
    Trajectory tmp;
    tmp.waypoints = wp;
    return sum + control_cost(tmp, w);
  };

  StompResult result;
  result.initial_cost = trajectory_cost(current.waypoints);
  result.final_cost = result.initial_cost;
  result.trajectory = current;
  if (k < 1) return result;

  const StompMatrices mats = build_matrices(k);
  Eigen::MatrixXd theta = current.waypoints.middleRows(1, k);
  const Eigen::RowVectorXd q_start = start.joint_values.transpose();
  const Eigen::RowVectorXd q_goal = goal.joint_values.transpose();

  const int rollouts = params.num_rollouts;
  std::vector<Eigen::MatrixXd> noise(static_cast<std::size_t>(rollouts), Eigen::MatrixXd(k, dof));
  Eigen::MatrixXd costs(rollouts, k);
  Eigen::MatrixXd z(k, dof);
  Eigen::MatrixXd rollout(k, dof);
  Eigen::MatrixXd full(n, dof);
  full.row(0) = q_start;
  full.row(n - 1) = q_goal;

  double best = result.initial_cost;
  Eigen::MatrixXd best_waypoints = current.waypoints;

  for (int it = 0; it < params.num_iterations; ++it) {
    for (int r = 0; r < rollouts; ++r) {
      std::mt19937_64 rng(derive_seed(rng_seed, static_cast<std::uint64_t>(it), static_cast<std::uint64_t>(r)));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (int d = 0; d < dof; ++d)
        for (int i = 0; i < k; ++i) z(i, d) = normal(rng);
      auto& eps = noise[static_cast<std::size_t>(r)];
      eps = mats.noise_factor * z;
      for (int d = 0; d < dof; ++d) eps.col(d) *= params.noise_for(d);
      rollout = theta + eps;
      clamp_to_limits(rollout, robot.limits());
      eps = rollout - theta;

      full.middleRows(1, k) = rollout;
      for (int i = 0; i < k; ++i) {
        const int row = i + 1;
        const double acc = (full.row(row - 1) - 2.0 * full.row(row) + full.row(row + 1)).squaredNorm();
        costs(r, i) = eval(full.row(row).transpose()) + w * acc;
      }
    }

    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(k, dof);
    for (int i = 0; i < k; ++i) {
      const double lo = costs.col(i).minCoeff();
      const double hi = costs.col(i).maxCoeff();
      const double range = hi - lo;
      Eigen::VectorXd p(rollouts);
      if (range > std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi))) {
        for (int r = 0; r < rollouts; ++r) p[r] = std::exp(-params.temperature * (costs(r, i) - lo) / range);
      } else {
        p.setOnes();
      }
      p /= p.sum();
      for (int r = 0; r < rollouts; ++r) delta.row(i) += p[r] * noise[static_cast<std::size_t>(r)].row(i);
    }

    theta += mats.projection * delta;
    clamp_to_limits(theta, robot.limits());

    full.middleRows(1, k) = theta;
    const double cost = trajectory_cost(full);
    if (cost < best) {
      best = cost;
      best_waypoints = full;
    }
    result.cost_history.push_back(best);
    result.iterations = it + 1;

    const int window = params.convergence_window;
    if (it >= window) {
      const double before = result.cost_history[static_cast<std::size_t>(it - window)];
      if (before - best <= params.convergence_tol * std::abs(before)) break;
    }
  }

  result.trajectory.waypoints = best_waypoints;
  result.final_cost = best;
  return result;
}

}  // namespace hamp

#include <algorithm>
#include <cmath>

#include "hamp/error.hpp"
#include "hamp/planners.hpp"

namespace hamp {

Trajectory linear_trajectory(const Eigen::VectorXd& start, const Eigen::VectorXd& goal, int num_waypoints,
                             double dt) {
  if (num_waypoints < 2) throw Error(ErrorCode::InvalidArgument, "trajectory needs at least 2 waypoints");
  if (start.size() != goal.size()) throw Error(ErrorCode::InvalidArgument, "start/goal dof mismatch");
  Trajectory t;
  t.dt = dt;
  t.waypoints.resize(num_waypoints, start.size());
  for (int i = 0; i < num_waypoints; ++i) {
    const double s = static_cast<double>(i) / (num_waypoints - 1);
    t.waypoints.row(i) = (start + s * (goal - start)).transpose();
  }
  t.waypoints.row(0) = start.transpose();
  t.waypoints.row(num_waypoints - 1) = goal.transpose();
  return t;
}

Trajectory resample_uniform_time(const Trajectory& traj, int num_waypoints) {
  if (num_waypoints < 2 || traj.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "resampling needs at least 2 waypoints");
  }
  if (traj.size() == num_waypoints) return traj;
  Trajectory out;
  out.waypoints.resize(num_waypoints, traj.dof());
  const int segments = traj.size() - 1;
  for (int j = 0; j < num_waypoints; ++j) {
    const double u = static_cast<double>(j) * segments / (num_waypoints - 1);
    const int i = std::min(static_cast<int>(std::floor(u)), segments - 1);
    const double f = u - i;
    out.waypoints.row(j) = (1.0 - f) * traj.waypoints.row(i) + f * traj.waypoints.row(i + 1);
  }
  out.waypoints.row(0) = traj.waypoints.row(0);
  out.waypoints.row(num_waypoints - 1) = traj.waypoints.row(traj.size() - 1);
  out.dt = traj.duration() / (num_waypoints - 1);
  if (!(out.dt > 0.0)) out.dt = traj.dt;
  return out;
}

Trajectory resample_polyline(std::span<const Eigen::VectorXd> path, int num_waypoints, double dt) {
  if (path.size() < 2 || num_waypoints < 2) {
    throw Error(ErrorCode::InvalidArgument, "resampling needs at least 2 points");
  }
  std::vector<double> cum(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) cum[i] = cum[i - 1] + (path[i] - path[i - 1]).norm();
  const double total = cum.back();
  Trajectory out;
  out.dt = dt;
  out.waypoints.resize(num_waypoints, path.front().size());
  std::size_t seg = 0;
  for (int j = 0; j < num_waypoints; ++j) {
    const double target = total * static_cast<double>(j) / (num_waypoints - 1);
    while (seg + 2 < path.size() && cum[seg + 1] < target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double f = len > 0.0 ? std::clamp((target - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out.waypoints.row(j) = ((1.0 - f) * path[seg] + f * path[seg + 1]).transpose();
  }
  out.waypoints.row(0) = path.front().transpose();
  out.waypoints.row(num_waypoints - 1) = path.back().transpose();
  return out;
}

double minimum_uniform_dt(const Trajectory& traj, const Constraints& constraints) {
  constraints.validate(traj.dof());
  const auto& w = traj.waypoints;
  double dt = 0.0;
  for (Eigen::Index i = 0; i + 1 < w.rows(); ++i) {
    for (Eigen::Index d = 0; d < w.cols(); ++d) {
      dt = std::max(dt, std::abs(w(i + 1, d) - w(i, d)) / constraints.max_joint_velocity[d]);
    }
  }
  for (Eigen::Index i = 1; i + 1 < w.rows(); ++i) {
    for (Eigen::Index d = 0; d < w.cols(); ++d) {
      const double acc = std::abs(w(i - 1, d) - 2.0 * w(i, d) + w(i + 1, d));
      dt = std::max(dt, std::sqrt(acc / constraints.max_joint_acceleration[d]));
    }
  }
  return dt;
}

Trajectory enforce_kinodynamic_limits(const Trajectory& traj, const Constraints& constraints) {
  Trajectory out = traj;
  out.dt = std::max(traj.dt, minimum_uniform_dt(traj, constraints));
  return out;
}

void Constraints::validate(int dof) const {
  if (max_joint_velocity.size() != dof || max_joint_acceleration.size() != dof) {
    throw Error(ErrorCode::InvalidArgument, "velocity/acceleration bounds must have one entry per joint");
  }
  if ((max_joint_velocity.array() <= 0.0).any() || (max_joint_acceleration.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "velocity/acceleration bounds must be positive");
  }
}

void check_goal_pose(const BodyModel& robot, const PoseFrame& goal, const Constraints& constraints) {
  if (!constraints.goal_pose) return;
  const Eigen::Isometry3d actual = end_effector_pose(robot, goal);
  const Eigen::Isometry3d& want = *constraints.goal_pose;
  const double pos_err = (actual.translation() - want.translation()).norm();
  const double rot_err = Eigen::AngleAxisd(want.linear().transpose() * actual.linear()).angle();
  if (pos_err > kGoalPositionTol || rot_err > kGoalOrientationTol) {
    throw Error(ErrorCode::InfeasibleEndpoint,
                "goal configuration misses goal_pose (position error " + std::to_string(pos_err) +
                    " m, orientation error " + std::to_string(rot_err) + " rad)");
  }
}

}  // namespace hamp

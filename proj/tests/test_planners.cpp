#include <gtest/gtest.h>

#include <cstring>
#include <functional>

#include "hamp/error.hpp"
#include "hamp/planners.hpp"
#include "test_support.hpp"

using namespace hamp;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

bool same_waypoints(const Trajectory& a, const Trajectory& b) {
  return a.waypoints.rows() == b.waypoints.rows() && a.waypoints.cols() == b.waypoints.cols() &&
         std::memcmp(a.waypoints.data(), b.waypoints.data(), sizeof(double) * a.waypoints.size()) == 0;
}

Constraints bounds(int dof, double vel, double acc) {
  Constraints c;
  c.max_joint_velocity = Eigen::VectorXd::Constant(dof, vel);
  c.max_joint_acceleration = Eigen::VectorXd::Constant(dof, acc);
  return c;
}

// Post in front of the arm: the straight sweep hits it, folding the elbow clears it.
CostField post_obstacle() { return test::toy_obstacles({{{0.36, -0.06, 0.7, 0.06}}}); }

}  // namespace

TEST(StateCost, OutsideGridWithZeroOutOfBoundsCost) {
  const BodyModel arm = test::toy_arm();
  const GridSpec far(Eigen::Vector3d(5, 5, 5), 0.1, {3, 3, 3});
  const ComposedCostMap map = test::uniform_map(far, 0.7, 0.0);
  EXPECT_EQ(state_cost(map, arm, PoseFrame(Eigen::Vector2d(0.4, -0.2))), 0.0);
}

TEST(StateCost, UniformFieldFactorizes) {
  const BodyModel arm = test::toy_arm();
  const ComposedCostMap map = test::uniform_map(test::toy_grid(), 0.25);
  const double n = static_cast<double>(arm.sample_count());
  EXPECT_DOUBLE_EQ(state_cost(map, arm, PoseFrame(Eigen::Vector2d(1.0, -0.5))), n * 0.25);
}

TEST(StateCost, HandBuiltFieldMatchesPerSampleLookup) {
  const GridSpec spec(Eigen::Vector3d::Zero(), 0.25, {4, 4, 4});
  std::vector<double> v(64);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 + 0.01 * static_cast<double>(i);
  const ComposedCostMap map =
      compose(CostField(spec, v), std::nullopt, CostField(spec, 0.0), CostMode::OccOnly, 3.0);

  CylinderLink link;
  link.name = "block";
  link.radius = 2.5;
  link.length = 1.5;
  link.fixed_transform.translation() = Eigen::Vector3d(0.25, 0.0, 0.0);
  // Cells (i, j, k) hit by each sample once the link offset is applied; one sample falls outside.
  const std::vector<std::array<int, 3>> cells{{0, 0, 0}, {1, 0, 0}, {2, 1, 0}, {3, 3, 3},
                                              {1, 2, 3}, {0, 3, 1}, {2, 2, 2}};
  for (const auto& c : cells) {
    link.local_samples.push_back(Eigen::Vector3d(0.125 + 0.25 * c[0] - 0.25, 0.125 + 0.25 * c[1], 0.125 + 0.25 * c[2]));
  }
  link.local_samples.push_back(Eigen::Vector3d(2.0, 0.1, 0.1));
  const BodyModel body("block", {link}, JointLimits{});
  ASSERT_EQ(body.sample_count(), 8u);

  double expected = 3.0;
  for (const auto& c : cells) expected += 0.1 + 0.01 * (c[0] + 4 * c[1] + 16 * c[2]);
  EXPECT_NEAR(state_cost(map, body, PoseFrame(Eigen::VectorXd(0))), expected, 1e-12);
}

TEST(StateCost, JointLimitViolationRejected) {
  const BodyModel arm = test::toy_arm();
  const ComposedCostMap map = test::uniform_map(test::toy_grid(), 0.5);
  EXPECT_EQ(code_of([&] { state_cost(map, arm, PoseFrame(Eigen::Vector2d(4.0, 0.0))); }),
            ErrorCode::JointLimitViolation);
}

TEST(ControlCost, SecondDifferencesOnly) {
  Trajectory t = linear_trajectory(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 2), 10);
  EXPECT_NEAR(control_cost(t, 1.0), 0.0, 1e-24);
  t.waypoints(4, 0) += 0.1;
  // One displaced point perturbs three second differences: 0.1, -0.2, 0.1.
  EXPECT_NEAR(control_cost(t, 2.0), 2.0 * (0.01 + 0.04 + 0.01), 1e-12);
  t.dt = 7.0;
  EXPECT_NEAR(control_cost(t, 2.0), 2.0 * 0.06, 1e-12);
}

TEST(Stomp, ZeroFieldStraightLineReturnedUnchanged) {
  const BodyModel arm = test::toy_arm();
  const ComposedCostMap map = test::uniform_map(test::toy_grid(), 0.0);
  StompParams params;
  params.num_iterations = 15;
  const PoseFrame start(Eigen::Vector2d(-1.0, 0.3)), goal(Eigen::Vector2d(1.0, 0.3));
  const Trajectory init = linear_trajectory(start.joint_values, goal.joint_values, params.num_waypoints);
  const StompResult r = stomp_plan(map, arm, start, goal, params, bounds(2, 1, 2), init, 3);
  EXPECT_LE(control_cost(r.trajectory, 1.0), control_cost(init, 1.0));
  EXPECT_TRUE(same_waypoints(r.trajectory, init));
}

TEST(Stomp, SlabCostDecreasesWithMonotoneHistory) {
  const auto p = test::slab_problem();
  const StompResult r = stomp_plan(p.map, p.arm, p.start, p.goal, p.params, p.constraints, p.initial, 11);
  const double init_state = total_cost(p.map, p.arm, p.initial, 0.0);
  const double final_state = total_cost(p.map, p.arm, r.trajectory, 0.0);
  EXPECT_LT(final_state, init_state);
  EXPECT_LE(r.final_cost, r.initial_cost);
  EXPECT_DOUBLE_EQ(r.initial_cost, total_cost(p.map, p.arm, p.initial, p.params.control_cost_weight));
  EXPECT_DOUBLE_EQ(r.final_cost, total_cost(p.map, p.arm, r.trajectory, p.params.control_cost_weight));
  ASSERT_FALSE(r.cost_history.empty());
  EXPECT_LE(r.cost_history.front(), r.initial_cost);
  for (std::size_t i = 1; i < r.cost_history.size(); ++i) EXPECT_LE(r.cost_history[i], r.cost_history[i - 1]);
  EXPECT_EQ(r.cost_history.back(), r.final_cost);
}

TEST(Stomp, SameSeedSameTrajectory) {
  const auto p = test::slab_problem();
  const StompResult a = stomp_plan(p.map, p.arm, p.start, p.goal, p.params, p.constraints, p.initial, 99);
  const StompResult b = stomp_plan(p.map, p.arm, p.start, p.goal, p.params, p.constraints, p.initial, 99);
  EXPECT_TRUE(same_waypoints(a.trajectory, b.trajectory));
  EXPECT_EQ(a.cost_history, b.cost_history);
}

TEST(Stomp, EndpointsInObstacleRejected) {
  auto p = test::slab_problem();
  const CostField occ = p.map.occ();
  const ComposedCostMap map =
      compose(occ, std::nullopt, post_obstacle(), CostMode::OccOnly, 1.0);
  const PoseFrame blocked(Eigen::Vector2d(0.0, 0.0));
  const Trajectory init = linear_trajectory(blocked.joint_values, p.goal.joint_values, p.params.num_waypoints);
  EXPECT_EQ(code_of([&] { stomp_plan(map, p.arm, blocked, p.goal, p.params, p.constraints, init, 1); }),
            ErrorCode::InfeasibleEndpoint);
}

TEST(Stomp, ParameterValidation) {
  StompParams p;
  p.num_rollouts = 0;
  EXPECT_THROW(p.validate(2), Error);
  p = StompParams{};
  p.temperature = 0.0;
  EXPECT_THROW(p.validate(2), Error);
  p = StompParams{};
  p.noise_stddev = Eigen::VectorXd::Constant(3, 0.1);
  EXPECT_THROW(p.validate(2), Error);
  EXPECT_NO_THROW(StompParams{}.validate(6));
}

TEST(StompProperties, EndpointsPinnedAndNeverWorseThanSeed) {
  test::Gen gen(4);
  const auto p = test::slab_problem();
  for (int trial = 0; trial < 6; ++trial) {
    const PoseFrame s(Eigen::Vector2d(gen.uniform(-2.0, -0.5), gen.uniform(-1.0, 1.0)));
    const PoseFrame g(Eigen::Vector2d(gen.uniform(0.5, 2.0), gen.uniform(-1.0, 1.0)));
    StompParams params = p.params;
    params.num_iterations = 15;
    const Trajectory init = linear_trajectory(s.joint_values, g.joint_values, params.num_waypoints);
    const StompResult r = stomp_plan(p.map, p.arm, s, g, params, p.constraints, init, gen.u64());
    EXPECT_LE(r.final_cost, r.initial_cost);
    EXPECT_TRUE(r.trajectory.at(0) == s.joint_values);
    EXPECT_TRUE(r.trajectory.at(r.trajectory.size() - 1) == g.joint_values);
    EXPECT_EQ(r.trajectory.size(), params.num_waypoints);
  }
}

TEST(Rrt, EmptyFieldGivesStraightInterpolation) {
  const BodyModel arm = test::toy_arm();
  const CostField none(test::toy_grid(), 0.0);
  const PoseFrame s(Eigen::Vector2d(-1.0, 0.3)), g(Eigen::Vector2d(1.0, -0.2));
  RrtParams params;
  const Trajectory t = rrt_plan(arm, s, g, none, params, 5);
  const Trajectory line = linear_trajectory(s.joint_values, g.joint_values, params.num_waypoints);
  ASSERT_EQ(t.size(), line.size());
  for (int i = 0; i < t.size(); ++i) EXPECT_LT((t.at(i) - line.at(i)).norm(), 1e-12);
}

TEST(Rrt, PostAcrossSweepIsClearedUnderDenseRecheck) {
  const BodyModel arm = test::toy_arm();
  const CostField post = post_obstacle();
  const PoseFrame s(Eigen::Vector2d(-1.0, 0.0)), g(Eigen::Vector2d(1.0, 0.0));
  ASSERT_FALSE(configuration_free(post, arm, Eigen::Vector2d(0.0, 0.0)));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Trajectory t = rrt_plan(arm, s, g, post, RrtParams{}, seed);
    EXPECT_TRUE(t.at(0) == s.joint_values);
    EXPECT_TRUE(t.at(t.size() - 1) == g.joint_values);
    EXPECT_EQ(obstacle_hits(post, arm, t), 0);
    for (int i = 0; i + 1 < t.size(); ++i) {
      const Eigen::VectorXd a = t.at(i), b = t.at(i + 1);
      const int steps = static_cast<int>(std::ceil((b - a).norm() / 0.005)) + 1;
      for (int k = 0; k <= steps; ++k) {
        const Eigen::VectorXd q = a + (b - a) * (static_cast<double>(k) / steps);
        EXPECT_TRUE(configuration_free(post, arm, q)) << "seed " << seed << " segment " << i;
      }
    }
  }
}

TEST(Rrt, StartInsideObstacleRejected) {
  const BodyModel arm = test::toy_arm();
  EXPECT_EQ(code_of([&] {
              rrt_plan(arm, PoseFrame(Eigen::Vector2d(0.0, 0.0)), PoseFrame(Eigen::Vector2d(1.0, 0.0)),
                       post_obstacle(), RrtParams{}, 1);
            }),
            ErrorCode::InfeasibleEndpoint);
}

TEST(Rrt, NoPathTimesOut) {
  const BodyModel arm = test::toy_arm();
  // Bars along both x half-axes stop the upper arm from swinging between +y and -y.
  const CostField bars = test::toy_obstacles({{{0.06, -0.03, 0.7, 0.03}}, {{-0.7, -0.03, -0.06, 0.03}}});
  RrtParams params;
  params.max_samples = 300;
  const PoseFrame s(Eigen::Vector2d(M_PI / 2, 0.0)), g(Eigen::Vector2d(-M_PI / 2, 0.0));
  ASSERT_TRUE(configuration_free(bars, arm, s.joint_values));
  ASSERT_TRUE(configuration_free(bars, arm, g.joint_values));
  EXPECT_EQ(code_of([&] { rrt_plan(arm, s, g, bars, params, 1); }), ErrorCode::PlanningTimeout);
}

TEST(RrtProperties, SeededDeterminism) {
  const BodyModel arm = test::toy_arm();
  const CostField post = post_obstacle();
  const PoseFrame s(Eigen::Vector2d(-1.0, 0.0)), g(Eigen::Vector2d(1.0, 0.0));
  EXPECT_TRUE(same_waypoints(rrt_plan(arm, s, g, post, RrtParams{}, 77), rrt_plan(arm, s, g, post, RrtParams{}, 77)));
}

TEST(Kinodynamic, WithinLimitsUnchanged) {
  Trajectory t = linear_trajectory(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5), 11, 0.1);
  const Trajectory out = enforce_kinodynamic_limits(t, bounds(2, 1.0, 2.0));
  EXPECT_EQ(out.dt, 0.1);
  EXPECT_TRUE(same_waypoints(out, t));
}

TEST(Kinodynamic, VelocityTwiceOverDoublesDt) {
  const Trajectory t = linear_trajectory(Eigen::Vector2d(0, 0), Eigen::Vector2d(2.0, 1.0), 11, 0.1);
  const Trajectory out = enforce_kinodynamic_limits(t, bounds(2, 1.0, 100.0));
  EXPECT_NEAR(out.dt, 0.2, 1e-12);
  EXPECT_NEAR((out.at(1) - out.at(0)).cwiseAbs().maxCoeff() / out.dt, 1.0, 1e-12);
}

TEST(Kinodynamic, AccelerationFourTimesOverDoublesDt) {
  Trajectory t;
  t.dt = 0.1;
  t.waypoints.resize(3, 1);
  t.waypoints << 0.0, 0.08, 0.0;  // second difference 0.16 -> 16 rad/s^2 at dt 0.1
  const Trajectory out = enforce_kinodynamic_limits(t, bounds(1, 100.0, 4.0));
  EXPECT_NEAR(out.dt, 0.2, 1e-12);
  const double acc = std::abs(out.waypoints(0, 0) - 2 * out.waypoints(1, 0) + out.waypoints(2, 0)) / (out.dt * out.dt);
  EXPECT_NEAR(acc, 4.0, 1e-9);
}

TEST(KinodynamicProperties, BoundsHoldAfterRetiming) {
  test::Gen gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int dof = gen.integer(1, 6);
    Trajectory t;
    t.dt = gen.uniform(0.001, 0.5);
    t.waypoints = Eigen::MatrixXd::Random(gen.integer(2, 40), dof) * gen.uniform(0.01, 3.0);
    Constraints c;
    c.max_joint_velocity = Eigen::VectorXd(dof);
    c.max_joint_acceleration = Eigen::VectorXd(dof);
    for (int d = 0; d < dof; ++d) {
      c.max_joint_velocity[d] = gen.uniform(0.1, 3.0);
      c.max_joint_acceleration[d] = gen.uniform(0.1, 6.0);
    }
    const Trajectory out = enforce_kinodynamic_limits(t, c);
    EXPECT_GE(out.dt, t.dt);
    EXPECT_TRUE(same_waypoints(out, t));
    for (int i = 0; i + 1 < out.size(); ++i) {
      for (int d = 0; d < dof; ++d) {
        EXPECT_LE(std::abs(out.waypoints(i + 1, d) - out.waypoints(i, d)) / out.dt, c.max_joint_velocity[d] + 1e-9);
        if (i > 0) {
          const double acc = std::abs(out.waypoints(i - 1, d) - 2 * out.waypoints(i, d) + out.waypoints(i + 1, d));
          EXPECT_LE(acc / (out.dt * out.dt), c.max_joint_acceleration[d] + 1e-9);
        }
      }
    }
  }
}

TEST(Resample, UniformTimeKeepsEndpointsAndDuration) {
  const Trajectory t = linear_trajectory(Eigen::Vector2d(0, 1), Eigen::Vector2d(3, -2), 7, 0.5);
  const Trajectory r = resample_uniform_time(t, 30);
  EXPECT_EQ(r.size(), 30);
  EXPECT_TRUE(r.at(0) == t.at(0));
  EXPECT_TRUE(r.at(29) == t.at(6));
  EXPECT_NEAR(r.duration(), t.duration(), 1e-12);
  for (int i = 0; i < 30; ++i) EXPECT_LT((r.at(i) - (t.at(0) + (t.at(6) - t.at(0)) * (i / 29.0))).norm(), 1e-12);
}

TEST(MultiStart, EmptyMapLinearWinsOrTies) {
  const BodyModel arm = test::toy_arm();
  const ComposedCostMap map = test::uniform_map(test::toy_grid(), 0.0);
  StompParams params;
  params.num_iterations = 10;
  const PoseFrame s(Eigen::Vector2d(-1.0, 0.3)), g(Eigen::Vector2d(1.0, 0.3));
  const MultiStartResult r = multi_start_plan(map, arm, s, g, params, bounds(2, 1, 2), RrtParams{}, {1, 2, 3});
  for (const auto& c : r.candidates) ASSERT_TRUE(c.feasible);
  EXPECT_LE(r.candidates[0].cost, r.candidates[1].cost + 1e-12);
  EXPECT_LE(r.candidates[0].cost, r.candidates[2].cost + 1e-12);
  EXPECT_LE(r.cost, r.candidates[0].cost);
}

TEST(MultiStart, ObstacleOnStraightLineSelectsClearTrajectory) {
  const BodyModel arm = test::toy_arm();
  const GridSpec spec = test::toy_grid();
  const ComposedCostMap map = compose(CostField(spec, 0.05), std::nullopt, post_obstacle(), CostMode::OccOnly, 1.0);
  StompParams params;
  params.num_iterations = 30;
  const PoseFrame s(Eigen::Vector2d(-1.0, 0.0)), g(Eigen::Vector2d(1.0, 0.0));
  const MultiStartResult r = multi_start_plan(map, arm, s, g, params, bounds(2, 1, 2), RrtParams{}, {4, 5, 6});
  EXPECT_TRUE(r.candidates[0].rejected_obstacle);
  EXPECT_NE(r.selected, 0);
  EXPECT_EQ(obstacle_hits(map, arm, r.trajectory), 0);

  const MultiStartResult again = multi_start_plan(map, arm, s, g, params, bounds(2, 1, 2), RrtParams{}, {4, 5, 6});
  EXPECT_EQ(again.selected, r.selected);
  EXPECT_TRUE(same_waypoints(again.trajectory, r.trajectory));
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 1), derive_seed(2, 1));
  EXPECT_EQ(derive_seed(9, 3, 4), derive_seed(9, 3, 4));
}

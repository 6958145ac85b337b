#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hamp/bodies.hpp"
#include "hamp/costmap.hpp"
#include "hamp/grid.hpp"
#include "hamp/planners.hpp"

namespace hamp::test {

inline std::filesystem::path data_dir() { return HAMP_DATA_DIR; }

/// Small seeded generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t u64() { return rng_(); }
  Eigen::Vector3d vec3(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

  Eigen::VectorXd config(const JointLimits& limits) {
    Eigen::VectorXd q(limits.lower.size());
    for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = uniform(limits.lower[j], limits.upper[j]);
    return q;
  }

  /// Grid of at most max_dim cells per axis with 1-5 random boxes/spheres
  /// marked occupied. Guaranteed to contain both occupied and free cells.
  OccupancyGrid blob_grid(int max_dim) {
    for (;;) {
      const std::array<int, 3> dims{integer(3, max_dim), integer(3, max_dim), integer(3, max_dim)};
      const GridSpec spec(vec3(-1.0, 1.0), uniform(0.02, 0.2), dims);
      OccupancyGrid grid(spec);
      const int blobs = integer(1, 5);
      std::vector<Eigen::Vector3d> pts;
      for (int b = 0; b < blobs; ++b) {
        const Eigen::Vector3d c(integer(0, dims[0] - 1), integer(0, dims[1] - 1), integer(0, dims[2] - 1));
        const double r = uniform(0.0, 3.5);
        const bool sphere = integer(0, 1) == 1;
        for (std::size_t off = 0; off < spec.cell_count(); ++off) {
          const CellIndex ci = spec.unflat(off);
          const Eigen::Vector3d d = Eigen::Vector3d(ci.i, ci.j, ci.k) - c;
          const bool in = sphere ? d.norm() <= r : d.cwiseAbs().maxCoeff() <= r;
          if (in) pts.push_back(spec.cell_center(ci));
        }
      }
      grid.accumulate(pts);
      if (grid.max_count() > 0 && grid.total() > 0) {
        bool has_free = false;
        for (auto c : grid.counts()) has_free = has_free || c == 0;
        if (has_free) return grid;
      }
    }
  }

 private:
  std::mt19937_64 rng_;
};

/// Cylinder lying along +x when its joint angle is zero; joint rotates about world z.
inline CylinderLink planar_link(const std::string& name, double length, double radius, int parent, int joint,
                                double offset) {
  CylinderLink l;
  l.name = name;
  l.radius = radius;
  l.length = length;
  l.parent = parent;
  // Root: rotate local z onto world x. Children: continue along the parent's axis.
  l.fixed_transform = parent < 0 ? make_transform(Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitY(), M_PI / 2)
                                 : make_transform(Eigen::Vector3d(0, 0, offset), Eigen::Vector3d::UnitZ(), 0.0);
  l.joint.index = joint;
  // Local -x maps to world +z under the root rotation.
  l.joint.axis = -Eigen::Vector3d::UnitX();
  return l;
}

/// Planar serial arm in the z = 0 plane with revolute joints about world z.
inline BodyModel planar_arm(const std::vector<double>& lengths, double radius, double spacing,
                            double limit = 2 * M_PI) {
  std::vector<CylinderLink> links;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const int parent = static_cast<int>(i) - 1;
    auto l = planar_link("l" + std::to_string(i), lengths[i], radius, parent, static_cast<int>(i),
                         i == 0 ? 0.0 : lengths[i - 1]);
    l.local_samples = sample_cylinder(l, spacing);
    links.push_back(l);
  }
  const auto n = static_cast<Eigen::Index>(lengths.size());
  return BodyModel("planar", links, {Eigen::VectorXd::Constant(n, -limit), Eigen::VectorXd::Constant(n, limit)});
}

inline CostField constant_field(const GridSpec& spec, double v) { return CostField(spec, v); }

/// Composed Occ+SDF map whose combined value is `c` everywhere (occ = c, sdfh = 1, obstacle = 0).
inline ComposedCostMap uniform_map(const GridSpec& spec, double c, double oob = 1.0) {
  return compose(CostField(spec, c), CostField(spec, 1.0), CostField(spec, 0.0), CostMode::OccSdf, oob);
}

/// 2-link planar arm (0.3 m, 0.25 m) and a grid around its reach.
inline BodyModel toy_arm() { return planar_arm({0.3, 0.25}, 0.02, 0.03, M_PI); }
inline GridSpec toy_grid() { return GridSpec(Eigen::Vector3d(-0.7, -0.7, -0.1), 0.02, {70, 70, 10}); }

/// Boxes spanning the whole grid height.
inline CostField toy_obstacles(std::initializer_list<std::array<double, 4>> xy_boxes) {
  std::vector<Obstacle> obs;
  for (const auto& b : xy_boxes) {
    obs.push_back({"box", Box{Eigen::Vector3d(b[0], b[1], -1.0), Eigen::Vector3d(b[2], b[3], 1.0)}});
  }
  return obstacle_cost(toy_grid(), obs);
}

/// Toy problem whose straight joint-space path sweeps the forearm through a
/// high-cost slab in front of the arm.
struct SlabProblem {
  BodyModel arm = toy_arm();
  ComposedCostMap map;
  PoseFrame start{Eigen::Vector2d(-1.0, 0.3)};
  PoseFrame goal{Eigen::Vector2d(1.0, 0.3)};
  StompParams params;
  Constraints constraints;
  Trajectory initial;
};

inline SlabProblem slab_problem() {
  SlabProblem p;
  const GridSpec spec = toy_grid();
  std::vector<double> occ(spec.cell_count(), 0.05);
  for (std::size_t off = 0; off < occ.size(); ++off) {
    const Eigen::Vector3d c = spec.cell_center(spec.unflat(off));
    if (c.x() > 0.38 && c.x() < 0.62 && std::abs(c.y()) < 0.12) occ[off] = 1.0;
  }
  p.map = compose(CostField(spec, occ), std::nullopt, CostField(spec, 0.0), CostMode::OccOnly, 1.0);
  p.params.num_iterations = 40;
  p.constraints.max_joint_velocity = Eigen::Vector2d::Ones();
  p.constraints.max_joint_acceleration = Eigen::Vector2d::Constant(2.0);
  p.initial = linear_trajectory(p.start.joint_values, p.goal.joint_values, p.params.num_waypoints);
  return p;
}

/// Cell centers split by occupancy.
struct CenterSets {
  std::vector<Eigen::Vector3d> occupied;
  std::vector<Eigen::Vector3d> free;
};

inline CenterSets center_sets(const OccupancyGrid& grid) {
  CenterSets s;
  const GridSpec& spec = grid.spec();
  for (std::size_t a = 0; a < spec.cell_count(); ++a) {
    (grid.count(a) > 0 ? s.occupied : s.free).push_back(spec.cell_center(spec.unflat(a)));
  }
  return s;
}

/// Brute-force signed distance: distance from a cell center to the nearest
/// center of the opposite class, corrected by the half-cell boundary offset.
inline std::vector<double> brute_force_sdf(const OccupancyGrid& grid) {
  const GridSpec& spec = grid.spec();
  const CenterSets sets = center_sets(grid);
  std::vector<double> out(spec.cell_count());
  for (std::size_t a = 0; a < out.size(); ++a) {
    const bool occ_a = grid.count(a) > 0;
    const Eigen::Vector3d ca = spec.cell_center(spec.unflat(a));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cb : occ_a ? sets.free : sets.occupied) best = std::min(best, (cb - ca).squaredNorm());
    best = std::sqrt(best);
    out[a] = occ_a ? spec.resolution / 2 - best : best - spec.resolution / 2;
  }
  return out;
}

/// Brute-force signed distance to the occupied region as a union of solid
/// cell boxes: exterior distance for free cells, minus the distance to the
/// nearest free box for occupied cells.
inline std::vector<double> brute_force_box_sdf(const OccupancyGrid& grid) {
  const GridSpec& spec = grid.spec();
  const CenterSets sets = center_sets(grid);
  const double h = spec.resolution / 2;
  std::vector<double> out(spec.cell_count());
  for (std::size_t a = 0; a < out.size(); ++a) {
    const bool occ_a = grid.count(a) > 0;
    const Eigen::Vector3d ca = spec.cell_center(spec.unflat(a));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cb : occ_a ? sets.free : sets.occupied) {
      const Eigen::Vector3d d = ((cb - ca).cwiseAbs().array() - h).max(0.0).matrix();
      best = std::min(best, d.squaredNorm());
    }
    best = std::sqrt(best);
    out[a] = occ_a ? -best : best;
  }
  return out;
}

}  // namespace hamp::test

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hamp/bodies.hpp"
#include "hamp/costmap.hpp"
#include "hamp/grid.hpp"
#include "hamp/planners.hpp"

namespace hamp {

inline constexpr int kScenarioSchemaVersion = 1;

enum class PoseLogFormat { Joints, LinkTransforms };

/// Recorded human motion, either as joint frames for the human model or as
/// per-link world transforms (one per link per frame).
struct HumanLog {
  BodyModel model;  // placement applied; limits from the joint log when present
  PoseLogFormat format = PoseLogFormat::Joints;
  std::vector<PoseFrame> poses;
  std::vector<LinkTransforms> link_frames;

  std::size_t frame_count() const { return format == PoseLogFormat::Joints ? poses.size() : link_frames.size(); }
};

struct Scenario {
  std::filesystem::path source;
  std::string name;
  GridSpec grid;
  std::vector<Obstacle> obstacles;
  HumanLog human;
  BodyModel robot;
  PoseFrame start;
  PoseFrame goal;
  StompParams planner;
  RrtParams rrt;
  Constraints constraints;
  int trials = 15;
  std::uint64_t base_seed = 1;
  std::vector<std::uint64_t> seeds;  // explicit per-trial seeds; empty means derived from base_seed
  int waypoints = 30;
  double out_of_bounds_cost = 1.0;
  double nominal_dt = 0.01;

  std::uint64_t trial_seed(int trial) const;

  /// Re-checks the cross-field invariants; throws ValidationError naming the field.
  void validate() const;
};

/// Parses and validates a scenario file. Relative paths inside it resolve
/// against the file's directory. Throws IoError (unreadable file), ParseError
/// (syntax or schema, with line and field) or ValidationError.
Scenario load_scenario(const std::filesystem::path& path);

/// Reads a pose log. Joint logs have a header `t,q0,...`; link-transform logs
/// have `t` followed by tx,ty,tz,rx,ry,rz (rotation vector) per link.
std::vector<PoseFrame> read_joint_log(const std::filesystem::path& path, int dof);
std::vector<LinkTransforms> read_link_transform_log(const std::filesystem::path& path, std::size_t links);

/// Histogram of human body samples over the whole log.
OccupancyGrid build_occupancy(const Scenario& scenario);

}  // namespace hamp

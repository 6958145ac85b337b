#include "hamp/scenario.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hamp/error.hpp"
#include "yaml_util.hpp"

namespace hamp {

namespace {

namespace fs = std::filesystem;
using detail::YamlContext;

[[noreturn]] void invalid(const std::string& field, const std::string& msg) {
  throw Error(ErrorCode::ValidationError, "field '" + field + "': " + msg);
}

void only_keys(const YamlContext& ctx, const YAML::Node& node, const std::string& field,
               std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) ctx.fail(node, field, "expected a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) ctx.fail(kv.first, field.empty() ? key : field + "." + key, "unknown field");
  }
}

bool present(const YAML::Node& parent, const char* key) {
  YAML::Node n = parent[key];
  return n.IsDefined() && !n.IsNull();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Eigen::Isometry3d read_frame(const YamlContext& ctx, const YAML::Node& node, const std::string& field) {
  only_keys(ctx, node, field, {"translation", "rotation"});
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  if (present(node, "translation")) t = ctx.vec3(node["translation"], field + ".translation");
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0.0;
  if (present(node, "rotation")) {
    Eigen::VectorXd v = ctx.vector(node["rotation"], field + ".rotation", 4);
    axis = v.head<3>();
    angle = v[3];
    if (angle != 0.0 && axis.norm() < 1e-12) ctx.fail(node["rotation"], field + ".rotation", "zero rotation axis");
  }
  return make_transform(t, axis, angle);
}

/// Scalar (applied to every joint) or a per-joint list.
Eigen::VectorXd per_joint(const YamlContext& ctx, const YAML::Node& node, const std::string& field, int dof) {
  if (node.IsScalar()) return Eigen::VectorXd::Constant(dof, ctx.as<double>(node, field));
  return ctx.vector(node, field, dof);
}

Obstacle read_obstacle(const YamlContext& ctx, const YAML::Node& n, const std::string& f) {
  only_keys(ctx, n, f, {"name", "box", "cylinder"});
  Obstacle ob;
  ob.name = ctx.get<std::string>(n, "name", f + ".name", "");
  if (present(n, "box") == present(n, "cylinder")) ctx.fail(n, f, "expected exactly one of 'box' or 'cylinder'");
  if (present(n, "box")) {
    const YAML::Node b = n["box"];
    only_keys(ctx, b, f + ".box", {"min", "max"});
    Box box{ctx.vec3(ctx.require(b, "min", f + ".box.min"), f + ".box.min"),
            ctx.vec3(ctx.require(b, "max", f + ".box.max"), f + ".box.max")};
    if ((box.max.array() < box.min.array()).any()) invalid(f + ".box", "max must be >= min on every axis");
    ob.shape = box;
  } else {
    const YAML::Node c = n["cylinder"];
    only_keys(ctx, c, f + ".cylinder", {"base", "axis", "radius", "length"});
    Cylinder cyl;
    cyl.base = ctx.vec3(ctx.require(c, "base", f + ".cylinder.base"), f + ".cylinder.base");
    if (present(c, "axis")) cyl.axis = ctx.vec3(c["axis"], f + ".cylinder.axis");
    if (cyl.axis.norm() < 1e-12) invalid(f + ".cylinder.axis", "zero axis");
    cyl.axis.normalize();
    cyl.radius = ctx.as<double>(ctx.require(c, "radius", f + ".cylinder.radius"), f + ".cylinder.radius");
    cyl.length = ctx.as<double>(ctx.require(c, "length", f + ".cylinder.length"), f + ".cylinder.length");
    if (!(cyl.radius > 0.0)) invalid(f + ".cylinder.radius", "must be positive");
    if (!(cyl.length > 0.0)) invalid(f + ".cylinder.length", "must be positive");
    ob.shape = cyl;
  }
  return ob;
}

/// Splits a CSV line into doubles; returns false on any malformed field.
bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    std::size_t b = pos, e = end;
    while (b < e && (line[b] == ' ' || line[b] == '\t')) ++b;
    while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t' || line[e - 1] == '\r')) --e;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(line.data() + b, line.data() + e, v);
    if (ec != std::errc() || ptr != line.data() + e || b == e) return false;
    out.push_back(v);
    pos = end + 1;
  }
  return true;
}

template <typename Fn>
void read_csv(const fs::path& path, std::size_t columns, Fn&& row_fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open pose log " + path.string());
  std::string line;
  bool header = false;
  int lineno = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    if (!header) {
      header = true;
      const auto commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
      if (commas + 1 != columns) {
        throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                               std::to_string(columns) + " columns in header");
      }
      continue;
    }
    if (!parse_row(line, values) || values.size() != columns) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                             std::to_string(columns) + " numeric columns");
    }
    row_fn(values);
  }
}

}  // namespace

std::vector<PoseFrame> read_joint_log(const fs::path& path, int dof) {
  std::vector<PoseFrame> out;
  read_csv(path, static_cast<std::size_t>(dof) + 1, [&](const std::vector<double>& v) {
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data() + 1, dof), v[0]);
  });
  return out;
}

std::vector<LinkTransforms> read_link_transform_log(const fs::path& path, std::size_t links) {
  std::vector<LinkTransforms> out;
  read_csv(path, 6 * links + 1, [&](const std::vector<double>& v) {
    LinkTransforms frame(links);
    for (std::size_t l = 0; l < links; ++l) {
      const double* p = v.data() + 1 + 6 * l;
      const Eigen::Vector3d rv(p[3], p[4], p[5]);
      const double angle = rv.norm();
      frame[l] = make_transform(Eigen::Vector3d(p[0], p[1], p[2]), angle > 0.0 ? Eigen::Vector3d(rv / angle)
                                                                              : Eigen::Vector3d::UnitZ(),
                                angle);
    }
    out.push_back(std::move(frame));
  });
  return out;
}

std::uint64_t Scenario::trial_seed(int trial) const {
  if (!seeds.empty()) return seeds.at(static_cast<std::size_t>(trial));
  return derive_seed(base_seed, static_cast<std::uint64_t>(trial));
}

void Scenario::validate() const {
  if (trials < 1) invalid("experiment.trials", "must be >= 1");
  if (!seeds.empty() && seeds.size() < static_cast<std::size_t>(trials)) {
    invalid("experiment.seeds", "fewer seeds than trials");
  }
  if (waypoints < 3) invalid("experiment.waypoints", "must be >= 3");
  if (!(nominal_dt > 0.0)) invalid("experiment.nominal_dt", "must be positive");
  if (!(out_of_bounds_cost >= 0.0)) invalid("experiment.out_of_bounds_cost", "must be >= 0");
  if (human.frame_count() == 0) invalid("human.poses", "pose log is empty");
  if (start.joint_values.size() != robot.dof()) {
    invalid("start", "has " + std::to_string(start.joint_values.size()) + " values, robot has " +
                         std::to_string(robot.dof()) + " joints");
  }
  if (goal.joint_values.size() != robot.dof()) {
    invalid("goal", "has " + std::to_string(goal.joint_values.size()) + " values, robot has " +
                        std::to_string(robot.dof()) + " joints");
  }
  if (!robot.within_limits(start.joint_values)) invalid("start", "outside the robot joint limits");
  if (!robot.within_limits(goal.joint_values)) invalid("goal", "outside the robot joint limits");
  try {
    planner.validate(robot.dof());
  } catch (const Error& e) {
    invalid("planner", e.what());
  }
  try {
    constraints.validate(robot.dof());
    check_goal_pose(robot, goal, constraints);
  } catch (const Error& e) {
    invalid("constraints", e.what());
  }
  if (!(rrt.step > 0.0) || !(rrt.collision_resolution > 0.0) || rrt.max_samples < 1 || rrt.goal_bias < 0.0 ||
      rrt.goal_bias > 1.0 || rrt.shortcut_attempts < 0) {
    invalid("rrt", "step and collision_resolution must be positive, max_samples >= 1, goal_bias in [0, 1]");
  }
}

Scenario load_scenario(const fs::path& path) {
  YamlContext ctx{path.string()};
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw Error(ErrorCode::IoError, "cannot open scenario file " + path.string());
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  only_keys(ctx, root, "",
            {"schema_version", "name", "grid", "obstacles", "human", "robot", "planner", "rrt", "constraints",
             "experiment"});
  const int version = ctx.as<int>(ctx.require(root, "schema_version", "schema_version"), "schema_version");
  if (version != kScenarioSchemaVersion) {
    ctx.fail(root["schema_version"], "schema_version", "unsupported version " + std::to_string(version));
  }

  const fs::path base = path.parent_path();
  Scenario sc;
  sc.source = path;
  sc.name = ctx.get<std::string>(root, "name", "name", path.stem().string());

  {
    const YAML::Node g = ctx.require(root, "grid", "grid");
    only_keys(ctx, g, "grid", {"origin", "resolution", "dims"});
    const Eigen::Vector3d origin = ctx.vec3(ctx.require(g, "origin", "grid.origin"), "grid.origin");
    const double res = ctx.as<double>(ctx.require(g, "resolution", "grid.resolution"), "grid.resolution");
    const Eigen::VectorXd d = ctx.vector(ctx.require(g, "dims", "grid.dims"), "grid.dims", 3);
    std::array<int, 3> dims{};
    for (int a = 0; a < 3; ++a) {
      if (d[a] != std::floor(d[a])) invalid("grid.dims", "must be integers");
      dims[a] = static_cast<int>(d[a]);
    }
    try {
      sc.grid = GridSpec(origin, res, dims);
    } catch (const Error& e) {
      invalid("grid", e.what());
    }
  }

  if (present(root, "obstacles")) {
    const YAML::Node obs = root["obstacles"];
    if (!obs.IsSequence()) ctx.fail(obs, "obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      sc.obstacles.push_back(read_obstacle(ctx, obs[i], "obstacles[" + std::to_string(i) + "]"));
    }
  }

  {
    const YAML::Node r = ctx.require(root, "robot", "robot");
    only_keys(ctx, r, "robot", {"model", "sample_spacing", "start", "goal"});
    const double spacing = ctx.get<double>(r, "sample_spacing", "robot.sample_spacing", sc.grid.resolution);
    if (!(spacing > 0.0)) invalid("robot.sample_spacing", "must be positive");
    const auto model = ctx.as<std::string>(ctx.require(r, "model", "robot.model"), "robot.model");
    sc.robot = load_body_model(resolve(base, model), spacing);
    sc.start = PoseFrame(ctx.vector(ctx.require(r, "start", "start"), "start"));
    sc.goal = PoseFrame(ctx.vector(ctx.require(r, "goal", "goal"), "goal"));
  }

  {
    const YAML::Node h = ctx.require(root, "human", "human");
    only_keys(ctx, h, "human", {"model", "poses", "format", "sample_spacing", "placement", "limit_padding"});
    const double spacing = ctx.get<double>(h, "sample_spacing", "human.sample_spacing", sc.grid.resolution);
    if (!(spacing > 0.0)) invalid("human.sample_spacing", "must be positive");
    const auto model = ctx.as<std::string>(ctx.require(h, "model", "human.model"), "human.model");
    BodyModel human = load_body_model(resolve(base, model), spacing);
    const auto format = ctx.get<std::string>(h, "format", "human.format", "joints");
    const auto poses = resolve(base, ctx.as<std::string>(ctx.require(h, "poses", "human.poses"), "human.poses"));
    if (format == "joints") {
      sc.human.format = PoseLogFormat::Joints;
      sc.human.poses = read_joint_log(poses, human.dof());
      if (present(h, "placement")) human = human.transformed(read_frame(ctx, h["placement"], "human.placement"));
      if (!sc.human.poses.empty()) {
        const double pad = ctx.get<double>(h, "limit_padding", "human.limit_padding", 0.1);
        if (!(pad >= 0.0)) invalid("human.limit_padding", "must be >= 0");
        human = human.with_limits(limits_from_poses(sc.human.poses, pad));
      }
    } else if (format == "link_transforms") {
      if (present(h, "placement")) invalid("human.placement", "not used with link_transforms logs");
      sc.human.format = PoseLogFormat::LinkTransforms;
      sc.human.link_frames = read_link_transform_log(poses, human.link_count());
    } else {
      ctx.fail(h["format"], "human.format", "expected 'joints' or 'link_transforms'");
    }
    sc.human.model = std::move(human);
  }

  if (present(root, "planner")) {
    const YAML::Node p = root["planner"];
    only_keys(ctx, p, "planner",
              {"num_rollouts", "num_iterations", "noise_stddev", "temperature", "control_cost_weight",
               "convergence_tol", "convergence_window"});
    auto& sp = sc.planner;
    sp.num_rollouts = ctx.get<int>(p, "num_rollouts", "planner.num_rollouts", sp.num_rollouts);
    sp.num_iterations = ctx.get<int>(p, "num_iterations", "planner.num_iterations", sp.num_iterations);
    if (present(p, "noise_stddev")) {
      sp.noise_stddev = per_joint(ctx, p["noise_stddev"], "planner.noise_stddev", sc.robot.dof());
    }
    sp.temperature = ctx.get<double>(p, "temperature", "planner.temperature", sp.temperature);
    sp.control_cost_weight =
        ctx.get<double>(p, "control_cost_weight", "planner.control_cost_weight", sp.control_cost_weight);
    sp.convergence_tol = ctx.get<double>(p, "convergence_tol", "planner.convergence_tol", sp.convergence_tol);
    sp.convergence_window =
        ctx.get<int>(p, "convergence_window", "planner.convergence_window", sp.convergence_window);
  }

  if (present(root, "rrt")) {
    const YAML::Node p = root["rrt"];
    only_keys(ctx, p, "rrt", {"step", "collision_resolution", "max_samples", "goal_bias", "shortcut_attempts"});
    auto& rp = sc.rrt;
    rp.step = ctx.get<double>(p, "step", "rrt.step", rp.step);
    rp.collision_resolution =
        ctx.get<double>(p, "collision_resolution", "rrt.collision_resolution", rp.collision_resolution);
    rp.max_samples = ctx.get<int>(p, "max_samples", "rrt.max_samples", rp.max_samples);
    rp.goal_bias = ctx.get<double>(p, "goal_bias", "rrt.goal_bias", rp.goal_bias);
    rp.shortcut_attempts = ctx.get<int>(p, "shortcut_attempts", "rrt.shortcut_attempts", rp.shortcut_attempts);
  }

  {
    const int dof = sc.robot.dof();
    auto& c = sc.constraints;
    c.max_joint_velocity = Eigen::VectorXd::Constant(dof, 1.0);
    c.max_joint_acceleration = Eigen::VectorXd::Constant(dof, 2.0);
    if (present(root, "constraints")) {
      const YAML::Node n = root["constraints"];
      only_keys(ctx, n, "constraints",
                {"max_joint_velocity", "max_joint_acceleration", "goal_pose", "obstacle_clearance"});
      if (present(n, "max_joint_velocity")) {
        c.max_joint_velocity = per_joint(ctx, n["max_joint_velocity"], "constraints.max_joint_velocity", dof);
      }
      if (present(n, "max_joint_acceleration")) {
        c.max_joint_acceleration =
            per_joint(ctx, n["max_joint_acceleration"], "constraints.max_joint_acceleration", dof);
      }
      if (present(n, "goal_pose")) c.goal_pose = read_frame(ctx, n["goal_pose"], "constraints.goal_pose");
      c.obstacle_clearance =
          ctx.get<bool>(n, "obstacle_clearance", "constraints.obstacle_clearance", c.obstacle_clearance);
    }
  }

  if (present(root, "experiment")) {
    const YAML::Node e = root["experiment"];
    only_keys(ctx, e, "experiment",
              {"trials", "base_seed", "seeds", "waypoints", "out_of_bounds_cost", "nominal_dt"});
    if (present(e, "seeds")) {
      const YAML::Node s = e["seeds"];
      if (!s.IsSequence() || s.size() == 0) ctx.fail(s, "experiment.seeds", "expected a non-empty list");
      for (std::size_t i = 0; i < s.size(); ++i) {
        sc.seeds.push_back(ctx.as<std::uint64_t>(s[i], "experiment.seeds[" + std::to_string(i) + "]"));
      }
      sc.trials = static_cast<int>(sc.seeds.size());
    }
    sc.trials = ctx.get<int>(e, "trials", "experiment.trials", sc.trials);
    sc.base_seed = ctx.get<std::uint64_t>(e, "base_seed", "experiment.base_seed", sc.base_seed);
    sc.waypoints = ctx.get<int>(e, "waypoints", "experiment.waypoints", sc.waypoints);
    sc.out_of_bounds_cost =
        ctx.get<double>(e, "out_of_bounds_cost", "experiment.out_of_bounds_cost", sc.out_of_bounds_cost);
    sc.nominal_dt = ctx.get<double>(e, "nominal_dt", "experiment.nominal_dt", sc.nominal_dt);
  }
  sc.planner.num_waypoints = sc.waypoints;
  sc.rrt.num_waypoints = sc.waypoints;

  sc.validate();
  return sc;
}

OccupancyGrid build_occupancy(const Scenario& scenario) {
  OccupancyGrid grid(scenario.grid);
  const auto& h = scenario.human;
  if (h.format == PoseLogFormat::Joints) {
    for (const auto& pose : h.poses) {
      const auto samples = world_samples(h.model, pose);
      grid.accumulate(samples);
    }
  } else {
    for (const auto& frame : h.link_frames) {
      const auto samples = world_samples(h.model, frame);
      grid.accumulate(samples);
    }
  }
  return grid;
}

}  // namespace hamp

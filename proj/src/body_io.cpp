#include <fstream>
#include <map>

#include "hamp/bodies.hpp"
#include "hamp/error.hpp"
#include "yaml_util.hpp"

namespace hamp {

BodyModel load_body_model(const std::filesystem::path& path, double spacing) {
  detail::YamlContext ctx{path.string()};
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw Error(ErrorCode::IoError, "cannot open body model file " + path.string());
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }

  const auto name = ctx.get<std::string>(root, "name", "name", path.stem().string());
  YAML::Node links_node = ctx.require(root, "links", "links");
  if (!links_node.IsSequence()) ctx.fail(links_node, "links", "expected a list");

  double default_lo = -6.283185307179586;
  double default_hi = 6.283185307179586;
  if (YAML::Node d = root["default_limits"]; d.IsDefined() && !d.IsNull()) {
    Eigen::VectorXd v = ctx.vector(d, "default_limits", 2);
    default_lo = v[0];
    default_hi = v[1];
  }

  std::vector<CylinderLink> links;
  std::map<std::string, int> by_name;
  std::map<int, std::pair<double, double>> joint_limits;

  for (std::size_t i = 0; i < links_node.size(); ++i) {
    const YAML::Node n = links_node[i];
    const std::string f = "links[" + std::to_string(i) + "]";
    CylinderLink link;
    link.name = ctx.get<std::string>(n, "name", f + ".name", "link" + std::to_string(i));
    link.radius = ctx.as<double>(ctx.require(n, "radius", f + ".radius"), f + ".radius");
    link.length = ctx.as<double>(ctx.require(n, "length", f + ".length"), f + ".length");

    if (YAML::Node p = n["parent"]; p.IsDefined() && !p.IsNull()) {
      const auto pname = ctx.as<std::string>(p, f + ".parent");
      auto it = by_name.find(pname);
      if (it == by_name.end()) ctx.fail(p, f + ".parent", "unknown or later-defined parent '" + pname + "'");
      link.parent = it->second;
    }

    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    if (YAML::Node t = n["translation"]; t.IsDefined() && !t.IsNull()) {
      translation = ctx.vec3(t, f + ".translation");
    }
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    double angle = 0.0;
    if (YAML::Node r = n["rotation"]; r.IsDefined() && !r.IsNull()) {
      Eigen::VectorXd v = ctx.vector(r, f + ".rotation", 4);
      axis = v.head<3>();
      angle = v[3];
      if (angle != 0.0 && axis.norm() < 1e-12) ctx.fail(r, f + ".rotation", "zero rotation axis");
    }
    link.fixed_transform = make_transform(translation, axis, angle);

    if (YAML::Node j = n["joint"]; j.IsDefined() && !j.IsNull()) {
      link.joint.index = ctx.as<int>(ctx.require(j, "index", f + ".joint.index"), f + ".joint.index");
      if (link.joint.index < 0) ctx.fail(j, f + ".joint.index", "must be >= 0");
      if (YAML::Node a = j["axis"]; a.IsDefined() && !a.IsNull()) {
        link.joint.axis = ctx.vec3(a, f + ".joint.axis");
        if (link.joint.axis.norm() < 1e-12) ctx.fail(a, f + ".joint.axis", "zero axis");
      }
      if (YAML::Node l = j["limits"]; l.IsDefined() && !l.IsNull()) {
        Eigen::VectorXd v = ctx.vector(l, f + ".joint.limits", 2);
        joint_limits[link.joint.index] = {v[0], v[1]};
      }
    }
    if (by_name.count(link.name)) ctx.fail(n, f + ".name", "duplicate link name '" + link.name + "'");
    by_name[link.name] = static_cast<int>(i);
    links.push_back(std::move(link));
  }

  for (auto& l : links) {
    l.local_samples = sample_cylinder(l, spacing);
  }

  int dof = 0;
  for (const auto& l : links) dof = std::max(dof, l.joint.index + 1);
  JointLimits limits{Eigen::VectorXd::Constant(dof, default_lo), Eigen::VectorXd::Constant(dof, default_hi)};
  for (const auto& [j, lim] : joint_limits) {
    limits.lower[j] = lim.first;
    limits.upper[j] = lim.second;
  }

  BodyModel model(name, std::move(links), std::move(limits));
  if (YAML::Node ee = root["end_effector"]; ee.IsDefined() && !ee.IsNull()) {
    const auto ee_name = ctx.as<std::string>(ee, "end_effector");
    auto it = by_name.find(ee_name);
    if (it == by_name.end()) ctx.fail(ee, "end_effector", "unknown link '" + ee_name + "'");
    model = model.with_end_effector(static_cast<std::size_t>(it->second));
  }
  return model;
}

}  // namespace hamp

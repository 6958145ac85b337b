#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <yaml-cpp/yaml.h>

#include "hamp/error.hpp"

namespace hamp::detail {

/// Context for error messages: file name plus the dotted field path.
struct YamlContext {
  std::string file;

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::string where = file;
    if (node.IsDefined() && !node.Mark().is_null()) {
      where += ":" + std::to_string(node.Mark().line + 1) + ":" + std::to_string(node.Mark().column + 1);
    }
    throw Error(ErrorCode::ParseError, where + ": field '" + field + "': " + msg);
  }

  YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& field) const {
    if (!parent.IsMap()) fail(parent, field, "expected a mapping");
    YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) fail(parent, field, "missing required field");
    return n;
  }

  template <typename T>
  T as(const YAML::Node& node, const std::string& field) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "wrong type");
    }
  }

  template <typename T>
  T get(const YAML::Node& parent, const std::string& key, const std::string& field, T fallback) const {
    YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return fallback;
    return as<T>(n, field);
  }

  Eigen::VectorXd vector(const YAML::Node& node, const std::string& field, int expected = -1) const {
    if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
    if (expected >= 0 && static_cast<int>(node.size()) != expected) {
      fail(node, field, "expected " + std::to_string(expected) + " values, got " + std::to_string(node.size()));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = as<double>(node[i], field + "[" + std::to_string(i) + "]");
    }
    return v;
  }

  Eigen::Vector3d vec3(const YAML::Node& node, const std::string& field) const {
    Eigen::VectorXd v = vector(node, field, 3);
    return Eigen::Vector3d(v[0], v[1], v[2]);
  }
};

}  // namespace hamp::detail

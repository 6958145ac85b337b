#include "hamp/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hamp/error.hpp"

namespace hamp {

namespace {

constexpr double kMinExtent = 1e-9;

}  // namespace

Vec3List sample_cylinder(const CylinderLink& link, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorCode::InvalidArgument, "sample spacing must be positive");
  }
  if (!(link.radius > kMinExtent) || !(link.length > kMinExtent)) {
    throw Error(ErrorCode::DegenerateSampling, "cylinder '" + link.name + "' has near-zero extent");
  }
  if (spacing > link.radius && spacing > link.length) {
    throw Error(ErrorCode::DegenerateSampling,
                "spacing exceeds both radius and length of '" + link.name + "'");
  }

  // Covering radius budget 0.49*spacing, split evenly between the axial and
  // in-plane directions. In-plane: ring gap dr and arc gap both bounded so a
  // point is within dr/2 + r_j*pi/m_j <= planar of a ring sample.
  const double cover = 0.49 * spacing;
  const double planar = cover / std::numbers::sqrt2;
  const double axial_half = cover / std::numbers::sqrt2;

  const int layers = static_cast<int>(std::ceil(link.length / (2.0 * axial_half))) + 1;
  const int rings = static_cast<int>(std::ceil(link.radius / planar));

  Vec3List out;
  for (int l = 0; l < layers; ++l) {
    const double z = link.length * static_cast<double>(l) / static_cast<double>(layers - 1);
    out.emplace_back(0.0, 0.0, z);
    for (int j = 1; j <= rings; ++j) {
      const double r = link.radius * static_cast<double>(j) / static_cast<double>(rings);
      const int m = std::max(3, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / planar)));
      for (int a = 0; a < m; ++a) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(m);
        out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
      }
    }
  }
  return out;
}

BodyModel::BodyModel(std::string name, std::vector<CylinderLink> links, JointLimits limits)
    : name_(std::move(name)), links_(std::move(links)), limits_(std::move(limits)) {
  validate();
}

void BodyModel::validate() {
  if (links_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "body model '" + name_ + "' has no links");
  }
  int max_joint = -1;
  sample_count_ = 0;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    const std::string where = "link " + std::to_string(i) + " ('" + l.name + "')";
    if (l.parent >= static_cast<int>(i) || l.parent < -1) {
      throw Error(ErrorCode::InvalidArgument, where + ": parent must precede the link");
    }
    if (!(l.radius > 0.0) || !(l.length > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, where + ": radius and length must be positive");
    }
    if (l.local_samples.empty()) {
      throw Error(ErrorCode::InvalidArgument, where + ": no local samples");
    }
    const double slack = 1e-9;
    for (const auto& s : l.local_samples) {
      if (s.head<2>().norm() > l.radius + slack || s.z() < -slack || s.z() > l.length + slack) {
        throw Error(ErrorCode::InvalidArgument, where + ": sample outside cylinder");
      }
    }
    if (l.joint.active()) {
      if (l.joint.axis.norm() < 1e-12) {
        throw Error(ErrorCode::InvalidArgument, where + ": zero joint axis");
      }
      max_joint = std::max(max_joint, l.joint.index);
    }
    sample_count_ += l.local_samples.size();
  }
  dof_ = max_joint + 1;
  joint_link_.assign(static_cast<std::size_t>(dof_), links_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    auto& l = links_[i];
    if (!l.joint.active()) continue;
    l.joint.axis.normalize();
    auto& slot = joint_link_[static_cast<std::size_t>(l.joint.index)];
    if (slot != links_.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "joint " + std::to_string(l.joint.index) + " drives more than one link");
    }
    slot = i;
  }
  for (int j = 0; j < dof_; ++j) {
    if (joint_link_[static_cast<std::size_t>(j)] == links_.size()) {
      throw Error(ErrorCode::InvalidArgument, "joint " + std::to_string(j) + " drives no link");
    }
  }
  if (limits_.lower.size() == 0 && limits_.upper.size() == 0) {
    limits_.lower = Eigen::VectorXd::Constant(dof_, -2.0 * std::numbers::pi);
    limits_.upper = Eigen::VectorXd::Constant(dof_, 2.0 * std::numbers::pi);
  }
  if (limits_.lower.size() != dof_ || limits_.upper.size() != dof_) {
    throw Error(ErrorCode::InvalidArgument, "joint limit vectors must have length dof");
  }
  if ((limits_.lower.array() > limits_.upper.array()).any()) {
    throw Error(ErrorCode::InvalidArgument, "joint lower limit above upper limit");
  }
  ee_link_ = links_.size() - 1;
}

BodyModel BodyModel::with_end_effector(std::size_t link) const {
  if (link >= links_.size()) {
    throw Error(ErrorCode::InvalidArgument, "end-effector link out of range");
  }
  BodyModel m = *this;
  m.ee_link_ = link;
  return m;
}

BodyModel BodyModel::with_limits(JointLimits limits) const {
  auto links = links_;
  BodyModel m(name_, std::move(links), std::move(limits));
  m.ee_link_ = ee_link_;
  return m;
}

BodyModel BodyModel::resampled(double spacing) const {
  auto links = links_;
  for (auto& l : links) {
    l.local_samples = sample_cylinder(l, spacing);
  }
  BodyModel m(name_, std::move(links), limits_);
  m.ee_link_ = ee_link_;
  return m;
}

BodyModel BodyModel::transformed(const Eigen::Isometry3d& g) const {
  auto links = links_;
  for (auto& l : links) {
    if (l.parent < 0) {
      l.fixed_transform = g * l.fixed_transform;
    }
  }
  BodyModel m(name_, std::move(links), limits_);
  m.ee_link_ = ee_link_;
  return m;
}

bool BodyModel::within_limits(const Eigen::VectorXd& q) const {
  if (q.size() != dof_) return false;
  return (q.array() >= limits_.lower.array()).all() && (q.array() <= limits_.upper.array()).all() &&
         q.allFinite();
}

void BodyModel::check_pose(const PoseFrame& pose) const {
  const auto& q = pose.joint_values;
  if (q.size() != dof_) {
    std::ostringstream os;
    os << "pose has " << q.size() << " joint values, model '" << name_ << "' has dof " << dof_;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  for (int j = 0; j < dof_; ++j) {
    if (!(q[j] >= limits_.lower[j] && q[j] <= limits_.upper[j])) {
      std::ostringstream os;
      os << "joint " << j << " value " << q[j] << " outside [" << limits_.lower[j] << ", "
         << limits_.upper[j] << "]";
      throw Error(ErrorCode::JointLimitViolation, os.str());
    }
  }
}

void forward_kinematics_unchecked(const BodyModel& model, const Eigen::VectorXd& q, LinkTransforms& out) {
  const auto links = model.links();
  out.resize(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    Eigen::Isometry3d t = l.parent < 0 ? l.fixed_transform
                                       : out[static_cast<std::size_t>(l.parent)] * l.fixed_transform;
    if (l.joint.active()) {
      t.rotate(Eigen::AngleAxisd(q[l.joint.index], l.joint.axis));
    }
    out[i] = t;
  }
}

LinkTransforms forward_kinematics(const BodyModel& model, const PoseFrame& pose) {
  model.check_pose(pose);
  LinkTransforms out;
  forward_kinematics_unchecked(model, pose.joint_values, out);
  return out;
}

Vec3List world_samples(const BodyModel& model, std::span<const Eigen::Isometry3d> link_transforms) {
  if (link_transforms.size() != model.link_count()) {
    throw Error(ErrorCode::InvalidArgument, "expected one transform per link");
  }
  Vec3List out;
  out.reserve(model.sample_count());
  const auto links = model.links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& t = link_transforms[i];
    for (const auto& s : links[i].local_samples) {
      out.push_back(t * s);
    }
  }
  return out;
}

Vec3List world_samples(const BodyModel& model, const PoseFrame& pose) {
  const auto transforms = forward_kinematics(model, pose);
  return world_samples(model, transforms);
}

Eigen::Vector3d end_effector_position(const BodyModel& model,
                                      std::span<const Eigen::Isometry3d> link_transforms) {
  const std::size_t ee = model.end_effector_link();
  return link_transforms[ee] * Eigen::Vector3d(0.0, 0.0, model.link(ee).length);
}

Eigen::Vector3d end_effector_position(const BodyModel& model, const PoseFrame& pose) {
  const auto transforms = forward_kinematics(model, pose);
  return end_effector_position(model, transforms);
}

Eigen::Isometry3d end_effector_pose(const BodyModel& model, const PoseFrame& pose) {
  const auto transforms = forward_kinematics(model, pose);
  const std::size_t ee = model.end_effector_link();
  Eigen::Isometry3d tip = transforms[ee];
  tip.translate(Eigen::Vector3d(0.0, 0.0, model.link(ee).length));
  return tip;
}

Eigen::Matrix3Xd point_jacobian(const BodyModel& model, const PoseFrame& pose, std::size_t link,
                                const Eigen::Vector3d& local_point) {
  const auto transforms = forward_kinematics(model, pose);
  if (link >= transforms.size()) {
    throw Error(ErrorCode::InvalidArgument, "link index out of range");
  }
  const Eigen::Vector3d x = transforms[link] * local_point;
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, model.dof());
  for (int i = static_cast<int>(link); i >= 0; i = model.link(static_cast<std::size_t>(i)).parent) {
    const auto& l = model.link(static_cast<std::size_t>(i));
    if (!l.joint.active()) continue;
    const auto& t = transforms[static_cast<std::size_t>(i)];
    const Eigen::Vector3d w = t.linear() * l.joint.axis;
    jac.col(l.joint.index) = w.cross(x - t.translation());
  }
  return jac;
}

JointLimits limits_from_poses(std::span<const PoseFrame> poses, double pad_fraction, double min_pad) {
  if (poses.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot derive limits from an empty pose log");
  }
  const auto n = poses.front().joint_values.size();
  Eigen::VectorXd lo = poses.front().joint_values;
  Eigen::VectorXd hi = lo;
  for (const auto& p : poses) {
    if (p.joint_values.size() != n) {
      throw Error(ErrorCode::InvalidArgument, "pose log has inconsistent joint counts");
    }
    lo = lo.cwiseMin(p.joint_values);
    hi = hi.cwiseMax(p.joint_values);
  }
  JointLimits out{lo, hi};
  for (Eigen::Index j = 0; j < n; ++j) {
    const double range = hi[j] - lo[j];
    const double pad = range > 0.0 ? pad_fraction * range : min_pad;
    out.lower[j] -= pad;
    out.upper[j] += pad;
  }
  return out;
}

Eigen::Isometry3d make_transform(const Eigen::Vector3d& translation, const Eigen::Vector3d& axis, double angle) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translation() = translation;
  if (angle != 0.0) {
    if (axis.norm() < 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "rotation axis must be non-zero");
    }
    t.linear() = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  }
  return t;
}

}  // namespace hamp

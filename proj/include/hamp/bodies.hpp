#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hamp {

using Vec3List = std::vector<Eigen::Vector3d>;
using LinkTransforms = std::vector<Eigen::Isometry3d>;

/// A revolute articulation about an axis expressed in the link frame.
struct Joint {
  int index = -1;  // -1: rigid link
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();

  bool active() const { return index >= 0; }
};

/// A cylinder spanning z in [0, length] of its own frame, radius about the z axis.
/// The frame is fixed_transform (relative to the parent frame, or to the world
/// for root links) followed by the joint rotation.
struct CylinderLink {
  std::string name;
  double radius = 0.0;
  double length = 0.0;
  int parent = -1;
  Eigen::Isometry3d fixed_transform = Eigen::Isometry3d::Identity();
  Joint joint;
  Vec3List local_samples;
};

struct JointLimits {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct PoseFrame {
  Eigen::VectorXd joint_values;
  double timestamp = 0.0;

  PoseFrame() = default;
  explicit PoseFrame(Eigen::VectorXd q, double t = 0.0) : joint_values(std::move(q)), timestamp(t) {}
};

/// Lattice covering the cylinder volume: axial layers including both caps,
/// concentric rings including the axis and the outer surface. Every point of
/// the cylinder lies strictly within spacing/2 of some sample.
Vec3List sample_cylinder(const CylinderLink& link, double spacing);

/// Articulated set of cylinders. Immutable once built; all queries are pure.
class BodyModel {
 public:
  BodyModel() = default;

  /// Validates topology (parents precede children), joint indices (each of
  /// 0..dof-1 drives exactly one link), geometry and local samples.
  BodyModel(std::string name, std::vector<CylinderLink> links, JointLimits limits);

  const std::string& name() const { return name_; }
  int dof() const { return dof_; }
  std::span<const CylinderLink> links() const { return links_; }
  const CylinderLink& link(std::size_t i) const { return links_.at(i); }
  std::size_t link_count() const { return links_.size(); }
  const JointLimits& limits() const { return limits_; }
  std::size_t sample_count() const { return sample_count_; }

  /// Link whose tip (z = length) is the end-effector point. Defaults to the last link.
  std::size_t end_effector_link() const { return ee_link_; }
  BodyModel with_end_effector(std::size_t link) const;

  BodyModel with_limits(JointLimits limits) const;

  /// Regenerates every link's local samples with sample_cylinder(link, spacing).
  BodyModel resampled(double spacing) const;

  /// Model whose root links are pre-multiplied by g.
  BodyModel transformed(const Eigen::Isometry3d& g) const;

  /// Throws JointLimitViolation (range) or InvalidArgument (size).
  void check_pose(const PoseFrame& pose) const;
  bool within_limits(const Eigen::VectorXd& q) const;

  /// Index of the link driven by joint `joint`.
  std::size_t link_of_joint(int joint) const { return joint_link_.at(static_cast<std::size_t>(joint)); }

 private:
  void validate();

  std::string name_;
  std::vector<CylinderLink> links_;
  JointLimits limits_;
  int dof_ = 0;
  std::size_t sample_count_ = 0;
  std::size_t ee_link_ = 0;
  std::vector<std::size_t> joint_link_;
};

/// World transform of every link frame.
LinkTransforms forward_kinematics(const BodyModel& model, const PoseFrame& pose);

/// Same without the joint-limit check; for inner loops on already validated configurations.
void forward_kinematics_unchecked(const BodyModel& model, const Eigen::VectorXd& q, LinkTransforms& out);

/// Link-major, sample-minor world positions of all local samples.
Vec3List world_samples(const BodyModel& model, const PoseFrame& pose);
Vec3List world_samples(const BodyModel& model, std::span<const Eigen::Isometry3d> link_transforms);

Eigen::Vector3d end_effector_position(const BodyModel& model, const PoseFrame& pose);
Eigen::Vector3d end_effector_position(const BodyModel& model, std::span<const Eigen::Isometry3d> link_transforms);
Eigen::Isometry3d end_effector_pose(const BodyModel& model, const PoseFrame& pose);

/// Analytic 3 x dof Jacobian of a point fixed in `link`'s frame, from the
/// revolute screw axes along the parent chain: column j = w_j x (x - o_j).
Eigen::Matrix3Xd point_jacobian(const BodyModel& model, const PoseFrame& pose, std::size_t link,
                                const Eigen::Vector3d& local_point);

/// Joint limits spanning the observed range of a pose log, padded on each side
/// by `pad_fraction` of the range (or by `min_pad` radians for constant joints).
JointLimits limits_from_poses(std::span<const PoseFrame> poses, double pad_fraction = 0.1,
                              double min_pad = 0.1);

/// Loads a link table from a YAML model file; see docs/formats.md.
/// Local samples are generated with `spacing`.
BodyModel load_body_model(const std::filesystem::path& path, double spacing);

Eigen::Isometry3d make_transform(const Eigen::Vector3d& translation, const Eigen::Vector3d& axis, double angle);

}  // namespace hamp

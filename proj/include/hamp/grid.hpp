#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hamp {

struct CellIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Geometry of a uniform voxel grid. Cells are half-open boxes
/// [origin + idx*res, origin + (idx+1)*res) along each axis.
struct GridSpec {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double resolution = 0.05;
  std::array<int, 3> dims{1, 1, 1};

  GridSpec() = default;
  GridSpec(const Eigen::Vector3d& origin, double resolution, std::array<int, 3> dims);

  std::size_t cell_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }

  bool contains(const CellIndex& c) const {
    return c.i >= 0 && c.j >= 0 && c.k >= 0 && c.i < dims[0] && c.j < dims[1] && c.k < dims[2];
  }

  /// Flat offset in x-fastest order.
  std::size_t flat(const CellIndex& c) const {
    return static_cast<std::size_t>(c.i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(c.j) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(c.k));
  }

  CellIndex unflat(std::size_t offset) const;

  Eigen::Vector3d cell_center(const CellIndex& c) const {
    return origin + (Eigen::Vector3d(c.i, c.j, c.k).array() + 0.5).matrix() * resolution;
  }

  Eigen::Vector3d upper_corner() const {
    return origin + Eigen::Vector3d(dims[0], dims[1], dims[2]) * resolution;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Cell containing `p`, or nullopt when `p` lies outside the grid volume
/// (including exactly on an upper face).
inline std::optional<CellIndex> map_point(const GridSpec& spec, const Eigen::Vector3d& p) {
  CellIndex c;
  int* out[3] = {&c.i, &c.j, &c.k};
  for (int axis = 0; axis < 3; ++axis) {
    const double f = std::floor((p[axis] - spec.origin[axis]) / spec.resolution);
    // NaN fails both comparisons.
    if (!(f >= 0.0 && f < static_cast<double>(spec.dims[axis]))) {
      return std::nullopt;
    }
    *out[axis] = static_cast<int>(f);
  }
  return c;
}

/// Same as map_point but returns the flat offset.
inline std::optional<std::size_t> map_point_flat(const GridSpec& spec, const Eigen::Vector3d& p) {
  auto c = map_point(spec, p);
  if (!c) return std::nullopt;
  return spec.flat(*c);
}

/// Dense per-cell storage over a GridSpec.
template <typename T>
class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(const GridSpec& spec, T fill = T{})
      : spec_(spec), values_(spec.cell_count(), fill) {}

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }

  T& operator[](std::size_t offset) { return values_[offset]; }
  const T& operator[](std::size_t offset) const { return values_[offset]; }
  T& at(const CellIndex& c) { return values_[spec_.flat(c)]; }
  const T& at(const CellIndex& c) const { return values_[spec_.flat(c)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

 private:
  GridSpec spec_;
  std::vector<T> values_;
};

/// Human occupancy counts H[i,j,k] with the cached maximum maxH.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(const GridSpec& spec) : counts_(spec, 0) {}

  const GridSpec& spec() const { return counts_.spec(); }
  std::uint32_t count(const CellIndex& c) const { return counts_.at(c); }
  std::uint32_t count(std::size_t offset) const { return counts_[offset]; }
  std::span<const std::uint32_t> counts() const { return counts_.values(); }
  std::uint32_t max_count() const { return max_count_; }

  /// Samples dropped because they fell outside the grid, over the grid's lifetime.
  std::uint64_t skipped() const { return skipped_; }

  /// Adds one count per in-bounds sample. Returns the number of in-bounds samples.
  std::size_t accumulate(std::span<const Eigen::Vector3d> samples);

  std::uint64_t total() const;

 private:
  VoxelGrid<std::uint32_t> counts_;
  std::uint32_t max_count_ = 0;
  std::uint64_t skipped_ = 0;
};

/// Free-function form of OccupancyGrid::accumulate.
std::size_t accumulate_occupancy(OccupancyGrid& grid, std::span<const Eigen::Vector3d> samples);

}  // namespace hamp

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "hamp/grid.hpp"

namespace hamp {

/// Per-cell scalar over a grid. Every read through at()/values() is tallied so
/// callers can verify which fields a planner touched.
class CostField {
 public:
  CostField() = default;
  CostField(const GridSpec& spec, std::vector<double> values);
  CostField(const GridSpec& spec, double fill);

  CostField(const CostField& other);
  CostField& operator=(const CostField& other);
  CostField(CostField&& other) noexcept;
  CostField& operator=(CostField&& other) noexcept;

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }

  double at(std::size_t offset) const {
    reads_.fetch_add(1, std::memory_order_relaxed);
    return values_[offset];
  }
  double at(const CellIndex& c) const { return at(spec_.flat(c)); }

  /// Bulk access; counts as one read per cell.
  std::span<const double> values() const {
    reads_.fetch_add(values_.size(), std::memory_order_relaxed);
    return values_;
  }

  /// Uncounted read for inner loops; the caller reports the total with note_reads().
  double value_unrecorded(std::size_t offset) const { return values_[offset]; }
  void note_reads(std::uint64_t n) const { reads_.fetch_add(n, std::memory_order_relaxed); }

  std::uint64_t read_count() const { return reads_.load(std::memory_order_relaxed); }

 private:
  GridSpec spec_;
  std::vector<double> values_;
  mutable std::atomic<std::uint64_t> reads_{0};
};

/// Signed Euclidean distance (meters) from each cell center to the boundary of
/// the occupied region: negative inside, positive outside.
struct SignedDistanceGrid {
  GridSpec spec;
  std::vector<double> distances;
  double min_sd = 0.0;
  double max_sd = 0.0;

  double at(const CellIndex& c) const { return distances[spec.flat(c)]; }
};

struct Box {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

/// Solid cylinder from `base` along unit `axis` for `length`.
struct Cylinder {
  Eigen::Vector3d base = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double radius = 0.0;
  double length = 0.0;
};

struct Obstacle {
  std::string name;
  std::variant<Box, Cylinder> shape;

  bool contains(const Eigen::Vector3d& p) const;
};

enum class CostMode { OccOnly, OccSdf };

const char* to_string(CostMode mode);

/// occ, optional sdfh, obstacle and their cellwise combination:
///   OccOnly: occ + obstacle
///   OccSdf:  occ * sdfh + obstacle
class ComposedCostMap {
 public:
  ComposedCostMap() = default;
  ComposedCostMap(CostField occ, std::optional<CostField> sdfh, CostField obstacle, CostMode mode,
                  double out_of_bounds_cost);

  const GridSpec& spec() const { return combined_.spec(); }
  CostMode mode() const { return mode_; }
  double out_of_bounds_cost() const { return oob_cost_; }

  const CostField& occ() const { return occ_; }
  const std::optional<CostField>& sdfh() const { return sdfh_; }
  const CostField& obstacle() const { return obstacle_; }
  const CostField& combined() const { return combined_; }

  double query(const Eigen::Vector3d& p) const {
    auto offset = map_point_flat(combined_.spec(), p);
    return offset ? combined_.at(*offset) : oob_cost_;
  }

 private:
  CostField occ_;
  std::optional<CostField> sdfh_;
  CostField obstacle_;
  CostField combined_;
  CostMode mode_ = CostMode::OccOnly;
  double oob_cost_ = 1.0;
};

/// Log-normalized occupancy: log(count+1)/log(maxH+1), with count 0 treated as 0.9.
/// Throws EmptyOccupancy when maxH = 0.
CostField occ_cost(const OccupancyGrid& grid);

/// Exact separable squared EDT, run from occupied and from free cells, signed
/// as outside-distance minus inside-distance with a half-cell boundary offset.
/// Throws DegenerateRegion when the grid is all occupied or all free.
SignedDistanceGrid signed_distance(const OccupancyGrid& grid);

/// (atan(maxSH) - atan(sd)) / (atan(maxSH) - atan(minSH)). Throws FlatField when maxSH = minSH.
CostField sdfh_cost(const SignedDistanceGrid& sd);

/// Cellwise occ * sdfh. Throws IncompatibleGrids on spec mismatch.
CostField pen_cost(const CostField& occ, const CostField& sdfh);

/// 1 where the cell center lies inside any obstacle, else 0.
CostField obstacle_cost(const GridSpec& spec, std::span<const Obstacle> obstacles);

ComposedCostMap compose(const CostField& occ, const std::optional<CostField>& sdfh, const CostField& obstacle,
                        CostMode mode, double out_of_bounds_cost = 1.0);

/// Fixed 64-byte little-endian header followed by float32 values in x-fastest order.
/// Header: "HAMPCF\0\0", u32 version, u32 nx, u32 ny, u32 nz, f64 resolution,
/// f64 origin[3], 8 zero bytes.
void write_cost_field_binary(const std::filesystem::path& path, const CostField& field);
CostField read_cost_field_binary(const std::filesystem::path& path);

}  // namespace hamp

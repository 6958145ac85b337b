#include "hamp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hamp/error.hpp"

namespace hamp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::JointLimitViolation: return "joint-limit-violation";
    case ErrorCode::DegenerateSampling: return "degenerate-sampling";
    case ErrorCode::EmptyOccupancy: return "empty-occupancy";
    case ErrorCode::DegenerateRegion: return "degenerate-region";
    case ErrorCode::FlatField: return "flat-field";
    case ErrorCode::IncompatibleGrids: return "incompatible-grids";
    case ErrorCode::InfeasibleEndpoint: return "infeasible-endpoint";
    case ErrorCode::PlanningTimeout: return "planning-timeout";
    case ErrorCode::PlanningFailed: return "planning-failed";
    case ErrorCode::ResampleRequired: return "resample-required";
    case ErrorCode::EmptyGroup: return "empty-group";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::ValidationError: return "validation-error";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

GridSpec::GridSpec(const Eigen::Vector3d& origin_in, double resolution_in, std::array<int, 3> dims_in)
    : origin(origin_in), resolution(resolution_in), dims(dims_in) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw Error(ErrorCode::InvalidArgument, "grid resolution must be positive");
  }
  if (!origin.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "grid origin must be finite");
  }
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 1) {
      throw Error(ErrorCode::InvalidArgument, "grid dims must be >= 1");
    }
    const auto ud = static_cast<std::size_t>(d);
    if (total > std::numeric_limits<std::size_t>::max() / ud) {
      throw Error(ErrorCode::InvalidArgument, "grid cell count overflows");
    }
    total *= ud;
  }
}

CellIndex GridSpec::unflat(std::size_t offset) const {
  const auto nx = static_cast<std::size_t>(dims[0]);
  const auto ny = static_cast<std::size_t>(dims[1]);
  CellIndex c;
  c.i = static_cast<int>(offset % nx);
  offset /= nx;
  c.j = static_cast<int>(offset % ny);
  c.k = static_cast<int>(offset / ny);
  return c;
}

std::size_t OccupancyGrid::accumulate(std::span<const Eigen::Vector3d> samples) {
  std::size_t in_bounds = 0;
  const GridSpec& spec = counts_.spec();
  for (const auto& p : samples) {
    auto offset = map_point_flat(spec, p);
    if (!offset) {
      ++skipped_;
      continue;
    }
    auto& cell = counts_[*offset];
    ++cell;
    max_count_ = std::max(max_count_, cell);
    ++in_bounds;
  }
  return in_bounds;
}

std::uint64_t OccupancyGrid::total() const {
  auto c = counts_.values();
  return std::accumulate(c.begin(), c.end(), std::uint64_t{0});
}

std::size_t accumulate_occupancy(OccupancyGrid& grid, std::span<const Eigen::Vector3d> samples) {
  return grid.accumulate(samples);
}

}  // namespace hamp

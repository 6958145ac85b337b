#include "hamp/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hamp/error.hpp"

namespace hamp {

CostField::CostField(const GridSpec& spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.cell_count()) {
    throw Error(ErrorCode::InvalidArgument, "cost field size does not match grid");
  }
}

CostField::CostField(const GridSpec& spec, double fill) : spec_(spec), values_(spec.cell_count(), fill) {}

CostField::CostField(const CostField& other) : spec_(other.spec_), values_(other.values_) {}

CostField& CostField::operator=(const CostField& other) {
  spec_ = other.spec_;
  values_ = other.values_;
  reads_.store(0, std::memory_order_relaxed);
  return *this;
}

CostField::CostField(CostField&& other) noexcept : spec_(other.spec_), values_(std::move(other.values_)) {}

CostField& CostField::operator=(CostField&& other) noexcept {
  spec_ = other.spec_;
  values_ = std::move(other.values_);
  reads_.store(0, std::memory_order_relaxed);
  return *this;
}

const char* to_string(CostMode mode) {
  return mode == CostMode::OccOnly ? "occ" : "occ+sdf";
}

bool Obstacle::contains(const Eigen::Vector3d& p) const {
  if (const auto* box = std::get_if<Box>(&shape)) {
    return (p.array() >= box->min.array()).all() && (p.array() <= box->max.array()).all();
  }
  const auto& cyl = std::get<Cylinder>(shape);
  const Eigen::Vector3d d = p - cyl.base;
  const double along = d.dot(cyl.axis);
  if (along < 0.0 || along > cyl.length) return false;
  return (d - along * cyl.axis).squaredNorm() <= cyl.radius * cyl.radius;
}

CostField occ_cost(const OccupancyGrid& grid) {
  const auto max_h = grid.max_count();
  if (max_h == 0) {
    throw Error(ErrorCode::EmptyOccupancy, "occupancy grid has no occupied cells");
  }
  const double denom = std::log(static_cast<double>(max_h) + 1.0);
  const double floor_value = std::log(0.9 + 1.0) / denom;
  const auto counts = grid.counts();
  std::vector<double> values(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    values[i] = counts[i] == 0 ? floor_value : std::log(static_cast<double>(counts[i]) + 1.0) / denom;
  }
  return CostField(grid.spec(), std::move(values));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact 1-D squared distance transform (lower envelope of parabolas) over a
// strided line. Infinite entries never enter the envelope.
class LineTransform {
 public:
  explicit LineTransform(int n) : f_(n), v_(n), z_(n + 1) {}

  void run(double* data, int n, std::size_t stride) {
    for (int q = 0; q < n; ++q) f_[q] = data[static_cast<std::size_t>(q) * stride];
    int k = -1;
    for (int q = 0; q < n; ++q) {
      if (f_[q] == kInf) continue;
      const double fq = f_[q] + static_cast<double>(q) * q;
      double s = -kInf;
      while (k >= 0) {
        const int p = v_[k];
        s = (fq - (f_[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
        if (s > z_[k]) break;
        --k;
      }
      ++k;
      v_[k] = q;
      z_[k] = k == 0 ? -kInf : s;
      z_[k + 1] = kInf;
    }
    if (k < 0) {
      for (int q = 0; q < n; ++q) data[static_cast<std::size_t>(q) * stride] = kInf;
      return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (z_[j + 1] < q) ++j;
      const double dq = q - v_[j];
      data[static_cast<std::size_t>(q) * stride] = dq * dq + f_[v_[j]];
    }
  }

 private:
  std::vector<double> f_;
  std::vector<int> v_;
  std::vector<double> z_;
};

// Squared distance, in cell units, from every cell center to the nearest feature cell center.
std::vector<double> squared_edt(const GridSpec& spec, const std::vector<bool>& feature) {
  const auto [nx, ny, nz] = spec.dims;
  std::vector<double> d(spec.cell_count());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = feature[i] ? 0.0 : kInf;

  LineTransform line(std::max({nx, ny, nz}));
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(nx);
  const std::size_t sz = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) line.run(&d[j * sy + k * sz], nx, sx);
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) line.run(&d[i * sx + k * sz], ny, sy);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) line.run(&d[i * sx + j * sy], nz, sz);
  return d;
}

}  // namespace

SignedDistanceGrid signed_distance(const OccupancyGrid& grid) {
  const GridSpec& spec = grid.spec();
  const auto counts = grid.counts();
  std::vector<bool> occupied(counts.size());
  std::size_t n_occ = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    occupied[i] = counts[i] > 0;
    n_occ += occupied[i] ? 1 : 0;
  }
  if (n_occ == 0 || n_occ == counts.size()) {
    throw Error(ErrorCode::DegenerateRegion, "signed distance needs both occupied and free cells");
  }
  std::vector<bool> free(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) free[i] = !occupied[i];

  const auto to_occupied = squared_edt(spec, occupied);
  const auto to_free = squared_edt(spec, free);

  SignedDistanceGrid out;
  out.spec = spec;
  out.distances.resize(counts.size());
  const double half = 0.5 * spec.resolution;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.distances[i] = occupied[i] ? half - std::sqrt(to_free[i]) * spec.resolution
                                   : std::sqrt(to_occupied[i]) * spec.resolution - half;
  }
  const auto [lo, hi] = std::minmax_element(out.distances.begin(), out.distances.end());
  out.min_sd = *lo;
  out.max_sd = *hi;
  return out;
}

CostField sdfh_cost(const SignedDistanceGrid& sd) {
  if (!(sd.max_sd > sd.min_sd)) {
    throw Error(ErrorCode::FlatField, "signed distance field is flat");
  }
  const double top = std::atan(sd.max_sd);
  const double denom = top - std::atan(sd.min_sd);
  std::vector<double> values(sd.distances.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = (top - std::atan(sd.distances[i])) / denom;
  }
  return CostField(sd.spec, std::move(values));
}

CostField pen_cost(const CostField& occ, const CostField& sdfh) {
  if (!(occ.spec() == sdfh.spec())) {
    throw Error(ErrorCode::IncompatibleGrids, "occ and sdfh fields have different grids");
  }
  const auto a = occ.values();
  const auto b = sdfh.values();
  std::vector<double> values(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) values[i] = a[i] * b[i];
  return CostField(occ.spec(), std::move(values));
}

CostField obstacle_cost(const GridSpec& spec, std::span<const Obstacle> obstacles) {
  std::vector<double> values(spec.cell_count(), 0.0);
  if (obstacles.empty()) return CostField(spec, std::move(values));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Eigen::Vector3d c = spec.cell_center(spec.unflat(i));
    for (const auto& o : obstacles) {
      if (o.contains(c)) {
        values[i] = 1.0;
        break;
      }
    }
  }
  return CostField(spec, std::move(values));
}

ComposedCostMap::ComposedCostMap(CostField occ, std::optional<CostField> sdfh, CostField obstacle, CostMode mode,
                                 double out_of_bounds_cost)
    : occ_(std::move(occ)),
      sdfh_(std::move(sdfh)),
      obstacle_(std::move(obstacle)),
      mode_(mode),
      oob_cost_(out_of_bounds_cost) {
  if (!(occ_.spec() == obstacle_.spec()) || (sdfh_ && !(sdfh_->spec() == occ_.spec()))) {
    throw Error(ErrorCode::IncompatibleGrids, "cost fields do not share one grid");
  }
  if (mode_ == CostMode::OccSdf && !sdfh_) {
    throw Error(ErrorCode::InvalidArgument, "occ+sdf composition requires an sdfh field");
  }
  const auto human = mode_ == CostMode::OccSdf ? pen_cost(occ_, *sdfh_) : occ_;
  const auto h = human.values();
  const auto o = obstacle_.values();
  std::vector<double> values(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) values[i] = h[i] + o[i];
  combined_ = CostField(occ_.spec(), std::move(values));
}

ComposedCostMap compose(const CostField& occ, const std::optional<CostField>& sdfh, const CostField& obstacle,
                        CostMode mode, double out_of_bounds_cost) {
  return ComposedCostMap(occ, sdfh, obstacle, mode, out_of_bounds_cost);
}

}  // namespace hamp

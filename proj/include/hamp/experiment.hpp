#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hamp/costmap.hpp"
#include "hamp/metrics.hpp"
#include "hamp/planners.hpp"
#include "hamp/scenario.hpp"

namespace hamp {

enum class Method { Rrt, StompOcc, StompOccSdf };

inline constexpr Method kAllMethods[] = {Method::Rrt, Method::StompOcc, Method::StompOccSdf};

const char* to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

/// Every field derived from a scenario. The two composed maps share the
/// occupancy and obstacle data; `occ_sdf` is also the evaluation map.
struct CostMaps {
  OccupancyGrid occupancy;
  SignedDistanceGrid sd;
  ComposedCostMap occ_only;
  ComposedCostMap occ_sdf;
};

CostMaps build_cost_maps(const Scenario& scenario);

struct PlannedTrial {
  Trajectory trajectory;  // scenario.waypoints rows, retimed to the kinodynamic limits
  int selected_start = -1;  // multi-start candidate index; -1 for rrt
};

/// One planning run of `method` with the trial seed. Throws the planner's error on failure.
PlannedTrial plan_trial(const Scenario& scenario, const CostMaps& maps, Method method, std::uint64_t seed);

/// Metrics of a planned trajectory on the Occ+SDF map.
TrialReport evaluate_trial(const Scenario& scenario, const CostMaps& maps, Method method, int trial,
                           std::uint64_t seed, const Trajectory& trajectory);

/// Field reads observed while one method was planning (evaluation excluded).
struct PlanningReads {
  Method method = Method::Rrt;
  std::uint64_t occ = 0;       // occ fields of both composed maps
  std::uint64_t sdfh = 0;
  std::uint64_t composed = 0;  // combined fields of both composed maps
  std::uint64_t obstacle = 0;
};

struct ExperimentOptions {
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  int jobs = 1;  // concurrent trials
};

struct ExperimentResult {
  std::vector<TrialReport> reports;         // method-major, trial-minor
  std::vector<Trajectory> trajectories;     // parallel to reports; empty on failure
  std::vector<PlanningReads> reads;         // one per method
  std::vector<Method> exhausted;            // methods whose every trial failed

  /// Aggregate over methods with at least one success.
  AggregateReport summary() const;
};

ExperimentResult run_experiment(const Scenario& scenario, const CostMaps& maps, const ExperimentOptions& options);

/// report.csv, summary.csv, summary.txt and trajectories/<method>_trial<NN>.csv under out_dir.
void write_experiment(const std::filesystem::path& out_dir, const Scenario& scenario, const ExperimentResult& result);

/// One row per trial; values printed with 17 significant digits.
std::string report_csv(std::span<const TrialReport> reports);
std::string summary_csv(const AggregateReport& summary);
std::string summary_table(const AggregateReport& summary);

/// Rows `time,q0..,ee_x,ee_y,ee_z`.
std::string trajectory_csv(const BodyModel& robot, const Trajectory& traj);
void write_text(const std::filesystem::path& path, const std::string& text);

enum class SliceAxis { X, Y, Z };

/// Writes <prefix>_<axis><index>.csv per index (rows run along the second
/// in-plane axis, columns along the first) and <prefix>_manifest.csv.
/// Returns the written slice files. Throws InvalidArgument for an out-of-range index.
std::vector<std::filesystem::path> export_slices(const CostField& field, SliceAxis axis, std::span<const int> indices,
                                                 const std::filesystem::path& out_dir,
                                                 const std::string& prefix = "slice");

/// Parses a slice CSV written by export_slices.
std::vector<std::vector<double>> read_slice_csv(const std::filesystem::path& path);

}  // namespace hamp

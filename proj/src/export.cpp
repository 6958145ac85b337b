#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hamp/error.hpp"
#include "hamp/experiment.hpp"

namespace hamp {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
}

char axis_name(SliceAxis a) { return a == SliceAxis::X ? 'x' : a == SliceAxis::Y ? 'y' : 'z'; }

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::string report_csv(std::span<const TrialReport> reports) {
  std::string s = "method,trial,seed,status,trajectory_cost,path_length,duration,obstacle_hits,failure\n";
  for (const auto& r : reports) {
    std::string failure = r.failure;
    for (char& c : failure) {
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    s += r.planner_label + "," + std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
         (r.success ? "ok" : "failed") + ",";
    if (r.success) {
      s += num(r.trajectory_cost) + "," + num(r.path_length) + "," + num(r.duration) + "," +
           std::to_string(r.obstacle_hits) + ",";
    } else {
      s += ",,,,";
    }
    s += failure + "\n";
  }
  return s;
}

std::string summary_csv(const AggregateReport& summary) {
  std::string s =
      "method,trials,failures,cost_mean,cost_std,length_mean,length_std,duration_mean,duration_std\n";
  for (const auto& r : summary.rows) {
    s += r.planner_label + "," + std::to_string(r.trials) + "," + std::to_string(r.failures) + "," +
         num(r.cost.mean) + "," + num(r.cost.std) + "," + num(r.length.mean) + "," + num(r.length.std) + "," +
         num(r.duration.mean) + "," + num(r.duration.std) + "\n";
  }
  return s;
}

std::string summary_table(const AggregateReport& summary) {
  std::ostringstream os;
  os << pad("method", 15) << pad("N", 5) << pad("cost (Occ+SDF map)", 26) << pad("length [m]", 20)
     << "duration [s]\n";
  for (const auto& r : summary.rows) {
    std::string n = std::to_string(r.trials);
    if (r.failures > 0) n += "/" + std::to_string(r.trials + r.failures);
    os << pad(r.planner_label, 15) << pad(n, 5) << pad(fixed(r.cost.mean, 2) + " +- " + fixed(r.cost.std, 2), 26)
       << pad(fixed(r.length.mean, 3) + " +- " + fixed(r.length.std, 3), 20)
       << fixed(r.duration.mean, 3) + " +- " + fixed(r.duration.std, 3) << "\n";
  }
  return os.str();
}

std::string trajectory_csv(const BodyModel& robot, const Trajectory& traj) {
  std::string s = "time";
  for (int j = 0; j < traj.dof(); ++j) s += ",q" + std::to_string(j);
  s += ",ee_x,ee_y,ee_z\n";
  for (int i = 0; i < traj.size(); ++i) {
    const PoseFrame pose(traj.at(i));
    const Eigen::Vector3d ee = end_effector_position(robot, pose);
    s += num(traj.dt * i);
    for (int j = 0; j < traj.dof(); ++j) s += "," + num(traj.waypoints(i, j));
    s += "," + num(ee.x()) + "," + num(ee.y()) + "," + num(ee.z()) + "\n";
  }
  return s;
}

void write_experiment(const fs::path& out_dir, const Scenario& scenario, const ExperimentResult& result) {
  ensure_dir(out_dir / "trajectories");
  write_text(out_dir / "report.csv", report_csv(result.reports));
  const AggregateReport summary = result.summary();
  write_text(out_dir / "summary.csv", summary_csv(summary));
  std::string table = "scenario: " + scenario.name + "\n" + summary_table(summary);
  for (Method m : result.exhausted) table += std::string(to_string(m)) + ": all trials failed\n";
  write_text(out_dir / "summary.txt", table);
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& r = result.reports[i];
    if (!r.success) continue;
    char name[96];
    std::snprintf(name, sizeof(name), "%s_trial%02d.csv", r.planner_label.c_str(), r.trial);
    write_text(out_dir / "trajectories" / name, trajectory_csv(scenario.robot, result.trajectories[i]));
  }
}

std::vector<fs::path> export_slices(const CostField& field, SliceAxis axis, std::span<const int> indices,
                                    const fs::path& out_dir, const std::string& prefix) {
  const auto& spec = field.spec();
  const int a = static_cast<int>(axis);
  const int u = a == 0 ? 1 : 0;  // first in-plane axis (columns)
  const int v = a == 2 ? 1 : 2;  // second in-plane axis (rows)
  for (int idx : indices) {
    if (idx < 0 || idx >= spec.dims[static_cast<std::size_t>(a)]) {
      throw Error(ErrorCode::InvalidArgument, std::string("slice index ") + std::to_string(idx) +
                                                  " out of range for axis " + axis_name(axis));
    }
  }
  ensure_dir(out_dir);
  const auto values = field.values();
  std::vector<fs::path> files;
  std::string manifest = "file,axis,index,coordinate,rows,cols,resolution,origin_x,origin_y,origin_z\n";
  for (int idx : indices) {
    std::string s;
    for (int r = 0; r < spec.dims[static_cast<std::size_t>(v)]; ++r) {
      for (int c = 0; c < spec.dims[static_cast<std::size_t>(u)]; ++c) {
        std::array<int, 3> ijk{};
        ijk[static_cast<std::size_t>(a)] = idx;
        ijk[static_cast<std::size_t>(u)] = c;
        ijk[static_cast<std::size_t>(v)] = r;
        if (c > 0) s += ",";
        s += num(values[spec.flat(CellIndex{ijk[0], ijk[1], ijk[2]})]);
      }
      s += "\n";
    }
    const std::string name = prefix + "_" + axis_name(axis) + std::to_string(idx) + ".csv";
    write_text(out_dir / name, s);
    files.push_back(out_dir / name);
    const double coord = spec.origin[a] + (idx + 0.5) * spec.resolution;
    manifest += name + "," + axis_name(axis) + "," + std::to_string(idx) + "," + num(coord) + "," +
                std::to_string(spec.dims[static_cast<std::size_t>(v)]) + "," +
                std::to_string(spec.dims[static_cast<std::size_t>(u)]) + "," + num(spec.resolution) + "," +
                num(spec.origin.x()) + "," + num(spec.origin.y()) + "," + num(spec.origin.z()) + "\n";
  }
  write_text(out_dir / (prefix + "_manifest.csv"), manifest);
  return files;
}

std::vector<std::vector<double>> read_slice_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t end = line.find(',', pos);
      if (end == std::string::npos) end = line.size();
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, value);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw Error(ErrorCode::ParseError, path.string() + ": malformed value");
      }
      row.push_back(value);
      pos = end + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hamp

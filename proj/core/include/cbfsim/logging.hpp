#ifndef CBFSIM_LOGGING_HPP
#define CBFSIM_LOGGING_HPP

#include <string>

#include "cbfsim/simulator.hpp"

namespace cbfsim {

/// trajectory.csv: t,agent,px,py,vx,vy,ux,uy,min_pair_dist,min_h,qp_status
void write_trajectory_csv(const std::string& path, const Trajectory& traj, int stride = 1);

/// metrics.json with the fixed key set documented in the README.
void write_metrics_json(const std::string& path, const Metrics& metrics);

/// CSV sink helpers used by the CLI; each returns a RunSinks-compatible
/// writer bound to an open file.
class CsvSinkFiles {
 public:
  CsvSinkFiles(const std::string& out_dir, bool log_clouds, bool log_barriers, bool log_qp,
               bool log_estimation);
  ~CsvSinkFiles();

  RunSinks sinks();

 private:
  struct Impl;
  Impl* impl_;
};

/// Reads a trajectory.csv back for re-plotting. Throws ConfigError on schema
/// mismatch.
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace cbfsim

#endif  // CBFSIM_LOGGING_HPP

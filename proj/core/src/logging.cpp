#include "cbfsim/logging.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace cbfsim {

namespace {

std::string json_number(Scalar v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj, int stride) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "t,agent,px,py,vx,vy,ux,uy,min_pair_dist,min_h,qp_status\n";
  out << std::setprecision(17);
  const size_t n = traj.steps.size();
  for (size_t s = 0; s < n; ++s) {
    if (stride > 1 && s % stride != 0 && s + 1 != n) continue;
    const StepLog& log = traj.steps[s];
    for (size_t a = 0; a < log.agents.size(); ++a) {
      const AgentStepLog& al = log.agents[a];
      out << log.t << ',' << a << ',' << al.state.p.x() << ',' << al.state.p.y() << ','
          << al.state.v.x() << ',' << al.state.v.y() << ',' << al.u.x() << ',' << al.u.y() << ','
          << al.min_pair_dist << ',' << al.min_h << ',' << to_string(al.qp_status) << '\n';
    }
  }
}

void write_metrics_json(const std::string& path, const Metrics& m) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "{\n";
  out << "  \"min_pairwise_distance\": " << json_number(m.min_pairwise_distance) << ",\n";
  out << "  \"min_h\": " << json_number(m.min_h) << ",\n";
  out << "  \"goal_times\": [";
  for (size_t i = 0; i < m.goal_times.size(); ++i) {
    out << (i ? ", " : "") << json_number(m.goal_times[i]);
  }
  out << "],\n";
  out << "  \"infeasibility_count\": " << m.infeasibility_count << ",\n";
  out << "  \"deadlock_count\": " << m.deadlock_count << ",\n";
  out << "  \"T_s_bound\": " << json_number(m.t_s_bound) << ",\n";
  out << "  \"theta_error_final\": " << json_number(m.theta_error_final) << ",\n";
  out << "  \"min_obstacle_clearance\": " << json_number(m.min_obstacle_clearance) << ",\n";
  out << "  \"formation_error_final\": " << json_number(m.formation_error_final) << ",\n";
  out << "  \"violation_count\": " << m.violation_count << ",\n";
  out << "  \"runtime_seconds\": " << json_number(m.runtime_seconds) << ",\n";
  out << "  \"aborted\": " << (m.aborted ? "true" : "false") << ",\n";
  out << "  \"abort_reason\": " << nlohmann::json(m.abort_reason).dump() << "\n";
  out << "}\n";
}

struct CsvSinkFiles::Impl {
  std::ofstream clouds, barriers, qp, estimation;
};

CsvSinkFiles::CsvSinkFiles(const std::string& out_dir, bool log_clouds, bool log_barriers,
                           bool log_qp, bool log_estimation)
    : impl_(new Impl) {
  if (log_clouds) {
    impl_->clouds.open(out_dir + "/clouds.csv");
    impl_->clouds << "t,agent,x,y\n" << std::setprecision(17);
  }
  if (log_barriers) {
    impl_->barriers.open(out_dir + "/coefficients.csv");
    impl_->barriers << "t,agent,cluster,p1,p2,p3,frame_angle\n" << std::setprecision(17);
  }
  if (log_qp) {
    impl_->qp.open(out_dir + "/qp.csv");
    impl_->qp << "t,agent,active_rows,slack,status\n" << std::setprecision(17);
  }
  if (log_estimation) {
    impl_->estimation.open(out_dir + "/estimation.csv");
    impl_->estimation << "t,theta_gain,theta_drag,lambda_min\n" << std::setprecision(17);
  }
}

CsvSinkFiles::~CsvSinkFiles() { delete impl_; }

RunSinks CsvSinkFiles::sinks() {
  RunSinks s;
  Impl* impl = impl_;
  if (impl->clouds.is_open()) {
    s.cloud = [impl](Scalar t, int agent, const PointCloud& cloud) {
      for (const Vec2& p : cloud.points) {
        impl->clouds << t << ',' << agent << ',' << p.x() << ',' << p.y() << '\n';
      }
    };
  }
  if (impl->barriers.is_open()) {
    s.barrier = [impl](Scalar t, int agent, int cluster, const ILCBF& cbf) {
      impl->barriers << t << ',' << agent << ',' << cluster << ',' << cbf.model.zeta[0] << ','
                     << cbf.model.zeta[1] << ',' << cbf.model.zeta[2] << ','
                     << cbf.model.frame.angle << '\n';
    };
  }
  if (impl->qp.is_open()) {
    s.qp = [impl](Scalar t, int agent, const FilterDiag& diag) {
      impl->qp << t << ',' << agent << ',';
      for (size_t i = 0; i < diag.active.size(); ++i) {
        impl->qp << (i ? ";" : "") << diag.active[i];
      }
      impl->qp << ',' << diag.slack << ',' << to_string(diag.status) << '\n';
    };
  }
  if (impl->estimation.is_open()) {
    s.estimation = [impl](const LipEstimationStep& step) {
      impl->estimation << step.t << ',' << step.theta_after[0] << ',' << step.theta_after[1]
                       << ',' << step.lam_min_q << '\n';
    };
  }
  return s;
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "t,agent,px,py,vx,vy,ux,uy,min_pair_dist,min_h,qp_status") {
    throw ConfigError("unexpected trajectory.csv header in " + path);
  }
  Trajectory traj;
  std::string line;
  Scalar last_t = std::numeric_limits<Scalar>::quiet_NaN();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 11) throw ConfigError("malformed trajectory row: " + line);
    const Scalar t = std::stod(fields[0]);
    if (traj.steps.empty() || t != last_t) {
      traj.steps.push_back(StepLog{t, {}});
      last_t = t;
    }
    AgentStepLog al;
    al.state.p = Vec2(std::stod(fields[2]), std::stod(fields[3]));
    al.state.v = Vec2(std::stod(fields[4]), std::stod(fields[5]));
    al.u = Vec2(std::stod(fields[6]), std::stod(fields[7]));
    al.min_pair_dist = std::stod(fields[8]);
    al.min_h = std::stod(fields[9]);
    traj.steps.back().agents.push_back(al);
  }
  if (traj.steps.size() >= 2) traj.dt = traj.steps[1].t - traj.steps[0].t;
  return traj;
}

}  // namespace cbfsim

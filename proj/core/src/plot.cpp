#include "cbfsim/plot.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

namespace cbfsim {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2"};

class SvgCanvas {
 public:
  SvgCanvas(const std::string& path, Vec2 lo, Vec2 hi, int width_px)
      : out_(path), lo_(lo), hi_(hi) {
    if (!out_) throw ConfigError("cannot write " + path);
    scale_ = width_px / (hi.x() - lo.x());
    width_ = width_px;
    height_ = static_cast<int>((hi.y() - lo.y()) * scale_);
    out_ << std::setprecision(8);
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
         << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  ~SvgCanvas() { out_ << "</svg>\n"; }

  Vec2 map(const Vec2& p) const {
    return Vec2((p.x() - lo_.x()) * scale_, (hi_.y() - p.y()) * scale_);
  }

  void polyline(const std::vector<Vec2>& pts, const std::string& color, Scalar width,
                bool closed = false, const std::string& fill = "none") {
    if (pts.size() < 2) return;
    out_ << (closed ? "<polygon" : "<polyline") << " points=\"";
    for (const Vec2& p : pts) {
      const Vec2 q = map(p);
      out_ << q.x() << ',' << q.y() << ' ';
    }
    out_ << "\" fill=\"" << fill << "\" stroke=\"" << color << "\" stroke-width=\"" << width
         << "\"/>\n";
  }

  void circle(const Vec2& c, Scalar r_world, const std::string& color, bool filled) {
    const Vec2 q = map(c);
    out_ << "<circle cx=\"" << q.x() << "\" cy=\"" << q.y() << "\" r=\"" << r_world * scale_
         << "\" fill=\"" << (filled ? color : std::string("none")) << "\" stroke=\"" << color
         << "\" stroke-width=\"1.5\"/>\n";
  }

 private:
  std::ofstream out_;
  Vec2 lo_, hi_;
  Scalar scale_;
  int width_, height_;
};

}  // namespace

void plot_trajectories_svg(const std::string& path, const Trajectory& traj,
                           const ScenarioConfig* cfg) {
  Vec2 lo(1e30, 1e30), hi(-1e30, -1e30);
  if (cfg) {
    lo = cfg->world_lo;
    hi = cfg->world_hi;
  } else {
    for (const StepLog& s : traj.steps) {
      for (const AgentStepLog& a : s.agents) {
        lo = lo.cwiseMin(a.state.p - Vec2(1, 1));
        hi = hi.cwiseMax(a.state.p + Vec2(1, 1));
      }
    }
  }
  SvgCanvas svg(path, lo, hi, 900);

  if (cfg) {
    for (const Obstacle& obs : cfg->obstacles) {
      svg.polyline(obstacle_polygon_at(obs, 0.0), "#555555", 1.0, true, "#cccccc");
      if (obs.motion) {
        // Sweep envelope of the oscillation.
        const Scalar period = 4.0 * obs.motion->amplitude / obs.motion->speed;
        for (Scalar f : {0.25, 0.75}) {
          svg.polyline(obstacle_polygon_at(obs, f * period), "#999999", 0.8, true);
        }
      }
    }
  }

  const size_t n_agents = traj.steps.empty() ? 0 : traj.steps.front().agents.size();
  for (size_t a = 0; a < n_agents; ++a) {
    std::vector<Vec2> pts;
    pts.reserve(traj.steps.size());
    for (const StepLog& s : traj.steps) pts.push_back(s.agents[a].state.p);
    const std::string color = kPalette[a % std::size(kPalette)];
    svg.polyline(pts, color, 1.5);
    svg.circle(pts.front(), 0.12, color, false);
    svg.circle(pts.back(), 0.12, color, true);
    if (cfg && a < cfg->agents.size()) svg.circle(cfg->agents[a].goal, 0.06, color, true);
  }
}

void plot_barriers_svg(const std::string& path, const PointCloud& cloud,
                       const std::vector<ILCBF>& barriers, const Vec2& agent_p) {
  Vec2 lo = agent_p - Vec2(3, 3), hi = agent_p + Vec2(3, 3);
  SvgCanvas svg(path, lo, hi, 700);
  svg.circle(agent_p, 0.08, "#000000", true);
  for (const Vec2& p : cloud.points) svg.circle(p, 0.02, "#888888", true);
  for (size_t k = 0; k < barriers.size(); ++k) {
    // Draw the zero-level set over the span of the cluster the fit used.
    Scalar x_lo = -2.0, x_hi = 2.0;
    svg.polyline(barrier_zero_level(barriers[k], x_lo, x_hi, 80),
                 kPalette[k % std::size(kPalette)], 1.5);
  }
}

}  // namespace cbfsim

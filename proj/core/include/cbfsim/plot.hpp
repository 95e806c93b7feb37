#ifndef CBFSIM_PLOT_HPP
#define CBFSIM_PLOT_HPP

#include <string>
#include <vector>

#include "cbfsim/barrier.hpp"
#include "cbfsim/scenario.hpp"
#include "cbfsim/simulator.hpp"

namespace cbfsim {

/// Renders agent trajectories (with start/goal markers) and obstacles to a
/// standalone SVG file.
void plot_trajectories_svg(const std::string& path, const Trajectory& traj,
                           const ScenarioConfig* cfg = nullptr);

/// Renders one agent's scan points and fitted barrier curves at a given step.
void plot_barriers_svg(const std::string& path, const PointCloud& cloud,
                       const std::vector<ILCBF>& barriers, const Vec2& agent_p);

}  // namespace cbfsim

#endif  // CBFSIM_PLOT_HPP

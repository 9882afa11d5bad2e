#include <limits>
#include <stdexcept>

#include "toda/dynamics.hpp"

namespace toda {

CompareResult compare_runs(const TodaModel& model, const CompareConfig& config) {
  const Billiard b = walls_from_model(model);
  if (config.position.size() != b.dimension || config.direction.size() != b.dimension)
    throw std::invalid_argument("compare_runs: position and direction need n - 1 entries");

  CompareResult out;
  const BilliardState start = make_billiard_state(config.position, config.direction, config.omega);
  PropagationConfig prop;
  prop.t_max = config.t_max;
  out.billiard = propagate_billiard(b, start, prop);
  const auto billiard_hits = itinerary(out.billiard.events);

  auto wall_of = [&](std::size_t component) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < b.walls.size(); ++i)
      if (b.walls[i].origin_component == component) return i;
    return std::nullopt;
  };

  for (double depth : config.depths) {
    const SmoothState s0 = constraint_fill(model, depth, start.y, start.w);
    SmoothTrajectory run = integrate_smooth(model, s0, config.t_max, config.smooth);
    for (auto& c : run.contacts) c.wall = wall_of(c.component);

    DepthComparison dc;
    dc.depth = depth;
    dc.max_drift = run.max_drift;
    dc.billiard_itinerary = billiard_hits;
    for (const auto& c : run.contacts) {
      if (c.wall) dc.smooth_itinerary.push_back(*c.wall);
      const auto at = trajectory_at(out.billiard, c.t);
      dc.contact_deviations.push_back(at ? (c.state.y - at->position).norm()
                                         : std::numeric_limits<double>::quiet_NaN());
    }
    if (!billiard_hits.empty()) dc.billiard_wall = billiard_hits.front();
    if (!run.contacts.empty()) {
      const auto& first = run.contacts.front();
      dc.contact_time = first.t;
      dc.smooth_wall = first.wall;
      dc.deviation = dc.contact_deviations.front();
    }
    out.depths.push_back(std::move(dc));
    out.smooth.push_back(std::move(run));
  }
  return out;
}

}  // namespace toda

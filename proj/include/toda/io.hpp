#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "toda/billiard.hpp"
#include "toda/dynamics.hpp"
#include "toda/model.hpp"

namespace toda {

/// Malformed model input. line/column are 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Strict reader for {"dimension": n, "components": [{"A": a, "u": [...]}, ...]}.
/// Unknown fields and wrong types are rejected. Does not validate the model.
TodaModel parse_model_json(const std::string& text);
TodaModel read_model_file(const std::string& path);

nlohmann::json to_json(const TodaModel& model);
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const IlluminationResult& result);
nlohmann::json to_json(const VolumeEstimate& estimate);

/// Wall list plus m+ and the m+ >= n bound status.
nlohmann::json walls_report(const TodaModel& model, const Billiard& b);

/// Event flags in trajectory CSV files.
enum class EventFlag { Sample = 0, Reflection = 1, Escape = 2, Stop = 3 };

/// Columns t, y0, y1.., w1.., event_flag, wall_index. Segments are sampled
/// every sample_dt; y0 = y0_start - omega t.
void write_trajectory_csv(std::ostream& os, const BilliardTrajectory& traj, double y0_start, double sample_dt);
void write_smooth_csv(std::ostream& os, const SmoothTrajectory& traj, int dimension);
/// One JSON object per line: segments, reflections, escape, then a summary.
void write_events_jsonl(std::ostream& os, const BilliardTrajectory& traj);
void write_compare_csv(std::ostream& os, const CompareResult& result);

}  // namespace toda

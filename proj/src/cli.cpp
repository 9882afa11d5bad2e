#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "toda/billiard.hpp"
#include "toda/cli.hpp"
#include "toda/dynamics.hpp"
#include "toda/io.hpp"
#include "toda/presets.hpp"

namespace toda {

using nlohmann::json;

namespace {

constexpr std::string_view kPresetPrefix = "preset:";

struct ValidationFailure : std::runtime_error {
  ValidationReport report;
  explicit ValidationFailure(ValidationReport r) : std::runtime_error("model fails validation"), report(std::move(r)) {}
};

void require_valid(const TodaModel& model) {
  auto report = validate_model(model);
  if (!report.empty()) throw ValidationFailure(std::move(report));
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), v.size()); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

struct SimulateOptions {
  std::string mode = "billiard";
  double y0 = -12.0;
  std::vector<double> position;
  std::vector<double> direction;
  bool random_direction = false;
  double t_max = -1.0;  // mode dependent default
  double sample_dt = 0.01;
  std::vector<double> depths{-4.0, -8.0, -12.0};
};

int cmd_validate(const TodaModel& model, const RunConfig& cfg, std::ostream& out) {
  const auto report = validate_model(model);
  if (cfg.json) {
    json j = to_json(report);
    if (report.empty()) {
      const auto cls = classify_components(model);
      json classes = json::array();
      for (auto c : cls.classes) classes.push_back(to_string(c));
      j["classes"] = classes;
      j["m_plus"] = cls.wall_count();
    }
    out << j.dump(2) << '\n';
  } else if (report.empty()) {
    out << "valid: n = " << model.dimension << ", " << model.components.size() << " components, m+ = "
        << classify_components(model).wall_count() << '\n';
  } else {
    for (const auto& v : report) {
      if (v.component) out << "component " << *v.component << ": ";
      out << v.message << '\n';
    }
  }
  return report.empty() ? kExitOk : kExitValidation;
}

int cmd_walls(const TodaModel& model, const RunConfig& cfg, std::ostream& out) {
  require_valid(model);
  const Billiard b = walls_from_model(model);
  const json report = walls_report(model, b);
  if (cfg.json) {
    out << report.dump(2) << '\n';
    return kExitOk;
  }
  out << "m+ = " << b.wall_count() << " (n = " << model.dimension << "), bound "
      << report["bound"].get<std::string>() << '\n';
  out << std::setprecision(12);
  for (std::size_t i = 0; i < b.walls.size(); ++i) {
    const auto& w = b.walls[i];
    out << "wall " << i << " (component " << w.origin_component << "): v = (";
    for (Eigen::Index k = 0; k < w.source.size(); ++k) out << (k ? ", " : "") << w.source(k);
    out << "), |v| = " << w.source.norm() << ", r = " << w.radius << '\n';
  }
  return kExitOk;
}

IlluminationConfig illumination_config(const RunConfig& cfg) {
  IlluminationConfig ic;
  ic.seed = cfg.seed;
  ic.tolerance = cfg.tolerance;
  return ic;
}

void print_vector(std::ostream& out, const Vector& v) {
  out << '(';
  for (Eigen::Index k = 0; k < v.size(); ++k) out << (k ? ", " : "") << v(k);
  out << ')';
}

int cmd_illuminate(const TodaModel& model, const RunConfig& cfg, std::ostream& out) {
  require_valid(model);
  const auto result = check_illumination(walls_from_model(model), illumination_config(cfg));
  if (cfg.json) {
    json j = to_json(result);
    j["seed"] = cfg.seed;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << std::setprecision(12);
  out << "verdict: " << to_string(result.verdict) << " (" << to_string(result.method)
      << "), regime: " << regime_label(result.verdict) << '\n';
  if (result.witness) {
    out << "witness: ";
    print_vector(out, *result.witness);
    out << ", margin " << result.margin << '\n';
  }
  out << "seed: " << cfg.seed << '\n';
  return kExitOk;
}

int cmd_volume(const TodaModel& model, const RunConfig& cfg, std::ostream& out) {
  require_valid(model);
  VolumeConfig vc;
  vc.samples = cfg.samples;
  vc.seed = cfg.seed;
  vc.workers = cfg.workers;
  vc.illumination = illumination_config(cfg);
  const auto est = volume(walls_from_model(model), vc);
  if (cfg.json) {
    out << to_json(est).dump(2) << '\n';
    return kExitOk;
  }
  out << std::setprecision(10);
  if (est.finite)
    out << "volume: " << est.value << " +- " << est.standard_error;
  else
    out << "volume: infinite";
  out << " (verdict " << to_string(est.illumination.verdict) << ", samples " << est.samples << ", seed "
      << est.seed << ", workers " << est.workers << ")\n";
  return kExitOk;
}

int cmd_simulate(const TodaModel& model, const RunConfig& cfg, const SimulateOptions& opt, std::ostream& out,
                 std::ostream& err) {
  require_valid(model);
  const int d = model.dimension - 1;
  const Billiard b = walls_from_model(model);

  Vector position = opt.position.empty() ? Vector(Vector::Zero(d)) : to_vector(opt.position);
  if (position.size() != d) throw ParseError("--position needs " + std::to_string(d) + " entries");
  Vector direction;
  if (!opt.direction.empty()) {
    direction = to_vector(opt.direction);
    if (direction.size() != d) throw ParseError("--direction needs " + std::to_string(d) + " entries");
  } else if (opt.random_direction) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    direction.resize(d);
    do {
      for (int i = 0; i < d; ++i) direction(i) = normal(rng);
    } while (direction.norm() < 1e-12);
  } else {
    throw ParseError("simulate needs --direction or --random-direction");
  }

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  json summary{{"mode", opt.mode}, {"seed", cfg.seed}, {"omega", cfg.omega}};
  int code = kExitOk;

  if (opt.mode == "billiard") {
    PropagationConfig pc;
    pc.max_bounces = cfg.max_bounces;
    if (opt.t_max > 0.0) pc.t_max = opt.t_max;
    const auto traj = propagate_billiard(b, make_billiard_state(position, direction, cfg.omega), pc);
    {
      auto csv = open_output(dir / "trajectory.csv");
      write_trajectory_csv(csv, traj, opt.y0, opt.sample_dt);
      auto log = open_output(dir / "events.jsonl");
      write_events_jsonl(log, traj);
    }
    summary["bounces"] = traj.bounces;
    summary["termination"] = to_string(traj.termination);
    summary["diagnostic"] = traj.diagnostic;
    summary["max_energy_drift"] = traj.max_energy_drift;
    summary["files"] = {(dir / "trajectory.csv").string(), (dir / "events.jsonl").string()};
    const auto t = traj.termination;
    if (t == Termination::TangentialIncidence || t == Termination::CornerCycling || t == Termination::NearIdealVertex)
      code = kExitRuntime;
  } else if (opt.mode == "smooth") {
    const double t_max = opt.t_max > 0.0 ? opt.t_max : 10.0;
    const BilliardState start = make_billiard_state(position, direction, cfg.omega);
    const auto s0 = constraint_fill(model, opt.y0, start.y, start.w);
    auto run = integrate_smooth(model, s0, t_max);
    for (auto& c : run.contacts)
      for (std::size_t i = 0; i < b.walls.size(); ++i)
        if (b.walls[i].origin_component == c.component) c.wall = i;
    {
      auto csv = open_output(dir / "trajectory.csv");
      write_smooth_csv(csv, run, model.dimension);
    }
    json contacts = json::array();
    for (const auto& c : run.contacts)
      contacts.push_back({{"t", c.t}, {"component", c.component}, {"wall", c.wall ? json(*c.wall) : json(nullptr)}});
    summary["contacts"] = contacts;
    summary["max_constraint_drift"] = run.max_drift;
    summary["aborted"] = run.aborted;
    summary["diagnostic"] = run.diagnostic;
    summary["files"] = {(dir / "trajectory.csv").string()};
    if (run.aborted) code = kExitRuntime;
  } else if (opt.mode == "compare") {
    CompareConfig cc;
    cc.depths = opt.depths;
    cc.position = position;
    cc.direction = direction;
    cc.omega = cfg.omega;
    if (opt.t_max > 0.0) cc.t_max = opt.t_max;
    const auto result = compare_runs(model, cc);
    {
      auto csv = open_output(dir / "compare.csv");
      write_compare_csv(csv, result);
    }
    json rows = json::array();
    for (const auto& dc : result.depths) {
      rows.push_back({{"depth", dc.depth},
                      {"contact_time", dc.contact_time ? json(*dc.contact_time) : json(nullptr)},
                      {"smooth_wall", dc.smooth_wall ? json(*dc.smooth_wall) : json(nullptr)},
                      {"billiard_wall", dc.billiard_wall ? json(*dc.billiard_wall) : json(nullptr)},
                      {"deviation", std::isfinite(dc.deviation) ? json(dc.deviation) : json(nullptr)},
                      {"max_constraint_drift", dc.max_drift}});
    }
    summary["wall_identification"] = "argmax of Phi at local maxima of V_* (heuristic)";
    summary["depths"] = rows;
    summary["files"] = {(dir / "compare.csv").string()};
    for (const auto& run : result.smooth)
      if (run.aborted) {
        err << "smooth run aborted: " << run.diagnostic << '\n';
        code = kExitRuntime;
      }
  } else {
    throw ParseError("unknown simulate mode \"" + opt.mode + "\"");
  }

  if (cfg.json) {
    out << summary.dump(2) << '\n';
  } else {
    for (auto it = summary.begin(); it != summary.end(); ++it) out << it.key() << ": " << it.value().dump() << '\n';
  }
  return code;
}

}  // namespace

TodaModel load_model(const std::string& source) {
  if (source.rfind(kPresetPrefix, 0) == 0) {
    try {
      return make_preset(std::string_view(source).substr(kPresetPrefix.size()));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  return read_model_file(source);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Billiard analysis of pseudo-Euclidean Toda-like systems"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_flag("--json", cfg.json, "Machine-readable JSON on stdout");
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Monte Carlo samples")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--tolerance", cfg.tolerance, "Tangency band in margin units")->capture_default_str();
  app.add_option("--max-bounces", cfg.max_bounces, "Reflection budget")->capture_default_str();
  app.add_option("--omega", cfg.omega, "Hyperbolic speed")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--workers", cfg.workers, "Monte Carlo worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--output", cfg.output_dir, "Output directory for simulate")->capture_default_str();

  std::string model_arg;
  auto add_command = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("model", model_arg, "Model JSON path or preset:<name>")->required();
    return sub;
  };
  auto* validate = add_command("validate", "Check the model restrictions");
  auto* walls = add_command("walls", "List billiard walls");
  auto* illuminate = add_command("illuminate", "Decide illumination of the absolute");
  auto* vol = add_command("volume", "Estimate the billiard volume");
  auto* simulate = add_command("simulate", "Run billiard, smooth or compared trajectories");

  SimulateOptions sim;
  simulate->add_option("--mode", sim.mode, "billiard | smooth | compare")
      ->check(CLI::IsMember({"billiard", "smooth", "compare"}))
      ->capture_default_str();
  simulate->add_option("--y0", sim.y0, "Starting y0 (smooth mode; label offset in billiard mode)")->capture_default_str();
  simulate->add_option("--position", sim.position, "Start point in the ball, comma separated")->delimiter(',');
  simulate->add_option("--direction", sim.direction, "Initial direction, comma separated")->delimiter(',');
  simulate->add_flag("--random-direction", sim.random_direction, "Seeded uniform direction");
  simulate->add_option("--t-max", sim.t_max, "Time limit");
  simulate->add_option("--sample-dt", sim.sample_dt, "CSV sampling step")->capture_default_str();
  simulate->add_option("--depths", sim.depths, "Compare-mode start depths")->delimiter(',')->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const TodaModel model = load_model(model_arg);
    if (validate->parsed()) return cmd_validate(model, cfg, out);
    if (walls->parsed()) return cmd_walls(model, cfg, out);
    if (illuminate->parsed()) return cmd_illuminate(model, cfg, out);
    if (vol->parsed()) return cmd_volume(model, cfg, out);
    if (simulate->parsed()) return cmd_simulate(model, cfg, sim, out, err);
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationFailure& e) {
    if (cfg.json) {
      out << to_json(e.report).dump(2) << '\n';
    } else {
      for (const auto& v : e.report) {
        err << "invalid model: ";
        if (v.component) err << "component " << *v.component << ": ";
        err << v.message << '\n';
      }
    }
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitInput;
}

}  // namespace toda

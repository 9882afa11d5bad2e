#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "toda/cli.hpp"
#include "toda/io.hpp"
#include "toda/presets.hpp"

using namespace toda;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "toda-billiard");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("toda_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("model JSON round trip") {
  const auto m = bianchi_ix();
  const auto back = parse_model_json(to_json(m).dump());
  CHECK(back.dimension == 3);
  REQUIRE(back.components.size() == m.components.size());
  for (std::size_t a = 0; a < m.components.size(); ++a) {
    CHECK(back.components[a].coupling == m.components[a].coupling);
    CHECK((back.components[a].u - m.components[a].u).norm() == 0.0);
  }
}

TEST_CASE("strict model parsing") {
  try {
    parse_model_json("{\n  \"dimension\": 3,\n  \"components\": [}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_model_json(R"({"dimension": 3, "components": [], "extra": 1})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"dimension": 3, "components": [{"A": 1, "u": [1,2,0], "B": 2}]})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"dimension": 3, "components": [{"u": [1,2,0]}]})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"dimension": 3.5, "components": []})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"dimension": 3, "components": [{"A": "1", "u": [1,2,0]}]})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"([1, 2])"), ParseError);
  // Parsing does not validate.
  const auto m = parse_model_json(R"({"dimension": 3, "components": [{"A": 1, "u": [-1, 2, 0]}]})");
  CHECK_FALSE(is_valid(m));
  CHECK_THROWS_AS(load_model("preset:nonsense"), ParseError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ParseError);
}

TEST_CASE("exit codes") {
  const auto dir = scratch_dir("exit");
  CHECK(run({"validate", "preset:bianchi-ix"}).code == kExitOk);
  const auto bad = write_file(dir, "bad.json", R"({"dimension": 3, "components": [{"A": 1, "u": [-1, 2, 0]}]})");
  const auto r = run({"validate", bad.string()});
  CHECK(r.code == kExitValidation);
  CHECK(r.out.find("u_0 > 0") != std::string::npos);
  CHECK(run({"illuminate", bad.string()}).code == kExitValidation);
  const auto broken = write_file(dir, "broken.json", "{\"dimension\": 3, \"components\": [");
  const auto b = run({"validate", broken.string()});
  CHECK(b.code == kExitInput);
  CHECK(b.err.find("line") != std::string::npos);
  CHECK(run({"validate", "preset:kasner"}).code == kExitInput);
  CHECK(run({"frobnicate", "preset:bianchi-ix"}).code == kExitInput);
  CHECK(run({"simulate", "preset:bianchi-ix"}).code == kExitInput);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("json output parses") {
  const auto v = run({"--json", "validate", "preset:bianchi-ix"});
  const auto jv = json::parse(v.out);
  CHECK(jv["valid"] == true);
  CHECK(jv["m_plus"] == 3);

  const auto ill = json::parse(run({"illuminate", "preset:bianchi-ix", "--json"}).out);
  CHECK(ill["verdict"] == "Illuminated");
  CHECK(ill["method"] == "ExactArcCoverage");
  CHECK(ill["regime"] == "oscillatory");
  CHECK(ill["tangency_points"].size() == 3);

  const auto scalar = json::parse(run({"--json", "illuminate", "preset:scalar:bianchi-ix"}).out);
  CHECK(scalar["verdict"] == "NotIlluminated");
  CHECK(scalar["regime"] == "Kasner-like");
  CHECK(scalar["witness"].size() == 3);
}

TEST_CASE("volume is reproducible from the command line") {
  const std::vector<std::string> args{"--json", "--samples", "20000", "--seed", "3", "--workers", "2",
                                      "volume", "preset:bianchi-ix"};
  const auto a = json::parse(run(args).out);
  const auto b = json::parse(run(args).out);
  CHECK(a["volume"] == b["volume"]);
  CHECK(a["stderr"] == b["stderr"]);
  CHECK(a["seed"] == 3);
  CHECK(a["volume"].get<double>() == doctest::Approx(3.14159).epsilon(0.05));

  const auto inf = json::parse(run({"--json", "volume", "preset:scalar:bianchi-ix"}).out);
  CHECK(inf["volume"] == "infinite");
  CHECK(inf["stderr"].is_null());
}

TEST_CASE("walls report the wall-count bound") {
  const auto dir = scratch_dir("walls");
  const auto two = write_file(dir, "two.json",
                              R"({"dimension": 3, "components": [{"A": 1, "u": [1, 2, 0]}, {"A": 1, "u": [1, -2, 0]}]})");
  const auto j = json::parse(run({"--json", "walls", two.string()}).out);
  CHECK(j["m_plus"] == 2);
  CHECK(j["bound"].get<std::string>().rfind("violated", 0) == 0);
  const auto ill = json::parse(run({"--json", "illuminate", two.string()}).out);
  CHECK(ill["verdict"] == "NotIlluminated");
  CHECK(ill["method"] == "TopologicalBound");

  const auto bianchi = json::parse(run({"--json", "walls", "preset:bianchi-ix"}).out);
  CHECK(bianchi["bound"].get<std::string>().rfind("satisfied", 0) == 0);
  CHECK(bianchi["walls"][2]["source"][0].get<double>() == doctest::Approx(2.0));
  const auto text = run({"walls", "preset:bianchi-ix"});
  CHECK(text.code == kExitOk);
  CHECK(text.out.find("m+ = 3") != std::string::npos);
}

TEST_CASE("simulate writes its output files") {
  const auto dir = scratch_dir("sim");
  const auto r = run({"--json", "--max-bounces", "50", "--output", dir.string(), "simulate", "preset:bianchi-ix",
                      "--direction", "0.3,-0.8", "--position", "0.1,0.1"});
  REQUIRE(r.code == kExitOk);
  const auto summary = json::parse(r.out);
  CHECK(summary["bounces"] == 50);
  std::ifstream csv(dir / "trajectory.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,y0,y1,y2,w1,w2,event_flag,wall_index");
  std::string row;
  int reflections = 0;
  while (std::getline(csv, row)) {
    std::vector<double> cells;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 8);
    CHECK(cells[1] == doctest::Approx(-12.0 - cells[0]));
    if (cells[6] == 1.0) ++reflections;
  }
  CHECK(reflections == 50);
  std::ifstream events(dir / "events.jsonl");
  std::string line, last;
  while (std::getline(events, line)) {
    CHECK(json::accept(line));
    last = line;
  }
  CHECK(json::parse(last).contains("termination"));

  const auto smooth = run({"--json", "--output", dir.string(), "simulate", "preset:bianchi-ix", "--mode", "smooth",
                           "--y0", "-6", "--direction", "1,0.2", "--t-max", "3"});
  CHECK(smooth.code == kExitOk);
  CHECK(json::parse(smooth.out)["max_constraint_drift"].get<double>() < 1e-8);

  const auto cmp = run({"--json", "--output", dir.string(), "simulate", "preset:bianchi-ix", "--mode", "compare",
                        "--position", "0.1,0.05", "--direction", "1,0.2"});
  CHECK(cmp.code == kExitOk);
  std::ifstream ccsv(dir / "compare.csv");
  std::getline(ccsv, header);
  CHECK(header == "depth,contact_index,t,smooth_wall,billiard_wall,deviation,max_drift");

  CHECK(run({"--output", dir.string(), "simulate", "preset:bianchi-ix", "--mode", "sideways", "--direction", "1,0"})
            .code == kExitInput);
}

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "toda/io.hpp"

namespace toda {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void require_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ParseError(where + ": unknown field \"" + it.key() + "\"");
  }
  for (const char* k : allowed)
    if (!obj.contains(k)) throw ParseError(where + ": missing field \"" + std::string(k) + "\"");
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json optional_index(const std::optional<std::size_t>& i) { return i ? json(*i) : json(nullptr); }

void write_row(std::ostream& os, double t, double y0, const Vector& y, const Vector& w, EventFlag flag,
               long wall) {
  os << t << ',' << y0;
  for (Eigen::Index i = 0; i < y.size(); ++i) os << ',' << y(i);
  for (Eigen::Index i = 0; i < w.size(); ++i) os << ',' << w(i);
  os << ',' << static_cast<int>(flag) << ',' << wall << '\n';
}

void write_header(std::ostream& os, int d) {
  os << "t,y0";
  for (int i = 1; i <= d; ++i) os << ",y" << i;
  for (int i = 1; i <= d; ++i) os << ",w" << i;
  os << ",event_flag,wall_index\n";
}

}  // namespace

TodaModel parse_model_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << "malformed JSON at line " << line << ", column " << column << ": " << e.what();
    throw ParseError(msg.str(), line, column);
  }
  if (!doc.is_object()) throw ParseError("model: top level must be an object");
  require_keys(doc, "model", {"dimension", "components"});
  if (!doc["dimension"].is_number_integer()) throw ParseError("model.dimension: expected an integer");
  if (!doc["components"].is_array()) throw ParseError("model.components: expected an array");

  TodaModel model;
  model.dimension = doc["dimension"].get<int>();
  const auto& comps = doc["components"];
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string where = "model.components[" + std::to_string(i) + "]";
    const auto& c = comps[i];
    if (!c.is_object()) throw ParseError(where + ": expected an object");
    require_keys(c, where, {"A", "u"});
    ExponentialComponent comp;
    comp.coupling = number_at(c["A"], where + ".A");
    if (!c["u"].is_array()) throw ParseError(where + ".u: expected an array");
    comp.u.resize(static_cast<Eigen::Index>(c["u"].size()));
    for (std::size_t k = 0; k < c["u"].size(); ++k)
      comp.u(static_cast<Eigen::Index>(k)) = number_at(c["u"][k], where + ".u[" + std::to_string(k) + "]");
    model.components.push_back(std::move(comp));
  }
  return model;
}

TodaModel read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_json(buf.str());
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const TodaModel& model) {
  json comps = json::array();
  for (const auto& c : model.components) comps.push_back({{"A", c.coupling}, {"u", to_json(c.u)}});
  return {{"dimension", model.dimension}, {"components", comps}};
}

json to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report)
    violations.push_back({{"component", optional_index(v.component)},
                          {"restriction", to_string(v.restriction)},
                          {"message", v.message}});
  return {{"valid", report.empty()}, {"violations", violations}};
}

json to_json(const IlluminationResult& r) {
  json tangencies = json::array();
  for (const auto& p : r.tangency_points) tangencies.push_back(to_json(p));
  return {{"verdict", to_string(r.verdict)},
          {"method", to_string(r.method)},
          {"probabilistic", r.method == Method::RandomizedSearch && r.verdict != Verdict::NotIlluminated},
          {"regime", regime_label(r.verdict)},
          {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
          {"margin", number_or_null(r.margin)},
          {"tangency_points", tangencies}};
}

json to_json(const VolumeEstimate& e) {
  json out = to_json(e.illumination);
  out["volume"] = e.finite ? json(e.value) : json("infinite");
  out["stderr"] = e.finite ? json(e.standard_error) : json(nullptr);
  out["tail"] = e.tail;
  out["samples"] = e.samples;
  out["seed"] = e.seed;
  out["workers"] = e.workers;
  return out;
}

json walls_report(const TodaModel& model, const Billiard& b) {
  json walls = json::array();
  for (std::size_t i = 0; i < b.walls.size(); ++i) {
    const auto& w = b.walls[i];
    walls.push_back({{"index", i},
                     {"component", w.origin_component},
                     {"source", to_json(w.source)},
                     {"source_norm", w.source.norm()},
                     {"radius", w.radius}});
  }
  const auto m = b.walls.size();
  const auto n = static_cast<std::size_t>(model.dimension);
  return {{"dimension", model.dimension},
          {"m_plus", m},
          {"bound", m >= n ? "satisfied: finite volume possible" : "violated: infinite volume"},
          {"walls", walls}};
}

void write_trajectory_csv(std::ostream& os, const BilliardTrajectory& traj, double y0_start, double sample_dt) {
  if (!(sample_dt > 0.0)) throw std::invalid_argument("write_trajectory_csv: sample_dt must be positive");
  const int d = static_cast<int>(traj.final_state.y.size());
  const double omega = traj.final_state.omega;
  os << std::setprecision(17);
  write_header(os, d);
  for (const auto& e : traj.events) {
    if (const auto* seg = std::get_if<Segment>(&e)) {
      for (double t = seg->t_start; t < seg->t_end; t += sample_dt) {
        const auto p = geodesic_eval(seg->geodesic, t);
        write_row(os, t, y0_start - omega * t, p.position, p.velocity, EventFlag::Sample, -1);
      }
    } else if (const auto* r = std::get_if<Reflection>(&e)) {
      write_row(os, r->t, y0_start - omega * r->t, r->position, r->w_out, EventFlag::Reflection,
                static_cast<long>(r->wall));
    } else if (const auto* x = std::get_if<Escape>(&e)) {
      write_row(os, x->t, y0_start - omega * x->t, x->direction, Vector::Zero(d), EventFlag::Escape, -1);
    }
  }
  if (traj.termination != Termination::Escaped) {
    const auto& s = traj.final_state;
    write_row(os, s.t, y0_start - omega * s.t, s.y, s.w, EventFlag::Stop, -1);
  }
}

void write_smooth_csv(std::ostream& os, const SmoothTrajectory& traj, int dimension) {
  const int d = dimension - 1;
  os << std::setprecision(17);
  write_header(os, d);
  std::size_t c = 0;
  for (const auto& s : traj.samples) {
    while (c < traj.contacts.size() && traj.contacts[c].t <= s.t) {
      const auto& k = traj.contacts[c++];
      write_row(os, k.t, k.state.y0, k.state.y, k.state.w, EventFlag::Reflection,
                k.wall ? static_cast<long>(*k.wall) : -1);
    }
    write_row(os, s.t, s.y0, s.y, s.w, EventFlag::Sample, -1);
  }
  if (traj.aborted && !traj.samples.empty()) {
    const auto& s = traj.samples.back();
    write_row(os, s.t, s.y0, s.y, s.w, EventFlag::Stop, -1);
  }
}

void write_events_jsonl(std::ostream& os, const BilliardTrajectory& traj) {
  for (const auto& e : traj.events) {
    json line;
    if (const auto* seg = std::get_if<Segment>(&e)) {
      const auto& g = seg->geodesic;
      const bool arc = g.kind == Geodesic::Kind::CircleArc;
      line = {{"event", "segment"},
              {"t_start", seg->t_start},
              {"t_end", seg->t_end},
              {"kind", arc ? "circle-arc" : "diameter"},
              {"n1", arc ? to_json(g.n1) : json(nullptr)},
              {"n2", to_json(g.n2)},
              {"v", arc ? json(g.v) : json(nullptr)},
              {"omega", g.omega},
              {"t1", g.t1}};
    } else if (const auto* r = std::get_if<Reflection>(&e)) {
      line = {{"event", "reflection"},
              {"t", r->t},
              {"wall", r->wall},
              {"position", to_json(r->position)},
              {"w_in", to_json(r->w_in)},
              {"w_out", to_json(r->w_out)}};
    } else if (const auto* x = std::get_if<Escape>(&e)) {
      line = {{"event", "escape"}, {"t", x->t}, {"direction", to_json(x->direction)}};
    }
    os << line.dump() << '\n';
  }
  os << json{{"event", "end"},
             {"termination", to_string(traj.termination)},
             {"diagnostic", traj.diagnostic},
             {"bounces", traj.bounces},
             {"max_energy_drift", traj.max_energy_drift}}
            .dump()
     << '\n';
}

void write_compare_csv(std::ostream& os, const CompareResult& result) {
  os << std::setprecision(17);
  os << "depth,contact_index,t,smooth_wall,billiard_wall,deviation,max_drift\n";
  for (std::size_t k = 0; k < result.depths.size(); ++k) {
    const auto& dc = result.depths[k];
    const auto& contacts = result.smooth[k].contacts;
    for (std::size_t i = 0; i < contacts.size(); ++i) {
      os << dc.depth << ',' << i << ',' << contacts[i].t << ',';
      if (contacts[i].wall) os << *contacts[i].wall;
      os << ',';
      if (i < dc.billiard_itinerary.size()) os << dc.billiard_itinerary[i];
      os << ',' << dc.contact_deviations[i] << ',' << dc.max_drift << '\n';
    }
  }
}

}  // namespace toda

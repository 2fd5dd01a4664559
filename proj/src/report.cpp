#include "crh/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crh {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Summary, mean, sd, ci95, n)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PairSummary, pair, su_rate_pps, handoffs, mean_handoff_delay, mean_service_time,
                                   throughput_pps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PairMetrics, pair, su_rate_pps, arrival_prob, measured_slots, transmitting_slots,
                                   collided_slots, handoff_slots, backlogged_slots, idle_slots, delivered_frame_slots,
                                   wasted_frame_slots, in_flight_slots, frames_delivered, packets_delivered,
                                   pu_collisions, su_su_collisions, type1_collisions, prediction_misses, handoffs,
                                   proactive_handoffs, handoff_delay_sum, service_time_sum)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReplicationMetrics, replication, measured_slots, throughput_pps,
                                   normalized_throughput, goodput, collision_rate, collisions_per_second,
                                   pu_collision_count, su_su_collision_count, type1_collision_count,
                                   prediction_miss_count, packets_delivered, handoff_count, proactive_handoff_count,
                                   handoff_delay_mean, handoff_delay_p50, handoff_delay_p95, service_time_mean,
                                   frac_transmitting, frac_collided, frac_handoff, frac_backlogged, frac_idle, pairs)

const char* artifact_version() { return CRH_VERSION; }

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw InvalidParameter("unknown format '" + s + "' (expected csv|json)");
}

std::string extension(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

namespace {

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(10);
    os << v.get<double>();
    return os.str();
  }
  return v.dump();
}

const char* kind_name(markov::StateKind k) {
  switch (k) {
    case markov::StateKind::Idle: return "idle";
    case markov::StateKind::Transmitting: return "transmitting";
    case markov::StateKind::Collided: return "collided";
    case markov::StateKind::Backlogged: return "backlogged";
  }
  return "?";
}

void add_metric_columns(std::vector<std::string>& cols) {
  for (const auto& n : metric_names()) cols.push_back(n);
}

void add_metric_cells(std::vector<json>& row, const ReplicationMetrics& m) {
  for (const auto& n : metric_names()) row.push_back(metric_value(m, n));
}

Table replications_table(const MetricsReport& r) {
  Table t{"replications", {"replication", "measured_slots"}, {}};
  add_metric_columns(t.columns);
  for (const auto& m : r.replications) {
    std::vector<json> row{m.replication, m.measured_slots};
    add_metric_cells(row, m);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table summary_table(const MetricsReport& r) {
  Table t{"summary", {"metric", "mean", "sd", "ci95", "n"}, {}};
  for (const auto& n : metric_names()) {
    const auto& s = r.summary.at(n);
    t.rows.push_back({n, s.mean, s.sd, s.ci95, s.n});
  }
  return t;
}

Table pairs_table(const MetricsReport& r) {
  Table t{"pairs", {"replication"}, {}};
  const std::vector<std::string> fields = {
      "pair",           "su_rate_pps",       "arrival_prob",       "measured_slots",   "transmitting_slots",
      "collided_slots", "handoff_slots",     "backlogged_slots",   "idle_slots",       "delivered_frame_slots",
      "wasted_frame_slots", "in_flight_slots", "frames_delivered", "packets_delivered", "pu_collisions",
      "su_su_collisions", "type1_collisions", "prediction_misses", "handoffs",         "proactive_handoffs",
      "mean_handoff_delay", "mean_service_time"};
  t.columns.insert(t.columns.end(), fields.begin(), fields.end());
  for (const auto& m : r.replications) {
    for (const auto& p : m.pairs) {
      json j = p;
      j["mean_handoff_delay"] = p.mean_handoff_delay();
      j["mean_service_time"] = p.mean_service_time();
      std::vector<json> row{m.replication};
      for (const auto& f : fields) row.push_back(j.at(f));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table pair_summary_table(const MetricsReport& r) {
  Table t{"pair_summary",
          {"pair", "su_rate_pps", "handoffs", "mean_handoff_delay", "mean_service_time", "throughput_pps"},
          {}};
  for (const auto& p : r.pairs)
    t.rows.push_back({p.pair, p.su_rate_pps, p.handoffs, p.mean_handoff_delay, p.mean_service_time, p.throughput_pps});
  return t;
}

json manifest(const std::string& command, const json& input, std::uint64_t seed, const ReportBundle& b,
              const std::vector<std::string>& warnings) {
  json tables = json::array();
  for (const auto& t : b.tables) tables.push_back(t.name);
  return json{{"tool", "crh"},     {"version", artifact_version()}, {"command", command}, {"seed", seed},
              {"input", input},    {"tables", tables},              {"warnings", warnings}};
}

Table points_table(const std::string& name, const AnalyzeResult& a) {
  Table t{name,
          {"ts", "s", "p", "v", "u", "h", "c", "q", "num_channels", "theta", "p000", "p001", "states", "degenerate",
           "simulated", "sim_theta", "sim_ci95", "rel_diff"},
          {}};
  for (const auto& pt : a.points) {
    const auto& c = pt.chain;
    const json sim_theta = pt.simulated ? json(pt.sim_theta) : json(nullptr);
    const json sim_ci = pt.simulated ? json(pt.sim_ci95) : json(nullptr);
    const json rel = pt.simulated ? json(pt.rel_diff) : json(nullptr);
    t.rows.push_back({c.ts, c.s, c.p, c.v, c.u, c.h, c.c, c.q, c.num_channels, pt.theta, pt.steady.at(0, 0, 0),
                      pt.steady.at(0, 0, 1), pt.steady.size(), pt.steady.degenerate, pt.simulated, sim_theta, sim_ci,
                      rel});
  }
  return t;
}

Table states_table(const AnalyzeResult& a) {
  Table t{"states", {"point", "ts", "s", "i", "j", "k", "kind", "prob"}, {}};
  for (std::size_t n = 0; n < a.points.size(); ++n) {
    const auto& pt = a.points[n];
    for (const auto& [st, pr] : pt.steady.probs)
      t.rows.push_back({n, pt.chain.ts, pt.chain.s, st.i, st.j, st.k, kind_name(markov::classify(st)), pr});
  }
  return t;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

nlohmann::ordered_json to_json(const Table& t) {
  auto scalar = [](const json& v) -> nlohmann::ordered_json {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    return nullptr;
  };
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = scalar(row[i]);
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::string render(const Table& t, OutputFormat f) {
  return f == OutputFormat::Csv ? to_csv(t) : to_json(t).dump(2) + "\n";
}

const Table& ReportBundle::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw InvalidParameter("no table named '" + name + "'");
}

std::vector<std::string> write_bundle(const ReportBundle& b, const std::string& dir, OutputFormat f) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory '" + dir + "'");
  std::vector<std::string> written;
  auto put = [&](const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    written.push_back(path.string());
  };
  for (const auto& t : b.tables) put(fs::path(dir) / (t.name + "." + extension(f)), render(t, f));
  put(fs::path(dir) / "manifest.json", b.manifest.dump(2) + "\n");
  return written;
}

json to_json(const MetricsReport& r) {
  json summary = json::object();
  for (const auto& [k, v] : r.summary) summary[k] = v;
  return json{{"config", to_json(r.config)},
              {"replications", r.replications},
              {"summary", summary},
              {"pairs", r.pairs},
              {"warnings", r.warnings}};
}

MetricsReport metrics_report_from_json(const json& j) {
  MetricsReport r;
  r.config = scenario_from_json(j.at("config"));
  r.replications = j.at("replications").get<std::vector<ReplicationMetrics>>();
  for (const auto& [k, v] : j.at("summary").items()) r.summary[k] = v.get<Summary>();
  r.pairs = j.at("pairs").get<std::vector<PairSummary>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

ReportBundle run_bundle(const MetricsReport& r) {
  ReportBundle b;
  b.command = "run";
  b.tables = {replications_table(r), summary_table(r), pairs_table(r), pair_summary_table(r)};
  b.manifest = manifest("run", to_json(r.config), r.config.seed, b, r.warnings);
  return b;
}

ReportBundle sweep_bundle(const SweepResult& s) {
  ReportBundle b;
  b.command = "sweep";
  Table rows{"sweep", {"axis", "value", "replication"}, {}};
  add_metric_columns(rows.columns);
  Table summ{"sweep_summary", {"axis", "value", "metric", "mean", "sd", "ci95", "n"}, {}};
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < s.reports.size(); ++i) {
    const auto& rep = s.reports[i];
    for (const auto& m : rep.replications) {
      std::vector<json> row{s.axis, s.values[i], m.replication};
      add_metric_cells(row, m);
      rows.rows.push_back(std::move(row));
    }
    for (const auto& n : metric_names()) {
      const auto& sm = rep.summary.at(n);
      summ.rows.push_back({s.axis, s.values[i], n, sm.mean, sm.sd, sm.ci95, sm.n});
    }
    for (const auto& w : rep.warnings)
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
  b.tables = {rows, summ};
  json input = {{"base", to_json(s.base)}, {"axis", s.axis}, {"values", s.values}};
  b.manifest = manifest("sweep", input, s.base.seed, b, warnings);
  return b;
}

ReportBundle analyze_bundle(const AnalyzeResult& a) {
  ReportBundle b;
  b.command = "analyze";
  b.tables = {points_table("analytic", a), states_table(a)};
  b.manifest = manifest("analyze", to_json(a.request), a.request.seed, b, {});
  b.manifest["max_abs_rel_diff"] = a.max_abs_rel_diff;
  return b;
}

ReportBundle validate_bundle(const ValidationResult& v) {
  ReportBundle b;
  b.command = "validate";
  Table checks{"criteria", {"check", "value", "limit", "passed"}, {}};
  for (const auto& c : v.checks) checks.rows.push_back({c.name, c.value, c.limit, c.passed});
  b.tables = {points_table("validation", v.analysis), checks};
  b.manifest = manifest("validate", to_json(v.options), v.options.seed, b, {});
  b.manifest["passed"] = v.passed;
  return b;
}

}  // namespace crh

#include "crh/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace crh {

using nlohmann::json;

std::uint64_t ScenarioConfig::warmup_slots() const noexcept {
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(duration_slots) * warmup_fraction));
}

namespace {

std::string join_errors(const std::vector<FieldError>& errors) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& e : errors) os << "\n  " << e.field << ": " << e.message;
  return os.str();
}

bool is_prob(double v) { return v >= 0.0 && v <= 1.0; }

template <typename T>
void read(const json& j, const char* key, T& out, std::vector<FieldError>& errs) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    errs.push_back({key, "wrong type (" + std::string(it->type_name()) + ")"});
  }
}

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out, std::vector<FieldError>& errs) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_null()) {
    out.reset();
    return;
  }
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    errs.push_back({key, "wrong type (" + std::string(it->type_name()) + ")"});
  }
}

template <typename E, typename F>
void read_enum(const json& j, const char* key, E& out, F parse, std::vector<FieldError>& errs) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_string()) {
    errs.push_back({key, "expected a string"});
    return;
  }
  try {
    out = parse(it->template get<std::string>());
  } catch (const InvalidParameter& e) {
    errs.push_back({key, e.what()});
  }
}

const std::vector<std::string> kFields = {
    "num_su_pairs",     "num_channels",     "slot_seconds",   "slots_per_frame",
    "frames_per_packet", "mini_slots",      "tau_low",        "tau_high",
    "theta",            "su_rate_pps",      "su_arrival_prob", "su_rates_pps",
    "su_rate_range",    "su_min_gap",       "pu_rate_pps",    "pu_arrival_prob",
    "pu_rate_spread",   "pu_packet_length", "pu_length_model", "handoff_mode",
    "coordination",     "selection",        "chi",            "sensing_delay_slots",
    "seed",             "duration_slots",   "replications",   "warmup_fraction",
};

}  // namespace

ConfigError::ConfigError(std::vector<FieldError> errors)
    : InvalidParameter(join_errors(errors)), errors_(std::move(errors)) {}

std::vector<FieldError> validate(const ScenarioConfig& c) {
  std::vector<FieldError> e;
  auto bad = [&](const char* f, const std::string& m) { e.push_back({f, m}); };
  if (c.num_su_pairs < 1) bad("num_su_pairs", "must be >= 1");
  if (c.num_channels < 1) bad("num_channels", "must be >= 1");
  if (!(c.slot_seconds > 0.0)) bad("slot_seconds", "must be > 0");
  if (c.slots_per_frame < 1) bad("slots_per_frame", "must be >= 1");
  if (c.frames_per_packet < 1) bad("frames_per_packet", "must be >= 1");
  if (c.mini_slots < 1) bad("mini_slots", "must be >= 1");
  if (!is_prob(c.tau_low)) bad("tau_low", "must be in [0, 1]");
  if (!is_prob(c.tau_high)) bad("tau_high", "must be in [0, 1]");
  if (!is_prob(c.theta)) bad("theta", "must be in [0, 1]");
  if (is_prob(c.tau_low) && is_prob(c.tau_high) && c.tau_low > c.tau_high)
    bad("tau_low", "must not exceed tau_high");
  if (!(c.su_rate_pps >= 0.0)) bad("su_rate_pps", "must be >= 0");
  if (c.su_arrival_prob && !is_prob(*c.su_arrival_prob)) bad("su_arrival_prob", "must be in [0, 1]");
  if (!c.su_rates_pps.empty()) {
    if (static_cast<int>(c.su_rates_pps.size()) != c.num_su_pairs)
      bad("su_rates_pps", "needs exactly num_su_pairs entries");
    for (double r : c.su_rates_pps)
      if (!(r >= 0.0)) {
        bad("su_rates_pps", "rates must be >= 0");
        break;
      }
  }
  if (c.su_rate_range) {
    const auto [lo, hi] = *c.su_rate_range;
    if (!(lo >= 0.0 && hi >= lo)) bad("su_rate_range", "needs 0 <= lo <= hi");
  }
  if (c.su_min_gap < 0) bad("su_min_gap", "must be >= 0");
  if (!(c.pu_rate_pps >= 0.0)) bad("pu_rate_pps", "must be >= 0");
  if (c.pu_arrival_prob && !is_prob(*c.pu_arrival_prob)) bad("pu_arrival_prob", "must be in [0, 1]");
  if (!(c.pu_rate_spread >= 0.0 && c.pu_rate_spread <= 1.0)) bad("pu_rate_spread", "must be in [0, 1]");
  if (!(c.pu_packet_length >= 1.0)) bad("pu_packet_length", "must be >= 1 slot");
  if (c.pu_length_model == PacketLengthModel::Fixed && std::floor(c.pu_packet_length) != c.pu_packet_length)
    bad("pu_packet_length", "must be an integer for the fixed length model");
  if (!is_prob(c.chi)) bad("chi", "must be in [0, 1]");
  if (c.sensing_delay_slots < 0 || c.sensing_delay_slots > c.slots_per_frame)
    bad("sensing_delay_slots", "must be in [0, slots_per_frame] (0 = end of frame)");
  if (c.duration_slots < 1) bad("duration_slots", "must be >= 1");
  if (c.replications < 1) bad("replications", "must be >= 1");
  if (!(c.warmup_fraction >= 0.0 && c.warmup_fraction < 1.0)) bad("warmup_fraction", "must be in [0, 1)");
  else if (c.warmup_slots() >= c.duration_slots) bad("duration_slots", "must exceed the warmup");
  return e;
}

void validate_or_throw(const ScenarioConfig& cfg) {
  auto errs = validate(cfg);
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["num_su_pairs"] = c.num_su_pairs;
  j["num_channels"] = c.num_channels;
  j["slot_seconds"] = c.slot_seconds;
  j["slots_per_frame"] = c.slots_per_frame;
  j["frames_per_packet"] = c.frames_per_packet;
  j["mini_slots"] = c.mini_slots;
  j["tau_low"] = c.tau_low;
  j["tau_high"] = c.tau_high;
  j["theta"] = c.theta;
  j["su_rate_pps"] = c.su_rate_pps;
  j["su_arrival_prob"] = c.su_arrival_prob ? json(*c.su_arrival_prob) : json(nullptr);
  j["su_rates_pps"] = c.su_rates_pps;
  j["su_rate_range"] =
      c.su_rate_range ? json::array({c.su_rate_range->first, c.su_rate_range->second}) : json(nullptr);
  j["su_min_gap"] = c.su_min_gap;
  j["pu_rate_pps"] = c.pu_rate_pps;
  j["pu_arrival_prob"] = c.pu_arrival_prob ? json(*c.pu_arrival_prob) : json(nullptr);
  j["pu_rate_spread"] = c.pu_rate_spread;
  j["pu_packet_length"] = c.pu_packet_length;
  j["pu_length_model"] = to_string(c.pu_length_model);
  j["handoff_mode"] = to_string(c.handoff_mode);
  j["coordination"] = to_string(c.coordination);
  j["selection"] = to_string(c.selection);
  j["chi"] = c.chi;
  j["sensing_delay_slots"] = c.sensing_delay_slots;
  j["seed"] = c.seed;
  j["duration_slots"] = c.duration_slots;
  j["replications"] = c.replications;
  j["warmup_fraction"] = c.warmup_fraction;
  return j;
}

ScenarioConfig scenario_from_json(const json& j) {
  std::vector<FieldError> errs;
  if (!j.is_object()) throw ConfigError(std::vector<FieldError>{{"<root>", "scenario must be a JSON object"}});
  const std::set<std::string> known(kFields.begin(), kFields.end());
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) errs.push_back({key, "unknown field"});

  ScenarioConfig c;
  read(j, "num_su_pairs", c.num_su_pairs, errs);
  read(j, "num_channels", c.num_channels, errs);
  read(j, "slot_seconds", c.slot_seconds, errs);
  read(j, "slots_per_frame", c.slots_per_frame, errs);
  read(j, "frames_per_packet", c.frames_per_packet, errs);
  read(j, "mini_slots", c.mini_slots, errs);
  read(j, "tau_low", c.tau_low, errs);
  read(j, "tau_high", c.tau_high, errs);
  read(j, "theta", c.theta, errs);
  read(j, "su_rate_pps", c.su_rate_pps, errs);
  read_opt(j, "su_arrival_prob", c.su_arrival_prob, errs);
  read(j, "su_rates_pps", c.su_rates_pps, errs);
  if (auto it = j.find("su_rate_range"); it != j.end()) {
    if (it->is_null()) {
      c.su_rate_range.reset();
    } else if (it->is_array() && it->size() == 2 && (*it)[0].is_number() && (*it)[1].is_number()) {
      c.su_rate_range = std::make_pair((*it)[0].get<double>(), (*it)[1].get<double>());
    } else {
      errs.push_back({"su_rate_range", "expected [lo, hi] or null"});
    }
  }
  read(j, "su_min_gap", c.su_min_gap, errs);
  read(j, "pu_rate_pps", c.pu_rate_pps, errs);
  read_opt(j, "pu_arrival_prob", c.pu_arrival_prob, errs);
  read(j, "pu_rate_spread", c.pu_rate_spread, errs);
  read(j, "pu_packet_length", c.pu_packet_length, errs);
  read_enum(j, "pu_length_model", c.pu_length_model, packet_length_model_from_string, errs);
  read_enum(j, "handoff_mode", c.handoff_mode, handoff_mode_from_string, errs);
  read_enum(j, "coordination", c.coordination, coordination_from_string, errs);
  read_enum(j, "selection", c.selection, selection_from_string, errs);
  read(j, "chi", c.chi, errs);
  read(j, "sensing_delay_slots", c.sensing_delay_slots, errs);
  read(j, "seed", c.seed, errs);
  read(j, "duration_slots", c.duration_slots, errs);
  read(j, "replications", c.replications, errs);
  read(j, "warmup_fraction", c.warmup_fraction, errs);

  if (errs.empty()) errs = validate(c);
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

void set_field(ScenarioConfig& cfg, const std::string& name, const json& value) {
  const auto& f = scenario_fields();
  if (std::find(f.begin(), f.end(), name) == f.end()) throw ConfigError(std::vector<FieldError>{{name, "unknown field"}});
  json j = to_json(cfg);
  j[name] = value;
  cfg = scenario_from_json(j);
}

const std::vector<std::string>& scenario_fields() { return kFields; }

bool is_sweepable(const std::string& name) {
  const auto& f = scenario_fields();
  return std::find(f.begin(), f.end(), name) != f.end() && name != "su_rates_pps" && name != "su_rate_range";
}

ResolvedRates resolve_rates(const ScenarioConfig& cfg) {
  ResolvedRates r;
  const int n = cfg.num_su_pairs, m = cfg.num_channels;

  r.su_rate_pps.assign(n, cfg.su_rate_pps);
  if (!cfg.su_rates_pps.empty()) {
    r.su_rate_pps = cfg.su_rates_pps;
  } else if (cfg.su_rate_range) {
    const auto [lo, hi] = *cfg.su_rate_range;
    for (int i = 0; i < n; ++i) {
      RandomStream draw(cfg.seed, StreamKind::ScenarioDraw, static_cast<std::uint64_t>(i), 0);
      r.su_rate_pps[i] = lo + (hi - lo) * draw.uniform();
    }
  }
  r.su_prob.resize(n);
  bool su_clamped = false;
  for (int i = 0; i < n; ++i) {
    if (cfg.su_arrival_prob && cfg.su_rates_pps.empty() && !cfg.su_rate_range) {
      r.su_prob[i] = *cfg.su_arrival_prob;
      r.su_rate_pps[i] = r.su_prob[i] / cfg.slot_seconds;
    } else {
      bool c = false;
      r.su_prob[i] = rate_to_probability(r.su_rate_pps[i], cfg.slot_seconds, &c);
      su_clamped = su_clamped || c;
    }
  }
  if (su_clamped)
    r.warnings.push_back("SU arrival rate exceeds one packet per slot; probability clamped to 1 (saturation)");

  const double base = cfg.pu_arrival_prob ? *cfg.pu_arrival_prob : cfg.pu_rate_pps * cfg.slot_seconds;
  r.pu_prob.resize(m);
  bool pu_clamped = false;
  for (int ch = 0; ch < m; ++ch) {
    const double pos = m > 1 ? 2.0 * ch / (m - 1) - 1.0 : 0.0;
    double p = base * (1.0 + cfg.pu_rate_spread * pos);
    if (p > 1.0) {
      p = 1.0;
      pu_clamped = true;
    }
    r.pu_prob[ch] = p;
  }
  if (pu_clamped) r.warnings.push_back("PU arrival probability clamped to 1 on at least one channel");
  return r;
}

}  // namespace crh

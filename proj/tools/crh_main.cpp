// Command-line front end. Everything goes through the C API in crhandoff.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crhandoff/crhandoff.h"
#include "json.hpp"

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kAcceptance = 3 };

struct Failure {
  int code;
  std::string message;
};

int exit_for(crh_status st) {
  switch (st) {
    case CRH_OK: return kOk;
    case CRH_ERR_CONFIG:
    case CRH_ERR_UNKNOWN_AXIS:
    case CRH_ERR_INVALID_ARGUMENT: return kConfig;
    default: return kOther;
  }
}

void check(crh_status st) {
  if (st != CRH_OK) throw Failure{exit_for(st), crh_last_error()};
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  crh_string_free(s);
  return out;
}

struct ScenarioDeleter {
  void operator()(crh_scenario* s) const { crh_scenario_destroy(s); }
};
struct ReportDeleter {
  void operator()(crh_report* r) const { crh_report_destroy(r); }
};
using Scenario = std::unique_ptr<crh_scenario, ScenarioDeleter>;
using Report = std::unique_ptr<crh_report, ReportDeleter>;

std::string kebab(std::string s) {
  for (auto& ch : s)
    if (ch == '_') ch = '-';
  return s;
}

// Flag text to a JSON value: JSON when it parses, a bare comma list becomes
// an array, anything else is a string.
json flag_value(const std::string& text) {
  auto parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  if (text.find(',') != std::string::npos) {
    auto list = json::array();
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) list.push_back(flag_value(item));
    return list;
  }
  return text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kConfig, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Failure{kConfig, "'" + path + "' is not valid JSON"};
  if (!j.is_object()) throw Failure{kConfig, "'" + path + "' must hold a JSON object"};
  return j;
}

// Raw flag text per JSON key, filled by CLI11.
using FlagTexts = std::map<std::string, std::string>;

void add_key_flags(CLI::App* sub, const std::vector<std::string>& keys, FlagTexts& texts,
                   const std::map<std::string, std::string>& aliases = {}) {
  for (const auto& key : keys) {
    std::string names = "--" + kebab(key);
    if (auto it = aliases.find(key); it != aliases.end()) names += ",--" + it->second;
    sub->add_option(names, texts[key], "JSON value for '" + key + "'");
  }
}

// Keys that hold lists; a single flag value becomes a one-element list.
bool is_list_key(const std::string& key) {
  return key == "s_values" || key == "ts_values" || key == "su_rates_pps";
}

json collect(CLI::App* sub, const FlagTexts& texts) {
  json out = json::object();
  for (const auto& [key, text] : texts) {
    if (sub->count("--" + kebab(key)) == 0) continue;
    auto v = flag_value(text);
    if (is_list_key(key) && !v.is_array()) v = json::array({v});
    out[key] = v;
  }
  return out;
}

struct Common {
  std::string config;
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON file with the inputs; flags override it");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "Directory for one file per table plus manifest.json");
}

std::vector<std::string> scenario_keys() {
  char* s = nullptr;
  check(crh_scenario_fields(&s));
  return json::parse(take_string(s)).get<std::vector<std::string>>();
}

Scenario build_scenario(const Common& common, const json& overrides) {
  json j = common.config.empty() ? json::object() : read_json_file(common.config);
  j.update(overrides);
  crh_scenario* raw = nullptr;
  check(crh_scenario_from_json(j.dump().c_str(), &raw));
  return Scenario(raw);
}

void emit(const Report& r, const Common& common, const std::string& table) {
  if (!common.out.empty()) {
    check(crh_report_write(r.get(), common.out.c_str(), common.format.c_str()));
    char* names = nullptr;
    check(crh_report_table_names(r.get(), &names));
    std::cerr << "wrote " << take_string(names) << " and manifest.json to " << common.out << "\n";
    return;
  }
  char* s = nullptr;
  check(crh_report_to_string(r.get(), table.c_str(), common.format.c_str(), &s));
  std::cout << take_string(s);
}

void print_warnings(const Report& r) {
  char* m = nullptr;
  check(crh_report_manifest(r.get(), &m));
  const auto manifest = json::parse(take_string(m));
  if (auto it = manifest.find("warnings"); it != manifest.end())
    for (const auto& w : *it) std::cerr << "warning: " << w.get<std::string>() << "\n";
}

const std::vector<std::string> kAnalyzeKeys = {
    "p", "s", "h", "c", "q", "u", "ts", "num_channels", "v", "derive_u", "s_values", "ts_values",
    "sim_pairs", "sim_coordination", "duration_slots", "replications", "seed"};

const std::vector<std::string> kValidateKeys = {"s_values", "ts_values",   "p",     "v",
                                                "num_channels", "c",       "sim_pairs",
                                                "duration_slots", "replications", "seed", "tolerance"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrum handoff simulator and Markov analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", crh_version());

  auto* run = app.add_subcommand("run", "Simulate one scenario");
  auto* sweep = app.add_subcommand("sweep", "Simulate a scenario over a range of one field");
  auto* an = app.add_subcommand("analyze", "Evaluate the Markov chain, optionally against simulation");
  auto* val = app.add_subcommand("validate", "Check simulation against the chain; exit 3 on failure");

  Common run_c, sweep_c, an_c, val_c;
  FlagTexts run_f, sweep_f, an_f, val_f;
  std::string axis, values;
  bool simulate = false;

  std::vector<std::string> fields;
  try {
    fields = scenario_keys();
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }

  add_common(run, run_c);
  add_key_flags(run, fields, run_f);

  add_common(sweep, sweep_c);
  add_key_flags(sweep, fields, sweep_f);
  sweep->add_option("--axis", axis, "Field to sweep")->required();
  sweep->add_option("--values", values, "JSON array or comma list of values")->required();

  an->set_help_flag("--help", "Print this help message and exit");  // -h would clash with the h field
  add_common(an, an_c);
  add_key_flags(an, kAnalyzeKeys, an_f);
  an->add_flag("--simulate", simulate, "Also run the matched simulation per point");

  add_common(val, val_c);
  add_key_flags(val, kValidateKeys, val_f, {{"duration_slots", "duration"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      auto s = build_scenario(run_c, collect(run, run_f));
      crh_report* raw = nullptr;
      check(crh_run(s.get(), &raw));
      Report r(raw);
      print_warnings(r);
      emit(r, run_c, "summary");
    } else if (*sweep) {
      auto s = build_scenario(sweep_c, collect(sweep, sweep_f));
      crh_report* raw = nullptr;
      auto list = flag_value(values);
      if (!list.is_array()) list = json::array({list});
      check(crh_sweep(s.get(), axis.c_str(), list.dump().c_str(), &raw));
      Report r(raw);
      print_warnings(r);
      emit(r, sweep_c, "sweep_summary");
    } else if (*an) {
      json req = an_c.config.empty() ? json::object() : read_json_file(an_c.config);
      req.update(collect(an, an_f));
      if (simulate) req["simulate"] = true;
      crh_report* raw = nullptr;
      check(crh_analyze(req.dump().c_str(), &raw));
      Report r(raw);
      emit(r, an_c, "analytic");
    } else if (*val) {
      json opt = val_c.config.empty() ? json::object() : read_json_file(val_c.config);
      opt.update(collect(val, val_f));
      crh_report* raw = nullptr;
      int passed = 0;
      check(crh_validate(opt.dump().c_str(), &raw, &passed));
      Report r(raw);
      emit(r, val_c, "criteria");
      if (!passed) {
        std::cerr << "validation failed\n";
        return kAcceptance;
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kOk;
}

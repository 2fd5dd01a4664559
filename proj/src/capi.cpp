#include "crhandoff/crhandoff.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "crh/experiments.hpp"
#include "crh/report.hpp"

struct crh_scenario {
  crh::ScenarioConfig cfg;
};

struct crh_report {
  crh::ReportBundle bundle;
  std::optional<nlohmann::json> metrics;
};

namespace {

thread_local std::string g_error;

crh_status fail(crh_status code, const std::string& msg) {
  g_error = msg;
  return code;
}

char* dup(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename F>
crh_status guarded(F&& f) {
  g_error.clear();
  try {
    return f();
  } catch (const crh::UnknownAxis& e) {
    return fail(CRH_ERR_UNKNOWN_AXIS, e.what());
  } catch (const crh::ConfigError& e) {
    return fail(CRH_ERR_CONFIG, e.what());
  } catch (const crh::InvalidParameter& e) {
    return fail(CRH_ERR_CONFIG, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CRH_ERR_INVALID_ARGUMENT, std::string("bad JSON: ") + e.what());
  } catch (const std::runtime_error& e) {
    return fail(CRH_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(CRH_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CRH_ERR_INTERNAL, "unknown error");
  }
}

crh_status need(const void* p, const char* what) {
  return p ? CRH_OK : fail(CRH_ERR_INVALID_ARGUMENT, std::string(what) + " is null");
}

#define CRH_NEED(p)                                       \
  do {                                                    \
    if (crh_status st_ = need((p), #p); st_ != CRH_OK) return st_; \
  } while (0)

crh_status emit(char** out, const std::string& s) {
  *out = dup(s);
  return *out ? CRH_OK : fail(CRH_ERR_INTERNAL, "out of memory");
}

}  // namespace

extern "C" {

const char* crh_version(void) { return crh::artifact_version(); }
const char* crh_last_error(void) { return g_error.c_str(); }
void crh_string_free(char* s) { std::free(s); }

crh_status crh_scenario_create(crh_scenario** out) {
  CRH_NEED(out);
  return guarded([&] {
    *out = new crh_scenario{};
    return CRH_OK;
  });
}

crh_status crh_scenario_from_json(const char* json, crh_scenario** out) {
  CRH_NEED(json);
  CRH_NEED(out);
  return guarded([&] {
    auto cfg = crh::scenario_from_json(nlohmann::json::parse(json));
    *out = new crh_scenario{cfg};
    return CRH_OK;
  });
}

crh_status crh_scenario_set(crh_scenario* s, const char* field, const char* value_json) {
  CRH_NEED(s);
  CRH_NEED(field);
  CRH_NEED(value_json);
  return guarded([&] {
    crh::set_field(s->cfg, field, nlohmann::json::parse(value_json));
    return CRH_OK;
  });
}

crh_status crh_scenario_to_json(const crh_scenario* s, char** out) {
  CRH_NEED(s);
  CRH_NEED(out);
  return guarded([&] { return emit(out, crh::to_json(s->cfg).dump()); });
}

crh_status crh_scenario_diagnostics(const crh_scenario* s, char** out) {
  CRH_NEED(s);
  CRH_NEED(out);
  return guarded([&] {
    auto arr = nlohmann::json::array();
    for (const auto& e : crh::validate(s->cfg)) arr.push_back({{"field", e.field}, {"message", e.message}});
    return emit(out, arr.dump());
  });
}

crh_status crh_scenario_fields(char** out) {
  CRH_NEED(out);
  return guarded([&] { return emit(out, nlohmann::json(crh::scenario_fields()).dump()); });
}

void crh_scenario_destroy(crh_scenario* s) { delete s; }

crh_status crh_run(const crh_scenario* s, crh_report** out) {
  CRH_NEED(s);
  CRH_NEED(out);
  return guarded([&] {
    const auto rep = crh::run_scenario(s->cfg);
    *out = new crh_report{crh::run_bundle(rep), crh::to_json(rep)};
    return CRH_OK;
  });
}

crh_status crh_sweep(const crh_scenario* base, const char* axis, const char* values_json, crh_report** out) {
  CRH_NEED(base);
  CRH_NEED(axis);
  CRH_NEED(values_json);
  CRH_NEED(out);
  return guarded([&] {
    const auto values = nlohmann::json::parse(values_json);
    if (!values.is_array()) return fail(CRH_ERR_INVALID_ARGUMENT, "values must be a JSON array");
    const auto res = crh::run_sweep(base->cfg, axis, values.get<std::vector<nlohmann::json>>());
    *out = new crh_report{crh::sweep_bundle(res), std::nullopt};
    return CRH_OK;
  });
}

crh_status crh_analyze(const char* request_json, crh_report** out) {
  CRH_NEED(request_json);
  CRH_NEED(out);
  return guarded([&] {
    const auto req = crh::analyze_request_from_json(nlohmann::json::parse(request_json));
    *out = new crh_report{crh::analyze_bundle(crh::analyze(req)), std::nullopt};
    return CRH_OK;
  });
}

crh_status crh_validate(const char* options_json, crh_report** out, int* passed) {
  CRH_NEED(out);
  CRH_NEED(passed);
  return guarded([&] {
    crh::ValidationOptions opt;
    if (options_json) opt = crh::validation_options_from_json(nlohmann::json::parse(options_json));
    const auto res = crh::validate_against_chain(opt);
    *passed = res.passed ? 1 : 0;
    *out = new crh_report{crh::validate_bundle(res), std::nullopt};
    return CRH_OK;
  });
}

crh_status crh_report_table_names(const crh_report* r, char** out_json) {
  CRH_NEED(r);
  CRH_NEED(out_json);
  return guarded([&] {
    auto arr = nlohmann::json::array();
    for (const auto& t : r->bundle.tables) arr.push_back(t.name);
    return emit(out_json, arr.dump());
  });
}

crh_status crh_report_to_string(const crh_report* r, const char* table, const char* format, char** out) {
  CRH_NEED(r);
  CRH_NEED(table);
  CRH_NEED(format);
  CRH_NEED(out);
  return guarded([&] {
    crh::OutputFormat f;
    try {
      f = crh::output_format_from_string(format);
    } catch (const crh::InvalidParameter& e) {
      return fail(CRH_ERR_INVALID_ARGUMENT, e.what());
    }
    for (const auto& t : r->bundle.tables)
      if (t.name == table) return emit(out, crh::render(t, f));
    return fail(CRH_ERR_INVALID_ARGUMENT, std::string("no table named '") + table + "'");
  });
}

crh_status crh_report_manifest(const crh_report* r, char** out) {
  CRH_NEED(r);
  CRH_NEED(out);
  return guarded([&] { return emit(out, r->bundle.manifest.dump(2)); });
}

crh_status crh_report_metrics_json(const crh_report* r, char** out) {
  CRH_NEED(r);
  CRH_NEED(out);
  if (!r->metrics) return fail(CRH_ERR_INVALID_ARGUMENT, "this report has no metrics document");
  return guarded([&] { return emit(out, r->metrics->dump(2)); });
}

crh_status crh_report_write(const crh_report* r, const char* dir, const char* format) {
  CRH_NEED(r);
  CRH_NEED(dir);
  CRH_NEED(format);
  return guarded([&] {
    crh::OutputFormat f;
    try {
      f = crh::output_format_from_string(format);
    } catch (const crh::InvalidParameter& e) {
      return fail(CRH_ERR_INVALID_ARGUMENT, e.what());
    }
    crh::write_bundle(r->bundle, dir, f);
    if (r->metrics) {
      const std::string path = std::string(dir) + "/metrics.json";
      std::FILE* fp = std::fopen(path.c_str(), "wb");
      if (!fp) return fail(CRH_ERR_IO, "cannot write '" + path + "'");
      const auto body = r->metrics->dump(2) + "\n";
      const bool ok = std::fwrite(body.data(), 1, body.size(), fp) == body.size();
      std::fclose(fp);
      if (!ok) return fail(CRH_ERR_IO, "cannot write '" + path + "'");
    }
    return CRH_OK;
  });
}

void crh_report_destroy(crh_report* r) { delete r; }

}  // extern "C"

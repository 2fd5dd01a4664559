#ifndef CRHANDOFF_H
#define CRHANDOFF_H

/* C interface to the spectrum-handoff simulator and its Markov analytics.
 *
 * Every call returns a crh_status. On failure, crh_last_error() describes the
 * problem for the calling thread until the next call on that thread. Strings
 * returned through char** are owned by the caller and must be released with
 * crh_string_free(). Handles are released with their destroy function. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CRH_API __declspec(dllexport)
#else
#define CRH_API __attribute__((visibility("default")))
#endif

typedef enum crh_status {
  CRH_OK = 0,
  CRH_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad JSON, unknown format or table */
  CRH_ERR_CONFIG = 2,           /* a configuration failed validation */
  CRH_ERR_IO = 3,               /* output could not be written */
  CRH_ERR_UNKNOWN_AXIS = 4,     /* sweep over a field that cannot be swept */
  CRH_ERR_INTERNAL = 5
} crh_status;

typedef struct crh_scenario crh_scenario;
typedef struct crh_report crh_report;

CRH_API const char* crh_version(void);
CRH_API const char* crh_last_error(void);
CRH_API void crh_string_free(char* s);

/* Scenarios. Field names and value types follow the JSON schema; see
 * crh_scenario_fields() for the accepted keys. */
CRH_API crh_status crh_scenario_create(crh_scenario** out);
CRH_API crh_status crh_scenario_from_json(const char* json, crh_scenario** out);
/* value_json is one JSON value, e.g. "20", "\"greedy\"", "[1,2]" or "null". */
CRH_API crh_status crh_scenario_set(crh_scenario* s, const char* field, const char* value_json);
CRH_API crh_status crh_scenario_to_json(const crh_scenario* s, char** out);
/* JSON array of {"field","message"} objects; empty when the scenario is valid. */
CRH_API crh_status crh_scenario_diagnostics(const crh_scenario* s, char** out);
CRH_API crh_status crh_scenario_fields(char** out);
CRH_API void crh_scenario_destroy(crh_scenario* s);

/* Experiments. Each produces a report holding one or more tables and a
 * manifest. */
CRH_API crh_status crh_run(const crh_scenario* s, crh_report** out);
/* values_json: JSON array of values for the swept field. */
CRH_API crh_status crh_sweep(const crh_scenario* base, const char* axis, const char* values_json,
                             crh_report** out);
/* request_json: chain parameters and options, see the README. */
CRH_API crh_status crh_analyze(const char* request_json, crh_report** out);
/* options_json may be NULL for the defaults. *passed is 1 when every check holds. */
CRH_API crh_status crh_validate(const char* options_json, crh_report** out, int* passed);

/* Reports. format is "csv" or "json". */
CRH_API crh_status crh_report_table_names(const crh_report* r, char** out_json);
CRH_API crh_status crh_report_to_string(const crh_report* r, const char* table, const char* format, char** out);
CRH_API crh_status crh_report_manifest(const crh_report* r, char** out);
/* Full MetricsReport as JSON; only reports from crh_run carry one. */
CRH_API crh_status crh_report_metrics_json(const crh_report* r, char** out);
CRH_API crh_status crh_report_write(const crh_report* r, const char* dir, const char* format);
CRH_API void crh_report_destroy(crh_report* r);

#ifdef __cplusplus
}
#endif

#endif

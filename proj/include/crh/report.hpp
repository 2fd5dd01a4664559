#pragma once

#include <string>
#include <vector>

#include "crh/engine.hpp"
#include "crh/experiments.hpp"
#include "json.hpp"

namespace crh {

const char* artifact_version();

enum class OutputFormat { Csv, Json };
OutputFormat output_format_from_string(const std::string& s);
std::string extension(OutputFormat f);

/// Long-format table. Cells are JSON scalars (numbers, strings, booleans or null).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

std::string to_csv(const Table& t);
/// Array of objects keyed by column, in column order.
nlohmann::ordered_json to_json(const Table& t);
std::string render(const Table& t, OutputFormat f);

/// Everything one command produced.
struct ReportBundle {
  std::string command;
  nlohmann::json manifest;
  std::vector<Table> tables;

  const Table& table(const std::string& name) const;
};

/// Writes <dir>/<table>.<ext> for each table and <dir>/manifest.json.
/// Returns the paths written. Throws std::runtime_error when the directory
/// cannot be created or a file cannot be written.
std::vector<std::string> write_bundle(const ReportBundle& b, const std::string& dir, OutputFormat f);

nlohmann::json to_json(const MetricsReport& r);
MetricsReport metrics_report_from_json(const nlohmann::json& j);

ReportBundle run_bundle(const MetricsReport& r);
ReportBundle sweep_bundle(const SweepResult& s);
ReportBundle analyze_bundle(const AnalyzeResult& a);
ReportBundle validate_bundle(const ValidationResult& v);

}  // namespace crh

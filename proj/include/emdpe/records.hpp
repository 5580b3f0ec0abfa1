#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace emdpe {

/// One row of experiment output. Errors are in parameter units; a failed
/// recovery (exception from the estimator) leaves them NaN.
struct TrialRecord {
  std::string experiment;
  double axis_value = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  double pee_total = 0.0;
  double pee_avg = 0.0;
  double max_component_error = 0.0;
  double emd = 0.0;
  double runtime_ms = 0.0;
  int failed = 0;

  bool operator==(const TrialRecord&) const = default;
};

/// Header row, identical to the TrialRecord field names.
std::string csv_header();

std::string to_csv(const std::vector<TrialRecord>& rows);
std::vector<TrialRecord> parse_csv(const std::string& text);

/// Throws std::invalid_argument on an empty table and std::runtime_error if
/// the file cannot be written.
void emit_csv(const std::vector<TrialRecord>& rows, const std::filesystem::path& path);

struct Series {
  std::string name;  // file stem
  std::vector<double> x;
  std::vector<double> y;
};

/// Writes one two-column whitespace-separated file per series into `dir`.
void emit_plotdata(const std::vector<Series>& series, const std::filesystem::path& dir);

/// Plain CSV table with a header; used for per-axis summaries.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);
void emit_table(const Table& table, const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace emdpe

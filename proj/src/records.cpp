#include "emdpe/records.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/classification.hpp>

namespace emdpe {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header() {
  return "experiment,axis_value,trial,seed,algorithm,pee_total,pee_avg,max_component_error,emd,runtime_ms,failed";
}

std::string to_csv(const std::vector<TrialRecord>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += r.experiment + "," + format_number(r.axis_value) + "," + std::to_string(r.trial) + "," +
           std::to_string(r.seed) + "," + r.algorithm + "," + format_number(r.pee_total) + "," +
           format_number(r.pee_avg) + "," + format_number(r.max_component_error) + "," +
           format_number(r.emd) + "," + format_number(r.runtime_ms) + "," + std::to_string(r.failed) + "\n";
  }
  return out;
}

std::vector<TrialRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw std::invalid_argument("parse_csv: bad header");
  std::vector<TrialRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    boost::split(f, line, boost::is_any_of(","));
    if (f.size() != 11) throw std::invalid_argument("parse_csv: expected 11 fields: " + line);
    TrialRecord r;
    r.experiment = f[0];
    r.axis_value = std::stod(f[1]);
    r.trial = std::stoull(f[2]);
    r.seed = std::stoull(f[3]);
    r.algorithm = f[4];
    r.pee_total = std::stod(f[5]);
    r.pee_avg = std::stod(f[6]);
    r.max_component_error = std::stod(f[7]);
    r.emd = std::stod(f[8]);
    r.runtime_ms = std::stod(f[9]);
    r.failed = std::stoi(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void emit_csv(const std::vector<TrialRecord>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: empty table");
  write_text(path, to_csv(rows));
}

void emit_plotdata(const std::vector<Series>& series, const std::filesystem::path& dir) {
  if (series.empty()) throw std::invalid_argument("emit_plotdata: no series");
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("emit_plotdata: ragged series " + s.name);
    std::string text;
    for (std::size_t i = 0; i < s.x.size(); ++i) text += format_number(s.x[i]) + " " + format_number(s.y[i]) + "\n";
    write_text(dir / (s.name + ".dat"), text);
  }
}

void emit_table(const Table& table, const std::filesystem::path& path) {
  if (table.rows.empty()) throw std::invalid_argument("emit_table: empty table");
  std::string text;
  for (std::size_t i = 0; i < table.columns.size(); ++i) text += (i ? "," : "") + table.columns[i];
  text += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + row[i];
    text += "\n";
  }
  write_text(path, text);
}

}  // namespace emdpe

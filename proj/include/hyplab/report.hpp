#pragma once

#include <string>
#include <vector>

#include "hyplab/group.hpp"

namespace hyplab {

// Provenance block shared by every report: which engine ran, on which model,
// with which deterministic inputs.  The timestamp stays empty unless
// explicitly requested so that report bodies are byte-stable across runs.
struct ReportMeta {
  std::string command;
  std::string model;
  double alpha = 0.0;
  double delta = 0.0;
  double c_q = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  double cap = 0.0;
  std::string timestamp;  // empty = omitted
};

// Pre-formatted cells: formatting happens exactly once, so CSV and JSON views
// of the same run cannot drift apart.
struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// shortest exact decimal (%.17g) — round-trips doubles bit-for-bit
std::string format_double(double v);
std::string format_int(long long v);
std::string format_bool(bool v);  // "1" / "0"

// comment header (provenance) + header row + data rows, '\n' line ends
std::string csv_document(const ReportMeta& meta, const ReportTable& table);
// the part that must be byte-identical across runs: header row + data rows
std::string csv_body(const ReportTable& table);

// {"schema_version": 1, provenance..., "payload": <payload>}; payload arrives
// as a serialized JSON object so the header stays independent of the json lib
std::string json_document(const ReportMeta& meta, const std::string& payload_json);

// "-" or "" = stdout
void write_report(const std::string& text, const std::string& out_path);

std::string iso8601_now();

}  // namespace hyplab

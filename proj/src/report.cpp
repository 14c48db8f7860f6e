#include "hyplab/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hyplab/errors.hpp"

namespace hyplab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_int(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", v);
  return buf;
}

std::string format_bool(bool v) { return v ? "1" : "0"; }

std::string csv_body(const ReportTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string csv_document(const ReportMeta& meta, const ReportTable& table) {
  std::ostringstream out;
  out << "# hyplab " << meta.command << '\n';
  out << "# model: " << meta.model << '\n';
  out << "# alpha: " << format_double(meta.alpha) << '\n';
  out << "# delta: " << format_double(meta.delta) << '\n';
  out << "# c_q: " << format_double(meta.c_q) << '\n';
  out << "# seed: " << meta.seed << '\n';
  out << "# threads: " << meta.threads << '\n';
  out << "# cap: " << format_double(meta.cap) << '\n';
  if (!meta.timestamp.empty()) out << "# timestamp: " << meta.timestamp << '\n';
  out << csv_body(table);
  return out.str();
}

std::string json_document(const ReportMeta& meta, const std::string& payload_json) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema_version\": 1,\n";
  out << "  \"command\": \"" << meta.command << "\",\n";
  out << "  \"model\": \"" << meta.model << "\",\n";
  out << "  \"alpha\": " << format_double(meta.alpha) << ",\n";
  out << "  \"delta\": " << format_double(meta.delta) << ",\n";
  out << "  \"c_q\": " << format_double(meta.c_q) << ",\n";
  out << "  \"seed\": " << meta.seed << ",\n";
  out << "  \"threads\": " << meta.threads << ",\n";
  out << "  \"cap\": " << format_double(meta.cap) << ",\n";
  if (!meta.timestamp.empty()) out << "  \"timestamp\": \"" << meta.timestamp << "\",\n";
  out << "  \"payload\": " << payload_json << "\n";
  out << "}\n";
  return out.str();
}

void write_report(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw SerializationError("cannot open output file: " + out_path);
  f << text;
  if (!f) throw SerializationError("write failed: " + out_path);
}

std::string iso8601_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace hyplab

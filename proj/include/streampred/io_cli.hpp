#ifndef STREAMPRED_IO_CLI_HPP
#define STREAMPRED_IO_CLI_HPP

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "streampred/harness.hpp"

namespace streampred {

struct DatasetSpec {
  std::string path;
  std::string column = "value";
  std::optional<std::size_t> max_rows;
  bool drop_missing = true;
  bool quarters = false;
  // Decimal places used for DP tie detection; inferred from the text when
  // unset.
  std::optional<int> precision;

  void validate() const;
};

struct ColumnData {
  std::vector<double> values;
  int decimals = 0;          // most decimal places seen in a kept cell
  std::size_t dropped = 0;   // rows skipped as missing or non-numeric
};

// Splits one CSV record. Handles quoted fields with doubled quotes; a record
// may span lines when a quoted field contains a newline. Returns false at
// end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields);

ColumnData read_column(std::istream& in, const DatasetSpec& spec);
ColumnData read_column(const DatasetSpec& spec);
std::vector<double> load_column(const DatasetSpec& spec);

struct RunManifest {
  DatasetSpec dataset;
  ExperimentConfig config;
  std::vector<Method> methods;  // empty means every method the mode supports
  bool one_pass = true;
  bool representative = false;
  std::string output;           // report CSV; empty writes to stdout only
  std::string trace;            // optional per-step dump
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

// 16 hex digits; FNV-1a over the canonical JSON of every field that can
// change a number in the report (output and trace paths are excluded).
std::string config_hash(const RunManifest& m);

struct ReportRow {
  std::string dataset;
  std::string segment;  // "all" or q1..q4
  MethodResult result;
  std::uint64_t seed = 0;
  std::string config_hash;
};

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

// One line per (segment, mode), one column per method. The smallest value
// is wrapped in ** **, the second smallest gets a trailing *.
void write_report_table(std::ostream& out, const std::vector<ReportRow>& rows);

std::vector<ReportRow> execute(const RunManifest& m, RunOptions options = {});

// Entry point for the command-line tool. Returns the process exit code:
// 0 on success, 2 for usage errors, 1 for runtime failures.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace streampred

#endif  // STREAMPRED_IO_CLI_HPP

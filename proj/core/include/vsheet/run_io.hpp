#ifndef VSHEET_RUN_IO_HPP_
#define VSHEET_RUN_IO_HPP_

// Persistence of runs: CSV tables with JSON sidecars, the run manifest with
// checksums, and the cross-resolution comparison. Formats are specified in
// docs/FORMATS.md.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vsheet/scenario.hpp"
#include "vsheet/timestepping.hpp"

namespace vsheet {

inline constexpr const char* kCoefficientConvention =
    "fhat(k) = (1/N) sum_j f_j exp(-i k a_j), a_j = 2 pi j / N; f(a) = sum_k fhat(k) exp(i k a)";

struct Column {
  std::string name;
  std::string unit;
  std::string description;
};

// Numeric table; every cell is written with 17 significant digits.
struct Table {
  std::string name;
  std::string description;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
};

// Writes <path> and <path>.meta.json. Throws std::runtime_error on I/O errors.
void write_table(const std::filesystem::path& path, const Table& table);
// Reads a table written by write_table (sidecar optional). Column units and
// descriptions come from the sidecar when present.
Table read_table(const std::filesystem::path& path);

std::string format_double(double v);
// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestFile {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::filesystem::path directory;
  Scenario scenario;
  std::string code_version;
  std::string started_utc;
  std::string finished_utc;
  // "complete": t_end reached and every analysis finished.
  // "halted": a stop criterion fired; outputs cover the computed part.
  // "failed": an error interrupted the run; `error` says which.
  std::string status;
  StopReason stop_reason = StopReason::t_end;
  std::string stop_detail;
  std::string error;
  std::size_t steps = 0;
  std::vector<ManifestFile> files;
};

// $VSHEET_OUTPUT_ROOT, or ./runs when unset.
std::filesystem::path output_root();

// Runs the scenario and its analyses and writes everything under
// root/<name>_N<resolution>/. On an exception the files produced so far are
// kept, the manifest is written with status "failed", and the exception is
// rethrown.
RunManifest execute(const Scenario& scenario, const std::filesystem::path& root = output_root());

// Writes the tables for an already computed run; returns the files written.
std::vector<std::string> write_run_tables(const std::filesystem::path& dir, const RunRecord& record);

void write_manifest(const RunManifest& manifest);
// Accepts a manifest file or a run directory.
RunManifest read_manifest(const std::filesystem::path& path);
// Empty when every listed file exists and matches its checksum.
std::vector<std::string> verify_manifest(const RunManifest& manifest);

// Cross-resolution table of final Sobolev norms and strip widths per
// component. Rows are sorted by resolution; growth[i] holds the ratio of
// row i+1 to row i for every norm column. Throws std::invalid_argument for
// an empty list or manifests whose scenarios differ in anything but N.
struct ComparisonReport {
  Table table;
  Table growth;
};
ComparisonReport compare_runs(std::span<const RunManifest> manifests);

}  // namespace vsheet

#endif  // VSHEET_RUN_IO_HPP_

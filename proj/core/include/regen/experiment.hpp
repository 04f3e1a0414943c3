#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "regen/levy_model.hpp"
#include "regen/statistics.hpp"

namespace regen {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { clt, lil, bm_lil, validate };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

class ManifestError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SchemaVersionError : public ManifestError {
 public:
  SchemaVersionError(int found, int expected);
  int found() const noexcept { return found_; }
  int expected() const noexcept { return expected_; }

 private:
  int found_;
  int expected_;
};

/// Explicit list `1e3,1e4` or geometric range `geo:lo:hi:count` (count
/// points, endpoints included; values within 1e-9 of an integer are snapped).
std::vector<double> parse_number_list(std::string_view text);
std::string format_number_list(const std::vector<double>& values);

/// lo, lo r, lo r^2, ... up to hi, rounded to multiples of `quantum` and
/// deduplicated.
std::vector<double> geometric_checkpoints(double lo, double hi, double ratio, double quantum);

/// `key = value` text, one per line, `#` comments.
///
/// For compound Poisson models `jump` is `exp` (with `rate`) or a full
/// jump spec such as `det:0.5`; for `lil` runs on such models the grid holds
/// the log-scale time t of the approximation sum. `alpha`, `step` and
/// `kernel` are only read for `bm_lil`.
struct ExperimentManifest {
  ExperimentKind kind = ExperimentKind::clt;
  std::string model;  // gamma | gammalike | cp | none
  double theta = 1.0;
  double lambda = 1.0;
  std::string jump;
  double rate = 1.0;
  std::vector<double> n_grid;
  std::uint64_t replicates = 1;
  std::uint64_t master_seed = 0;
  double epsilon = 0.0;  // 0 selects eps automatically
  int schema_version = kSchemaVersion;
  double alpha = 1.0;
  double step = 1.0;
  std::string kernel = "power";

  LevyModel levy_model() const;
  static ExperimentManifest for_model(ExperimentKind kind, const LevyModel& model);

  /// Throws ManifestError naming the offending key.
  void validate() const;
  std::string to_text() const;
  /// Throws SchemaVersionError before looking at anything else.
  static ExperimentManifest from_text(std::string_view text);

  bool operator==(const ExperimentManifest&) const = default;
};

struct ResultRecord {
  double n = 0.0;
  double raw = 0.0;
  double centering = 0.0;
  double normalization = 1.0;
  double normalized = 0.0;
  std::uint64_t replicate = 0;
  std::uint64_t stream_id = 0;

  bool operator==(const ResultRecord&) const = default;
};

struct GridSummary {
  double n = 0.0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<KsResult> ks;
};

struct TrajectorySummary {
  std::uint64_t replicate = 0;
  std::uint64_t stream_id = 0;
  double running_max = 0.0;
  double running_min = 0.0;
  double coverage = 0.0;
  std::uint64_t count = 0;
  std::vector<std::uint64_t> hits;
};

struct ExperimentResult {
  ExperimentManifest manifest;
  std::vector<ResultRecord> records;
  std::vector<GridSummary> grid;
  std::vector<TrajectorySummary> trajectories;
  std::vector<std::string> notes;
  bool diagnostic = false;
  double epsilon_used = 0.0;
  double truncation_bias = 0.0;

  std::string summary_json() const;
};

struct RunOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Hardware concurrency capped by REGEN_LIL_THREADS when set. Throws
/// std::invalid_argument if the variable is not a positive integer.
unsigned default_worker_count();

/// Calls body(i) for i in [0, count) on up to `threads` workers; the first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& body);

ExperimentResult run_clt_experiment(const ExperimentManifest& manifest, const RunOptions& opts = {});
ExperimentResult run_lil_experiment(const ExperimentManifest& manifest, const RunOptions& opts = {});
ExperimentResult run_bm_lil_experiment(const ExperimentManifest& manifest,
                                       const RunOptions& opts = {});
/// Dispatches on manifest.kind (validate is handled by the CLI).
ExperimentResult run_experiment(const ExperimentManifest& manifest, const RunOptions& opts = {});

std::string records_to_csv(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> records_from_csv(std::string_view text);

struct LoadedExperiment {
  ExperimentManifest manifest;
  std::vector<ResultRecord> records;
};

/// Writes dir/manifest.txt and dir/results.csv (creating dir).
void persist(const ExperimentManifest& manifest, const std::vector<ResultRecord>& records,
             const std::filesystem::path& dir);
/// As above plus dir/summary.json.
void persist(const ExperimentResult& result, const std::filesystem::path& dir);
LoadedExperiment load(const std::filesystem::path& dir);

ExperimentManifest load_manifest(const std::filesystem::path& file);

}  // namespace regen

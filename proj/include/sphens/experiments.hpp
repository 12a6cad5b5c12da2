#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sphens/geometry.hpp"
#include "sphens/samplers.hpp"

namespace sphens {

/// A statistic id with at most one parameter, e.g. riesz_energy{s=1}.
struct StatisticSpec {
  std::string id;
  std::string param_name;  // empty when the statistic takes none
  double param_value = 0.0;
  std::string mode;  // cap_discrepancy only: "grid" or "exact"

  /// Canonical params column: "s=1", "mode=exact", or "".
  std::string params_string() const;
  /// "id" or "id{params}".
  std::string label() const;
  nlohmann::json to_json() const;
  static StatisticSpec from_json(const nlohmann::json& j);
  /// Parses "id" or "id:name=value" (command-line form).
  static StatisticSpec parse(std::string_view text);

  friend bool operator==(const StatisticSpec&, const StatisticSpec&) = default;
};

struct StatisticInfo {
  std::string id;
  std::vector<std::string> params;  // accepted parameter names (one is used)
  std::string description;
};

/// Every statistic the harness knows, in a fixed order.
const std::vector<StatisticInfo>& statistic_registry();

/// Throws DomainError for unknown ids or parameters outside their domain.
void validate_statistic(const StatisticSpec& spec);

/// Value of one statistic on one configuration.
double evaluate_statistic(const StatisticSpec& spec, const Configuration& config);

struct ExperimentConfig {
  static constexpr int kSchema = 1;

  std::uint64_t base_seed = 0;
  std::vector<SamplerKind> samplers;
  std::vector<std::size_t> n_values;
  std::size_t replicates = 1;
  std::size_t first_replicate = 0;
  std::vector<StatisticSpec> statistics;
  std::filesystem::path output_dir = "experiment_out";
  std::size_t parallelism = 0;  // 0 = auto

  /// Throws IoError for schema problems and DomainError for bad values.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// Config minus output_dir and parallelism, which cannot change results.
  nlohmann::json canonical_json() const;
  /// FNV-1a 64 of canonical_json().dump(), as 16 hex digits.
  std::string hash() const;
  void validate() const;
};

/// Seed of replicate r for a sampler and n.
std::uint64_t replicate_seed(std::uint64_t base_seed, SamplerKind kind, std::size_t n,
                             std::size_t replicate) noexcept;

struct SummaryRecord {
  StatisticSpec statistic;
  std::size_t n = 0;
  SamplerKind sampler = SamplerKind::MatrixModel;
  std::size_t replicates = 0;  // finite values aggregated
  double mean = 0.0;
  double sample_variance = 0.0;
  double stderr_ = 0.0;
  double q01 = 0.0, q50 = 0.0, q99 = 0.0;
  std::optional<double> exact_value;
  std::optional<double> z_score;
  bool flagged = false;  // |z| > 4

  nlohmann::json to_json() const;
};

inline constexpr double kZScoreFlag = 4.0;

/// Type-7 quantile of sorted values.
double quantile_type7(const std::vector<double>& sorted, double prob);

/// Aggregates one group of finite values.
SummaryRecord summarize(const StatisticSpec& spec, std::size_t n, SamplerKind sampler,
                        const std::vector<double>& values);

struct ReplicateError {
  SamplerKind sampler;
  std::size_t n;
  std::size_t replicate;
  std::string statistic;  // empty when sampling failed
  std::string message;
};

struct ExperimentResult {
  std::vector<SummaryRecord> summaries;
  std::vector<ReplicateError> errors;
  double wall_seconds = 0.0;
  std::filesystem::path raw_path, summary_path, manifest_path;
};

/// Exact expectation of a statistic for a sampler, if one exists.
using ExactBinding =
    std::function<std::optional<double>(const StatisticSpec&, std::size_t n, SamplerKind)>;
std::optional<double> default_exact_binding(const StatisticSpec& spec, std::size_t n,
                                            SamplerKind sampler);

/// Fills exact_value, z_score and flagged. Throws UnboundStatisticError for a
/// record without an exact counterpart.
std::vector<SummaryRecord> compare_to_exact(std::vector<SummaryRecord> records,
                                            const ExactBinding& binding = default_exact_binding);

/// Runs the grid, streams raw rows in replicate order, writes summaries and the
/// manifest. Output does not depend on the thread count. `threads` overrides
/// config.parallelism when nonzero.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads = 0);

/// Raw row as read back from a CSV file.
struct RawRow {
  std::string statistic;
  std::string params;
  std::size_t n = 0;
  std::string sampler;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::string value;  // textual, for bitwise comparison
};

inline constexpr const char* kRawHeader = "statistic,params,n,sampler,replicate,seed,value";

std::vector<RawRow> read_raw_csv(const std::filesystem::path& path);
/// %.17g, or "nan".
std::string format_value(double v);

struct VerifyReport {
  std::size_t replicates_checked = 0;
  std::size_t values_checked = 0;
  std::size_t mismatches = 0;
  std::vector<std::string> details;
  bool ok() const { return mismatches == 0 && replicates_checked > 0; }
};

/// Recomputes every replicate whose index is a multiple of round(1/fraction)
/// and compares the values with the raw file text.
VerifyReport verify_raw(const ExperimentConfig& config, const std::filesystem::path& raw_path,
                        double fraction = 0.01, std::size_t threads = 1);

}  // namespace sphens

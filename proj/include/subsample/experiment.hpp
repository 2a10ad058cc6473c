// Experiment orchestration: learn masks per budget, tune baselines, decode the
// test split and tabulate mean l2 error / PSNR per (method, n, decoder).
#ifndef SUBSAMPLE_EXPERIMENT_HPP
#define SUBSAMPLE_EXPERIMENT_HPP

#include "subsample/baselines.hpp"
#include "subsample/decoders.hpp"
#include "subsample/io.hpp"
#include "subsample/selectors.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace subsample {

/// "avg", "min", "gen" (q = 2), "gen:3" or "gen(q=3)".
Criterion parse_criterion(const std::string& text);
Criterion criterion_from_json(const nlohmann::json& j);

enum class SplitMode { Prefix, Shuffle };

struct SplitRule {
  SplitMode mode = SplitMode::Prefix;
  double ratio = 0.5;  // first ceil(ratio * m) signals train
  std::uint64_t seed = 0;
};

/// Deterministic train/test split.
std::pair<TrainingSet, TrainingSet> split_train_test(const TrainingSet& all, const SplitRule& rule);

enum class ConstraintKind { Cardinality, Partition, Tree };

struct ConstraintRule {
  ConstraintKind kind = ConstraintKind::Cardinality;
  PartitionMatroid partition;  // used as given; its total is the only budget
  /// Instantiates the family for budget n.
  ConstraintSet instantiate(const TransformSpec& spec, Index n) const;
};

struct BaselineConfig {
  BaselineFamily family = BaselineFamily::Lustig;
  BaselineGrid grid = BaselineGrid::defaults();
  int draws = 20;
  std::uint64_t seed = 0;
  std::size_t score_signals = 100;
};

struct ExperimentConfig {
  std::string data_path;
  std::string data_format;  // empty infers from the path
  std::string test_path;    // explicit test file; disables the split
  TransformSpec transform;
  std::vector<Criterion> criteria{Avg{}};
  ConstraintRule constraint;
  std::vector<Index> n_list;
  SplitRule split;
  SaturateParams saturate;
  std::vector<BaselineConfig> baselines;
  bool linear = true;
  std::optional<BpConfig> bp;
  bool adaptive = true;
  std::optional<double> psnr_peak;  // default: per-signal max |x|
  std::string report_path;
  std::string mask_dir;
  bool record_timing = false;
};

/// Relative paths are resolved against `base_dir`.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = "");
ExperimentConfig load_config(const std::string& path);

struct ReportRow {
  std::string method;
  Index n = 0;
  std::string decoder;
  double l2_error = 0.0;  // mean over test signals of ||x - x_hat||^2 (unit-norm x, complex reconstruction)
  double psnr_db = 0.0;   // mean over test signals
  std::optional<double> train_objective;
  std::optional<double> wall_ms;
  std::string error;      // non-empty for a failed cell
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, IndexSet>> masks;  // file stem, mask
};

/// Runs every cell; a failing method yields a row with `error` set.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const TrainingSet& train, const TrainingSet& test);
/// Loads the data, splits, runs, then writes report_path and mask_dir when set.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::string report_csv(const ExperimentReport& rep);
std::string report_table(const ExperimentReport& rep);
void persist(const ExperimentConfig& cfg, const ExperimentReport& rep);

struct DecodeScore {
  double l2_error = 0.0;
  double psnr_db = 0.0;
};

/// Mean squared error and PSNR of decoding `test` through `omega`.
DecodeScore score_linear(const TransformSpec& spec, const IndexSet& omega, const TrainingSet& test,
                         std::optional<double> peak = std::nullopt);
DecodeScore score_bp(const TransformSpec& spec, const IndexSet& omega, const TrainingSet& test, const BpConfig& bp,
                     std::optional<double> peak = std::nullopt);
DecodeScore score_adaptive(const TransformSpec& spec, Index n, const TrainingSet& test,
                           std::optional<double> peak = std::nullopt);

}  // namespace subsample

#endif  // SUBSAMPLE_EXPERIMENT_HPP

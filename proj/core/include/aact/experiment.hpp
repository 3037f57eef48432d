#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aact/data.hpp"
#include "aact/metrics.hpp"
#include "aact/model.hpp"
#include "aact/neural_unit.hpp"

namespace aact {

struct DatasetSpec {
  enum class Kind { kMnist, kFashionMnist, kFeatureFile };

  Kind kind = Kind::kMnist;
  std::filesystem::path train_path;  // kFeatureFile
  std::filesystem::path test_path;   // kFeatureFile; empty -> evaluate on train

  // "mnist", "fashion_mnist", "feature:TRAIN[,TEST]".
  static DatasetSpec parse(std::string_view text);
  std::string to_string() const;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  SplitSpec split;
  GrowthConfig growth;
  ActivationKind activation = ActivationKind::kSigmoid;
  InferenceMode mode = InferenceMode::kFull;
  std::size_t runs = 5;
  std::uint64_t seed = 0;
  std::filesystem::path out = "results";
  // Each test row routed on its own instead of as part of a task batch.
  bool per_instance = false;

  void validate() const;

  // Applies one key=value setting; keys match the CLI long flags without
  // dashes ("t-max", "expected-acc", ...). Error{kConfig} on unknown keys or
  // unparsable values.
  void set(std::string_view key, std::string_view value);

  // Flat key=value file, '#' comments, blank lines ignored.
  static ExperimentConfig from_file(const std::filesystem::path& path);
  void apply_file(const std::filesystem::path& path);

  std::string to_text() const;
};

// AACT_DATA_DIR if set, otherwise ./data.
std::filesystem::path default_data_dir();

struct LoadedData {
  RealMatrix train_x;
  std::vector<Label> train_labels;
  RealMatrix test_x;
  std::vector<Label> test_labels;
};

// Error{kData} for missing or unreadable files.
LoadedData load_dataset(const DatasetSpec& spec, const std::filesystem::path& data_dir);

// Distinct labels present in the training split, ascending.
std::vector<Label> label_universe(const LoadedData& data);

// Task order for run k. The split's own order seed wins when set; otherwise
// each run gets derive_seed(seed, {run}).
std::vector<TaskPlan> plan_run(const ExperimentConfig& cfg, std::span<const Label> universe,
                               std::size_t run);
std::uint64_t run_order_seed(const ExperimentConfig& cfg, std::size_t run);
std::uint64_t run_growth_seed(const ExperimentConfig& cfg, std::size_t run);

// Accuracy of the model on each task's test rows, tasks given in order.
std::vector<Fraction> evaluate_tasks(const AutoActivatorModel& model,
                                     const std::vector<TaskDataset>& tests,
                                     InferenceMode mode, bool per_instance);

struct RunResult {
  std::size_t run = 0;
  std::uint64_t order_seed = 0;
  std::vector<TaskPlan> order;
  AccuracyMatrix matrix{0};
  double aca = 0.0;
  double aia = 0.0;
  std::optional<double> bwt;         // needs two or more tasks
  std::optional<double> forgetting;
  std::vector<std::size_t> nodes_per_task;
  std::size_t parameters = 0;
  BudgetReport budget;
  double seconds = 0.0;
  AutoActivatorModel model;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

MeanStd mean_std(const std::vector<double>& values);

struct ExperimentReport {
  std::vector<RunResult> runs;
  MeanStd aca;
  MeanStd aia;
  std::optional<MeanStd> bwt;
  std::optional<MeanStd> forgetting;
  MeanStd total_nodes;
  double seconds = 0.0;
};

// One ordering: trains sequentially and evaluates after every session.
RunResult run_single(const ExperimentConfig& cfg, const LoadedData& data, std::size_t run);

// All runs. Writes reports and models under cfg.out when write_files is set.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const LoadedData& data,
                                bool write_files = true);

// ---- Reports ----
//
// Every CSV starts with a "# aact-<kind>-v1" line. Wall-clock time goes only
// to the *timing.csv files.

void write_accuracy_csv(std::ostream& os, const ExperimentReport& report);
void write_summary_csv(std::ostream& os, const ExperimentReport& report);
void write_timing_csv(std::ostream& os, const ExperimentReport& report);
void write_experiment_files(const ExperimentConfig& cfg, const ExperimentReport& report);

struct SweepGrid {
  std::vector<std::size_t> steps{1, 10};
  std::vector<std::size_t> t_max{1, 10, 50, 200};
  std::vector<double> expected_accuracy;  // empty -> the base config's value
};

struct SweepCell {
  std::size_t step = 0;
  std::size_t t_max = 0;
  double expected_accuracy = 0.0;
  ExperimentReport report;
  std::size_t max_unit_nodes = 0;       // over all runs and units
  double params_per_class = 0.0;        // mean over runs
};

std::vector<SweepCell> sweep_params(const ExperimentConfig& cfg, const LoadedData& data,
                                    const SweepGrid& grid, bool write_files = true);
void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);

struct AblationRow {
  std::size_t run = 0;
  InferenceMode mode = InferenceMode::kFull;
  std::vector<Fraction> per_task;
  double aca = 0.0;
};

// One model per run, evaluated under every inference mode.
std::vector<AblationRow> run_ablation(const ExperimentConfig& cfg, const LoadedData& data,
                                      bool write_files = true);
void write_ablation_csv(std::ostream& os, const std::vector<AblationRow>& rows);
// Mean final ACA per mode.
std::map<InferenceMode, double> ablation_means(const std::vector<AblationRow>& rows);

// Per-sample concatenated unit probabilities on the test split.
void write_responses_csv(std::ostream& os, const AutoActivatorModel& model,
                         const RealMatrix& x, std::span<const Label> labels);

// Human-readable task plan for every run.
void write_plan(std::ostream& os, const ExperimentConfig& cfg, std::span<const Label> universe);

}  // namespace aact

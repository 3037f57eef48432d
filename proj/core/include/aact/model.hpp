#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "aact/data.hpp"
#include "aact/neural_unit.hpp"

namespace aact {

enum class InferenceMode { kFull, kComponent1Only, kOff };

std::string_view to_string(InferenceMode mode);
InferenceMode parse_inference_mode(std::string_view name);

// Training provenance. In memory and in run reports only; not part of the
// model file.
struct ModelMeta {
  GrowthConfig growth;
  std::vector<std::uint64_t> session_seeds;
  std::vector<std::size_t> node_counts;
  std::vector<StopReason> stop_reasons;
  std::vector<std::size_t> task_indices;
};

// Units are kept as a list (one weight pair per task), never concatenated.
struct AutoActivatorModel {
  std::vector<NeuralUnit> units;
  std::vector<std::vector<Label>> label_map;  // label_map[t] = classes of unit t
  std::size_t input_dim = 0;
  ModelMeta meta;

  bool empty() const { return units.empty(); }
  std::size_t total_nodes() const;
  std::size_t total_classes() const;
  // Weights, biases and output weights of every unit.
  std::size_t parameter_count() const;
};

// Appends one frozen unit grown on `task`. The unit's growth seed is
// derive_seed(cfg.seed, {session index}). Earlier units are untouched.
AutoActivatorModel train_session(AutoActivatorModel model, const TaskDataset& task,
                                 const GrowthConfig& cfg, ActivationKind kind,
                                 GrowthTrace* trace = nullptr);

struct UnitResponse {
  RealMatrix probs;  // N x C_t
  double tilde_threshold = 0.0;
};

UnitResponse unit_response(const NeuralUnit& unit, const RealMatrix& x);

struct Prediction {
  // Selected unit. In kOff mode there is no selection; this is the unit that
  // won the most rows (smallest index on ties), for diagnostics only.
  std::size_t unit_index = 0;
  std::vector<Label> global_labels;
  std::vector<double> tilde_thresholds;  // one per unit
};

// kFull:           unit = argmin_t |threshold(t) - tilde(t)|, ties -> smallest t
// kComponent1Only: unit = argmax_t tilde(t)
// kOff:            per-row argmax over the concatenated per-unit probabilities
// The first two assume x is a batch drawn from a single task.
Prediction predict(const AutoActivatorModel& model, const RealMatrix& x,
                   InferenceMode mode);

// Labels from a forced unit (task identity supplied); diagnostic only.
std::vector<Label> predict_with_unit(const AutoActivatorModel& model,
                                     const RealMatrix& x, std::size_t unit_index);

// ---- Persistence ----
//
//   "AACT" | version u32 | input_dim u32 | unit count u32
//   per unit: num_classes u32 | node_count u32 | activation u8 |
//             class labels u32 x C | threshold f64 |
//             w_in, b, w_out   each as rows u32 | cols u32 | f64 row-major
//
// b is stored as an L x 1 matrix. Everything little-endian.

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_unit(const NeuralUnit& unit,
                                         std::span<const Label> labels);
std::vector<std::uint8_t> serialize_model(const AutoActivatorModel& model);
AutoActivatorModel parse_model(std::span<const std::uint8_t> bytes);

void save_model(const AutoActivatorModel& model, const std::filesystem::path& path);
AutoActivatorModel load_model(const std::filesystem::path& path);

}  // namespace aact

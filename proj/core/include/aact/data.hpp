#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aact/linalg.hpp"

namespace aact {

using Label = std::uint32_t;

// One session of the class-incremental stream.
struct TaskDataset {
  RealMatrix x;                    // N x M
  RealMatrix y;                    // N x C one-hot
  std::vector<Label> class_labels; // sorted, distinct; column c of y is class_labels[c]
  std::size_t task_index = 0;      // canonical task id (ascending-label split position)

  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t num_classes() const { return class_labels.size(); }
  // Global label of each row.
  std::vector<Label> row_labels() const;
};

// ---- IDX (MNIST container) ----

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image
};

struct IdxDataset {
  IdxImages images;
  std::vector<std::uint8_t> labels;
};

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

// Reads both files and checks that the counts agree.
IdxDataset load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path);

// Pixels / 255, flattened row-major: pixel (r, c) -> column r * cols + c.
RealMatrix preprocess(const IdxImages& images);

// Row i has a 1 at the position of labels[i] within class_labels.
RealMatrix one_hot(std::span<const Label> labels,
                   std::span<const Label> class_labels);

// ---- Task sequences ----

struct SplitSpec {
  enum class Kind { kEven, kUneven, kSingleClass };

  Kind kind = Kind::kEven;
  std::size_t tasks = 5;             // kEven
  std::vector<std::size_t> sizes;    // kUneven, classes per task
  std::optional<std::uint64_t> order_seed;

  // "even:5", "uneven:10,20,30,40", "single".
  static SplitSpec parse(std::string_view text);
  std::string to_string() const;
};

struct TaskPlan {
  std::size_t task_index = 0;  // canonical position before any shuffle
  std::vector<Label> class_labels;
};

// Classes are assigned in ascending label order to consecutive tasks; an
// order seed permutes the resulting sequence, never class membership.
std::vector<TaskPlan> make_splits(std::span<const Label> labels,
                                  const SplitSpec& spec);

// Rows of (x, labels) whose label belongs to the plan, in input order.
TaskDataset build_task(const RealMatrix& x, std::span<const Label> labels,
                       const TaskPlan& plan);

// ---- Precomputed feature matrices ("FEAT" files) ----
//
//   "FEAT" | version u32 | N u32 | M u32 | N*M f64 row-major | N u32 labels
//
// All integers and floats little-endian.

inline constexpr std::uint32_t kFeatureFormatVersion = 1;

struct FeatureSet {
  RealMatrix x;
  std::vector<Label> labels;
};

// When num_classes is given, every label must be below it.
FeatureSet parse_feature_matrix(std::span<const std::uint8_t> bytes,
                                std::optional<std::uint32_t> num_classes = std::nullopt);
FeatureSet load_feature_matrix(const std::filesystem::path& path,
                               std::optional<std::uint32_t> num_classes = std::nullopt);

std::vector<std::uint8_t> serialize_feature_matrix(const FeatureSet& features);
void save_feature_matrix(const std::filesystem::path& path,
                         const FeatureSet& features);

// Whole file into memory; Error{kData} when unreadable.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

}  // namespace aact

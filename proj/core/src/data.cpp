#include "aact/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "aact/error.hpp"
#include "aact/random.hpp"
#include "byte_io.hpp"

namespace aact {

using detail::ByteReader;
using detail::ByteWriter;

std::vector<Label> TaskDataset::row_labels() const {
  std::vector<Label> out(size());
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    Eigen::Index c = 0;
    y.row(i).maxCoeff(&c);
    out[static_cast<std::size_t>(i)] = class_labels[static_cast<std::size_t>(c)];
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kData, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kData, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kData, "short write to " + path.string());
}

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const std::uint32_t magic = in.u32_be("images magic");
  if (magic != kIdxImagesMagic) {
    throw FormatError(0, "images magic is not 0x00000803");
  }
  IdxImages img;
  img.count = in.u32_be("images count");
  img.rows = in.u32_be("images rows");
  img.cols = in.u32_be("images cols");
  const std::size_t n = img.count * img.rows * img.cols;
  auto px = in.take(n, "images pixel data");
  img.pixels.assign(px.begin(), px.end());
  if (in.remaining() != 0) {
    throw FormatError(in.offset(), "trailing bytes after images pixel data");
  }
  return img;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const std::uint32_t magic = in.u32_be("labels magic");
  if (magic != kIdxLabelsMagic) {
    throw FormatError(0, "labels magic is not 0x00000801");
  }
  const std::uint32_t count = in.u32_be("labels count");
  auto lb = in.take(count, "labels data");
  if (in.remaining() != 0) {
    throw FormatError(in.offset(), "trailing bytes after labels data");
  }
  return {lb.begin(), lb.end()};
}

IdxDataset load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path) {
  IdxDataset ds;
  ds.images = parse_idx_images(read_file(images_path));
  ds.labels = parse_idx_labels(read_file(labels_path));
  if (ds.labels.size() != ds.images.count) {
    throw FormatError(4, "labels count " + std::to_string(ds.labels.size()) +
                             " does not match images count " +
                             std::to_string(ds.images.count));
  }
  return ds;
}

RealMatrix preprocess(const IdxImages& images) {
  const std::size_t width = images.rows * images.cols;
  RealMatrix x(static_cast<Eigen::Index>(images.count), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < images.count; ++i) {
    const std::uint8_t* px = images.pixels.data() + i * width;
    for (std::size_t j = 0; j < width; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = px[j] / 255.0;
    }
  }
  return x;
}

RealMatrix one_hot(std::span<const Label> labels,
                   std::span<const Label> class_labels) {
  RealMatrix y = RealMatrix::Zero(static_cast<Eigen::Index>(labels.size()),
                                  static_cast<Eigen::Index>(class_labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(class_labels.begin(), class_labels.end(), labels[i]);
    if (it == class_labels.end()) {
      throw Error(ErrorKind::kProtocol, "label " + std::to_string(labels[i]) +
                                            " is not among the task's classes");
    }
    y(static_cast<Eigen::Index>(i), it - class_labels.begin()) = 1.0;
  }
  return y;
}

namespace {

std::size_t parse_count(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    throw Error(ErrorKind::kConfig,
                "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

SplitSpec SplitSpec::parse(std::string_view text) {
  SplitSpec spec;
  if (text == "single" || text == "single_class") {
    spec.kind = Kind::kSingleClass;
    return spec;
  }
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view tail =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "even") {
    spec.kind = Kind::kEven;
    spec.tasks = parse_count(tail, "task count");
    return spec;
  }
  if (head == "uneven") {
    spec.kind = Kind::kUneven;
    std::string_view rest = tail;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      spec.sizes.push_back(parse_count(rest.substr(0, comma), "task size"));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (spec.sizes.empty()) throw Error(ErrorKind::kConfig, "uneven split needs sizes");
    return spec;
  }
  throw Error(ErrorKind::kConfig, "unknown split '" + std::string(text) + "'");
}

std::string SplitSpec::to_string() const {
  switch (kind) {
    case Kind::kEven: return "even:" + std::to_string(tasks);
    case Kind::kSingleClass: return "single";
    case Kind::kUneven: {
      std::string s = "uneven:";
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(sizes[i]);
      }
      return s;
    }
  }
  return "?";
}

std::vector<TaskPlan> make_splits(std::span<const Label> labels,
                                  const SplitSpec& spec) {
  const std::set<Label> distinct(labels.begin(), labels.end());
  const std::vector<Label> classes(distinct.begin(), distinct.end());
  if (classes.empty()) throw Error(ErrorKind::kConfig, "no classes to split");

  std::vector<std::size_t> sizes;
  switch (spec.kind) {
    case SplitSpec::Kind::kEven:
      if (spec.tasks == 0 || classes.size() % spec.tasks != 0) {
        throw Error(ErrorKind::kConfig,
                    std::to_string(classes.size()) + " classes cannot be split evenly into " +
                        std::to_string(spec.tasks) + " tasks");
      }
      sizes.assign(spec.tasks, classes.size() / spec.tasks);
      break;
    case SplitSpec::Kind::kUneven: {
      std::size_t total = 0;
      for (std::size_t s : spec.sizes) {
        if (s == 0) throw Error(ErrorKind::kConfig, "uneven split with an empty task");
        total += s;
      }
      if (total != classes.size()) {
        throw Error(ErrorKind::kConfig, "uneven sizes sum to " + std::to_string(total) +
                                            " but there are " +
                                            std::to_string(classes.size()) + " classes");
      }
      sizes = spec.sizes;
      break;
    }
    case SplitSpec::Kind::kSingleClass:
      sizes.assign(classes.size(), 1);
      break;
  }

  std::vector<TaskPlan> plans;
  std::size_t next = 0;
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    TaskPlan p;
    p.task_index = t;
    p.class_labels.assign(classes.begin() + static_cast<std::ptrdiff_t>(next),
                          classes.begin() + static_cast<std::ptrdiff_t>(next + sizes[t]));
    next += sizes[t];
    plans.push_back(std::move(p));
  }
  if (spec.order_seed) {
    Substream rng(derive_seed(*spec.order_seed, {0x6f72646572ULL}));
    const auto perm = permutation(plans.size(), rng);
    std::vector<TaskPlan> shuffled;
    shuffled.reserve(plans.size());
    for (std::size_t i : perm) shuffled.push_back(plans[i]);
    plans = std::move(shuffled);
  }
  return plans;
}

TaskDataset build_task(const RealMatrix& x, std::span<const Label> labels,
                       const TaskPlan& plan) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw Error(ErrorKind::kDimension, "build_task: inputs and labels disagree on rows");
  }
  std::vector<Eigen::Index> rows;
  std::vector<Label> task_labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::binary_search(plan.class_labels.begin(), plan.class_labels.end(), labels[i])) {
      rows.push_back(static_cast<Eigen::Index>(i));
      task_labels.push_back(labels[i]);
    }
  }
  TaskDataset task;
  task.task_index = plan.task_index;
  task.class_labels = plan.class_labels;
  task.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    task.x.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  }
  task.y = one_hot(task_labels, task.class_labels);
  return task;
}

FeatureSet parse_feature_matrix(std::span<const std::uint8_t> bytes,
                                std::optional<std::uint32_t> num_classes) {
  ByteReader in(bytes);
  auto magic = in.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), "FEAT")) {
    throw FormatError(0, "magic is not \"FEAT\"");
  }
  const std::size_t version_at = in.offset();
  const std::uint32_t version = in.u32_le("version");
  if (version != kFeatureFormatVersion) {
    throw FormatError(version_at, "unsupported version " + std::to_string(version));
  }
  const std::size_t n_at = in.offset();
  const std::uint32_t n = in.u32_le("row count");
  const std::uint32_t m = in.u32_le("column count");
  if (n == 0) throw FormatError(n_at, "empty dataset (N = 0)");
  if (m == 0) throw FormatError(n_at + 4, "zero feature columns (M = 0)");
  in.need(static_cast<std::size_t>(n) * m * 8 + static_cast<std::size_t>(n) * 4,
          "feature matrix and labels");

  FeatureSet out;
  out.x.resize(n, m);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < m; ++j) {
      const std::size_t at = in.offset();
      const double v = in.f64_le("feature value");
      if (!std::isfinite(v)) throw FormatError(at, "non-finite feature value");
      out.x(i, j) = v;
    }
  }
  out.labels.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t at = in.offset();
    out.labels[i] = in.u32_le("label");
    if (num_classes && out.labels[i] >= *num_classes) {
      throw FormatError(at, "label " + std::to_string(out.labels[i]) +
                                " outside declared class range [0, " +
                                std::to_string(*num_classes) + ")");
    }
  }
  if (in.remaining() != 0) throw FormatError(in.offset(), "trailing bytes after labels");
  return out;
}

FeatureSet load_feature_matrix(const std::filesystem::path& path,
                               std::optional<std::uint32_t> num_classes) {
  return parse_feature_matrix(read_file(path), num_classes);
}

std::vector<std::uint8_t> serialize_feature_matrix(const FeatureSet& f) {
  if (static_cast<std::size_t>(f.x.rows()) != f.labels.size()) {
    throw Error(ErrorKind::kDimension, "feature rows and labels disagree");
  }
  ByteWriter out;
  out.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("FEAT"), 4));
  out.u32_le(kFeatureFormatVersion);
  out.u32_le(static_cast<std::uint32_t>(f.x.rows()));
  out.u32_le(static_cast<std::uint32_t>(f.x.cols()));
  for (Eigen::Index i = 0; i < f.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.x.cols(); ++j) out.f64_le(f.x(i, j));
  }
  for (Label l : f.labels) out.u32_le(l);
  return std::move(out.data());
}

void save_feature_matrix(const std::filesystem::path& path, const FeatureSet& f) {
  write_file(path, serialize_feature_matrix(f));
}

}  // namespace aact

#include "aact/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "aact/error.hpp"
#include "aact/random.hpp"
#include "byte_io.hpp"

namespace aact {

using detail::ByteReader;
using detail::ByteWriter;

std::string_view to_string(InferenceMode mode) {
  switch (mode) {
    case InferenceMode::kFull: return "full";
    case InferenceMode::kComponent1Only: return "component1_only";
    case InferenceMode::kOff: return "off";
  }
  return "unknown";
}

InferenceMode parse_inference_mode(std::string_view name) {
  if (name == "full") return InferenceMode::kFull;
  if (name == "component1_only") return InferenceMode::kComponent1Only;
  if (name == "off") return InferenceMode::kOff;
  throw Error(ErrorKind::kConfig, "unknown inference mode '" + std::string(name) + "'");
}

std::size_t AutoActivatorModel::total_nodes() const {
  std::size_t n = 0;
  for (const auto& u : units) n += u.node_count();
  return n;
}

std::size_t AutoActivatorModel::total_classes() const {
  std::size_t n = 0;
  for (const auto& u : units) n += u.num_classes;
  return n;
}

std::size_t AutoActivatorModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& u : units) {
    n += static_cast<std::size_t>(u.w_in.size() + u.b.size() + u.w_out.size());
  }
  return n;
}

AutoActivatorModel train_session(AutoActivatorModel model, const TaskDataset& task,
                                 const GrowthConfig& cfg, ActivationKind kind,
                                 GrowthTrace* trace) {
  if (task.size() == 0) throw Error(ErrorKind::kInvalidTask, "empty task");
  const auto dim = static_cast<std::size_t>(task.x.cols());
  if (!model.empty() && dim != model.input_dim) {
    throw Error(ErrorKind::kDimension,
                "task has " + std::to_string(dim) + " features, model expects " +
                    std::to_string(model.input_dim));
  }
  if (static_cast<std::size_t>(task.y.cols()) != task.num_classes()) {
    throw Error(ErrorKind::kDimension, "task targets do not match its class list");
  }
  for (const auto& seen : model.label_map) {
    for (Label l : task.class_labels) {
      if (std::find(seen.begin(), seen.end(), l) != seen.end()) {
        throw Error(ErrorKind::kProtocol,
                    "class " + std::to_string(l) + " was already learned by an earlier unit");
      }
    }
  }

  const std::size_t session = model.units.size();
  GrowthConfig unit_cfg = cfg;
  unit_cfg.seed = derive_seed(cfg.seed, {session});
  GrowthTrace local;
  GrowthTrace& tr = trace ? *trace : local;
  NeuralUnit unit = grow_unit(task.x, task.y, unit_cfg, kind, &tr);
  unit.class_offset = model.total_classes();

  if (model.empty()) {
    model.input_dim = dim;
    model.meta.growth = cfg;
  }
  model.meta.session_seeds.push_back(unit_cfg.seed);
  model.meta.node_counts.push_back(unit.node_count());
  model.meta.stop_reasons.push_back(tr.stop);
  model.meta.task_indices.push_back(task.task_index);
  model.label_map.push_back(task.class_labels);
  model.units.push_back(std::move(unit));
  return model;
}

UnitResponse unit_response(const NeuralUnit& unit, const RealMatrix& x) {
  if (x.rows() == 0) throw Error(ErrorKind::kInvalidInput, "unit_response of zero rows");
  if (static_cast<std::size_t>(x.cols()) != unit.input_dim) {
    throw Error(ErrorKind::kDimension,
                "input has " + std::to_string(x.cols()) + " features, unit expects " +
                    std::to_string(unit.input_dim));
  }
  UnitResponse out;
  out.probs = unit_probabilities(unit.logits(x));
  out.tilde_threshold = out.probs.rowwise().maxCoeff().mean() - unit.alpha();
  return out;
}

namespace {

std::vector<Label> labels_from(const RealMatrix& probs, std::span<const Label> classes) {
  std::vector<Label> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index c = 0;
    probs.row(i).maxCoeff(&c);
    out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(c)];
  }
  return out;
}

}  // namespace

Prediction predict(const AutoActivatorModel& model, const RealMatrix& x,
                   InferenceMode mode) {
  if (model.empty()) throw Error(ErrorKind::kState, "predict on a model with no units");
  if (x.rows() == 0) throw Error(ErrorKind::kInvalidInput, "predict on an empty batch");

  std::vector<UnitResponse> responses;
  responses.reserve(model.units.size());
  Prediction out;
  for (const auto& unit : model.units) {
    responses.push_back(unit_response(unit, x));
    out.tilde_thresholds.push_back(responses.back().tilde_threshold);
  }

  const std::size_t t_count = model.units.size();
  switch (mode) {
    case InferenceMode::kFull: {
      std::size_t best = 0;
      double best_dist = std::abs(model.units[0].threshold - out.tilde_thresholds[0]);
      for (std::size_t t = 1; t < t_count; ++t) {
        const double d = std::abs(model.units[t].threshold - out.tilde_thresholds[t]);
        if (d < best_dist) {
          best = t;
          best_dist = d;
        }
      }
      out.unit_index = best;
      out.global_labels = labels_from(responses[best].probs, model.label_map[best]);
      break;
    }
    case InferenceMode::kComponent1Only: {
      std::size_t best = 0;
      for (std::size_t t = 1; t < t_count; ++t) {
        if (out.tilde_thresholds[t] > out.tilde_thresholds[best]) best = t;
      }
      out.unit_index = best;
      out.global_labels = labels_from(responses[best].probs, model.label_map[best]);
      break;
    }
    case InferenceMode::kOff: {
      std::vector<std::size_t> wins(t_count, 0);
      out.global_labels.resize(static_cast<std::size_t>(x.rows()));
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double best_p = -1.0;
        std::size_t best_t = 0;
        Eigen::Index best_c = 0;
        for (std::size_t t = 0; t < t_count; ++t) {
          Eigen::Index c = 0;
          const double p = responses[t].probs.row(i).maxCoeff(&c);
          if (p > best_p) {
            best_p = p;
            best_t = t;
            best_c = c;
          }
        }
        ++wins[best_t];
        out.global_labels[static_cast<std::size_t>(i)] =
            model.label_map[best_t][static_cast<std::size_t>(best_c)];
      }
      out.unit_index = static_cast<std::size_t>(
          std::max_element(wins.begin(), wins.end()) - wins.begin());
      break;
    }
  }
  return out;
}

std::vector<Label> predict_with_unit(const AutoActivatorModel& model,
                                     const RealMatrix& x, std::size_t unit_index) {
  if (unit_index >= model.units.size()) {
    throw Error(ErrorKind::kState, "unit index " + std::to_string(unit_index) + " out of range");
  }
  const auto& unit = model.units[unit_index];
  return labels_from(unit_probabilities(unit.logits(x)), model.label_map[unit_index]);
}

// ---- Persistence ----

namespace {

void write_matrix(ByteWriter& out, const RealMatrix& m) {
  out.u32_le(static_cast<std::uint32_t>(m.rows()));
  out.u32_le(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.f64_le(m(i, j));
  }
}

RealMatrix read_matrix(ByteReader& in, const std::string& name,
                       std::size_t rows, std::size_t cols) {
  const std::size_t at = in.offset();
  const std::uint32_t r = in.u32_le(name + " rows");
  const std::uint32_t c = in.u32_le(name + " cols");
  if (r != rows || c != cols) {
    throw FormatError(at, name + " is " + std::to_string(r) + "x" + std::to_string(c) +
                              ", expected " + std::to_string(rows) + "x" +
                              std::to_string(cols));
  }
  in.need(static_cast<std::size_t>(r) * c * 8, name + " entries");
  RealMatrix m(r, c);
  for (std::uint32_t i = 0; i < r; ++i) {
    for (std::uint32_t j = 0; j < c; ++j) {
      const std::size_t vat = in.offset();
      const double v = in.f64_le(name + " entry");
      if (!std::isfinite(v)) throw FormatError(vat, "non-finite " + name + " entry");
      m(i, j) = v;
    }
  }
  return m;
}

void write_unit(ByteWriter& out, const NeuralUnit& unit, std::span<const Label> labels) {
  out.u32_le(static_cast<std::uint32_t>(unit.num_classes));
  out.u32_le(static_cast<std::uint32_t>(unit.node_count()));
  out.u8(static_cast<std::uint8_t>(unit.activation));
  for (Label l : labels) out.u32_le(l);
  out.f64_le(unit.threshold);
  write_matrix(out, unit.w_in);
  write_matrix(out, unit.b);
  write_matrix(out, unit.w_out);
}

}  // namespace

std::vector<std::uint8_t> serialize_unit(const NeuralUnit& unit,
                                         std::span<const Label> labels) {
  ByteWriter out;
  write_unit(out, unit, labels);
  return std::move(out.data());
}

std::vector<std::uint8_t> serialize_model(const AutoActivatorModel& model) {
  ByteWriter out;
  out.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("AACT"), 4));
  out.u32_le(kModelFormatVersion);
  out.u32_le(static_cast<std::uint32_t>(model.input_dim));
  out.u32_le(static_cast<std::uint32_t>(model.units.size()));
  for (std::size_t t = 0; t < model.units.size(); ++t) {
    write_unit(out, model.units[t], model.label_map[t]);
  }
  return std::move(out.data());
}

AutoActivatorModel parse_model(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  auto magic = in.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), "AACT")) {
    throw FormatError(0, "magic is not \"AACT\"");
  }
  const std::size_t version_at = in.offset();
  const std::uint32_t version = in.u32_le("version");
  if (version != kModelFormatVersion) {
    throw FormatError(version_at, "unsupported model version " + std::to_string(version));
  }

  AutoActivatorModel model;
  model.input_dim = in.u32_le("input_dim");
  const std::uint32_t unit_count = in.u32_le("unit count");
  std::set<Label> seen;
  std::size_t offset = 0;
  for (std::uint32_t t = 0; t < unit_count; ++t) {
    const std::string tag = "unit " + std::to_string(t);
    const std::size_t unit_at = in.offset();
    NeuralUnit unit;
    unit.input_dim = model.input_dim;
    unit.num_classes = in.u32_le(tag + " num_classes");
    if (unit.num_classes == 0) throw FormatError(unit_at, tag + " has zero classes");
    const std::uint32_t nodes = in.u32_le(tag + " node_count");
    const std::size_t act_at = in.offset();
    const std::uint8_t act = in.u8(tag + " activation");
    if (act > static_cast<std::uint8_t>(ActivationKind::kTanh)) {
      throw FormatError(act_at, tag + " has unknown activation " + std::to_string(act));
    }
    unit.activation = static_cast<ActivationKind>(act);

    std::vector<Label> labels;
    for (std::size_t c = 0; c < unit.num_classes; ++c) {
      const std::size_t lat = in.offset();
      const Label l = in.u32_le(tag + " class label");
      if (!labels.empty() && l <= labels.back()) {
        throw FormatError(lat, tag + " class labels are not sorted and distinct");
      }
      if (!seen.insert(l).second) {
        throw FormatError(lat, tag + " reuses class " + std::to_string(l));
      }
      labels.push_back(l);
    }

    const std::size_t thr_at = in.offset();
    unit.threshold = in.f64_le(tag + " threshold");
    const double upper = 1.0 - unit.alpha();
    const bool thr_ok = unit.num_classes == 1
                            ? (unit.threshold > -1.0 && unit.threshold <= 0.0)
                            : (unit.threshold >= 0.0 && unit.threshold <= upper);
    if (!std::isfinite(unit.threshold) || !thr_ok) {
      throw FormatError(thr_at, tag + " threshold out of range");
    }

    unit.w_in = read_matrix(in, tag + " w_in", model.input_dim, nodes);
    unit.b = read_matrix(in, tag + " b", nodes, 1);
    unit.w_out = read_matrix(in, tag + " w_out", nodes, unit.num_classes);
    unit.class_offset = offset;
    offset += unit.num_classes;

    model.label_map.push_back(std::move(labels));
    model.units.push_back(std::move(unit));
  }
  if (in.remaining() != 0) {
    throw FormatError(in.offset(), "trailing bytes after last unit");
  }
  return model;
}

void save_model(const AutoActivatorModel& model, const std::filesystem::path& path) {
  write_file(path, serialize_model(model));
}

AutoActivatorModel load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path));
}

}  // namespace aact

#include "aact/neural_unit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aact/error.hpp"
#include "aact/random.hpp"

namespace aact {

namespace {

// Per-class inequality values from precomputed inner products.
RealVector class_margins(const RealVector& e_dot_fit, const RealVector& e_sq,
                         double r, double mu) {
  return e_dot_fit - (1.0 - r - mu) * e_sq;
}

void check_one_hot(const RealMatrix& y) {
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      const double v = y(i, c);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        ones = -1;
        break;
      }
    }
    if (ones != 1) {
      throw Error(ErrorKind::kInvalidInput,
                  "target row " + std::to_string(i) + " is not one-hot");
    }
  }
}

bool all_rows_identical(const RealMatrix& x) {
  for (Eigen::Index i = 1; i < x.rows(); ++i) {
    if (x.row(i) != x.row(0)) return false;
  }
  return true;
}

RealMatrix select_rows(const RealMatrix& m, const std::vector<std::size_t>& rows) {
  RealMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kSigmoid: return "sigmoid";
    case ActivationKind::kTanh: return "tanh";
  }
  return "unknown";
}

ActivationKind parse_activation(std::string_view name) {
  if (name == "sigmoid") return ActivationKind::kSigmoid;
  if (name == "tanh") return ActivationKind::kTanh;
  throw Error(ErrorKind::kConfig, "unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxNodes: return "max_nodes";
    case StopReason::kExpectedAccuracy: return "expected_accuracy";
    case StopReason::kStalled: return "stalled";
    case StopReason::kValidationPlateau: return "validation_plateau";
  }
  return "unknown";
}

void GrowthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kConfig, msg); };
  if (step == 0) fail("step size l must be positive");
  if (t_max == 0) fail("t_max must be positive");
  if (!(r > 0.0 && r < 1.0)) fail("r must lie in (0, 1)");
  if (l_max == 0) fail("l_max must be positive");
  if (step > l_max) fail("step size l exceeds l_max");
  if (!(expected_accuracy > 0.0 && expected_accuracy <= 1.0)) {
    fail("expected accuracy must lie in (0, 1]");
  }
  if (!(scope > 0.0) || !std::isfinite(scope)) fail("scope must be positive");
  if (stall_limit == 0) fail("stall limit must be positive");
  if (r_levels == 0) fail("r_levels must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    fail("validation fraction must lie in [0, 1)");
  }
  if (val_fraction > 0.0 && val_patience == 0) fail("validation patience must be positive");
}

double GrowthConfig::relaxed_r(std::size_t level) const {
  return 1.0 - (1.0 - r) * std::pow(10.0, -static_cast<double>(level));
}

double balance_coefficient(double r, std::size_t nodes_after) {
  return (1.0 - r) / static_cast<double>(nodes_after + 1);
}

RealMatrix activate(const RealMatrix& x, const RealMatrix& w,
                    const RealVector& b, ActivationKind kind) {
  if (x.cols() != w.rows() || w.cols() != b.size()) {
    throw Error(ErrorKind::kDimension,
                "activate: x is " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()) + ", w is " +
                    std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                    ", b has " + std::to_string(b.size()));
  }
  RealMatrix z = x * w;
  z.rowwise() += b.transpose();
  switch (kind) {
    case ActivationKind::kSigmoid:
      return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    case ActivationKind::kTanh:
      return z.array().tanh().matrix();
  }
  return z;
}

RealMatrix candidate_beta(const RealMatrix& h, const RealMatrix& e) {
  if (h.rows() != e.rows()) {
    throw Error(ErrorKind::kDimension, "candidate_beta: activations have " +
                                           std::to_string(h.rows()) +
                                           " rows, residual has " +
                                           std::to_string(e.rows()));
  }
  const RealMatrix gram = h.transpose() * h;
  return pinv_full(gram) * (h.transpose() * e);
}

bool IndicatorResult::accepted() const {
  return per_class.size() > 0 && (per_class.array() > 0.0).all();
}

IndicatorResult supervisory_indicator(const RealMatrix& e, const RealMatrix& h,
                                      const RealMatrix& beta, double r,
                                      double mu) {
  if (!(r > 0.0 && r < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "r must lie in (0, 1)");
  }
  if (!(mu >= 0.0 && mu <= 1.0 - r)) {
    throw Error(ErrorKind::kInvalidInput, "mu must lie in [0, 1 - r]");
  }
  if (h.rows() != e.rows() || h.cols() != beta.rows() || beta.cols() != e.cols()) {
    throw Error(ErrorKind::kDimension, "supervisory_indicator: inconsistent shapes");
  }
  const RealMatrix fit = h * beta;
  const RealVector e_dot_fit = e.cwiseProduct(fit).colwise().sum().transpose();
  const RealVector e_sq = e.colwise().squaredNorm().transpose();
  IndicatorResult out;
  out.per_class = class_margins(e_dot_fit, e_sq, r, mu);
  out.xi = out.per_class.sum();
  return out;
}

RealMatrix NeuralUnit::hidden(const RealMatrix& x) const {
  return activate(x, w_in, b, activation);
}

RealMatrix NeuralUnit::logits(const RealMatrix& x) const {
  return hidden(x) * w_out;
}

ResidualState ResidualState::from(RealMatrix e) {
  ResidualState s;
  s.sq_norm = e.squaredNorm();
  s.e = std::move(e);
  s.history.push_back(s.sq_norm);
  return s;
}

std::optional<CandidateBatch> try_recruit(const NeuralUnit& unit,
                                          const ResidualState& resid,
                                          const RealMatrix& x,
                                          const GrowthConfig& cfg,
                                          std::uint64_t round_key) {
  const std::size_t l = cfg.step;
  const std::size_t nodes_after = unit.node_count() + l;
  if (nodes_after > cfg.l_max) {
    throw Error(ErrorKind::kInvalidInput,
                "try_recruit: unit would exceed l_max nodes");
  }
  if (static_cast<std::size_t>(x.cols()) != unit.input_dim ||
      x.rows() != resid.e.rows()) {
    throw Error(ErrorKind::kDimension, "try_recruit: data does not match unit");
  }

  const auto m = x.cols();
  const auto li = static_cast<Eigen::Index>(l);
  const auto pool = static_cast<Eigen::Index>(l * cfg.t_max);

  // All draws go through one GEMM; draw k owns columns [k l, (k+1) l).
  RealMatrix w_pool(m, pool);
  RealVector b_pool(pool);
  for (std::size_t k = 0; k < cfg.t_max; ++k) {
    Substream rng(derive_seed(round_key, {k}));
    const auto c0 = static_cast<Eigen::Index>(k * l);
    for (Eigen::Index j = 0; j < li; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) {
        w_pool(i, c0 + j) = rng.uniform(-cfg.scope, cfg.scope);
      }
    }
    for (Eigen::Index j = 0; j < li; ++j) {
      b_pool(c0 + j) = rng.uniform(-cfg.scope, cfg.scope);
    }
  }
  const RealMatrix h_pool = activate(x, w_pool, b_pool, unit.activation);

  struct Scored {
    RealMatrix beta;
    RealVector e_dot_fit;
    double reduction;
  };
  std::vector<Scored> scored;
  scored.reserve(cfg.t_max);
  const RealVector e_sq = resid.e.colwise().squaredNorm().transpose();
  for (std::size_t k = 0; k < cfg.t_max; ++k) {
    const auto h = h_pool.middleCols(static_cast<Eigen::Index>(k * l), li);
    RealMatrix beta = candidate_beta(h, resid.e);
    const RealMatrix fit = h * beta;
    RealVector e_dot_fit = resid.e.cwiseProduct(fit).colwise().sum().transpose();
    const double reduction = resid.sq_norm - (resid.e - fit).squaredNorm();
    scored.push_back({std::move(beta), std::move(e_dot_fit), reduction});
  }

  for (std::size_t level = 0; level < cfg.r_levels; ++level) {
    const double r = cfg.relaxed_r(level);
    if (!(r < 1.0)) break;
    const double mu = balance_coefficient(r, nodes_after);
    std::optional<std::size_t> best;
    IndicatorResult best_indicator;
    for (std::size_t k = 0; k < cfg.t_max; ++k) {
      IndicatorResult ind;
      ind.per_class = class_margins(scored[k].e_dot_fit, e_sq, r, mu);
      ind.xi = ind.per_class.sum();
      if (!ind.accepted()) continue;
      if (!best || scored[k].reduction > scored[*best].reduction) {
        best = k;
        best_indicator = std::move(ind);
      }
    }
    if (!best) continue;

    const auto c0 = static_cast<Eigen::Index>(*best * l);
    CandidateBatch out;
    out.w = w_pool.middleCols(c0, li);
    out.b = b_pool.segment(c0, li);
    out.h = h_pool.middleCols(c0, li);
    out.beta = std::move(scored[*best].beta);
    out.indicator = std::move(best_indicator);
    out.reduction = scored[*best].reduction;
    out.draw_index = *best;
    out.r_level = level;
    out.r = r;
    out.mu = mu;
    return out;
  }
  return std::nullopt;
}

RealMatrix row_softmax(const RealMatrix& logits) {
  RealMatrix p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - mx).exp().matrix();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

RealMatrix unit_probabilities(const RealMatrix& logits) {
  if (logits.cols() == 1) {
    return logits.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  }
  return row_softmax(logits);
}

double compute_activation_threshold(const RealMatrix& logits,
                                    std::size_t num_classes) {
  if (num_classes == 0 || static_cast<std::size_t>(logits.cols()) != num_classes) {
    throw Error(ErrorKind::kDimension,
                "activation threshold: outputs have " +
                    std::to_string(logits.cols()) + " columns for " +
                    std::to_string(num_classes) + " classes");
  }
  if (logits.rows() == 0) {
    throw Error(ErrorKind::kInvalidInput, "activation threshold of zero rows");
  }
  const RealMatrix p = unit_probabilities(logits);
  const double alpha = 1.0 / static_cast<double>(num_classes);
  const double thr = p.rowwise().maxCoeff().mean() - alpha;
  return num_classes == 1 ? thr : std::clamp(thr, 0.0, 1.0 - alpha);
}

double argmax_accuracy(const RealMatrix& outputs, const RealMatrix& y) {
  if (outputs.rows() != y.rows() || outputs.cols() != y.cols()) {
    throw Error(ErrorKind::kDimension, "argmax_accuracy: shape mismatch");
  }
  if (y.rows() == 0) return 0.0;
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    Eigen::Index pred = 0;
    Eigen::Index truth = 0;
    outputs.row(i).maxCoeff(&pred);
    y.row(i).maxCoeff(&truth);
    if (pred == truth) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(y.rows());
}

NeuralUnit grow_unit(const RealMatrix& x_all, const RealMatrix& y_all,
                     const GrowthConfig& cfg, ActivationKind kind,
                     GrowthTrace* trace) {
  cfg.validate();
  if (x_all.rows() != y_all.rows()) {
    throw Error(ErrorKind::kDimension, "grow_unit: x and y disagree on rows");
  }
  if (x_all.rows() == 0 || y_all.cols() == 0) {
    throw Error(ErrorKind::kInvalidTask, "grow_unit: empty task");
  }
  require_finite(x_all, "task inputs");
  check_one_hot(y_all);
  if (x_all.rows() < 2 || all_rows_identical(x_all)) {
    throw Error(ErrorKind::kInvalidTask,
                "grow_unit: task holds a single distinct sample");
  }

  // Optional validation hold-out.
  RealMatrix x, y, x_val, y_val;
  const bool use_val = cfg.val_fraction > 0.0;
  if (use_val) {
    const auto n = static_cast<std::size_t>(x_all.rows());
    const auto n_val = static_cast<std::size_t>(std::floor(cfg.val_fraction * static_cast<double>(n)));
    if (n_val == 0 || n_val >= n) {
      throw Error(ErrorKind::kInvalidTask,
                  "grow_unit: task too small for the validation fraction");
    }
    Substream rng(derive_seed(cfg.seed, {0x76616cULL}));
    const auto perm = permutation(n, rng);
    std::vector<std::size_t> val_rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> fit_rows(perm.begin() + static_cast<std::ptrdiff_t>(n_val), perm.end());
    std::sort(val_rows.begin(), val_rows.end());
    std::sort(fit_rows.begin(), fit_rows.end());
    x = select_rows(x_all, fit_rows);
    y = select_rows(y_all, fit_rows);
    x_val = select_rows(x_all, val_rows);
    y_val = select_rows(y_all, val_rows);
  } else {
    x = x_all;
    y = y_all;
  }

  NeuralUnit unit;
  unit.input_dim = static_cast<std::size_t>(x.cols());
  unit.num_classes = static_cast<std::size_t>(y.cols());
  unit.activation = kind;
  unit.w_in.resize(x.cols(), 0);
  unit.b.resize(0);
  unit.w_out.resize(0, y.cols());
  unit.pinv_state = PinvState{RealMatrix(x.rows(), 0), RealMatrix(0, x.rows())};

  ResidualState resid = ResidualState::from(y);
  GrowthTrace local_trace;
  GrowthTrace& tr = trace ? *trace : local_trace;
  tr = GrowthTrace{};

  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_nodes = 0;
  RealMatrix best_w_out = unit.w_out;
  std::size_t since_best = 0;

  std::size_t stalls = 0;
  std::size_t round = 0;
  while (true) {
    if (unit.node_count() + cfg.step > cfg.l_max) {
      tr.stop = StopReason::kMaxNodes;
      break;
    }
    const std::uint64_t key = derive_seed(cfg.seed, {round});
    const std::size_t this_round = round++;
    std::optional<CandidateBatch> cand = try_recruit(unit, resid, x, cfg, key);
    if (!cand) {
      if (++stalls >= cfg.stall_limit) {
        tr.stop = StopReason::kStalled;
        break;
      }
      continue;
    }
    stalls = 0;

    PinvState& state = *unit.pinv_state;
    if (state.empty()) {
      state = pinv_extend(state, cand->h);
      unit.w_out = state.a_pinv * y;
    } else {
      const PinvBlocks blocks = pinv_blocks(state, cand->h);
      unit.w_out = weights_extend(unit.w_out, blocks, y);
      state = pinv_extend(state, cand->h, blocks);
    }
    const Eigen::Index old_nodes = unit.w_in.cols();
    unit.w_in.conservativeResize(Eigen::NoChange, old_nodes + cand->w.cols());
    unit.w_in.rightCols(cand->w.cols()) = cand->w;
    unit.b.conservativeResize(old_nodes + cand->b.size());
    unit.b.tail(cand->b.size()) = cand->b;

    const RealMatrix fitted = state.a * unit.w_out;
    const double before = resid.sq_norm;
    resid.e = y - fitted;
    resid.sq_norm = resid.e.squaredNorm();
    resid.history.push_back(resid.sq_norm);

    RecruitStep step;
    step.round = this_round;
    step.nodes_after = unit.node_count();
    step.r = cand->r;
    step.mu = cand->mu;
    step.sq_norm_before = before;
    step.sq_norm_after = resid.sq_norm;
    step.candidate_reduction = cand->reduction;

    bool plateau = false;
    if (use_val) {
      const RealMatrix val_out = unit.logits(x_val);
      const double val_resid = (y_val - val_out).squaredNorm();
      step.accuracy = argmax_accuracy(val_out, y_val);
      if (val_resid < best_val) {
        best_val = val_resid;
        best_nodes = unit.node_count();
        best_w_out = unit.w_out;
        since_best = 0;
      } else if (++since_best >= cfg.val_patience) {
        plateau = true;
      }
    } else {
      step.accuracy = argmax_accuracy(fitted, y);
    }
    tr.steps.push_back(step);

    if (plateau) {
      tr.stop = StopReason::kValidationPlateau;
      break;
    }
    if (step.accuracy >= cfg.expected_accuracy) {
      tr.stop = StopReason::kExpectedAccuracy;
      break;
    }
  }
  tr.rounds = round;

  // Roll back to the best validation point.
  if (use_val && best_nodes > 0 && best_nodes < unit.node_count()) {
    const auto keep = static_cast<Eigen::Index>(best_nodes);
    unit.w_in = unit.w_in.leftCols(keep).eval();
    unit.b = unit.b.head(keep).eval();
    unit.w_out = best_w_out;
    unit.pinv_state->a = unit.pinv_state->a.leftCols(keep).eval();
  }

  const RealMatrix train_logits =
      unit.node_count() == 0 ? RealMatrix::Zero(x.rows(), y.cols())
                             : RealMatrix(unit.pinv_state->a * unit.w_out);
  unit.threshold = compute_activation_threshold(train_logits, unit.num_classes);
  unit.freeze();
  return unit;
}

}  // namespace aact

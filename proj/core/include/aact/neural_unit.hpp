#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "aact/linalg.hpp"

namespace aact {

enum class ActivationKind : std::uint8_t { kSigmoid = 0, kTanh = 1 };

std::string_view to_string(ActivationKind kind);
ActivationKind parse_activation(std::string_view name);

// Hyper-parameters of unit growth. Defaults are the MNIST/FashionMNIST
// settings: step 10, 50 draws per round, r = 0.9, at most 200 nodes, stop at
// 99% training accuracy.
struct GrowthConfig {
  std::size_t step = 10;             // nodes per candidate batch (l)
  std::size_t t_max = 50;            // candidate batches drawn per round
  double r = 0.9;                    // residual decrease rate, 0 < r < 1
  std::size_t l_max = 200;           // node cap per unit
  double expected_accuracy = 0.99;   // stop once reached, in (0, 1]
  double scope = 1.0;                // weights and biases ~ U[-scope, scope]
  std::uint64_t seed = 0;

  // Consecutive empty rounds tolerated before growth stops.
  std::size_t stall_limit = 3;
  // Number of rungs on the r relaxation ladder r_k = 1 - (1 - r) 10^-k,
  // k = 0 .. r_levels-1. A round first looks for a qualifying candidate at
  // r_0 = r and only moves to looser rungs when none qualifies. 1 disables
  // relaxation.
  std::size_t r_levels = 6;

  // Fraction of the task's rows held out for validation (0 disables). When
  // enabled, the accuracy stop test runs on the held-out rows, and growth
  // rolls back to the lowest validation residual after `val_patience`
  // recruitments without improvement.
  double val_fraction = 0.0;
  std::size_t val_patience = 3;

  // Throws Error{kConfig} on violated invariants.
  void validate() const;

  double relaxed_r(std::size_t level) const;
};

// mu_L = (1 - r) / (L + 1), L the node count after recruitment.
double balance_coefficient(double r, std::size_t nodes_after);

// kind(x * w + b), b broadcast over rows.
RealMatrix activate(const RealMatrix& x, const RealMatrix& w,
                    const RealVector& b, ActivationKind kind);

// Least-squares fit of residual columns by candidate activations:
// (h^T h)^+ h^T e.
RealMatrix candidate_beta(const RealMatrix& h, const RealMatrix& e);

struct IndicatorResult {
  double xi = 0.0;
  RealVector per_class;

  // Every class inequality must hold strictly.
  bool accepted() const;
};

// per_class[c] = <e_c, (h beta)_c> - (1 - r - mu) <e_c, e_c>, xi = sum.
IndicatorResult supervisory_indicator(const RealMatrix& e, const RealMatrix& h,
                                      const RealMatrix& beta, double r,
                                      double mu);

struct CandidateBatch {
  RealMatrix w;     // M x l input weights
  RealVector b;     // l biases
  RealMatrix h;     // N x l activations on the training rows
  RealMatrix beta;  // l x C candidate-local output weights
  IndicatorResult indicator;
  double reduction = 0.0;  // ||e||^2 - ||e - h beta||^2
  std::size_t draw_index = 0;
  std::size_t r_level = 0;
  double r = 0.0;   // rung of the relaxation ladder that accepted it
  double mu = 0.0;
};

struct NeuralUnit {
  std::size_t input_dim = 0;
  std::size_t num_classes = 0;
  RealMatrix w_in;   // M x L
  RealVector b;      // L
  RealMatrix w_out;  // L x C
  ActivationKind activation = ActivationKind::kSigmoid;
  double threshold = 0.0;
  std::size_t class_offset = 0;
  std::optional<PinvState> pinv_state;  // only while growing

  std::size_t node_count() const { return static_cast<std::size_t>(w_in.cols()); }
  double alpha() const { return 1.0 / static_cast<double>(num_classes); }

  // Hidden activations for x (N x L).
  RealMatrix hidden(const RealMatrix& x) const;
  // Raw outputs hidden(x) * w_out (N x C).
  RealMatrix logits(const RealMatrix& x) const;

  // Drops training-only state. Called once the session ends.
  void freeze() { pinv_state.reset(); }
};

struct ResidualState {
  RealMatrix e;
  double sq_norm = 0.0;
  std::vector<double> history;

  static ResidualState from(RealMatrix e);
};

// Draws up to cfg.t_max candidate batches and returns the qualifying batch
// with the largest residual reduction (earliest draw wins ties), or nullopt.
// Draw k uses the substream derive_seed(round_key, {k}).
std::optional<CandidateBatch> try_recruit(const NeuralUnit& unit,
                                          const ResidualState& resid,
                                          const RealMatrix& x,
                                          const GrowthConfig& cfg,
                                          std::uint64_t round_key);

enum class StopReason { kMaxNodes, kExpectedAccuracy, kStalled, kValidationPlateau };

std::string_view to_string(StopReason reason);

struct RecruitStep {
  std::size_t round = 0;
  std::size_t nodes_after = 0;
  double r = 0.0;
  double mu = 0.0;
  double sq_norm_before = 0.0;
  double sq_norm_after = 0.0;  // after the full least-squares re-solve
  double candidate_reduction = 0.0;
  double accuracy = 0.0;       // the accuracy the stop test saw
};

struct GrowthTrace {
  std::vector<RecruitStep> steps;
  StopReason stop = StopReason::kStalled;
  std::size_t rounds = 0;
};

// Grows one unit on one-hot targets y. The returned unit is frozen and has
// its activation threshold set.
NeuralUnit grow_unit(const RealMatrix& x, const RealMatrix& y,
                     const GrowthConfig& cfg, ActivationKind kind,
                     GrowthTrace* trace = nullptr);

// Row-wise softmax with max subtraction.
RealMatrix row_softmax(const RealMatrix& logits);

// Class probabilities of a unit's raw outputs. A single-class unit has a
// constant softmax, so its probability is the sigmoid of the raw output.
RealMatrix unit_probabilities(const RealMatrix& logits);

// mean over rows of (max_c prob - 1/C). Lies in [0, 1 - 1/C] for C >= 2 and
// in (-1, 0) for single-class units.
double compute_activation_threshold(const RealMatrix& logits,
                                    std::size_t num_classes);

// Fraction of rows whose argmax matches the one-hot target's argmax.
double argmax_accuracy(const RealMatrix& outputs, const RealMatrix& y);

}  // namespace aact

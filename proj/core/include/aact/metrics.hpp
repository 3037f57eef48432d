#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace aact {

// Accuracy as an exact count.
struct Fraction {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;

  double value() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

// Lower-triangular record: at(T, t) is the accuracy on task t after training
// session T (both 0-based, t <= T).
class AccuracyMatrix {
 public:
  explicit AccuracyMatrix(std::size_t t_total);

  std::size_t t_total() const { return rows_.size(); }

  void set(std::size_t session, std::size_t task, Fraction acc);
  const std::optional<Fraction>& at(std::size_t session, std::size_t task) const;
  bool row_complete(std::size_t session) const;

  // Mean of row `session` (ACA after that session).
  double row_mean(std::size_t session) const;

 private:
  std::vector<std::vector<std::optional<Fraction>>> rows_;
};

// Mean of the final row.
double aca(const AccuracyMatrix& m);
// Mean over sessions of each row's mean.
double aia(const AccuracyMatrix& m);
// (1/(T-1)) sum_{t<T} (R[T][t] - R[t][t]); needs T >= 2.
double bwt(const AccuracyMatrix& m);
// Average over t < T of max_{s<T} R[s][t] - R[T][t]. Informational.
double forgetting(const AccuracyMatrix& m);

struct BudgetReport {
  double model_mb = 0.0;
  double exemplar_mb = 0.0;
  double total_mb = 0.0;
  std::optional<double> scale_ratio_pct;  // only with a non-empty initial model
};

// Everything counted as 32-bit floats: MB = floats * 4 / 2^20.
BudgetReport memory_budget(std::uint64_t param_count, std::uint64_t exemplar_count,
                           std::uint64_t exemplar_floats_each,
                           std::uint64_t initial_model_params);

double floats_to_mb(std::uint64_t floats);

}  // namespace aact

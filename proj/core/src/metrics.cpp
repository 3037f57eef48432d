#include "aact/metrics.hpp"

#include <algorithm>
#include <string>

#include "aact/error.hpp"

namespace aact {

AccuracyMatrix::AccuracyMatrix(std::size_t t_total) : rows_(t_total) {
  for (std::size_t s = 0; s < t_total; ++s) rows_[s].resize(s + 1);
}

void AccuracyMatrix::set(std::size_t session, std::size_t task, Fraction acc) {
  if (session >= rows_.size() || task > session) {
    throw Error(ErrorKind::kInvalidInput,
                "accuracy entry (" + std::to_string(session) + ", " +
                    std::to_string(task) + ") outside the lower triangle");
  }
  if (acc.total == 0 || acc.correct > acc.total) {
    throw Error(ErrorKind::kInvalidInput, "accuracy fraction outside [0, 1]");
  }
  rows_[session][task] = acc;
}

const std::optional<Fraction>& AccuracyMatrix::at(std::size_t session,
                                                  std::size_t task) const {
  if (session >= rows_.size() || task > session) {
    throw Error(ErrorKind::kInvalidInput, "accuracy entry outside the lower triangle");
  }
  return rows_[session][task];
}

bool AccuracyMatrix::row_complete(std::size_t session) const {
  if (session >= rows_.size()) return false;
  return std::all_of(rows_[session].begin(), rows_[session].end(),
                     [](const auto& v) { return v.has_value(); });
}

double AccuracyMatrix::row_mean(std::size_t session) const {
  if (!row_complete(session)) {
    throw Error(ErrorKind::kState, "accuracy row " + std::to_string(session) + " is incomplete");
  }
  double sum = 0.0;
  for (const auto& v : rows_[session]) sum += v->value();
  return sum / static_cast<double>(rows_[session].size());
}

double aca(const AccuracyMatrix& m) {
  if (m.t_total() == 0) throw Error(ErrorKind::kState, "empty accuracy matrix");
  return m.row_mean(m.t_total() - 1);
}

double aia(const AccuracyMatrix& m) {
  if (m.t_total() == 0) throw Error(ErrorKind::kState, "empty accuracy matrix");
  double sum = 0.0;
  for (std::size_t s = 0; s < m.t_total(); ++s) sum += m.row_mean(s);
  return sum / static_cast<double>(m.t_total());
}

namespace {

double entry(const AccuracyMatrix& m, std::size_t s, std::size_t t) {
  const auto& v = m.at(s, t);
  if (!v) {
    throw Error(ErrorKind::kState, "accuracy entry (" + std::to_string(s) + ", " +
                                       std::to_string(t) + ") is missing");
  }
  return v->value();
}

}  // namespace

double bwt(const AccuracyMatrix& m) {
  const std::size_t T = m.t_total();
  if (T < 2) throw Error(ErrorKind::kState, "backward transfer needs at least two tasks");
  double sum = 0.0;
  for (std::size_t t = 0; t + 1 < T; ++t) sum += entry(m, T - 1, t) - entry(m, t, t);
  return sum / static_cast<double>(T - 1);
}

double forgetting(const AccuracyMatrix& m) {
  const std::size_t T = m.t_total();
  if (T < 2) throw Error(ErrorKind::kState, "forgetting needs at least two tasks");
  double sum = 0.0;
  for (std::size_t t = 0; t + 1 < T; ++t) {
    double best = entry(m, t, t);
    for (std::size_t s = t + 1; s + 1 < T; ++s) best = std::max(best, entry(m, s, t));
    sum += best - entry(m, T - 1, t);
  }
  return sum / static_cast<double>(T - 1);
}

double floats_to_mb(std::uint64_t floats) {
  return static_cast<double>(floats) * 4.0 / (1024.0 * 1024.0);
}

BudgetReport memory_budget(std::uint64_t param_count, std::uint64_t exemplar_count,
                           std::uint64_t exemplar_floats_each,
                           std::uint64_t initial_model_params) {
  BudgetReport out;
  out.model_mb = floats_to_mb(param_count);
  out.exemplar_mb = floats_to_mb(exemplar_count * exemplar_floats_each);
  out.total_mb = out.model_mb + out.exemplar_mb;
  if (initial_model_params > 0) {
    out.scale_ratio_pct = 100.0 * out.total_mb / floats_to_mb(initial_model_params);
  }
  return out;
}

}  // namespace aact

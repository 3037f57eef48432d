#include "aact/linalg.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "aact/error.hpp"

namespace aact {

namespace {

void require_finite_numeric(const RealMatrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kNumerical,
                "non-finite intermediate in " + std::string(what));
  }
}

std::string shape(const RealMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void require_finite(const RealMatrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kInvalidInput,
                std::string(what) + " contains NaN or Inf");
  }
}

namespace {

// SVD pseudoinverse; singular values at or below max(floor, standard cutoff)
// are dropped.
RealMatrix pinv_cut(const RealMatrix& a, double floor) {
  if (a.size() == 0) return RealMatrix::Zero(a.cols(), a.rows());

  Eigen::BDCSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const double cutoff =
      std::max(floor, static_cast<double>(std::max(a.rows(), a.cols())) * s(0) *
                          std::numeric_limits<double>::epsilon());
  RealVector s_inv = RealVector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) s_inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

RealMatrix pinv_full(const RealMatrix& a) {
  require_finite(a, "pinv_full input");
  return pinv_cut(a, 0.0);
}

PinvBlocks pinv_blocks(const PinvState& state, const RealMatrix& g) {
  if (state.empty()) {
    throw Error(ErrorKind::kState, "pinv_blocks needs a non-empty base state");
  }
  if (g.rows() != state.rows()) {
    throw Error(ErrorKind::kDimension, "extension block " + shape(g) +
                                           " does not match design rows " +
                                           std::to_string(state.rows()));
  }
  require_finite(g, "extension block");

  PinvBlocks out;
  const Eigen::Index l = g.cols();
  out.d = state.a_pinv * g;
  const RealMatrix c = g - state.a * out.d;
  const double tol = kZeroResidualTol * std::max(1.0, g.norm());
  out.c_is_zero = c.norm() <= tol;
  const RealMatrix c_pinv = out.c_is_zero ? RealMatrix::Zero(l, c.rows()) : pinv_cut(c, tol);
  // p projects onto the columns of g that add nothing new to span(a).
  const RealMatrix p = RealMatrix::Identity(l, l) - c_pinv * c;
  if (p.norm() <= kZeroResidualTol) {
    out.b_t = c_pinv;
  } else {
    const RealMatrix k =
        (RealMatrix::Identity(l, l) + p * out.d.transpose() * out.d * p).ldlt().solve(p);
    const RealMatrix dt_ap = out.d.transpose() * state.a_pinv;
    out.b_t = c_pinv + k * (dt_ap - (dt_ap * g) * c_pinv);
  }
  require_finite_numeric(out.d, "pinv update D");
  require_finite_numeric(out.b_t, "pinv update B^T");
  return out;
}

PinvState pinv_extend(const PinvState& state, const RealMatrix& g,
                      const PinvBlocks& blocks) {
  const Eigen::Index n = state.rows();
  const Eigen::Index old_cols = state.cols();
  const Eigen::Index l = g.cols();

  PinvState next;
  next.a.resize(n, old_cols + l);
  next.a << state.a, g;
  next.a_pinv.resize(old_cols + l, n);
  next.a_pinv.topRows(old_cols) = state.a_pinv - blocks.d * blocks.b_t;
  next.a_pinv.bottomRows(l) = blocks.b_t;
  return next;
}

PinvState pinv_extend(const PinvState& state, const RealMatrix& g) {
  if (state.empty()) {
    if (state.rows() != 0 && g.rows() != state.rows()) {
      throw Error(ErrorKind::kDimension, "extension block " + shape(g) +
                                             " does not match design rows " +
                                             std::to_string(state.rows()));
    }
    return PinvState{g, pinv_full(g)};
  }
  return pinv_extend(state, g, pinv_blocks(state, g));
}

RealMatrix weights_extend(const RealMatrix& w, const PinvBlocks& blocks,
                          const RealMatrix& y) {
  if (blocks.b_t.cols() != y.rows()) {
    throw Error(ErrorKind::kDimension,
                "targets " + shape(y) + " do not match design rows " +
                    std::to_string(blocks.b_t.cols()));
  }
  if (w.rows() != blocks.d.rows() || w.cols() != y.cols()) {
    throw Error(ErrorKind::kDimension,
                "weights " + shape(w) + " inconsistent with update blocks");
  }
  const RealMatrix b_t_y = blocks.b_t * y;
  RealMatrix out(w.rows() + b_t_y.rows(), y.cols());
  out.topRows(w.rows()) = w - blocks.d * b_t_y;
  out.bottomRows(b_t_y.rows()) = b_t_y;
  require_finite_numeric(out, "weights_extend");
  return out;
}

RealMatrix weights_extend(const RealMatrix& w, const PinvState& state,
                          const RealMatrix& g, const RealMatrix& y) {
  if (g.rows() != y.rows()) {
    throw Error(ErrorKind::kDimension, "extension block " + shape(g) +
                                           " and targets " + shape(y) +
                                           " disagree on rows");
  }
  if (state.empty()) {
    if (w.size() != 0) {
      throw Error(ErrorKind::kDimension,
                  "empty base state requires empty weights");
    }
    return pinv_full(g) * y;
  }
  return weights_extend(w, pinv_blocks(state, g), y);
}

LstsqResult lstsq_residual(const RealMatrix& a, const RealMatrix& y) {
  if (a.rows() != y.rows()) {
    throw Error(ErrorKind::kDimension,
                "design " + shape(a) + " and targets " + shape(y) +
                    " disagree on rows");
  }
  require_finite(y, "lstsq targets");
  LstsqResult out;
  out.w = pinv_full(a) * y;
  out.resid = (a * out.w - y).squaredNorm();
  return out;
}

}  // namespace aact

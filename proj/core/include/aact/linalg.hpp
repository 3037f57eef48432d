#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace aact {

// Dense 64-bit matrix. Eigen stores column-major; every on-disk format in
// this project spells out its own element order.
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Throws Error{kInvalidInput} when any entry is NaN or Inf.
void require_finite(const RealMatrix& m, std::string_view what);

// Moore-Penrose pseudoinverse through SVD. Singular values at or below
// max(rows, cols) * sigma_max * 2^-52 are treated as zero.
RealMatrix pinv_full(const RealMatrix& a);

// A design matrix together with its pseudoinverse. Immutable once built;
// extension returns a new state.
struct PinvState {
  RealMatrix a;       // N x L
  RealMatrix a_pinv;  // L x N

  bool empty() const { return a.cols() == 0; }
  Eigen::Index rows() const { return a.rows(); }
  Eigen::Index cols() const { return a.cols(); }
};

// Intermediate blocks of the partitioned pseudoinverse update for
// A' = [A | G]:  D = A^+ G,  C = G - A D.
//   C of full column rank:  B^T = C^+
//   C == 0:                 B^T = (D^T D + I)^-1 D^T A^+
//   otherwise (Cline):      B^T = C^+ + P K D^T A^+ (I - G C^+),
//                           P = I - C^+ C,  K = (I + P D^T D P)^-1
// The general form reduces to the first two in their cases.
struct PinvBlocks {
  RealMatrix d;    // L x l
  RealMatrix b_t;  // l x N
  bool c_is_zero = false;
};

// Relative threshold for deciding C == 0:  ||C||_F <= kZeroResidualTol * max(1, ||G||_F).
inline constexpr double kZeroResidualTol = 1e-10;

PinvBlocks pinv_blocks(const PinvState& state, const RealMatrix& g);

// State for [state.a | g]. Extending an empty state is pinv_full(g).
PinvState pinv_extend(const PinvState& state, const RealMatrix& g);

// Output weights for [state.a | g] given the weights w = state.a_pinv * y:
//   [ w - D B^T y ; B^T y ]
// `state` is the state *before* extension.
RealMatrix weights_extend(const RealMatrix& w, const PinvState& state,
                          const RealMatrix& g, const RealMatrix& y);

// Same as above with precomputed blocks (avoids recomputing D and B^T when
// the caller also extends the state).
RealMatrix weights_extend(const RealMatrix& w, const PinvBlocks& blocks,
                          const RealMatrix& y);

// New state from precomputed blocks.
PinvState pinv_extend(const PinvState& state, const RealMatrix& g,
                      const PinvBlocks& blocks);

struct LstsqResult {
  RealMatrix w;
  double resid = 0.0;  // ||a w - y||_F^2
};

LstsqResult lstsq_residual(const RealMatrix& a, const RealMatrix& y);

}  // namespace aact

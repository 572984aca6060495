#pragma once

// Split-ReLu message passing:
//
//   H0 = X
//   H(l+1) = [A H(l) Wp(l)]+ - [A H(l) Wn(l)]+
//   out = sum_l [H(l) Wop(l)]+ - [H(l) Won(l)]+
//
// With Wn = -Wp and Won = -Wop every layer is linear, so initializing from the
// closed-form W* reproduces the linear model exactly.

#include "isvd/linop.hpp"
#include "isvd/types.hpp"

#include <vector>

namespace isvd {

struct SplitReluNet {
  std::vector<Matrix> Wp, Wn;    // L layers, d x d
  std::vector<Matrix> Wop, Won;  // L + 1 taps, d x y

  int layers() const { return static_cast<int>(Wp.size()); }
};

/// Wp = I, Wn = -I, and output taps +-W*[d l : d (l + 1)].
SplitReluNet splitrelu_init(const Matrix& W, Index d, int layers);

Matrix splitrelu_forward(const SplitReluNet& net, const LinOp& adj, const Matrix& X);

}  // namespace isvd

#pragma once

#include "aicare/num/tape.hpp"

namespace aicare::num {

/// Weights of a group of independent GRU cells evaluated side by side
/// (one group per feature channel). G = groups, I = input size, H = hidden.
struct GruWeights {
  Var input_rz;   // [G, I, 2H]  reset | update
  Var input_n;    // [G, I, H]
  Var hidden_rz;  // [G, H, 2H]
  Var hidden_n;   // [G, H, H]
  Var bias_rz;    // [G, 1, 2H]
  Var bias_n;     // [G, 1, H]
};

/// One GRU step for every group at once; x is [G, B, I], h is [G, B, H].
///
///   r  = sigmoid(x Wr + h Ur + br)
///   z  = sigmoid(x Wz + h Uz + bz)
///   n  = tanh(x Wn + (r * h) Un + bn)
///   h' = (1 - z) * h + z * n
///
/// The reset gate is applied to h before the candidate product.
Var gru_cell_step(const Var& x, const Var& h, const GruWeights& w);

}  // namespace aicare::num

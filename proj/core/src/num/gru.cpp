#include "aicare/num/gru.hpp"

#include <stdexcept>

#include "aicare/num/ops.hpp"

namespace aicare::num {

Var gru_cell_step(const Var& x, const Var& h, const GruWeights& w) {
  const Shape& xs = x.shape();
  const Shape& hs = h.shape();
  if (xs.size() != 3 || hs.size() != 3 || xs[0] != hs[0] || xs[1] != hs[1]) {
    throw std::invalid_argument("gru_cell_step: x " + to_string(xs) + " and h " + to_string(hs) +
                                " must be [G,B,I] and [G,B,H]");
  }
  const std::size_t groups = xs[0];
  const std::size_t input = xs[2];
  const std::size_t hidden = hs[2];
  const Shape want_irz{groups, input, 2 * hidden};
  const Shape want_in{groups, input, hidden};
  const Shape want_hrz{groups, hidden, 2 * hidden};
  const Shape want_hn{groups, hidden, hidden};
  const Shape want_brz{groups, 1, 2 * hidden};
  const Shape want_bn{groups, 1, hidden};
  if (w.input_rz.shape() != want_irz || w.input_n.shape() != want_in ||
      w.hidden_rz.shape() != want_hrz || w.hidden_n.shape() != want_hn ||
      w.bias_rz.shape() != want_brz || w.bias_n.shape() != want_bn) {
    throw std::invalid_argument("gru_cell_step: weight shapes inconsistent with hidden size " +
                                std::to_string(hidden));
  }

  Var rz = sigmoid(bmm(x, w.input_rz) + bmm(h, w.hidden_rz) + w.bias_rz);
  Var r = slice(rz, 2, 0, hidden);
  Var z = slice(rz, 2, hidden, hidden);
  Var n = tanh(bmm(x, w.input_n) + bmm(r * h, w.hidden_n) + w.bias_n);
  return h + z * (n - h);
}

}  // namespace aicare::num

#include "aicare/num/tape.hpp"

#include <stdexcept>

namespace aicare::num {

const Tensor& Var::value() const {
  if (!tape_) throw std::logic_error("use of an unbound Var");
  return tape_->value(id_);
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), requires_grad, {}, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::initializer_list<Var> parents, BackwardFn backward) {
  return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()),
                std::move(backward));
}

Var Tape::record(Tensor value, std::span<const Var> parents, BackwardFn backward) {
  bool needs = false;
  for (const auto& p : parents) {
    check_owned(p);
    needs = needs || nodes_[p.id()].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), needs, needs ? std::move(backward) : BackwardFn{}, {}});
  return Var(this, nodes_.size() - 1);
}

void Tape::check_owned(const Var& v) const {
  if (v.tape() != this) throw std::logic_error("Var belongs to a different tape");
}

std::vector<double>& Tape::grad_buffer(std::size_t id) {
  auto& node = nodes_[id];
  if (node.grad.empty()) node.grad.assign(node.value.size(), 0.0);
  return node.grad;
}

void Tape::accumulate(std::size_t id, std::span<const double> grad) {
  if (!nodes_[id].requires_grad) return;
  auto& buf = grad_buffer(id);
  if (grad.size() != buf.size()) throw std::logic_error("gradient size mismatch");
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += grad[i];
}

void Tape::backward(const Var& root) {
  check_owned(root);
  if (root.size() != 1) {
    throw std::invalid_argument("backward() needs a scalar root, got shape " +
                                to_string(root.shape()));
  }
  for (auto& n : nodes_) n.grad.clear();
  if (!nodes_[root.id()].requires_grad) return;
  grad_buffer(root.id())[0] = 1.0;
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    auto& node = nodes_[i];
    if (node.grad.empty() || !node.backward) continue;
    // Closures only write into parents (lower ids); this buffer stays put.
    node.backward(*this, node.grad);
  }
}

Tensor Tape::grad(const Var& v) const {
  check_owned(v);
  const auto& node = nodes_[v.id()];
  if (node.grad.empty()) return Tensor::zeros(node.value.shape());
  return Tensor(node.value.shape(), node.grad);
}

}  // namespace aicare::num

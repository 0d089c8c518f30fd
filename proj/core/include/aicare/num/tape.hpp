#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "aicare/num/tensor.hpp"

namespace aicare::num {

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while the
/// tape that issued it is alive.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode recording. Nodes are appended in evaluation order, which is
/// a topological order of the graph, so backward() is a single reverse sweep.
///
/// A tape is single-owner state: do not share one across threads.
class Tape {
 public:
  /// Receives the gradient flowing into a node and pushes contributions to
  /// its parents through Tape::accumulate.
  using BackwardFn = std::function<void(Tape&, std::span<const double> out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, bool requires_grad = true);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  /// Records an op result. `parents` decide whether the node needs a
  /// gradient at all; if none does, `backward` is dropped.
  Var record(Tensor value, std::initializer_list<Var> parents, BackwardFn backward);
  Var record(Tensor value, std::span<const Var> parents, BackwardFn backward);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  bool requires_grad(const Var& v) const { return nodes_[v.id()].requires_grad; }

  /// Adds `grad` into the gradient buffer of node `id` (no-op for nodes
  /// that do not require a gradient).
  void accumulate(std::size_t id, std::span<const double> grad);
  /// Mutable gradient buffer for `id`, allocated on first use. Only valid
  /// for nodes that require a gradient.
  std::vector<double>& grad_buffer(std::size_t id);

  /// Seeds d(root)/d(root) = 1 and propagates to every recorded node.
  /// The root must hold a single element.
  void backward(const Var& root);

  /// Gradient accumulated for `v`; zeros when nothing reached it.
  Tensor grad(const Var& v) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    bool requires_grad = false;
    BackwardFn backward;
    std::vector<double> grad;
  };

  void check_owned(const Var& v) const;

  std::vector<Node> nodes_;
};

}  // namespace aicare::num

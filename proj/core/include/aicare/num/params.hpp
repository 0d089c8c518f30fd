#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "aicare/num/tensor.hpp"

namespace aicare::num {

struct NamedTensor {
  std::string name;
  Tensor value;

  bool operator==(const NamedTensor&) const = default;
};

/// Ordered, named collection of parameter tensors. Order is insertion order
/// and is what optimizers and serializers iterate over.
class ParamSet {
 public:
  void add(std::string name, Tensor value);
  void set(std::size_t index, Tensor value);

  const Tensor& operator[](std::size_t index) const { return entries_[index].value; }
  const Tensor& at(const std::string& name) const;
  std::optional<std::size_t> index_of(const std::string& name) const;
  const std::string& name(std::size_t index) const { return entries_[index].name; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t total_elements() const;
  const std::vector<NamedTensor>& entries() const { return entries_; }

  std::vector<Tensor> values() const;
  std::vector<std::string> names() const;

  bool operator==(const ParamSet&) const = default;

 private:
  std::vector<NamedTensor> entries_;
};

}  // namespace aicare::num

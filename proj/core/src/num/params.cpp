#include "aicare/num/params.hpp"

#include <stdexcept>

namespace aicare::num {

void ParamSet::add(std::string name, Tensor value) {
  if (index_of(name)) throw std::invalid_argument("duplicate parameter name '" + name + "'");
  entries_.push_back({std::move(name), std::move(value)});
}

void ParamSet::set(std::size_t index, Tensor value) {
  auto& slot = entries_.at(index);
  if (slot.value.shape() != value.shape()) {
    throw std::invalid_argument("parameter '" + slot.name + "' shape change " +
                                to_string(slot.value.shape()) + " -> " + to_string(value.shape()));
  }
  slot.value = std::move(value);
}

const Tensor& ParamSet::at(const std::string& name) const {
  const auto idx = index_of(name);
  if (!idx) throw std::out_of_range("no parameter named '" + name + "'");
  return entries_[*idx].value;
}

std::optional<std::size_t> ParamSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ParamSet::total_elements() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

std::vector<Tensor> ParamSet::values() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.value);
  return out;
}

std::vector<std::string> ParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

}  // namespace aicare::num

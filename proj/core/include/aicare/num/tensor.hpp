#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace aicare::num {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

/// Dense row-major block of doubles. Entries are finite; construction
/// rejects NaN and infinities so that numeric blow-ups surface at the op
/// that produced them.
class Tensor {
 public:
  Tensor();  // scalar zero
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, double value);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const;

  std::span<const double> data() const { return data_; }
  double operator[](std::size_t i) const { return data_[i]; }
  double at(std::initializer_list<std::size_t> index) const;
  /// Value of a single-element tensor.
  double item() const;

  /// Same data under a new shape with equal element count.
  Tensor reshaped(Shape shape) const;

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace aicare::num

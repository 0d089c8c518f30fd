#include "aicare/num/random.hpp"

#include <cmath>
#include <stdexcept>

namespace aicare::num {

Tensor uniform_fan_in(Shape shape, std::size_t fan_in, Rng& rng) {
  if (fan_in == 0) throw std::invalid_argument("uniform_fan_in: fan_in must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> data(numel(shape));
  for (double& x : data) x = rng.uniform(-bound, bound);
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace aicare::num

#pragma once

#include <cstddef>
#include <vector>

#include "uwe/error.hpp"

namespace uwe {

/// Row-major shaped array of 64-bit floats. The whole network runs in f64:
/// it is small enough that speed is not a concern and gradient checks and
/// checkpoints stay exact.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;

  explicit Tensor(std::vector<int> dims) : shape(std::move(dims)) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    data.assign(n, 0.0);
  }

  static Tensor zeros(std::vector<int> dims) { return Tensor(std::move(dims)); }

  std::size_t size() const { return data.size(); }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

bool operator==(const Tensor& a, const Tensor& b);

}  // namespace uwe

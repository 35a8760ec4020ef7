#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

namespace cssrs::nn {

// Dense row-major tensor of doubles.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(std::vector<int> shape) {
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(static_cast<std::size_t>(t.numel()), 0.0);
    return t;
  }

  static Tensor from(std::vector<int> shape, std::vector<double> values) {
    Tensor t;
    t.shape = std::move(shape);
    t.data = std::move(values);
    return t;
  }

  static Tensor scalar(double v) { return from({1}, {v}); }

  std::int64_t numel() const {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }

  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols() + j]; }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols() + j];
  }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols(); }
  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols(); }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  bool operator==(const Tensor&) const = default;
};

}  // namespace cssrs::nn

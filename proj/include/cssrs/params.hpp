#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cssrs/rng.hpp"
#include "cssrs/tensor.hpp"

namespace cssrs::nn {

struct Param {
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;
  // Row-level freeze mask for embedding tables; empty = every row trainable.
  std::vector<std::uint8_t> row_trainable;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Named parameters with paired gradients and Adam state. std::map keeps the
// iteration order deterministic for updates and serialization.
class ParameterSet {
 public:
  Param& add(const std::string& name, std::vector<int> shape);
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) > 0; }

  void init_uniform(const std::string& name, double lo, double hi, Rng& rng);
  // Glorot-uniform over fan_in/fan_out derived from the tensor shape.
  void init_glorot(const std::string& name, int fan_in, int fan_out, Rng& rng);

  void zero_grads();
  // Bias-corrected Adam; rows masked by row_trainable are left untouched.
  void adam_step(const AdamConfig& config);

  std::map<std::string, Param>& all() { return params_; }
  const std::map<std::string, Param>& all() const { return params_; }
  int step_count() const { return step_; }
  void set_step_count(int t) { step_ = t; }

  std::uint64_t rng_seed = 0;

 private:
  std::map<std::string, Param> params_;
  int step_ = 0;
};

}  // namespace cssrs::nn

#include "cssrs/params.hpp"

#include <cmath>

#include "cssrs/error.hpp"

namespace cssrs::nn {

Param& ParameterSet::add(const std::string& name, std::vector<int> shape) {
  auto [it, inserted] = params_.try_emplace(name);
  if (!inserted) throw internal_error("parameter '" + name + "' already exists");
  Param& p = it->second;
  p.value = Tensor::zeros(shape);
  p.grad = Tensor::zeros(shape);
  p.adam_m = Tensor::zeros(shape);
  p.adam_v = Tensor::zeros(std::move(shape));
  return p;
}

Param& ParameterSet::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw internal_error("unknown parameter '" + name + "'");
  return it->second;
}

const Param& ParameterSet::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw internal_error("unknown parameter '" + name + "'");
  return it->second;
}

void ParameterSet::init_uniform(const std::string& name, double lo, double hi, Rng& rng) {
  for (double& v : at(name).value.data) v = rng.uniform(lo, hi);
}

void ParameterSet::init_glorot(const std::string& name, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  init_uniform(name, -limit, limit, rng);
}

void ParameterSet::zero_grads() {
  for (auto& [name, p] : params_) std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
}

void ParameterSet::adam_step(const AdamConfig& config) {
  ++step_;
  const double bc1 = 1.0 - std::pow(config.beta1, step_);
  const double bc2 = 1.0 - std::pow(config.beta2, step_);
  for (auto& [name, p] : params_) {
    const int cols = p.value.cols();
    for (std::size_t i = 0; i < p.value.data.size(); ++i) {
      if (!p.row_trainable.empty()) {
        const std::size_t row = i / static_cast<std::size_t>(cols);
        if (!p.row_trainable[row]) continue;
      }
      const double g = p.grad.data[i];
      p.adam_m.data[i] = config.beta1 * p.adam_m.data[i] + (1.0 - config.beta1) * g;
      p.adam_v.data[i] = config.beta2 * p.adam_v.data[i] + (1.0 - config.beta2) * g * g;
      const double m_hat = p.adam_m.data[i] / bc1;
      const double v_hat = p.adam_v.data[i] / bc2;
      p.value.data[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace cssrs::nn

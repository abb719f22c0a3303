#pragma once

#include <vector>

#include "talkgen/nn/tensor.hpp"

namespace talkgen::nn {

struct AdamSettings {
  float lr = 1e-4f;
  float beta1 = 0.5f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamSettings settings);

  void step();
  void zero_grad();
  int64_t step_count() const { return t_; }
  const AdamSettings& settings() const { return settings_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<float>> m_, v_;
  AdamSettings settings_;
  int64_t t_ = 0;
};

}  // namespace talkgen::nn

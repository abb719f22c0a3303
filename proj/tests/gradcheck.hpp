#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "talkgen/nn/ops.hpp"
#include "talkgen/nn/rng.hpp"

// Central-difference gradient check. `make_loss` rebuilds the scalar loss
// from the current contents of `inputs`; returns the worst relative error
// over all probed elements.
inline double gradcheck(const std::function<talkgen::nn::Tensor()>& make_loss,
                        std::vector<talkgen::nn::Tensor> inputs,
                        int max_probes_per_input = 64, double h_scale = 1e-2) {
  using talkgen::nn::Tensor;
  for (auto& t : inputs) t.zero_grad();
  Tensor loss = make_loss();
  loss.backward();
  std::vector<std::vector<float>> analytic;
  analytic.reserve(inputs.size());
  for (auto& t : inputs) analytic.push_back(t.grad());

  double worst = 0.0;
  for (size_t k = 0; k < inputs.size(); ++k) {
    auto& t = inputs[k];
    const int64_t n = t.numel();
    const int64_t stride = std::max<int64_t>(1, n / max_probes_per_input);
    for (int64_t i = 0; i < n; i += stride) {
      const float orig = t.data()[i];
      const double h = h_scale * std::max(1.0, std::fabs(static_cast<double>(orig)));
      t.data()[i] = static_cast<float>(orig + h);
      const double lp = make_loss().item();
      t.data()[i] = static_cast<float>(orig - h);
      const double lm = make_loss().item();
      t.data()[i] = orig;
      const double fd = (lp - lm) / (2.0 * h);
      const double an = analytic[k][static_cast<size_t>(i)];
      const double rel = std::fabs(fd - an) / (std::max(std::fabs(fd), std::fabs(an)) + 1e-4);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

inline talkgen::nn::Tensor random_tensor(talkgen::nn::Shape shape, talkgen::nn::Rng& rng,
                                         bool requires_grad = true, double scale = 1.0) {
  std::vector<float> data(static_cast<size_t>(talkgen::nn::shape_numel(shape)));
  for (auto& v : data) v = static_cast<float>(rng.normal(0.0, scale));
  return talkgen::nn::Tensor::from_data(std::move(shape), std::move(data), requires_grad);
}

// Values bounded away from zero, for checking kinked ops (abs, relu) without
// the finite difference straddling the kink.
inline talkgen::nn::Tensor random_tensor_offzero(talkgen::nn::Shape shape,
                                                 talkgen::nn::Rng& rng,
                                                 double margin = 0.2) {
  std::vector<float> data(static_cast<size_t>(talkgen::nn::shape_numel(shape)));
  for (auto& v : data) {
    const double n = rng.normal();
    v = static_cast<float>((n >= 0.0 ? 1.0 : -1.0) * (margin + std::fabs(n)));
  }
  return talkgen::nn::Tensor::from_data(std::move(shape), std::move(data), true);
}

// Smooth scalar readout: projects y against a fixed random tensor so every
// output element contributes to the loss without introducing kinks.
inline talkgen::nn::Tensor proj_loss(const talkgen::nn::Tensor& y, uint64_t seed = 7777) {
  talkgen::nn::Rng rng(seed);
  std::vector<float> data(static_cast<size_t>(y.numel()));
  for (auto& v : data) v = static_cast<float>(rng.normal());
  auto w = talkgen::nn::Tensor::from_data(y.shape(), std::move(data), false);
  return talkgen::nn::mean_all(talkgen::nn::mul(y, w));
}

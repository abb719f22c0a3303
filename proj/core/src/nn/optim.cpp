#include "talkgen/nn/optim.hpp"

#include <cmath>

namespace talkgen::nn {

Adam::Adam(std::vector<Tensor> params, AdamSettings settings)
    : params_(std::move(params)), settings_(settings) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p.numel(), 0.0f);
    v_.emplace_back(p.numel(), 0.0f);
  }
}

void Adam::step() {
  ++t_;
  const double b1 = settings_.beta1, b2 = settings_.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = settings_.lr;
  for (size_t k = 0; k < params_.size(); ++k) {
    auto& p = params_[k];
    auto& g = p.grad();
    float* w = p.data();
    auto& m = m_[k];
    auto& v = v_[k];
    const int64_t n = p.numel();
    for (int64_t i = 0; i < n; ++i) {
      m[i] = static_cast<float>(b1 * m[i] + (1.0 - b1) * g[i]);
      v[i] = static_cast<float>(b2 * v[i] + (1.0 - b2) * static_cast<double>(g[i]) * g[i]);
      const double mhat = m[i] / bias1;
      const double vhat = v[i] / bias2;
      w[i] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + settings_.eps));
    }
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace talkgen::nn

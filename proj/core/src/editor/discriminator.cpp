#include "talkgen/editor/discriminator.hpp"

namespace talkgen::editor {

using nn::Tensor;

MultiScaleDiscriminator::MultiScaleDiscriminator(int in_channels, uint64_t seed) {
  nn::Rng rng(derive_seed(seed, "patch_discriminator"));
  for (int s = 0; s < kScales; ++s) {
    const std::string name = "s" + std::to_string(s);
    Scale sc;
    sc.c1 = nn::Conv2dLayer::make(store_, name + ".c1", in_channels, 64, 4, 2, 1, rng);
    sc.c2 = nn::Conv2dLayer::make(store_, name + ".c2", 64, 128, 4, 2, 1, rng);
    sc.c3 = nn::Conv2dLayer::make(store_, name + ".c3", 128, 256, 4, 2, 1, rng);
    sc.c4 = nn::Conv2dLayer::make(store_, name + ".c4", 256, 1, 4, 1, 1, rng);
    scales_.push_back(std::move(sc));
  }
}

std::vector<std::vector<Tensor>> MultiScaleDiscriminator::forward(const Tensor& x) {
  std::vector<std::vector<Tensor>> taps;
  Tensor input = x;
  for (auto& sc : scales_) {
    std::vector<Tensor> t;
    Tensor a1 = nn::leaky_relu(sc.c1(input), 0.2f);
    Tensor a2 = nn::leaky_relu(nn::instance_norm2d(sc.c2(a1)), 0.2f);
    Tensor a3 = nn::leaky_relu(nn::instance_norm2d(sc.c3(a2)), 0.2f);
    Tensor logits = sc.c4(a3);
    t.push_back(std::move(a1));
    t.push_back(std::move(a2));
    t.push_back(std::move(a3));
    t.push_back(std::move(logits));
    taps.push_back(std::move(t));
    input = nn::avg_pool2d(input, 2);
  }
  return taps;
}

Tensor hinge_d_loss(const std::vector<std::vector<Tensor>>& real_taps,
                    const std::vector<std::vector<Tensor>>& fake_taps) {
  Tensor total;
  for (size_t s = 0; s < real_taps.size(); ++s) {
    const Tensor& real = real_taps[s].back();
    const Tensor& fake = fake_taps[s].back();
    Tensor term = nn::add(nn::mean_all(nn::relu(nn::add_scalar(nn::neg(real), 1.0f))),
                          nn::mean_all(nn::relu(nn::add_scalar(fake, 1.0f))));
    total = total.defined() ? nn::add(total, term) : term;
  }
  return nn::mul_scalar(total, 1.0f / static_cast<float>(real_taps.size()));
}

Tensor hinge_g_loss(const std::vector<std::vector<Tensor>>& fake_taps) {
  Tensor total;
  for (const auto& taps : fake_taps) {
    Tensor term = nn::neg(nn::mean_all(taps.back()));
    total = total.defined() ? nn::add(total, term) : term;
  }
  return nn::mul_scalar(total, 1.0f / static_cast<float>(fake_taps.size()));
}

Tensor feature_matching_loss(const std::vector<std::vector<Tensor>>& fake_taps,
                             const std::vector<std::vector<Tensor>>& real_taps) {
  Tensor total;
  int64_t count = 0;
  for (size_t s = 0; s < fake_taps.size(); ++s)
    for (size_t l = 0; l < fake_taps[s].size(); ++l) {
      Tensor term = nn::mae(fake_taps[s][l], real_taps[s][l].detach());
      total = total.defined() ? nn::add(total, term) : term;
      ++count;
    }
  return nn::mul_scalar(total, 1.0f / static_cast<float>(count));
}

double discriminator_accuracy(const std::vector<std::vector<Tensor>>& real_taps,
                              const std::vector<std::vector<Tensor>>& fake_taps) {
  int64_t correct = 0, total = 0;
  for (size_t s = 0; s < real_taps.size(); ++s) {
    for (float v : real_taps[s].back().values()) {
      correct += v > 0.0f ? 1 : 0;
      ++total;
    }
    for (float v : fake_taps[s].back().values()) {
      correct += v < 0.0f ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace talkgen::editor

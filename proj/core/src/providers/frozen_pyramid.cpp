#include "talkgen/providers/frozen_pyramid.hpp"

namespace talkgen::providers {

FrozenPyramidProvider::FrozenPyramidProvider(uint64_t seed) {
  nn::Rng rng(derive_seed(seed, "frozen_pyramid"));
  c1_ = nn::Conv2dLayer::make(store_, "c1", 3, 16, 5, 2, 2, rng);
  c2_ = nn::Conv2dLayer::make(store_, "c2", 16, 32, 5, 2, 2, rng);
  c3_ = nn::Conv2dLayer::make(store_, "c3", 32, 64, 3, 2, 1, rng);
  store_.freeze();
  uint64_t h = fnv1a("frozen_pyramid_v1");
  h = fnv1a(std::to_string(seed), h);
  digest_ = hex64(h);
}

std::vector<nn::Tensor> FrozenPyramidProvider::feature_maps(const nn::Tensor& images) {
  TG_CHECK_ARG(images.ndim() == 4 && images.dim(1) == 3,
               "FrozenPyramidProvider: need [N,3,H,W] images");
  std::vector<nn::Tensor> levels;
  levels.push_back(images);
  nn::Tensor f1 = nn::tanh(c1_(images));
  nn::Tensor f2 = nn::tanh(c2_(f1));
  nn::Tensor f3 = nn::tanh(c3_(f2));
  levels.push_back(std::move(f1));
  levels.push_back(std::move(f2));
  levels.push_back(std::move(f3));
  return levels;
}

nn::Tensor FrozenPyramidProvider::embed(const nn::Tensor& images) {
  auto levels = feature_maps(images);
  return nn::global_avg_pool2d(levels.back());
}

}  // namespace talkgen::providers

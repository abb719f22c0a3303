#pragma once

#include "talkgen/nn/layers.hpp"
#include "talkgen/providers/providers.hpp"

namespace talkgen::providers {

// Desk-scale perceptual backbone: a frozen, seeded convolutional pyramid.
// Level 0 is the image itself, followed by three tanh conv levels. A
// pretrained backbone can be dropped in behind the same interface.
class FrozenPyramidProvider : public FeatureProvider {
 public:
  explicit FrozenPyramidProvider(uint64_t seed);

  std::string digest() const override { return digest_; }
  std::vector<nn::Tensor> feature_maps(const nn::Tensor& images) override;
  nn::Tensor embed(const nn::Tensor& images) override;
  int64_t embed_dim() const override { return 64; }

 private:
  nn::ParamStore store_;
  nn::Conv2dLayer c1_, c2_, c3_;
  std::string digest_;
};

}  // namespace talkgen::providers

#pragma once

#include "talkgen/nn/layers.hpp"

namespace talkgen::editor {

// Two-scale patch discriminator with hinge objective; the second scale sees
// a 2x average-pooled input. Feature taps are returned at every layer for
// the feature-matching loss.
class MultiScaleDiscriminator {
 public:
  MultiScaleDiscriminator(int in_channels, uint64_t seed);

  // taps[scale] = {a1, a2, a3, logits}.
  std::vector<std::vector<nn::Tensor>> forward(const nn::Tensor& x);

  nn::ParamStore& store() { return store_; }
  static constexpr int kScales = 2;

 private:
  struct Scale {
    nn::Conv2dLayer c1, c2, c3, c4;
  };
  nn::ParamStore store_;
  std::vector<Scale> scales_;
};

// Hinge losses over all scales (mean across scales).
nn::Tensor hinge_d_loss(const std::vector<std::vector<nn::Tensor>>& real_taps,
                        const std::vector<std::vector<nn::Tensor>>& fake_taps);
nn::Tensor hinge_g_loss(const std::vector<std::vector<nn::Tensor>>& fake_taps);

// Mean L1 between fake taps and detached real taps, all layers, all scales.
nn::Tensor feature_matching_loss(const std::vector<std::vector<nn::Tensor>>& fake_taps,
                                 const std::vector<std::vector<nn::Tensor>>& real_taps);

// Fraction of patch logits on the correct hinge side, for training health.
double discriminator_accuracy(const std::vector<std::vector<nn::Tensor>>& real_taps,
                              const std::vector<std::vector<nn::Tensor>>& fake_taps);

}  // namespace talkgen::editor

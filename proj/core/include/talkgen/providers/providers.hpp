#pragma once

#include <memory>
#include <string>
#include <vector>

#include "talkgen/nn/tensor.hpp"

namespace talkgen::providers {

// Feature backbone interface shared by the perceptual loss, FID, and CSIM.
// Implementations are frozen; gradients flow through their ops to the input
// images, never to their weights. Reports carry `digest()` so scores from
// different providers are never compared.
class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  virtual std::string digest() const = 0;
  // Multi-scale feature grids of images in [-1,1], NCHW.
  virtual std::vector<nn::Tensor> feature_maps(const nn::Tensor& images) = 0;
  // Pooled embedding, [N, dim].
  virtual nn::Tensor embed(const nn::Tensor& images) = 0;
  virtual int64_t embed_dim() const = 0;
};

// Differentiable landmark re-extraction from images: lip+jaw coordinates
// in normalized crop units, [N, 57, 2] with lip rows first.
class LandmarkProvider {
 public:
  virtual ~LandmarkProvider() = default;
  virtual std::string digest() const = 0;
  virtual nn::Tensor extract_lip_jaw(const nn::Tensor& images) = 0;
};

using FeatureProviderPtr = std::shared_ptr<FeatureProvider>;
using LandmarkProviderPtr = std::shared_ptr<LandmarkProvider>;

}  // namespace talkgen::providers

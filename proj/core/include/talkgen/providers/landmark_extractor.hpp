#pragma once

#include "talkgen/data/corpus.hpp"
#include "talkgen/nn/layers.hpp"
#include "talkgen/nn/optim.hpp"
#include "talkgen/providers/providers.hpp"

namespace talkgen::providers {

// Soft-argmax heatmap head over 16x16 logits: a small differentiable
// lip+jaw landmark regressor trained on the synthetic corpus. Default
// LandmarkProvider for the landmark reconstruction loss and LMD.
class LandmarkExtractor : public LandmarkProvider {
 public:
  explicit LandmarkExtractor(uint64_t seed);

  nn::Tensor extract_lip_jaw(const nn::Tensor& images) override;
  std::string digest() const override;

  nn::ParamStore& store() { return store_; }
  void freeze() { store_.freeze(); }

  // Mouth aperture per sample from extracted coordinates, [N].
  static std::vector<double> aperture_from_coords(const nn::Tensor& coords);

 private:
  nn::ParamStore store_;
  nn::Conv2dLayer c1_, c2_, c3_, c4_, head_;
  nn::Tensor grid_;  // [256, 2] heatmap-cell center coordinates
};

struct ExtractorTrainResult {
  std::vector<float> loss_curve;
  double mean_px_error = 0.0;  // on the training set, at 128x128 scale
};

// Supervised training against the corpus' analytic landmarks, with seeded
// noise augmentation so the extractor tolerates generator output.
ExtractorTrainResult train_landmark_extractor(LandmarkExtractor& ex,
                                              const std::vector<data::Utterance>& utts,
                                              int steps, int batch,
                                              const nn::AdamSettings& adam, uint64_t seed);

// Ground-truth lip+jaw coordinate tensor for supervision, [N,57,2].
nn::Tensor lip_jaw_targets(const std::vector<const geometry::LandmarkSet*>& sets);

}  // namespace talkgen::providers

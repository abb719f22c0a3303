#pragma once

#include "talkgen/data/corpus.hpp"
#include "talkgen/nn/layers.hpp"
#include "talkgen/nn/optim.hpp"
#include "talkgen/providers/providers.hpp"

namespace talkgen::editor {

// Open/closed mouth classifier over the lower-center 64x64 window of a face
// crop; the window is taken internally. A small residual conv net trained
// from scratch on aperture-derived labels.
class MouthClassifier {
 public:
  explicit MouthClassifier(uint64_t seed);

  // [N,3,128,128] faces -> [N,1] "open" logits.
  nn::Tensor logits(const nn::Tensor& faces);
  // Penultimate pooled features, [N,64].
  nn::Tensor embed(const nn::Tensor& faces);

  double open_probability(const data::FaceFrame& face);

  nn::ParamStore& store() { return store_; }
  void freeze() { store_.freeze(); }

  static constexpr int kCropTop = 64, kCropLeft = 32, kCropSize = 64;

 private:
  nn::Tensor trunk(const nn::Tensor& faces);  // [N,64] features
  nn::ParamStore store_;
  nn::Conv2dLayer c0_, r1a_, r1b_, c1_, r2a_, r2b_, c2_;
  nn::LinearLayer fc1_, fc2_;
};

struct ClassifierTrainResult {
  std::vector<float> loss_curve;
  double train_accuracy = 0.0;
};

ClassifierTrainResult train_mouth_classifier(MouthClassifier& model,
                                             const std::vector<data::Utterance>& utts,
                                             double tau, int steps, int batch,
                                             const nn::AdamSettings& adam, uint64_t seed);

double classifier_accuracy(MouthClassifier& model, const std::vector<data::Utterance>& utts,
                           double tau);

// FeatureProvider view over the frozen classifier, used by FID and CSIM.
class ClassifierFeatureProvider : public providers::FeatureProvider {
 public:
  explicit ClassifierFeatureProvider(std::shared_ptr<MouthClassifier> classifier)
      : classifier_(std::move(classifier)) {}

  std::string digest() const override { return hex64(fnv1a("mouth_classifier_features_v1")); }
  std::vector<nn::Tensor> feature_maps(const nn::Tensor& images) override {
    return {classifier_->embed(images)};
  }
  nn::Tensor embed(const nn::Tensor& images) override { return classifier_->embed(images); }
  int64_t embed_dim() const override { return 64; }

 private:
  std::shared_ptr<MouthClassifier> classifier_;
};

}  // namespace talkgen::editor

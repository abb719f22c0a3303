#pragma once

#include "talkgen/editor/losses.hpp"

namespace talkgen::editor {

// One stage-2 training item: an unmasked input face plus the predicted
// neutral landmark condition (map raster and coordinates). There is no
// reference image and no pixel-level target.
struct EditorSample {
  const data::FaceFrame* face = nullptr;
  std::vector<float> cond_map;  // 3*128*128 in {0,1}
  std::vector<float> lip_jaw;   // 57*2 normalized coordinates, lip rows first
};

struct EditorTrainResult {
  std::vector<float> g_curve;  // total generator loss per step
  std::vector<float> d_curve;
  std::vector<double> d_accuracy;  // patch accuracy per step
  EditorLossBreakdown last;
};

EditorTrainResult train_face_editor(EditorGenerator& gen, MultiScaleDiscriminator& disc,
                                    const std::vector<EditorSample>& samples,
                                    providers::FeatureProvider& perceptual,
                                    providers::LandmarkProvider& landmarks,
                                    MouthClassifier& mouth, const EditorLossWeights& weights,
                                    int steps, int batch, const nn::AdamSettings& adam,
                                    uint64_t seed);

// Builds cond tensors for a batch of samples.
nn::Tensor batch_cond_maps(const std::vector<const EditorSample*>& batch);
void batch_cond_landmarks(const std::vector<const EditorSample*>& batch, nn::Tensor* lip,
                          nn::Tensor* jaw);

}  // namespace talkgen::editor

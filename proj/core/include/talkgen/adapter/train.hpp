#pragma once

#include "talkgen/adapter/losses.hpp"

namespace talkgen::adapter {

// One stage-3 training clip. `inputs` are the face editor's neutral-mouth
// outputs; `reference` is used only by the masking-ablation arms and stays
// empty in the mask-free pipeline.
struct AdapterClip {
  std::vector<data::FaceFrame> inputs;
  std::vector<data::FaceFrame> gt;
  std::vector<data::MelChunk> mels;
  std::vector<data::FaceFrame> reference;
};

struct AdapterTrainResult {
  std::vector<float> g_curve;
  std::vector<float> d_curve;
  AdapterLossBreakdown last;
};

// Mask-free stage-3 training: no reference argument exists, and every input
// batch is checked to retain lower-half content (i.e. not masked).
AdapterTrainResult train_lip_adapter(LipAdapter& adapter,
                                     editor::MultiScaleDiscriminator& disc,
                                     const std::vector<AdapterClip>& clips,
                                     providers::FeatureProvider& perceptual,
                                     sync::SyncNet& syncnet, const AdapterLossWeights& weights,
                                     int steps, const nn::AdamSettings& adam, uint64_t seed);

// Zeroes rows 64..127 of every channel.
nn::Tensor mask_lower_half(const nn::Tensor& frames);

// Mean intensity (in [0,1]) of the lower half; the mask-free path asserts
// this stays above a content threshold.
double lower_half_intensity(const nn::Tensor& frames);

// Generator for the masking-ablation arms: identical trunk, with optional
// masking of the input and an optional reference frame concatenated along
// channels. with_reference=false, masked=false reproduces the mask-free
// shape from the same code.
class AblationAdapter {
 public:
  AblationAdapter(uint64_t seed, bool with_reference);
  // `reference` must be defined iff the model was built with one.
  nn::Tensor forward(const nn::Tensor& faces, const nn::Tensor& reference,
                     const nn::Tensor& mels, bool training);
  nn::ParamStore& store() { return store_; }
  bool with_reference() const { return with_reference_; }

 private:
  nn::ParamStore store_;
  editor::FaceEncoder enc_;
  AudioEncoder aenc_;
  nn::Conv2dLayer fuse_proj_, dec_in_, out_;
  editor::SpadeBlock sp1_, sp2_, sp3_;
  AdaInBlock ad1_, ad2_;
  bool with_reference_ = false;
};

struct AblationArmOptions {
  bool mask_input = false;
  bool use_reference = false;
  int steps = 150;
  nn::AdamSettings adam;
  uint64_t seed = 0;
};

AdapterTrainResult train_ablation_arm(AblationAdapter& adapter,
                                      editor::MultiScaleDiscriminator& disc,
                                      const std::vector<AdapterClip>& clips,
                                      providers::FeatureProvider& perceptual,
                                      sync::SyncNet& syncnet,
                                      const AdapterLossWeights& weights,
                                      const AblationArmOptions& opts);

}  // namespace talkgen::adapter

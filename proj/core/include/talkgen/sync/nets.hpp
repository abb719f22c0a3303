#pragma once

#include "talkgen/data/corpus.hpp"
#include "talkgen/nn/layers.hpp"

namespace talkgen::sync {

// Unit-norm 512-d embedding from either sync tower.
struct SyncEmbedding {
  enum class Modality { kAudio, kVisual };
  std::vector<float> v;  // 512, unit L2 norm
  Modality modality = Modality::kAudio;
};

inline constexpr int kEmbedDim = 512;

// Jointly trained audio/visual encoders over (mel chunk, 5-frame lower-half
// stack) pairs. Embeddings are L2 normalized.
class SyncNet {
 public:
  explicit SyncNet(uint64_t seed);

  // [N,1,16,80] -> [N,512] unit rows.
  nn::Tensor audio_forward(const nn::Tensor& mels, bool training);
  // [N,15,64,128] -> [N,512] unit rows.
  nn::Tensor visual_forward(const nn::Tensor& stacks, bool training);

  SyncEmbedding embed_audio(const data::MelChunk& mel);
  SyncEmbedding embed_visual(const std::vector<data::FaceFrame>& five_frames);

  nn::ParamStore& store() { return store_; }
  void freeze() { store_.freeze(); }

 private:
  nn::ParamStore store_;
  nn::Conv2dLayer a1_, a2_, a3_, a4_, a5_;
  nn::BatchNorm2dLayer ab1_, ab2_, ab3_, ab4_, ab5_;
  nn::Conv2dLayer v1_, v2_, v3_, v4_, v5_;
  nn::BatchNorm2dLayer vb1_, vb2_, vb3_, vb4_, vb5_;
};

// Channel-stacks the lower halves of 5 consecutive frames: [1,15,64,128].
nn::Tensor lower_half_stack(const std::vector<data::FaceFrame>& five_frames);
// Same, differentiable, from a [5,3,128,128] batch in the graph.
nn::Tensor lower_half_stack_t(const nn::Tensor& frames);

// L2-normalizes each row of a [N,D] tensor (graph op).
nn::Tensor normalize_rows(const nn::Tensor& x);

}  // namespace talkgen::sync

#include "talkgen/sync/nets.hpp"

namespace talkgen::sync {

using nn::Tensor;

SyncNet::SyncNet(uint64_t seed) {
  nn::Rng rng(derive_seed(seed, "sync_encoders"));
  a1_ = nn::Conv2dLayer::make(store_, "a.c1", 1, 32, 3, 1, 1, rng);
  a2_ = nn::Conv2dLayer::make(store_, "a.c2", 32, 64, 3, 2, 1, rng);
  a3_ = nn::Conv2dLayer::make(store_, "a.c3", 64, 128, 3, 2, 1, rng);
  a4_ = nn::Conv2dLayer::make(store_, "a.c4", 128, 256, 3, 2, 1, rng);
  a5_ = nn::Conv2dLayer::make(store_, "a.c5", 256, 512, 3, 2, 1, rng);
  ab1_ = nn::BatchNorm2dLayer::make(store_, "a.b1", 32);
  ab2_ = nn::BatchNorm2dLayer::make(store_, "a.b2", 64);
  ab3_ = nn::BatchNorm2dLayer::make(store_, "a.b3", 128);
  ab4_ = nn::BatchNorm2dLayer::make(store_, "a.b4", 256);
  ab5_ = nn::BatchNorm2dLayer::make(store_, "a.b5", 512);

  v1_ = nn::Conv2dLayer::make(store_, "v.c1", 15, 64, 3, 2, 1, rng);
  v2_ = nn::Conv2dLayer::make(store_, "v.c2", 64, 128, 3, 2, 1, rng);
  v3_ = nn::Conv2dLayer::make(store_, "v.c3", 128, 256, 3, 2, 1, rng);
  v4_ = nn::Conv2dLayer::make(store_, "v.c4", 256, 512, 3, 2, 1, rng);
  v5_ = nn::Conv2dLayer::make(store_, "v.c5", 512, 512, 3, 2, 1, rng);
  vb1_ = nn::BatchNorm2dLayer::make(store_, "v.b1", 64);
  vb2_ = nn::BatchNorm2dLayer::make(store_, "v.b2", 128);
  vb3_ = nn::BatchNorm2dLayer::make(store_, "v.b3", 256);
  vb4_ = nn::BatchNorm2dLayer::make(store_, "v.b4", 512);
  vb5_ = nn::BatchNorm2dLayer::make(store_, "v.b5", 512);
}

Tensor SyncNet::audio_forward(const Tensor& mels, bool training) {
  TG_CHECK_ARG(mels.ndim() == 4 && mels.dim(1) == 1 && mels.dim(2) == data::kMelChunkSteps &&
                   mels.dim(3) == data::kMelBins,
               "SyncNet: audio input must be [N,1,16,80], got ", nn::shape_str(mels.shape()));
  Tensor h = nn::relu(ab1_(a1_(mels), training));
  h = nn::relu(ab2_(a2_(h), training));
  h = nn::relu(ab3_(a3_(h), training));
  h = nn::relu(ab4_(a4_(h), training));
  h = nn::relu(ab5_(a5_(h), training));
  return nn::l2_normalize_rows(nn::global_avg_pool2d(h));
}

Tensor SyncNet::visual_forward(const Tensor& stacks, bool training) {
  TG_CHECK_ARG(stacks.ndim() == 4 && stacks.dim(1) == 15 && stacks.dim(2) == 64 &&
                   stacks.dim(3) == 128,
               "SyncNet: visual input must be [N,15,64,128], got ",
               nn::shape_str(stacks.shape()));
  Tensor h = nn::relu(vb1_(v1_(stacks), training));
  h = nn::relu(vb2_(v2_(h), training));
  h = nn::relu(vb3_(v3_(h), training));
  h = nn::relu(vb4_(v4_(h), training));
  h = nn::relu(vb5_(v5_(h), training));
  return nn::l2_normalize_rows(nn::global_avg_pool2d(h));
}

SyncEmbedding SyncNet::embed_audio(const data::MelChunk& mel) {
  Tensor out = audio_forward(data::mels_to_batch({mel}), /*training=*/false);
  SyncEmbedding e;
  e.modality = SyncEmbedding::Modality::kAudio;
  e.v.assign(out.data(), out.data() + kEmbedDim);
  return e;
}

SyncEmbedding SyncNet::embed_visual(const std::vector<data::FaceFrame>& five_frames) {
  Tensor out = visual_forward(lower_half_stack(five_frames), /*training=*/false);
  SyncEmbedding e;
  e.modality = SyncEmbedding::Modality::kVisual;
  e.v.assign(out.data(), out.data() + kEmbedDim);
  return e;
}

Tensor lower_half_stack(const std::vector<data::FaceFrame>& five_frames) {
  TG_CHECK_ARG(five_frames.size() == data::ClipSample::kT, "lower_half_stack: need ",
               data::ClipSample::kT, " frames, got ", five_frames.size());
  std::vector<float> out;
  out.reserve(15 * 64 * 128);
  for (const auto& f : five_frames)
    for (int c = 0; c < 3; ++c)
      for (int y = 64; y < 128; ++y)
        for (int x = 0; x < 128; ++x) out.push_back(f.at(c, y, x));
  return Tensor::from_data({1, 15, 64, 128}, std::move(out));
}

Tensor lower_half_stack_t(const Tensor& frames) {
  TG_CHECK_ARG(frames.ndim() == 4 && frames.dim(0) == data::ClipSample::kT &&
                   frames.dim(1) == 3 && frames.dim(2) == 128 && frames.dim(3) == 128,
               "lower_half_stack_t: need [5,3,128,128]");
  Tensor lower = nn::slice_spatial(frames, 64, 128, 0, 128);  // [5,3,64,128]
  return nn::reshape(lower, {1, 15, 64, 128});
}

Tensor normalize_rows(const Tensor& x) { return nn::l2_normalize_rows(x); }

}  // namespace talkgen::sync

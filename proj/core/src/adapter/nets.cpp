#include "talkgen/adapter/nets.hpp"

namespace talkgen::adapter {

using nn::Tensor;

AudioEncoder AudioEncoder::make(nn::ParamStore& ps, const std::string& name, nn::Rng& rng) {
  AudioEncoder e;
  e.c1 = nn::Conv2dLayer::make(ps, name + ".c1", 1, 32, 3, 1, 1, rng);
  e.c2 = nn::Conv2dLayer::make(ps, name + ".c2", 32, 64, 3, 2, 1, rng);
  e.c3 = nn::Conv2dLayer::make(ps, name + ".c3", 64, 128, 3, 2, 1, rng);
  e.c4 = nn::Conv2dLayer::make(ps, name + ".c4", 128, 256, 3, 2, 1, rng);
  e.c5 = nn::Conv2dLayer::make(ps, name + ".c5", 256, 512, 3, 2, 1, rng);
  e.b1 = nn::BatchNorm2dLayer::make(ps, name + ".b1", 32);
  e.b2 = nn::BatchNorm2dLayer::make(ps, name + ".b2", 64);
  e.b3 = nn::BatchNorm2dLayer::make(ps, name + ".b3", 128);
  e.b4 = nn::BatchNorm2dLayer::make(ps, name + ".b4", 256);
  e.b5 = nn::BatchNorm2dLayer::make(ps, name + ".b5", 512);
  return e;
}

Tensor AudioEncoder::operator()(const Tensor& mels, bool training) {
  TG_CHECK_ARG(mels.ndim() == 4 && mels.dim(1) == 1 && mels.dim(2) == data::kMelChunkSteps &&
                   mels.dim(3) == data::kMelBins,
               "AudioEncoder: need [N,1,16,80] mel chunks, got ", nn::shape_str(mels.shape()));
  Tensor h = nn::relu(b1(c1(mels), training));   // [N,32,16,80]
  h = nn::relu(b2(c2(h), training));             // [N,64,8,40]
  h = nn::relu(b3(c3(h), training));             // [N,128,4,20]
  h = nn::relu(b4(c4(h), training));             // [N,256,2,10]
  h = nn::relu(b5(c5(h), training));             // [N,512,1,5]
  return nn::global_avg_pool2d(h);               // [N,512]
}

Tensor adain_modulate(const Tensor& features, const Tensor& gamma, const Tensor& beta) {
  TG_CHECK_ARG(features.ndim() == 4, "adain_modulate: need NCHW features");
  TG_CHECK_ARG(gamma.ndim() == 2 && gamma.dim(0) == features.dim(0) &&
                   gamma.dim(1) == features.dim(1) && beta.shape() == gamma.shape(),
               "adain_modulate: modulation must be [N,C] matching features, got ",
               nn::shape_str(gamma.shape()), " for ", nn::shape_str(features.shape()));
  return nn::channel_affine(nn::instance_norm2d(features, 1e-6f), gamma, beta);
}

AdaInBlock AdaInBlock::make(nn::ParamStore& ps, const std::string& name, int channels,
                            nn::Rng& rng) {
  AdaInBlock b;
  b.channels = channels;
  b.affine = nn::LinearLayer::make(ps, name + ".affine", 512, 2 * channels, rng);
  return b;
}

void AdaInBlock::predict(const Tensor& audio_vec, Tensor* gamma, Tensor* beta) const {
  TG_CHECK_ARG(audio_vec.ndim() == 2 && audio_vec.dim(1) == 512,
               "AdaInBlock: need [N,512] audio vectors");
  Tensor ab = affine(audio_vec);  // [N,2C]
  *gamma = nn::add_scalar(nn::slice_lastdim(ab, 0, channels), 1.0f);
  *beta = nn::slice_lastdim(ab, channels, 2 * channels);
}

Tensor AdaInBlock::operator()(const Tensor& x, const Tensor& audio_vec) const {
  TG_CHECK_ARG(x.dim(1) == channels, "AdaInBlock: expected ", channels, " channels, got ",
               x.dim(1));
  Tensor gamma, beta;
  predict(audio_vec, &gamma, &beta);
  return adain_modulate(x, gamma, beta);
}

Tensor fuse_audio(const Tensor& features, const Tensor& audio_vec) {
  TG_CHECK_ARG(features.ndim() == 4 && features.dim(1) == 512,
               "fuse_audio: need [N,512,H,W] features");
  TG_CHECK_ARG(audio_vec.ndim() == 2 && audio_vec.dim(0) == features.dim(0) &&
                   audio_vec.dim(1) == 512,
               "fuse_audio: need [N,512] audio vectors");
  Tensor spatial = nn::broadcast_spatial(audio_vec, features.dim(2), features.dim(3));
  return nn::concat_channels(features, spatial);
}

LipAdapter::LipAdapter(uint64_t seed) {
  nn::Rng rng(derive_seed(seed, "lip_adapter"));
  enc_ = editor::FaceEncoder::make(store_, "enc", 3, rng);
  aenc_ = AudioEncoder::make(store_, "aud", rng);
  fuse_proj_ = nn::Conv2dLayer::make(store_, "fuse", 1024, 512, 1, 1, 0, rng);
  dec_in_ = nn::Conv2dLayer::make(store_, "dec_in", 512, 512, 3, 1, 1, rng);
  sp1_ = editor::SpadeBlock::make(store_, "sp1", 512, rng);
  sp2_ = editor::SpadeBlock::make(store_, "sp2", 128, rng);
  sp3_ = editor::SpadeBlock::make(store_, "sp3", 32, rng);
  ad1_ = AdaInBlock::make(store_, "ad1", 512, rng);
  ad2_ = AdaInBlock::make(store_, "ad2", 128, rng);
  out_ = nn::Conv2dLayer::make(store_, "out", 8, 3, 7, 1, 3, rng);
}

Tensor LipAdapter::forward(const Tensor& faces, const Tensor& mels, bool training) {
  TG_CHECK_ARG(faces.ndim() == 4 && faces.dim(1) == 3 && faces.dim(2) == 128 &&
                   faces.dim(3) == 128,
               "LipAdapter: faces must be [N,3,128,128]");
  auto taps = enc_(faces, training);
  Tensor audio = aenc_(mels, training);

  Tensor fused = fuse_proj_(fuse_audio(taps.e4, audio));
  Tensor d = dec_in_(fused);
  // The original (neutral) face is the SPADE semantic input at every scale.
  d = sp1_(d, nn::avg_pool2d(faces, 8));
  d = ad1_(d, audio);
  d = nn::pixel_shuffle(nn::relu(d), 2);        // [N,128,32,32]
  d = sp2_(d, nn::avg_pool2d(faces, 4));
  d = ad2_(d, audio);
  d = nn::pixel_shuffle(nn::relu(d), 2);        // [N,32,64,64]
  d = sp3_(d, nn::avg_pool2d(faces, 2));
  d = nn::pixel_shuffle(nn::relu(d), 2);        // [N,8,128,128]
  return nn::tanh(out_(d));
}

std::vector<data::FaceFrame> adapt_lips(LipAdapter& adapter,
                                        const std::vector<data::FaceFrame>& neutral_frames,
                                        const std::vector<data::MelChunk>& mels) {
  TG_CHECK_ARG(neutral_frames.size() == data::ClipSample::kT &&
                   mels.size() == data::ClipSample::kT,
               "adapt_lips: need exactly ", data::ClipSample::kT, " frames and mel chunks");
  for (size_t i = 1; i < neutral_frames.size(); ++i)
    TG_CHECK_ARG(neutral_frames[i].frame_index == neutral_frames[i - 1].frame_index + 1,
                 "adapt_lips: frames must be consecutive");
  Tensor x = data::faces_to_batch(neutral_frames);
  Tensor m = data::mels_to_batch(mels);
  Tensor y = adapter.forward(x, m, /*training=*/false);
  std::vector<data::FaceFrame> out;
  const int64_t per = 3 * 128 * 128;
  for (int i = 0; i < data::ClipSample::kT; ++i) {
    data::FaceFrame f;
    f.chw.assign(y.data() + i * per, y.data() + (i + 1) * per);
    f.crop_box = neutral_frames[static_cast<size_t>(i)].crop_box;
    f.frame_index = neutral_frames[static_cast<size_t>(i)].frame_index;
    data::clamp_face(f);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace talkgen::adapter

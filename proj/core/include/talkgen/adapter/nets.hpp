#pragma once

#include "talkgen/data/mel.hpp"
#include "talkgen/editor/nets.hpp"

namespace talkgen::adapter {

// Mel chunk [N,1,16,80] -> 512-d audio feature, conv stack with BN + ReLU.
struct AudioEncoder {
  nn::Conv2dLayer c1, c2, c3, c4, c5;
  nn::BatchNorm2dLayer b1, b2, b3, b4, b5;

  static AudioEncoder make(nn::ParamStore& ps, const std::string& name, nn::Rng& rng);
  nn::Tensor operator()(const nn::Tensor& mels, bool training);  // [N,512]
};

// Replaces instance statistics with (gamma, beta): per-channel mean of the
// output equals beta and std equals |gamma|.
nn::Tensor adain_modulate(const nn::Tensor& features, const nn::Tensor& gamma,
                          const nn::Tensor& beta);

// AdaIN block with its own affine predictor from the 512-d audio vector.
struct AdaInBlock {
  nn::LinearLayer affine;  // 512 -> 2C, gamma parameterized as 1 + dg
  int channels = 0;

  static AdaInBlock make(nn::ParamStore& ps, const std::string& name, int channels,
                         nn::Rng& rng);
  nn::Tensor operator()(const nn::Tensor& x, const nn::Tensor& audio_vec) const;
  // Predictor outputs for the statistics contract.
  void predict(const nn::Tensor& audio_vec, nn::Tensor* gamma, nn::Tensor* beta) const;
};

// Depth-concatenation of the audio vector onto the feature grid:
// [N,512,16,16] + [N,512] -> [N,1024,16,16].
nn::Tensor fuse_audio(const nn::Tensor& features, const nn::Tensor& audio_vec);

// The audio-conditioned lip generator: face encoder bottleneck fused with
// audio, SPADE blocks modulated by the input face, AdaIN blocks modulated by
// audio, pixel-shuffle upsampling. No mask, no identity reference.
class LipAdapter {
 public:
  explicit LipAdapter(uint64_t seed);

  nn::Tensor forward(const nn::Tensor& faces, const nn::Tensor& mels, bool training);

  nn::ParamStore& store() { return store_; }
  AudioEncoder& audio_encoder() { return aenc_; }
  const AdaInBlock& adain1() const { return ad1_; }
  const AdaInBlock& adain2() const { return ad2_; }

 private:
  nn::ParamStore store_;
  editor::FaceEncoder enc_;
  AudioEncoder aenc_;
  nn::Conv2dLayer fuse_proj_, dec_in_, out_;
  editor::SpadeBlock sp1_, sp2_, sp3_;
  AdaInBlock ad1_, ad2_;
};

// Runs the adapter on one 5-frame clip (eval mode); frames must be
// consecutive.
std::vector<data::FaceFrame> adapt_lips(LipAdapter& adapter,
                                        const std::vector<data::FaceFrame>& neutral_frames,
                                        const std::vector<data::MelChunk>& mels);

}  // namespace talkgen::adapter

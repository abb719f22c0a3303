#pragma once

#include "talkgen/data/image.hpp"
#include "talkgen/geometry/raster.hpp"
#include "talkgen/nn/layers.hpp"

namespace talkgen::editor {

// Face encoder: 7x7x64 s1, then 3x3 stride-2 blocks to 128/256/512 channels,
// BN + ReLU after each conv. Shared design between the face editor and the
// lip adapter.
struct FaceEncoder {
  nn::Conv2dLayer c1, c2, c3, c4;
  nn::BatchNorm2dLayer b1, b2, b3, b4;

  static FaceEncoder make(nn::ParamStore& ps, const std::string& name, int in_channels,
                          nn::Rng& rng);

  struct Taps {
    nn::Tensor e1;  // [N,64,128,128]
    nn::Tensor e2;  // [N,128,64,64]
    nn::Tensor e3;  // [N,256,32,32]
    nn::Tensor e4;  // [N,512,16,16]
  };
  Taps operator()(const nn::Tensor& x, bool training);
};

// Spatially-adaptive normalization: parameter-free instance norm modulated
// per pixel by scale/shift maps predicted from a 3-channel condition.
struct SpadeBlock {
  nn::Conv2dLayer shared, gamma, beta;

  static SpadeBlock make(nn::ParamStore& ps, const std::string& name, int channels,
                         nn::Rng& rng, int mod_channels = 3, int hidden = 32);
  // cond must already be resized to x's spatial size.
  nn::Tensor operator()(const nn::Tensor& x, const nn::Tensor& cond) const;
};

// Landmark-conditioned mouth editor. Decoder: SPADE(512) -> PixelShuffle ->
// SPADE(128) -> PixelShuffle -> SPADE(32) -> PixelShuffle -> Conv 7x7 -> 3,
// with encoder taps projected 1x1 and added before each SPADE block.
class EditorGenerator {
 public:
  explicit EditorGenerator(uint64_t seed);

  nn::Tensor forward(const nn::Tensor& face, const nn::Tensor& cond_map, bool training);

  // Eval-mode convenience on value types.
  data::FaceFrame edit_to_neutral(const data::FaceFrame& face,
                                  const geometry::LandmarkSet& neutral_landmarks);

  nn::ParamStore& store() { return store_; }

 private:
  nn::ParamStore store_;
  FaceEncoder enc_;
  SpadeBlock sp1_, sp2_, sp3_;
  nn::Conv2dLayer skip3_, skip2_, skip1_, out_;
};

// Landmark map raster -> [3,128,128] tensor with values in {0,1}.
nn::Tensor map_to_tensor(const geometry::LandmarkMap& map);

}  // namespace talkgen::editor

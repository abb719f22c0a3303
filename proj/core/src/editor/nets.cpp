#include "talkgen/editor/nets.hpp"

namespace talkgen::editor {

using nn::Tensor;

FaceEncoder FaceEncoder::make(nn::ParamStore& ps, const std::string& name, int in_channels,
                              nn::Rng& rng) {
  FaceEncoder e;
  e.c1 = nn::Conv2dLayer::make(ps, name + ".c1", in_channels, 64, 7, 1, 3, rng);
  e.c2 = nn::Conv2dLayer::make(ps, name + ".c2", 64, 128, 3, 2, 1, rng);
  e.c3 = nn::Conv2dLayer::make(ps, name + ".c3", 128, 256, 3, 2, 1, rng);
  e.c4 = nn::Conv2dLayer::make(ps, name + ".c4", 256, 512, 3, 2, 1, rng);
  e.b1 = nn::BatchNorm2dLayer::make(ps, name + ".b1", 64);
  e.b2 = nn::BatchNorm2dLayer::make(ps, name + ".b2", 128);
  e.b3 = nn::BatchNorm2dLayer::make(ps, name + ".b3", 256);
  e.b4 = nn::BatchNorm2dLayer::make(ps, name + ".b4", 512);
  return e;
}

FaceEncoder::Taps FaceEncoder::operator()(const Tensor& x, bool training) {
  Taps t;
  t.e1 = nn::relu(b1(c1(x), training));
  t.e2 = nn::relu(b2(c2(t.e1), training));
  t.e3 = nn::relu(b3(c3(t.e2), training));
  t.e4 = nn::relu(b4(c4(t.e3), training));
  return t;
}

SpadeBlock SpadeBlock::make(nn::ParamStore& ps, const std::string& name, int channels,
                            nn::Rng& rng, int mod_channels, int hidden) {
  SpadeBlock s;
  s.shared = nn::Conv2dLayer::make(ps, name + ".shared", mod_channels, hidden, 3, 1, 1, rng);
  s.gamma = nn::Conv2dLayer::make(ps, name + ".gamma", hidden, channels, 3, 1, 1, rng);
  s.beta = nn::Conv2dLayer::make(ps, name + ".beta", hidden, channels, 3, 1, 1, rng);
  return s;
}

Tensor SpadeBlock::operator()(const Tensor& x, const Tensor& cond) const {
  TG_CHECK_ARG(cond.dim(2) == x.dim(2) && cond.dim(3) == x.dim(3),
               "SpadeBlock: condition must match the feature size, got ",
               nn::shape_str(cond.shape()), " for ", nn::shape_str(x.shape()));
  Tensor base = nn::instance_norm2d(x);
  Tensor hidden = nn::relu(shared(cond));
  Tensor g = gamma(hidden);
  Tensor b = beta(hidden);
  // y = base * (1 + g) + b; zero modulation weights leave plain normalization.
  return nn::add(nn::add(base, nn::mul(base, g)), b);
}

EditorGenerator::EditorGenerator(uint64_t seed) {
  nn::Rng rng(derive_seed(seed, "editor_generator"));
  enc_ = FaceEncoder::make(store_, "enc", 3, rng);
  sp1_ = SpadeBlock::make(store_, "sp1", 512, rng);
  sp2_ = SpadeBlock::make(store_, "sp2", 128, rng);
  sp3_ = SpadeBlock::make(store_, "sp3", 32, rng);
  skip3_ = nn::Conv2dLayer::make(store_, "skip3", 256, 128, 1, 1, 0, rng);
  skip2_ = nn::Conv2dLayer::make(store_, "skip2", 128, 32, 1, 1, 0, rng);
  skip1_ = nn::Conv2dLayer::make(store_, "skip1", 64, 8, 1, 1, 0, rng);
  out_ = nn::Conv2dLayer::make(store_, "out", 8, 3, 7, 1, 3, rng);
}

Tensor EditorGenerator::forward(const Tensor& face, const Tensor& cond_map, bool training) {
  TG_CHECK_ARG(face.ndim() == 4 && face.dim(1) == 3 && face.dim(2) == 128 && face.dim(3) == 128,
               "EditorGenerator: face must be [N,3,128,128], got ",
               nn::shape_str(face.shape()));
  TG_CHECK_ARG(cond_map.shape() == face.shape(),
               "EditorGenerator: condition map must be [N,3,128,128]");
  auto taps = enc_(face, training);
  Tensor d = sp1_(taps.e4, nn::avg_pool2d(cond_map, 8));
  d = nn::pixel_shuffle(nn::relu(d), 2);                    // [N,128,32,32]
  d = nn::add(d, skip3_(taps.e3));
  d = sp2_(d, nn::avg_pool2d(cond_map, 4));
  d = nn::pixel_shuffle(nn::relu(d), 2);                    // [N,32,64,64]
  d = nn::add(d, skip2_(taps.e2));
  d = sp3_(d, nn::avg_pool2d(cond_map, 2));
  d = nn::pixel_shuffle(nn::relu(d), 2);                    // [N,8,128,128]
  d = nn::add(d, skip1_(taps.e1));
  return nn::tanh(out_(d));
}

data::FaceFrame EditorGenerator::edit_to_neutral(const data::FaceFrame& face,
                                                 const geometry::LandmarkSet& neutral_landmarks) {
  Tensor x = nn::reshape(data::face_to_tensor(face), {1, 3, 128, 128});
  Tensor cond = nn::reshape(map_to_tensor(geometry::render_landmark_map(neutral_landmarks)),
                            {1, 3, 128, 128});
  Tensor y = forward(x, cond, /*training=*/false);
  return data::tensor_to_face(y, face.crop_box, face.frame_index);
}

Tensor map_to_tensor(const geometry::LandmarkMap& map) {
  std::vector<float> data(map.pixels.size());
  for (size_t i = 0; i < map.pixels.size(); ++i)
    data[i] = map.pixels[i] != 0 ? 1.0f : 0.0f;
  return nn::Tensor::from_data({3, geometry::kMapSize, geometry::kMapSize}, std::move(data));
}

}  // namespace talkgen::editor

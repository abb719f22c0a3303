#include "talkgen/adapter/train.hpp"

#include <cmath>

namespace talkgen::adapter {

using nn::Tensor;

namespace {

// Lower halves below this mean intensity look masked; synthetic faces sit
// well above it.
constexpr double kLowerHalfContentFloor = 0.08;

Tensor clip_inputs(const AdapterClip& clip) { return data::faces_to_batch(clip.inputs); }

}  // namespace

double lower_half_intensity(const Tensor& frames) {
  const int64_t N = frames.dim(0), C = frames.dim(1), H = frames.dim(2), W = frames.dim(3);
  double s = 0.0;
  int64_t count = 0;
  for (int64_t n = 0; n < N; ++n)
    for (int64_t c = 0; c < C; ++c)
      for (int64_t y = H / 2; y < H; ++y)
        for (int64_t x = 0; x < W; ++x) {
          s += (frames.data()[((n * C + c) * H + y) * W + x] + 1.0) * 0.5;
          ++count;
        }
  return s / static_cast<double>(count);
}

Tensor mask_lower_half(const Tensor& frames) {
  Tensor out = frames.detach();
  const int64_t N = out.dim(0), C = out.dim(1), H = out.dim(2), W = out.dim(3);
  for (int64_t n = 0; n < N; ++n)
    for (int64_t c = 0; c < C; ++c)
      for (int64_t y = H / 2; y < H; ++y)
        for (int64_t x = 0; x < W; ++x)
          out.data()[((n * C + c) * H + y) * W + x] = -1.0f;
  return out;
}

AdapterTrainResult train_lip_adapter(LipAdapter& adapter,
                                     editor::MultiScaleDiscriminator& disc,
                                     const std::vector<AdapterClip>& clips,
                                     providers::FeatureProvider& perceptual,
                                     sync::SyncNet& syncnet, const AdapterLossWeights& weights,
                                     int steps, const nn::AdamSettings& adam, uint64_t seed) {
  TG_CHECK(!clips.empty(), "train_lip_adapter: empty clip set");
  for (const auto& c : clips) {
    TG_CHECK(c.inputs.size() == data::ClipSample::kT,
             "train_lip_adapter: clip missing neutral-mouth inputs (run the face editing "
             "stage first)");
    TG_CHECK(c.reference.empty(),
             "train_lip_adapter: the mask-free adapter takes no reference frames");
  }

  nn::Rng rng(derive_seed(seed, "train_adapter"));
  nn::Adam opt_g(adapter.store().trainable(), adam);
  nn::Adam opt_d(disc.store().trainable(), adam);

  AdapterTrainResult result;
  result.g_curve.reserve(static_cast<size_t>(steps));
  for (int step = 0; step < steps; ++step) {
    const auto& clip = clips[rng.uniform_index(clips.size())];
    Tensor x = clip_inputs(clip);
    TG_CHECK(lower_half_intensity(x) > kLowerHalfContentFloor,
             "train_lip_adapter: input lower half looks masked (mean intensity ",
             lower_half_intensity(x), ")");
    Tensor gt = data::faces_to_batch(clip.gt);
    Tensor mels = data::mels_to_batch(clip.mels);

    Tensor gen = adapter.forward(x, mels, /*training=*/true);

    opt_d.zero_grad();
    auto real_taps = disc.forward(gt);
    auto fake_taps = disc.forward(gen.detach());
    Tensor d_loss = editor::hinge_d_loss(real_taps, fake_taps);
    TG_CHECK(std::isfinite(d_loss.item()), "train_lip_adapter: non-finite D loss at step ",
             step);
    d_loss.backward();
    opt_d.step();
    result.d_curve.push_back(d_loss.item());

    opt_g.zero_grad();
    opt_d.zero_grad();
    AdapterLossBreakdown breakdown =
        adapter_loss(gen, gt, clip.mels[0], disc, perceptual, syncnet, weights);
    TG_CHECK(std::isfinite(breakdown.total.item()),
             "train_lip_adapter: non-finite G loss at step ", step);
    breakdown.total.backward();
    opt_g.step();
    result.g_curve.push_back(breakdown.total.item());
    if (step + 1 == steps) result.last = std::move(breakdown);
  }
  return result;
}

AblationAdapter::AblationAdapter(uint64_t seed, bool with_reference)
    : with_reference_(with_reference) {
  nn::Rng rng(derive_seed(seed, "ablation_adapter"));
  enc_ = editor::FaceEncoder::make(store_, "enc", with_reference ? 6 : 3, rng);
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

Tensor AblationAdapter::forward(const Tensor& faces, const Tensor& reference,
                                const Tensor& mels, bool training) {
  TG_CHECK_ARG(reference.defined() == with_reference_,
               "AblationAdapter: reference presence must match the build flag");
  Tensor enc_in = with_reference_ ? nn::concat_channels(faces, reference) : faces;
  auto taps = enc_(enc_in, training);
  Tensor audio = aenc_(mels, training);
  Tensor d = dec_in_(fuse_proj_(fuse_audio(taps.e4, audio)));
  d = sp1_(d, nn::avg_pool2d(faces, 8));
  d = ad1_(d, audio);
  d = nn::pixel_shuffle(nn::relu(d), 2);
  d = sp2_(d, nn::avg_pool2d(faces, 4));
  d = ad2_(d, audio);
  d = nn::pixel_shuffle(nn::relu(d), 2);
  d = sp3_(d, nn::avg_pool2d(faces, 2));
  d = nn::pixel_shuffle(nn::relu(d), 2);
  return nn::tanh(out_(d));
}

AdapterTrainResult train_ablation_arm(AblationAdapter& adapter,
                                      editor::MultiScaleDiscriminator& disc,
                                      const std::vector<AdapterClip>& clips,
                                      providers::FeatureProvider& perceptual,
                                      sync::SyncNet& syncnet,
                                      const AdapterLossWeights& weights,
                                      const AblationArmOptions& opts) {
  TG_CHECK(!clips.empty(), "train_ablation_arm: empty clip set");
  if (opts.use_reference)
    for (const auto& c : clips)
      TG_CHECK(c.reference.size() == data::ClipSample::kT,
               "train_ablation_arm: reference frames missing");

  nn::Rng rng(derive_seed(opts.seed, "train_ablation"));
  nn::Adam opt_g(adapter.store().trainable(), opts.adam);
  nn::Adam opt_d(disc.store().trainable(), opts.adam);

  AdapterTrainResult result;
  for (int step = 0; step < opts.steps; ++step) {
    const auto& clip = clips[rng.uniform_index(clips.size())];
    Tensor x = data::faces_to_batch(clip.inputs);
    if (opts.mask_input) {
      x = mask_lower_half(x);
      TG_CHECK(lower_half_intensity(x) < 1e-6,
               "train_ablation_arm: masked input retains lower-half content");
    }
    Tensor ref = opts.use_reference ? data::faces_to_batch(clip.reference) : Tensor();
    Tensor gt = data::faces_to_batch(clip.gt);
    Tensor mels = data::mels_to_batch(clip.mels);

    Tensor gen = adapter.forward(x, ref, mels, /*training=*/true);

    opt_d.zero_grad();
    Tensor d_loss = editor::hinge_d_loss(disc.forward(gt), disc.forward(gen.detach()));
    d_loss.backward();
    opt_d.step();
    result.d_curve.push_back(d_loss.item());

    opt_g.zero_grad();
    opt_d.zero_grad();
    AdapterLossBreakdown breakdown =
        adapter_loss(gen, gt, clip.mels[0], disc, perceptual, syncnet, weights);
    breakdown.total.backward();
    opt_g.step();
    result.g_curve.push_back(breakdown.total.item());
    if (step + 1 == opts.steps) result.last = std::move(breakdown);
  }
  return result;
}

}  // namespace talkgen::adapter

#include "talkgen/editor/losses.hpp"

#include <cmath>

namespace talkgen::editor {

using nn::Tensor;

double EditorLossBreakdown::weighted_sum() const { return total.item(); }

Tensor perceptual_loss(providers::FeatureProvider& provider, const Tensor& gen,
                       const Tensor& target) {
  const auto gen_maps = provider.feature_maps(gen);
  const auto tgt_maps = provider.feature_maps(target);
  TG_CHECK(gen_maps.size() == tgt_maps.size(), "perceptual_loss: level count mismatch");
  Tensor total;
  for (size_t l = 0; l < gen_maps.size(); ++l) {
    Tensor term = nn::mae(gen_maps[l], tgt_maps[l].detach());
    total = total.defined() ? nn::add(total, term) : term;
  }
  return nn::mul_scalar(total, 1.0f / static_cast<float>(gen_maps.size()));
}

EditorLossBreakdown editor_loss(const Tensor& fake, const Tensor& real, const Tensor& cond_map,
                                const Tensor& cond_lip, const Tensor& cond_jaw,
                                MultiScaleDiscriminator& disc,
                                providers::FeatureProvider& perceptual,
                                providers::LandmarkProvider& landmarks, MouthClassifier& mouth,
                                const EditorLossWeights& w) {
  TG_CHECK_ARG(fake.shape() == real.shape(), "editor_loss: fake/real shape mismatch");
  const int64_t N = fake.dim(0);

  auto fake_taps = disc.forward(nn::concat_channels(fake, cond_map));
  auto real_taps = disc.forward(nn::concat_channels(real, cond_map));

  Tensor l_gan = hinge_g_loss(fake_taps);
  Tensor l_per = perceptual_loss(perceptual, fake, real);
  Tensor l_fm = feature_matching_loss(fake_taps, real_taps);

  Tensor coords = landmarks.extract_lip_jaw(fake);  // [N,57,2]
  Tensor coords4 = nn::reshape(coords, {N, 57, 2, 1});
  Tensor pred_lip =
      nn::reshape(nn::slice_channels(coords4, 0, geometry::kNumLip), {N, geometry::kNumLip, 2});
  Tensor pred_jaw =
      nn::reshape(nn::slice_channels(coords4, geometry::kNumLip, 57), {N, geometry::kNumJaw, 2});
  Tensor l_lmk = landmark::landmark_loss(pred_lip, pred_jaw, cond_lip, cond_jaw);

  Tensor closed_target = Tensor::zeros({N, 1});
  Tensor l_mouth = nn::bce_with_logits(mouth.logits(fake), closed_target);

  EditorLossBreakdown out;
  out.gan = l_gan.item();
  out.per = l_per.item();
  out.fm = l_fm.item();
  out.lmk = l_lmk.item();
  out.mouth = l_mouth.item();
  const struct {
    const char* name;
    double v;
  } terms[] = {{"L_GAN", out.gan}, {"L_per", out.per}, {"L_FM", out.fm},
               {"L_l", out.lmk},   {"L_m", out.mouth}};
  for (const auto& t : terms)
    TG_CHECK(std::isfinite(t.v), "editor_loss: non-finite term ", t.name);

  out.total = nn::add(
      nn::add(nn::add(nn::mul_scalar(l_gan, static_cast<float>(w.gan)),
                      nn::mul_scalar(l_per, static_cast<float>(w.per))),
              nn::add(nn::mul_scalar(l_fm, static_cast<float>(w.fm)),
                      nn::mul_scalar(l_lmk, static_cast<float>(w.lmk)))),
      nn::mul_scalar(l_mouth, static_cast<float>(w.mouth)));
  return out;
}

}  // namespace talkgen::editor

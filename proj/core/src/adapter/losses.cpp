#include "talkgen/adapter/losses.hpp"

#include <cmath>

namespace talkgen::adapter {

using nn::Tensor;

AdapterLossBreakdown adapter_loss(const Tensor& gen, const Tensor& gt,
                                  const data::MelChunk& clip_mel,
                                  editor::MultiScaleDiscriminator& disc,
                                  providers::FeatureProvider& perceptual, sync::SyncNet& syncnet,
                                  const AdapterLossWeights& w) {
  TG_CHECK_ARG(gen.shape() == gt.shape(), "adapter_loss: gen/gt shape mismatch");
  TG_CHECK_ARG(gen.dim(0) == data::ClipSample::kT, "adapter_loss: expected a T=",
               data::ClipSample::kT, " clip");

  auto fake_taps = disc.forward(gen);
  Tensor l_gan = editor::hinge_g_loss(fake_taps);
  Tensor l_per = editor::perceptual_loss(perceptual, gen, gt);
  Tensor l_pix = nn::mae(gen, gt);

  Tensor f_a =
      syncnet.audio_forward(data::mels_to_batch({clip_mel}), /*training=*/false).detach();
  Tensor f_gen = syncnet.visual_forward(sync::lower_half_stack_t(gen), /*training=*/false);
  Tensor f_gt =
      syncnet.visual_forward(sync::lower_half_stack_t(gt), /*training=*/false).detach();
  Tensor l_ads = sync::adapted_sync_loss_t(f_a, f_gen, f_gt);

  AdapterLossBreakdown out;
  out.gan = l_gan.item();
  out.per = l_per.item();
  out.ads = l_ads.item();
  out.pix = l_pix.item();
  const struct {
    const char* name;
    double v;
  } terms[] = {{"L_GAN", out.gan}, {"L_per", out.per}, {"L_ads", out.ads}, {"L_pixel", out.pix}};
  for (const auto& t : terms)
    TG_CHECK(std::isfinite(t.v), "adapter_loss: non-finite term ", t.name);

  out.total = nn::add(nn::add(nn::mul_scalar(l_gan, static_cast<float>(w.gan)),
                              nn::mul_scalar(l_per, static_cast<float>(w.per))),
                      nn::add(nn::mul_scalar(l_ads, static_cast<float>(w.sync)),
                              nn::mul_scalar(l_pix, static_cast<float>(w.pix))));
  return out;
}

}  // namespace talkgen::adapter

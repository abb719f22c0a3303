#pragma once

#include "talkgen/adapter/nets.hpp"
#include "talkgen/editor/discriminator.hpp"
#include "talkgen/editor/losses.hpp"
#include "talkgen/sync/loss.hpp"

namespace talkgen::adapter {

struct AdapterLossWeights {
  double per = 4.0;
  double sync = 0.5;
  double pix = 10.0;
  double gan = 1.0;
};

struct AdapterLossBreakdown {
  nn::Tensor total;
  double gan = 0.0, per = 0.0, ads = 0.0, pix = 0.0;
};

// L = w_gan*L_GAN + w_per*L_per + w_sync*L_ads + w_pix*L_pixel over one
// T=5 clip. `clip_mel` is the chunk of the clip's first frame (its 16
// columns span the whole 200 ms window).
AdapterLossBreakdown adapter_loss(const nn::Tensor& gen, const nn::Tensor& gt,
                                  const data::MelChunk& clip_mel,
                                  editor::MultiScaleDiscriminator& disc,
                                  providers::FeatureProvider& perceptual, sync::SyncNet& syncnet,
                                  const AdapterLossWeights& w);

}  // namespace talkgen::adapter

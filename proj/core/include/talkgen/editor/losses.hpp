#pragma once

#include "talkgen/editor/discriminator.hpp"
#include "talkgen/editor/mouth_classifier.hpp"
#include "talkgen/editor/nets.hpp"
#include "talkgen/landmark/predictor.hpp"
#include "talkgen/providers/providers.hpp"

namespace talkgen::editor {

struct EditorLossWeights {
  double per = 1.0;
  double fm = 0.1;
  double lmk = 0.25;
  double gan = 1.0;
  double mouth = 1.0;
};

struct EditorLossBreakdown {
  nn::Tensor total;
  double gan = 0.0, per = 0.0, fm = 0.0, lmk = 0.0, mouth = 0.0;
  double weighted_sum() const;
};

// L_E = w_gan*L_GAN + w_per*L_per + w_fm*L_FM + w_lmk*L_l + w_mouth*L_m.
// `real` is the unmasked input face (unpaired training: no pixel target).
// cond_lip/cond_jaw are the conditioning landmarks, [N,41,2] / [N,16,2].
EditorLossBreakdown editor_loss(const nn::Tensor& fake, const nn::Tensor& real,
                                const nn::Tensor& cond_map, const nn::Tensor& cond_lip,
                                const nn::Tensor& cond_jaw, MultiScaleDiscriminator& disc,
                                providers::FeatureProvider& perceptual,
                                providers::LandmarkProvider& landmarks,
                                MouthClassifier& mouth, const EditorLossWeights& w);

// Perceptual distance over provider levels (mean of per-level L1), with the
// target branch detached.
nn::Tensor perceptual_loss(providers::FeatureProvider& provider, const nn::Tensor& gen,
                           const nn::Tensor& target);

}  // namespace talkgen::editor

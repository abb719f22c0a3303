#include "talkgen/editor/train.hpp"

#include <cmath>

namespace talkgen::editor {

using nn::Tensor;

Tensor batch_cond_maps(const std::vector<const EditorSample*>& batch) {
  std::vector<float> data;
  data.reserve(batch.size() * 3 * 128 * 128);
  for (const auto* s : batch) data.insert(data.end(), s->cond_map.begin(), s->cond_map.end());
  return Tensor::from_data({static_cast<int64_t>(batch.size()), 3, 128, 128}, std::move(data));
}

void batch_cond_landmarks(const std::vector<const EditorSample*>& batch, Tensor* lip,
                          Tensor* jaw) {
  std::vector<float> lip_data, jaw_data;
  for (const auto* s : batch) {
    lip_data.insert(lip_data.end(), s->lip_jaw.begin(),
                    s->lip_jaw.begin() + 2 * geometry::kNumLip);
    jaw_data.insert(jaw_data.end(), s->lip_jaw.begin() + 2 * geometry::kNumLip,
                    s->lip_jaw.end());
  }
  const int64_t N = static_cast<int64_t>(batch.size());
  *lip = Tensor::from_data({N, geometry::kNumLip, 2}, std::move(lip_data));
  *jaw = Tensor::from_data({N, geometry::kNumJaw, 2}, std::move(jaw_data));
}

EditorTrainResult train_face_editor(EditorGenerator& gen, MultiScaleDiscriminator& disc,
                                    const std::vector<EditorSample>& samples,
                                    providers::FeatureProvider& perceptual,
                                    providers::LandmarkProvider& landmarks,
                                    MouthClassifier& mouth, const EditorLossWeights& weights,
                                    int steps, int batch, const nn::AdamSettings& adam,
                                    uint64_t seed) {
  TG_CHECK(!samples.empty(), "train_face_editor: empty sample set");
  nn::Rng rng(derive_seed(seed, "train_editor"));
  nn::Adam opt_g(gen.store().trainable(), adam);
  nn::Adam opt_d(disc.store().trainable(), adam);

  EditorTrainResult result;
  result.g_curve.reserve(static_cast<size_t>(steps));
  result.d_curve.reserve(static_cast<size_t>(steps));

  for (int step = 0; step < steps; ++step) {
    std::vector<const EditorSample*> chosen;
    std::vector<data::FaceFrame> faces;
    for (int b = 0; b < batch; ++b) {
      const auto* s = &samples[rng.uniform_index(samples.size())];
      chosen.push_back(s);
      faces.push_back(*s->face);
    }
    Tensor real = data::faces_to_batch(faces);
    Tensor cond = batch_cond_maps(chosen);
    Tensor cond_lip, cond_jaw;
    batch_cond_landmarks(chosen, &cond_lip, &cond_jaw);

    Tensor fake = gen.forward(real, cond, /*training=*/true);

    // Discriminator update on the detached fake.
    opt_d.zero_grad();
    auto real_taps = disc.forward(nn::concat_channels(real, cond));
    auto fake_taps_d = disc.forward(nn::concat_channels(fake.detach(), cond));
    Tensor d_loss = hinge_d_loss(real_taps, fake_taps_d);
    TG_CHECK(std::isfinite(d_loss.item()), "train_face_editor: non-finite D loss at step ",
             step);
    d_loss.backward();
    opt_d.step();
    result.d_curve.push_back(d_loss.item());
    result.d_accuracy.push_back(discriminator_accuracy(real_taps, fake_taps_d));

    // Generator update through the full loss ensemble.
    opt_g.zero_grad();
    opt_d.zero_grad();  // G backward also reaches D parameters
    EditorLossBreakdown breakdown = editor_loss(fake, real, cond, cond_lip, cond_jaw, disc,
                                                perceptual, landmarks, mouth, weights);
    TG_CHECK(std::isfinite(breakdown.total.item()),
             "train_face_editor: non-finite G loss at step ", step);
    breakdown.total.backward();
    opt_g.step();
    result.g_curve.push_back(breakdown.total.item());
    if (step + 1 == steps) result.last = std::move(breakdown);
  }
  return result;
}

}  // namespace talkgen::editor

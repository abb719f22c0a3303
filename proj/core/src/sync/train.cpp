#include "talkgen/sync/train.hpp"

#include <cmath>

namespace talkgen::sync {

using nn::Tensor;

std::vector<SyncSample> build_sync_dataset(const std::vector<data::Utterance>& utts,
                                           uint64_t seed) {
  TG_CHECK(!utts.empty(), "build_sync_dataset: empty corpus");
  nn::Rng rng(derive_seed(seed, "sync_dataset"));
  std::vector<SyncSample> out;
  for (size_t ui = 0; ui < utts.size(); ++ui) {
    const int n_windows = utts[ui].n_frames() - data::ClipSample::kT + 1;
    for (int s = 0; s < n_windows; ++s) {
      out.push_back({static_cast<int>(ui), s, static_cast<int>(ui), s, true});
      // Negative: same utterance at >= 3 frames away, or another utterance.
      SyncSample neg{static_cast<int>(ui), s, static_cast<int>(ui), s, false};
      if (utts.size() > 1 && rng.uniform() < 0.5) {
        int other = static_cast<int>(rng.uniform_index(utts.size()));
        if (other == static_cast<int>(ui)) other = (other + 1) % static_cast<int>(utts.size());
        neg.mel_utt = other;
        neg.mel_start = static_cast<int>(rng.uniform_index(
            static_cast<uint64_t>(utts[static_cast<size_t>(other)].n_frames() -
                                  data::ClipSample::kT + 1)));
      } else {
        int shifted = s;
        for (int tries = 0; tries < 64 && std::abs(shifted - s) < 3; ++tries)
          shifted = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(n_windows)));
        if (std::abs(shifted - s) < 3) continue;  // tiny utterance, skip negative
        neg.mel_start = shifted;
      }
      out.push_back(neg);
    }
  }
  return out;
}

namespace {

Tensor clip_probability(SyncNet& net, const std::vector<data::Utterance>& utts,
                        const SyncSample& s, bool training) {
  const auto& vu = utts[static_cast<size_t>(s.utt)];
  std::vector<data::FaceFrame> frames(vu.crops.begin() + s.start,
                                      vu.crops.begin() + s.start + data::ClipSample::kT);
  Tensor v = net.visual_forward(lower_half_stack(frames), training);
  const auto& mu = utts[static_cast<size_t>(s.mel_utt)];
  Tensor a = net.audio_forward(
      data::mels_to_batch({mu.mels[static_cast<size_t>(s.mel_start)]}), training);
  Tensor cos = nn::dot(nn::reshape(v, {kEmbedDim}), nn::reshape(a, {kEmbedDim}));
  return nn::clamp(nn::mul_scalar(nn::add_scalar(cos, 1.0f), 0.5f), 1e-6f, 1.0f - 1e-6f);
}

}  // namespace

SyncTrainResult train_sync_encoders(SyncNet& net, const std::vector<data::Utterance>& utts,
                                    const std::vector<SyncSample>& dataset, int steps,
                                    int batch, const nn::AdamSettings& adam, uint64_t seed) {
  TG_CHECK(!dataset.empty(), "train_sync_encoders: empty dataset");
  bool has_pos = false, has_neg = false;
  for (const auto& s : dataset) (s.in_sync ? has_pos : has_neg) = true;
  TG_CHECK(has_pos && has_neg,
           "train_sync_encoders: dataset must contain both in-sync and out-of-sync pairs");

  nn::Rng rng(derive_seed(seed, "train_sync"));
  nn::Adam opt(net.store().trainable(), adam);
  SyncTrainResult result;
  result.loss_curve.reserve(static_cast<size_t>(steps));
  for (int step = 0; step < steps; ++step) {
    opt.zero_grad();
    Tensor loss;
    for (int b = 0; b < batch; ++b) {
      const auto& s = dataset[rng.uniform_index(dataset.size())];
      Tensor p = clip_probability(net, utts, s, /*training=*/true);
      Tensor term = s.in_sync
                        ? nn::neg(nn::log(p))
                        : nn::neg(nn::log(nn::add_scalar(nn::neg(p), 1.0f)));
      loss = loss.defined() ? nn::add(loss, term) : term;
    }
    loss = nn::mul_scalar(loss, 1.0f / static_cast<float>(batch));
    TG_CHECK(std::isfinite(loss.item()), "train_sync_encoders: non-finite loss at step ", step);
    loss.backward();
    opt.step();
    result.loss_curve.push_back(loss.item());
  }
  net.freeze();
  result.train_accuracy = sync_accuracy(net, utts, dataset);
  return result;
}

double sync_accuracy(SyncNet& net, const std::vector<data::Utterance>& utts,
                     const std::vector<SyncSample>& dataset) {
  int64_t correct = 0;
  for (const auto& s : dataset) {
    const float p = clip_probability(net, utts, s, /*training=*/false).item();
    correct += ((p > 0.5f) == s.in_sync) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

SyncCosineStats sync_cosine_stats(SyncNet& net, const std::vector<data::Utterance>& utts,
                                  int offset) {
  SyncCosineStats stats;
  int64_t count_in = 0, count_off = 0;
  for (const auto& u : utts) {
    const int n_windows = u.n_frames() - data::ClipSample::kT + 1;
    for (int s = 0; s < n_windows; ++s) {
      std::vector<data::FaceFrame> frames(u.crops.begin() + s,
                                          u.crops.begin() + s + data::ClipSample::kT);
      const SyncEmbedding v = net.embed_visual(frames);
      const SyncEmbedding a = net.embed_audio(u.mels[static_cast<size_t>(s)]);
      stats.mean_in_sync += cosine(v, a);
      ++count_in;
      if (s + offset < n_windows) {
        const SyncEmbedding a_off = net.embed_audio(u.mels[static_cast<size_t>(s + offset)]);
        stats.mean_offset += cosine(v, a_off);
        ++count_off;
      }
    }
  }
  if (count_in > 0) stats.mean_in_sync /= static_cast<double>(count_in);
  if (count_off > 0) stats.mean_offset /= static_cast<double>(count_off);
  return stats;
}

}  // namespace talkgen::sync

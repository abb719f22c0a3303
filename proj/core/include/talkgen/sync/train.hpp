#pragma once

#include "talkgen/nn/optim.hpp"
#include "talkgen/sync/loss.hpp"

namespace talkgen::sync {

// One labeled pair: the visual window at (utt, start) against the mel chunk
// at (mel_utt, mel_start).
struct SyncSample {
  int utt = 0;
  int start = 0;
  int mel_utt = 0;
  int mel_start = 0;
  bool in_sync = false;
};

// One positive and one negative (offset >= 3 frames or cross-utterance) pair
// per window, deterministically from the seed.
std::vector<SyncSample> build_sync_dataset(const std::vector<data::Utterance>& utts,
                                           uint64_t seed);

struct SyncTrainResult {
  std::vector<float> loss_curve;
  double train_accuracy = 0.0;
};

// Binary cross-entropy on (cos+1)/2; encoders are frozen on return.
SyncTrainResult train_sync_encoders(SyncNet& net, const std::vector<data::Utterance>& utts,
                                    const std::vector<SyncSample>& dataset, int steps,
                                    int batch, const nn::AdamSettings& adam, uint64_t seed);

double sync_accuracy(SyncNet& net, const std::vector<data::Utterance>& utts,
                     const std::vector<SyncSample>& dataset);

// Mean cosine of in-sync vs off-by-`offset` pairs over a corpus.
struct SyncCosineStats {
  double mean_in_sync = 0.0;
  double mean_offset = 0.0;
};
SyncCosineStats sync_cosine_stats(SyncNet& net, const std::vector<data::Utterance>& utts,
                                  int offset = 5);

}  // namespace talkgen::sync

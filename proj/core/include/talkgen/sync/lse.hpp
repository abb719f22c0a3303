#pragma once

#include "talkgen/sync/nets.hpp"

namespace talkgen::sync {

struct LseScores {
  double lse_c = 0.0;  // mean over windows of (median - minimum) distance
  double lse_d = 0.0;  // mean over windows of the minimum distance
};

inline constexpr int kDefaultMaxOffset = 15;

// For each visual window, Euclidean distances to the audio embeddings at
// offsets in [-max_offset, max_offset] (offsets falling outside the sequence
// are skipped). Sequences must be aligned, equal length, and longer than
// max_offset.
LseScores lse_scores(const std::vector<SyncEmbedding>& video_embeddings,
                     const std::vector<SyncEmbedding>& audio_embeddings,
                     int max_offset = kDefaultMaxOffset);

// Offset whose mean distance over all windows is smallest; for tests.
int best_audio_offset(const std::vector<SyncEmbedding>& video_embeddings,
                      const std::vector<SyncEmbedding>& audio_embeddings,
                      int max_offset = kDefaultMaxOffset);

}  // namespace talkgen::sync

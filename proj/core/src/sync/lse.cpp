#include "talkgen/sync/lse.hpp"

#include <algorithm>
#include <cmath>

namespace talkgen::sync {

namespace {

double euclidean(const SyncEmbedding& a, const SyncEmbedding& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    const double d = static_cast<double>(a.v[i]) - b.v[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

LseScores lse_scores(const std::vector<SyncEmbedding>& video_embeddings,
                     const std::vector<SyncEmbedding>& audio_embeddings, int max_offset) {
  TG_CHECK_ARG(video_embeddings.size() == audio_embeddings.size(),
               "lse_scores: sequences must be aligned and equal length");
  const int n = static_cast<int>(video_embeddings.size());
  TG_CHECK_ARG(n > max_offset, "lse_scores: sequence too short (", n, " windows, need > ",
               max_offset, ")");
  double sum_min = 0.0, sum_conf = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> dists;
    dists.reserve(static_cast<size_t>(2 * max_offset + 1));
    for (int o = -max_offset; o <= max_offset; ++o) {
      const int j = i + o;
      if (j < 0 || j >= n) continue;
      dists.push_back(euclidean(video_embeddings[static_cast<size_t>(i)],
                                audio_embeddings[static_cast<size_t>(j)]));
    }
    const double mn = *std::min_element(dists.begin(), dists.end());
    sum_min += mn;
    sum_conf += median_of(dists) - mn;
  }
  LseScores s;
  s.lse_d = sum_min / n;
  s.lse_c = sum_conf / n;
  return s;
}

int best_audio_offset(const std::vector<SyncEmbedding>& video_embeddings,
                      const std::vector<SyncEmbedding>& audio_embeddings, int max_offset) {
  TG_CHECK_ARG(video_embeddings.size() == audio_embeddings.size(),
               "best_audio_offset: unequal sequences");
  const int n = static_cast<int>(video_embeddings.size());
  double best = 0.0;
  int best_o = -max_offset - 1;
  for (int o = -max_offset; o <= max_offset; ++o) {
    double s = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      const int j = i + o;
      if (j < 0 || j >= n) continue;
      s += euclidean(video_embeddings[static_cast<size_t>(i)],
                     audio_embeddings[static_cast<size_t>(j)]);
      ++count;
    }
    if (count == 0) continue;
    s /= count;
    if (best_o < -max_offset || s < best) {
      best = s;
      best_o = o;
    }
  }
  return best_o;
}

}  // namespace talkgen::sync

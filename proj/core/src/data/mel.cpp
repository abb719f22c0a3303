#include "talkgen/data/mel.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace talkgen::data {

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

nn::Tensor mel_to_tensor(const MelChunk& m) {
  return nn::Tensor::from_data({1, kMelChunkSteps, kMelBins}, m.values);
}

nn::Tensor mels_to_batch(const std::vector<MelChunk>& ms) {
  TG_CHECK_ARG(!ms.empty(), "mels_to_batch: empty list");
  std::vector<float> data;
  data.reserve(ms.size() * kMelChunkSteps * kMelBins);
  for (const auto& m : ms) data.insert(data.end(), m.values.begin(), m.values.end());
  return nn::Tensor::from_data(
      {static_cast<int64_t>(ms.size()), 1, kMelChunkSteps, kMelBins}, std::move(data));
}

std::vector<std::vector<float>> mel_filter_bank(const MelParams& p) {
  const int n_freq = p.n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(p.fmin), mel_hi = hz_to_mel(p.fmax);
  std::vector<double> edges(static_cast<size_t>(p.n_mels) + 2);
  for (int i = 0; i < p.n_mels + 2; ++i)
    edges[static_cast<size_t>(i)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (p.n_mels + 1));
  std::vector<std::vector<float>> fb(static_cast<size_t>(p.n_mels),
                                     std::vector<float>(static_cast<size_t>(n_freq), 0.0f));
  for (int m = 0; m < p.n_mels; ++m) {
    const double lo = edges[static_cast<size_t>(m)];
    const double mid = edges[static_cast<size_t>(m) + 1];
    const double hi = edges[static_cast<size_t>(m) + 2];
    for (int k = 0; k < n_freq; ++k) {
      const double f = static_cast<double>(k) * p.sample_rate / p.n_fft;
      double w = 0.0;
      if (f > lo && f < mid)
        w = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        w = (hi - f) / (hi - mid);
      fb[static_cast<size_t>(m)][static_cast<size_t>(k)] = static_cast<float>(w);
    }
  }
  return fb;
}

int mel_column_count(size_t n_samples, const MelParams& p) {
  const int pad = (p.n_fft - p.hop) / 2;
  const int64_t padded = static_cast<int64_t>(n_samples) + 2 * pad;
  if (padded < p.n_fft) return 0;
  return static_cast<int>((padded - p.n_fft) / p.hop) + 1;
}

std::vector<std::vector<float>> log_mel_spectrogram(const std::vector<float>& samples,
                                                    const MelParams& p) {
  const int n_freq = p.n_fft / 2 + 1;
  const int n_cols = mel_column_count(samples.size(), p);
  const int pad = (p.n_fft - p.hop) / 2;

  // Hann window (periodic), DFT as two GEMMs against cos/sin tables.
  Eigen::VectorXd window(p.n_fft);
  for (int i = 0; i < p.n_fft; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / p.n_fft);
  static thread_local Eigen::MatrixXd cos_table, sin_table;
  if (cos_table.rows() != n_freq || cos_table.cols() != p.n_fft) {
    cos_table.resize(n_freq, p.n_fft);
    sin_table.resize(n_freq, p.n_fft);
    for (int k = 0; k < n_freq; ++k)
      for (int i = 0; i < p.n_fft; ++i) {
        const double phase = 2.0 * M_PI * k * i / p.n_fft;
        cos_table(k, i) = std::cos(phase);
        sin_table(k, i) = -std::sin(phase);
      }
  }

  const auto fb = mel_filter_bank(p);
  std::vector<std::vector<float>> out(static_cast<size_t>(n_cols),
                                      std::vector<float>(static_cast<size_t>(p.n_mels)));
  Eigen::VectorXd frame(p.n_fft);
  for (int t = 0; t < n_cols; ++t) {
    const int64_t start = static_cast<int64_t>(t) * p.hop - pad;
    for (int i = 0; i < p.n_fft; ++i) {
      const int64_t s = start + i;
      frame[i] = (s >= 0 && s < static_cast<int64_t>(samples.size()))
                     ? static_cast<double>(samples[static_cast<size_t>(s)])
                     : 0.0;
      frame[i] *= window[i];
    }
    const Eigen::VectorXd re = cos_table * frame;
    const Eigen::VectorXd im = sin_table * frame;
    for (int m = 0; m < p.n_mels; ++m) {
      double acc = 0.0;
      const auto& row = fb[static_cast<size_t>(m)];
      for (int k = 0; k < n_freq; ++k) {
        if (row[static_cast<size_t>(k)] == 0.0f) continue;
        acc += row[static_cast<size_t>(k)] * std::sqrt(re[k] * re[k] + im[k] * im[k]);
      }
      const double lv = acc > 0.0 ? std::log(acc) : -1e30;
      out[static_cast<size_t>(t)][static_cast<size_t>(m)] =
          std::max(p.log_floor, static_cast<float>(lv));
    }
  }
  return out;
}

int chunk_start_column(int frame_index) {
  return static_cast<int>(std::lround(frame_index * kMelColsPerFrame));
}

std::vector<MelChunk> extract_mels(const std::vector<float>& samples, int n_frames,
                                   int fps, const MelParams& p) {
  TG_CHECK_ARG(fps == kFps, "extract_mels: pipeline assumes ", kFps, " fps, got ", fps);
  TG_CHECK_ARG(n_frames > 0, "extract_mels: n_frames must be positive");
  const int n_cols = mel_column_count(samples.size(), p);
  const int last_start = chunk_start_column(n_frames - 1);
  if (last_start + kMelChunkSteps > n_cols) {
    int first_missing = 0;
    for (int i = 0; i < n_frames; ++i)
      if (chunk_start_column(i) + kMelChunkSteps > n_cols) {
        first_missing = i;
        break;
      }
    throw RuntimeFault(str_cat("extract_mels: audio too short: ", n_cols,
                               " mel columns cover frames [0,", first_missing,
                               "), need ", n_frames, " frames (frames ", first_missing,
                               "..", n_frames - 1, " missing)"));
  }
  const auto spec = log_mel_spectrogram(samples, p);
  std::vector<MelChunk> chunks(static_cast<size_t>(n_frames));
  for (int i = 0; i < n_frames; ++i) {
    MelChunk& c = chunks[static_cast<size_t>(i)];
    c.frame_index = i;
    const int start = chunk_start_column(i);
    for (int t = 0; t < kMelChunkSteps; ++t)
      for (int m = 0; m < kMelBins; ++m)
        c.at(t, m) = spec[static_cast<size_t>(start + t)][static_cast<size_t>(m)];
  }
  return chunks;
}

}  // namespace talkgen::data

#pragma once

#include <vector>

#include "talkgen/common.hpp"
#include "talkgen/nn/tensor.hpp"

namespace talkgen::data {

// Mel extraction parameters, pinned for reproducibility. 16 kHz audio,
// window 800, hop 200 (12.5 ms), 80 HTK-mel bins spanning 55-7600 Hz,
// magnitude STFT, natural log clamped at kLogFloor.
struct MelParams {
  int sample_rate = 16000;
  int n_fft = 800;
  int win_length = 800;
  int hop = 200;
  int n_mels = 80;
  double fmin = 55.0;
  double fmax = 7600.0;
  float log_floor = -11.5f;
};

inline constexpr int kMelChunkSteps = 16;
inline constexpr int kMelBins = 80;
inline constexpr int kFps = 25;
// Mel columns advanced per video frame: (sample_rate/hop)/fps.
inline constexpr double kMelColsPerFrame = 3.2;

// One video frame's audio condition: 16 time steps x 80 mel bins, row-major
// time-major, log amplitude.
struct MelChunk {
  std::vector<float> values = std::vector<float>(kMelChunkSteps * kMelBins, 0.0f);
  int frame_index = 0;

  float at(int t, int m) const { return values[static_cast<size_t>(t * kMelBins + m)]; }
  float& at(int t, int m) { return values[static_cast<size_t>(t * kMelBins + m)]; }
};

nn::Tensor mel_to_tensor(const MelChunk& m);                       // [1,16,80]
nn::Tensor mels_to_batch(const std::vector<MelChunk>& ms);         // [N,1,16,80]

// Full log-mel spectrogram, [n_cols][n_mels].
std::vector<std::vector<float>> log_mel_spectrogram(const std::vector<float>& samples,
                                                    const MelParams& p = {});

int mel_column_count(size_t n_samples, const MelParams& p = {});
int chunk_start_column(int frame_index);

// One 16x80 chunk per video frame; raises if the audio is too short and
// names the first frame that lacks coverage.
std::vector<MelChunk> extract_mels(const std::vector<float>& samples, int n_frames,
                                   int fps = kFps, const MelParams& p = {});

// Triangular HTK-mel filter bank, [n_mels][n_fft/2+1]; exposed for tests.
std::vector<std::vector<float>> mel_filter_bank(const MelParams& p);

}  // namespace talkgen::data

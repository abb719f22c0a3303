#pragma once

#include <cstdint>
#include <string>

#include "talkgen/data/corpus.hpp"

namespace talkgen::data {

// Procedural stand-in corpus: drawn faces whose mouth aperture follows the
// audio envelope deterministically, with analytically exact landmarks.
struct SyntheticCorpusSpec {
  int n_train = 10;
  int n_eval = 4;
  int n_silent = 1;
  int frames_per_utterance = 30;
  int frame_size = 144;
  uint64_t seed = 1;
};

// Parameters of one drawn face/utterance; derived deterministically from the
// spec seed and utterance id.
struct SyntheticFace {
  double cx, cy;            // face center
  double rx, ry;            // face ellipse radii
  double mouth_width;       // inner mouth half width
  double mouth_y;           // mouth vertical center
  double lip_thickness;
  double max_aperture_px;   // aperture at envelope 1
  double carrier_hz;        // audio tone frequency
  uint8_t skin[3], lip[3], mouth[3], bg[3], eye[3], hair[3];
  double bob_phase;         // small per-frame head bob
};

// Per-frame envelope in [0,1]; silence segments have exact zeros.
std::vector<double> synth_envelope(int n_frames, nn::Rng& rng, bool silent);

SyntheticFace synth_face_params(uint64_t seed, const std::string& utt_id, int frame_size);

// Draws one frame and returns its landmark record (full-frame pixel coords).
Image8 synth_draw_frame(const SyntheticFace& face, int frame_index, double envelope,
                        int frame_size, LandmarkRecord* record);

// Writes frames/, audio.wav, landmarks.jsonl for every utterance plus a
// corpus.json manifest with per-file digests. Returns the manifest path.
std::string generate_synthetic_corpus(const SyntheticCorpusSpec& spec,
                                      const std::string& out_dir);

}  // namespace talkgen::data

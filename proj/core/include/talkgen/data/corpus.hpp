#pragma once

#include <optional>
#include <string>
#include <vector>

#include "talkgen/data/crop.hpp"
#include "talkgen/data/mel.hpp"
#include "talkgen/data/records.hpp"
#include "talkgen/geometry/landmarks.hpp"
#include "talkgen/nn/rng.hpp"

namespace talkgen::data {

// A short clip: frames directory, 16 kHz mono audio, one landmark record per
// frame. Everything below is materialized at load time.
struct Utterance {
  std::string id;
  std::string dir;
  int fps = kFps;
  std::vector<Image8> full_frames;
  std::vector<LandmarkRecord> records;
  std::vector<float> audio;

  // Derived at load.
  std::vector<FaceFrame> crops;                      // 128x128 face crops
  std::vector<geometry::LandmarkSet> landmarks;      // normalized to the crop rect
  std::vector<MelChunk> mels;                        // one chunk per frame

  int n_frames() const { return static_cast<int>(full_frames.size()); }
};

struct Corpus {
  std::vector<Utterance> train;
  std::vector<Utterance> eval;
  std::vector<Utterance> silent;
  uint64_t seed = 0;
};

Utterance load_utterance(const std::string& dir, const std::string& id);
Corpus load_corpus(const std::string& corpus_dir);

// Stage-1 training sample: k previous frames' full landmark sets plus the
// current frame (pose is the input, lip/jaw the target).
struct Stage1Sample {
  std::vector<geometry::LandmarkSet> prev;
  geometry::LandmarkSet current;
  int utt_index = 0;
  int frame_index = 0;
};

// Keeps frames whose mouth is labeled closed; prev frames are repeat-padded
// at utterance starts. Raises if no frame qualifies.
std::vector<Stage1Sample> build_closed_mouth_subset(const std::vector<Utterance>& utterances,
                                                    int k, double tau);

// T=5 training window. `frames` (the neutral-mouth inputs) is filled by the
// pipeline once the face editor has run; windowing fills gt and mels.
struct ClipSample {
  static constexpr int kT = 5;
  int utt_index = 0;
  int start = 0;
  std::vector<FaceFrame> frames;     // neutral-mouth inputs (pipeline-filled)
  std::vector<FaceFrame> gt_frames;  // ground-truth crops
  std::vector<MelChunk> mels;
};

std::vector<ClipSample> window_clips(const Utterance& utt, int utt_index = 0);

// Seeded derangement over utterance indices: video i is paired with the
// audio of pairs[i], pairs[i] != i for every i.
std::vector<int> cross_match_pairs(int n_utterances, uint64_t seed);

}  // namespace talkgen::data

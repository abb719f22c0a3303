#include "talkgen/data/corpus.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "talkgen/data/wav.hpp"

namespace talkgen::data {

using nlohmann::json;

Utterance load_utterance(const std::string& dir, const std::string& id) {
  Utterance u;
  u.id = id;
  u.dir = dir;
  const std::string frames_dir = dir + "/frames";
  const int n = count_frames(frames_dir);
  TG_CHECK(n >= ClipSample::kT, "load_utterance: ", id, " has ", n,
           " frames, need at least ", ClipSample::kT);
  u.full_frames.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) u.full_frames.push_back(read_frame(frames_dir, i));

  u.records = read_landmark_records(dir + "/landmarks.jsonl");
  TG_CHECK(static_cast<int>(u.records.size()) == n, "load_utterance: ", id, " has ",
           u.records.size(), " landmark records for ", n, " frames");
  u.audio = read_wav(dir + "/audio.wav");

  u.crops.reserve(static_cast<size_t>(n));
  u.landmarks.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& rec = u.records[static_cast<size_t>(i)];
    TG_CHECK(rec.frame_index == i, "load_utterance: ", id, " records out of order at ", i);
    IntRect bbox{static_cast<int>(std::lround(rec.box.left)),
                 static_cast<int>(std::lround(rec.box.top)),
                 static_cast<int>(std::lround(rec.box.width)),
                 static_cast<int>(std::lround(rec.box.height))};
    FaceFrame crop = crop_face(u.full_frames[static_cast<size_t>(i)], bbox, i);
    geometry::CropRect norm_box{static_cast<double>(crop.crop_box.x),
                                static_cast<double>(crop.crop_box.y),
                                static_cast<double>(crop.crop_box.w),
                                static_cast<double>(crop.crop_box.h)};
    u.landmarks.push_back(geometry::normalize_landmarks(rec.points_px, norm_box));
    u.crops.push_back(std::move(crop));
  }
  u.mels = extract_mels(u.audio, n);
  return u;
}

namespace {

std::vector<Utterance> load_split(const std::string& corpus_dir, const json& manifest,
                                  const std::string& split) {
  std::vector<Utterance> out;
  if (!manifest.contains(split)) return out;
  for (const auto& entry : manifest.at(split)) {
    const std::string id = entry.at("id").get<std::string>();
    out.push_back(load_utterance(corpus_dir + "/" + entry.at("dir").get<std::string>(), id));
  }
  return out;
}

}  // namespace

Corpus load_corpus(const std::string& corpus_dir) {
  const std::string manifest_path = corpus_dir + "/corpus.json";
  std::ifstream is(manifest_path);
  TG_CHECK(is.good(), "load_corpus: cannot open manifest ", manifest_path);
  json manifest = json::parse(is, nullptr, /*allow_exceptions=*/false);
  TG_CHECK(!manifest.is_discarded(), "load_corpus: bad manifest JSON in ", manifest_path);
  Corpus c;
  c.seed = manifest.value("seed", 0ull);
  c.train = load_split(corpus_dir, manifest, "train");
  c.eval = load_split(corpus_dir, manifest, "eval");
  c.silent = load_split(corpus_dir, manifest, "silent");
  TG_CHECK(!c.train.empty(), "load_corpus: manifest lists no training utterances");
  return c;
}

std::vector<Stage1Sample> build_closed_mouth_subset(const std::vector<Utterance>& utterances,
                                                    int k, double tau) {
  TG_CHECK_ARG(k >= 1, "build_closed_mouth_subset: k must be >= 1");
  std::vector<Stage1Sample> out;
  for (size_t ui = 0; ui < utterances.size(); ++ui) {
    const auto& utt = utterances[ui];
    for (int t = 0; t < utt.n_frames(); ++t) {
      const auto& ls = utt.landmarks[static_cast<size_t>(t)];
      if (geometry::label_mouth_state(ls, tau) != geometry::MouthState::kClosed) continue;
      std::vector<geometry::LandmarkSet> prev;
      prev.reserve(static_cast<size_t>(k));
      for (int j = t - k; j < t; ++j)
        prev.push_back(utt.landmarks[static_cast<size_t>(std::max(0, j))]);
      out.push_back(Stage1Sample{std::move(prev), ls, static_cast<int>(ui), t});
    }
  }
  TG_CHECK(!out.empty(),
           "build_closed_mouth_subset: no closed-mouth frames found; consider raising tau (",
           tau, ")");
  return out;
}

std::vector<ClipSample> window_clips(const Utterance& utt, int utt_index) {
  TG_CHECK_ARG(utt.n_frames() >= ClipSample::kT, "window_clips: need at least ",
               ClipSample::kT, " frames");
  std::vector<ClipSample> out;
  const int n_windows = utt.n_frames() - ClipSample::kT + 1;
  out.reserve(static_cast<size_t>(n_windows));
  for (int s = 0; s < n_windows; ++s) {
    ClipSample clip;
    clip.utt_index = utt_index;
    clip.start = s;
    for (int j = 0; j < ClipSample::kT; ++j) {
      clip.gt_frames.push_back(utt.crops[static_cast<size_t>(s + j)]);
      clip.mels.push_back(utt.mels[static_cast<size_t>(s + j)]);
    }
    out.push_back(std::move(clip));
  }
  return out;
}

std::vector<int> cross_match_pairs(int n_utterances, uint64_t seed) {
  TG_CHECK_ARG(n_utterances >= 2, "cross_match_pairs: need at least 2 utterances");
  nn::Rng rng(derive_seed(seed, "cross_match"));
  std::vector<int> pairs(static_cast<size_t>(n_utterances));
  for (int i = 0; i < n_utterances; ++i) pairs[static_cast<size_t>(i)] = i;
  // Rejection-sampled derangement; expected ~e tries.
  while (true) {
    rng.shuffle(pairs);
    bool fixed_point = false;
    for (int i = 0; i < n_utterances; ++i)
      if (pairs[static_cast<size_t>(i)] == i) {
        fixed_point = true;
        break;
      }
    if (!fixed_point) return pairs;
  }
}

}  // namespace talkgen::data

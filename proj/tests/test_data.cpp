#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "talkgen/data/corpus.hpp"
#include "talkgen/data/synthetic.hpp"
#include "talkgen/data/wav.hpp"

using namespace talkgen;
using namespace talkgen::data;

namespace {

std::string temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("tg_data_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

std::vector<float> sine(double hz, double seconds, double amp = 0.4) {
  const int n = static_cast<int>(seconds * kSampleRate);
  std::vector<float> s(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    s[static_cast<size_t>(i)] = static_cast<float>(amp * std::sin(2.0 * M_PI * hz * i / kSampleRate));
  return s;
}

}  // namespace

TEST_CASE("0.2 s of audio yields exactly one 16-column chunk") {
  const auto audio = sine(300.0, 0.2);
  CHECK(audio.size() == 3200);
  CHECK(mel_column_count(audio.size()) == 16);
  const auto chunks = extract_mels(audio, 1);
  CHECK(chunks.size() == 1);
  CHECK(chunks[0].values.size() == 16 * 80);
}

TEST_CASE("digital silence sits at the log floor") {
  std::vector<float> silence(16000, 0.0f);
  const auto chunks = extract_mels(silence, 10);
  for (const auto& c : chunks)
    for (float v : c.values) CHECK(v == doctest::Approx(-11.5f));
}

TEST_CASE("a pure 440 Hz tone concentrates energy in the right mel bins") {
  const auto audio = sine(440.0, 1.0);
  const auto spec = log_mel_spectrogram(audio);
  REQUIRE(!spec.empty());

  // Oracle: bins whose triangular filter contains 440 Hz, straight from the
  // filter-bank definition.
  const auto fb = mel_filter_bank(MelParams{});
  const int k440 = static_cast<int>(std::lround(440.0 / 16000.0 * 800.0));
  std::vector<int> containing;
  for (size_t m = 0; m < fb.size(); ++m)
    if (fb[m][static_cast<size_t>(k440)] > 0.0f) containing.push_back(static_cast<int>(m));
  REQUIRE(!containing.empty());

  const auto& col = spec[spec.size() / 2];
  int argmax = 0;
  for (int m = 1; m < kMelBins; ++m)
    if (col[static_cast<size_t>(m)] > col[static_cast<size_t>(argmax)]) argmax = m;
  CHECK(argmax >= containing.front() - 1);
  CHECK(argmax <= containing.back() + 1);
  // Bins far from the tone stay at the floor.
  for (int m = containing.back() + 6; m < kMelBins; ++m)
    CHECK(col[static_cast<size_t>(m)] < -8.0f);
}

TEST_CASE("too-short audio raises and names the missing frames") {
  const auto audio = sine(200.0, 0.5);
  CHECK_THROWS_WITH_AS(extract_mels(audio, 100), doctest::Contains("audio too short"),
                       RuntimeFault);
}

TEST_CASE("chunk starts advance by 3 or 4 columns") {
  for (int i = 0; i + 1 < 200; ++i) {
    const int d = chunk_start_column(i + 1) - chunk_start_column(i);
    CHECK((d == 3 || d == 4));
  }
  CHECK(chunk_start_column(0) == 0);
  CHECK(chunk_start_column(5) == 16);
}

TEST_CASE("crop_face extends the bbox bottom by 10%") {
  Image8 frame = Image8::create(200, 200, 100);
  const FaceFrame f = crop_face(frame, {50, 40, 80, 100});
  CHECK(f.crop_box.x == 50);
  CHECK(f.crop_box.y == 40);
  CHECK(f.crop_box.w == 80);
  CHECK(f.crop_box.h == 110);
}

TEST_CASE("crop_face clips the margin at the frame edge") {
  Image8 frame = Image8::create(120, 120, 60);
  const FaceFrame f = crop_face(frame, {0, 0, 120, 120});
  CHECK(f.crop_box.h == 120);
  CHECK_THROWS_AS(crop_face(frame, {10, 10, 0, 50}), ArgumentError);
}

TEST_CASE("paste-back of an unmodified crop stays within resize tolerance") {
  // Smooth gradient content, as resize round-trips are content dependent.
  Image8 frame = Image8::create(180, 180);
  for (int y = 0; y < 180; ++y)
    for (int x = 0; x < 180; ++x) {
      frame.px(x, y)[0] = static_cast<uint8_t>((x * 255) / 179);
      frame.px(x, y)[1] = static_cast<uint8_t>((y * 255) / 179);
      frame.px(x, y)[2] = static_cast<uint8_t>(((x + y) * 255) / 358);
    }
  const IntRect bbox{30, 24, 96, 100};
  const FaceFrame f = crop_face(frame, bbox);
  const Image8 restored = paste_back(frame, f);

  double diff_sum = 0.0;
  int64_t count = 0;
  for (int y = 0; y < 180; ++y)
    for (int x = 0; x < 180; ++x) {
      const bool inside = x >= f.crop_box.x && x < f.crop_box.x + f.crop_box.w &&
                          y >= f.crop_box.y && y < f.crop_box.y + f.crop_box.h;
      for (int c = 0; c < 3; ++c) {
        const int d = std::abs(static_cast<int>(restored.px(x, y)[c]) - frame.px(x, y)[c]);
        if (inside) {
          diff_sum += d;
          ++count;
        } else {
          CHECK(d == 0);  // outside pixels bit-exact
        }
      }
    }
  CHECK(diff_sum / static_cast<double>(count) < 2.0);
}

TEST_CASE("landmark records round-trip bit exactly") {
  const std::string dir = temp_dir("records");
  nn::Rng rng(41);
  std::vector<LandmarkRecord> records;
  for (int f = 0; f < 3; ++f) {
    LandmarkRecord r;
    r.frame_index = f;
    r.box = {rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(60, 120), rng.uniform(60, 120)};
    r.points_px.resize(geometry::kNumPoints);
    for (auto& p : r.points_px) {
      p.x = rng.uniform(0.0, 160.0);
      p.y = rng.uniform(0.0, 160.0);
    }
    records.push_back(std::move(r));
  }
  write_landmark_records(dir + "/lmk.jsonl", records);
  const auto loaded = read_landmark_records(dir + "/lmk.jsonl");
  REQUIRE(loaded.size() == records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded[i].frame_index == records[i].frame_index);
    CHECK(loaded[i].box.left == records[i].box.left);
    CHECK(loaded[i].box.height == records[i].box.height);
    for (size_t j = 0; j < records[i].points_px.size(); ++j) {
      CHECK(loaded[i].points_px[j].x == records[i].points_px[j].x);
      CHECK(loaded[i].points_px[j].y == records[i].points_px[j].y);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("wav round-trip") {
  const std::string dir = temp_dir("wav");
  const auto s = sine(250.0, 0.3);
  write_wav(dir + "/a.wav", s);
  const auto r = read_wav(dir + "/a.wav");
  REQUIRE(r.size() == s.size());
  for (size_t i = 0; i < s.size(); ++i) CHECK(std::fabs(r[i] - s[i]) < 1.0f / 32000.0f);
  // Re-encoding the quantized stream is lossless.
  write_wav(dir + "/b.wav", r);
  const auto r2 = read_wav(dir + "/b.wav");
  for (size_t i = 0; i < r.size(); ++i) CHECK(r2[i] == r[i]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("window counts and frame indices") {
  Utterance u;
  u.full_frames.assign(9, Image8::create(4, 4));
  u.crops.resize(9);
  u.mels.resize(9);
  for (int i = 0; i < 9; ++i) {
    u.crops[static_cast<size_t>(i)].frame_index = i;
    u.mels[static_cast<size_t>(i)].frame_index = i;
  }
  const auto wins = window_clips(u, 3);
  CHECK(wins.size() == 5);
  for (size_t s = 0; s < wins.size(); ++s) {
    CHECK(wins[s].start == static_cast<int>(s));
    CHECK(wins[s].utt_index == 3);
    CHECK(wins[s].gt_frames.size() == 5);
    CHECK(wins[s].mels.size() == 5);
    for (int j = 0; j < 5; ++j)
      CHECK(wins[s].gt_frames[static_cast<size_t>(j)].frame_index ==
            static_cast<int>(s) + j);
  }
  u.full_frames.resize(5);
  u.crops.resize(5);
  u.mels.resize(5);
  CHECK(window_clips(u).size() == 1);
}

TEST_CASE("cross-match pairing is a seeded derangement") {
  CHECK(cross_match_pairs(2, 7) == std::vector<int>{1, 0});
  const auto a = cross_match_pairs(10, 1234);
  const auto b = cross_match_pairs(10, 1234);
  CHECK(a == b);
  CHECK_THROWS_AS(cross_match_pairs(1, 5), ArgumentError);

  nn::Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(15));
    const auto pairs = cross_match_pairs(n, rng.next_u64());
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      CHECK(pairs[static_cast<size_t>(i)] != i);
      seen[static_cast<size_t>(pairs[static_cast<size_t>(i)])] = true;
    }
    for (bool s : seen) CHECK(s);
  }
}

TEST_CASE("synthetic corpus regenerates byte-identically") {
  SyntheticCorpusSpec spec;
  spec.n_train = 2;
  spec.n_eval = 0;
  spec.n_silent = 0;
  spec.frames_per_utterance = 8;
  spec.seed = 77;
  const std::string d1 = temp_dir("synth1");
  const std::string d2 = temp_dir("synth2");
  generate_synthetic_corpus(spec, d1);
  generate_synthetic_corpus(spec, d2);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(d1)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), d1);
    std::ifstream f1(entry.path(), std::ios::binary);
    std::ifstream f2(std::filesystem::path(d2) / rel, std::ios::binary);
    REQUIRE(f2.good());
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
  }
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("synthetic corpus: labels, landmark/drawing agreement, loading") {
  SyntheticCorpusSpec spec;
  spec.n_train = 2;
  spec.n_eval = 1;
  spec.n_silent = 1;
  spec.frames_per_utterance = 12;
  spec.seed = 99;
  const std::string dir = temp_dir("synth3");
  generate_synthetic_corpus(spec, dir);
  const Corpus corpus = load_corpus(dir);
  CHECK(corpus.train.size() == 2);
  CHECK(corpus.eval.size() == 1);
  CHECK(corpus.silent.size() == 1);

  // Silent utterance: zero envelope everywhere -> every frame labeled closed.
  for (const auto& ls : corpus.silent[0].landmarks)
    CHECK(geometry::label_mouth_state(ls, geometry::kDefaultApertureTau) ==
          geometry::MouthState::kClosed);

  // Drawing vs landmarks: at the mouth center column of a clearly open frame,
  // the dark interior must straddle the landmark inner-lip rows within 1 px.
  const SyntheticFace face = synth_face_params(spec.seed, "train_0", spec.frame_size);
  bool checked_open = false;
  const auto& utt = corpus.train[0];
  for (int t = 0; t < utt.n_frames(); ++t) {
    const auto& rec = utt.records[static_cast<size_t>(t)];
    const double y_upper = rec.points_px[geometry::kUpperLipCenter].y;
    const double y_lower = rec.points_px[geometry::kLowerLipCenter].y;
    if (y_lower - y_upper < 6.0) continue;
    checked_open = true;
    const auto& frame = utt.full_frames[static_cast<size_t>(t)];
    const int cx = static_cast<int>(std::lround(face.cx));
    int top = -1, bottom = -1;
    for (int y = 0; y < frame.height; ++y) {
      const uint8_t* p = frame.px(cx, y);
      const bool dark = p[0] == face.mouth[0] && p[1] == face.mouth[1] && p[2] == face.mouth[2];
      if (dark && top < 0) top = y;
      if (dark) bottom = y;
    }
    REQUIRE(top >= 0);
    CHECK(std::fabs(top - y_upper) <= 1.5);
    CHECK(std::fabs(bottom - y_lower) <= 1.5);
  }
  CHECK(checked_open);

  // Closed-mouth subset matches the per-frame label oracle exactly.
  int oracle_count = 0;
  for (const auto& u : corpus.train)
    for (const auto& ls : u.landmarks)
      if (geometry::label_mouth_state(ls, geometry::kDefaultApertureTau) ==
          geometry::MouthState::kClosed)
        ++oracle_count;
  const auto subset = build_closed_mouth_subset(corpus.train, 1, geometry::kDefaultApertureTau);
  CHECK(static_cast<int>(subset.size()) == oracle_count);
  for (const auto& s : subset)
    CHECK(geometry::mouth_aperture(s.current) <= geometry::kDefaultApertureTau);
  CHECK(subset.size() > 0);
  CHECK(subset.size() < static_cast<size_t>(2 * spec.frames_per_utterance));

  std::filesystem::remove_all(dir);
}

TEST_CASE("closed-mouth subset raises when nothing qualifies") {
  // All-open corpus built in memory.
  std::vector<geometry::Point> pts(geometry::kNumPoints, geometry::Point{0.5, 0.4});
  for (int i = 0; i < geometry::kInnerColumns; ++i) {
    pts[static_cast<size_t>(geometry::kInnerUpperBegin + i)] = {0.3 + 0.04 * i, 0.6};
    pts[static_cast<size_t>(geometry::kInnerLowerBegin + i)] = {0.3 + 0.04 * i, 0.7};
  }
  Utterance u;
  u.full_frames.assign(6, Image8::create(2, 2));
  for (int i = 0; i < 6; ++i) u.landmarks.emplace_back(pts);
  std::vector<Utterance> utts;
  utts.push_back(std::move(u));
  CHECK_THROWS_WITH_AS(build_closed_mouth_subset(utts, 1, 0.01),
                       doctest::Contains("raising tau"), RuntimeFault);
}

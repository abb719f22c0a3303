#include "talkgen/data/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "talkgen/data/wav.hpp"

namespace talkgen::data {

using geometry::Point;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

void fill_ellipse(Image8& im, double cx, double cy, double rx, double ry,
                  const uint8_t color[3]) {
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
  const int y1 = std::min(im.height - 1, static_cast<int>(std::ceil(cy + ry)));
  for (int y = y0; y <= y1; ++y) {
    const double dy = (y - cy) / ry;
    const double s = 1.0 - dy * dy;
    if (s < 0.0) continue;
    const double half = rx * std::sqrt(s);
    const int x0 = std::max(0, static_cast<int>(std::ceil(cx - half)));
    const int x1 = std::min(im.width - 1, static_cast<int>(std::floor(cx + half)));
    for (int x = x0; x <= x1; ++x)
      for (int c = 0; c < 3; ++c) im.px(x, y)[c] = color[c];
  }
}

void fill_rect(Image8& im, int x0, int y0, int x1, int y1, const uint8_t color[3]) {
  x0 = std::max(0, x0);
  y0 = std::max(0, y0);
  x1 = std::min(im.width - 1, x1);
  y1 = std::min(im.height - 1, y1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      for (int c = 0; c < 3; ++c) im.px(x, y)[c] = color[c];
}

// Inner mouth gap profile over u in [-1,1]: flat center, cosine taper to the
// corners, so the central landmark columns carry exactly the set aperture.
double gap_shape(double u) {
  const double a = std::fabs(u);
  if (a <= 0.6) return 1.0;
  if (a >= 1.0) return 0.0;
  return std::cos((a - 0.6) / 0.4 * kPi / 2.0);
}

double outer_shape(double u) {
  const double s = 1.0 - u * u;
  return 0.25 + 0.75 * std::sqrt(std::max(0.0, s));
}

uint8_t jitter_channel(nn::Rng& rng, int base, int spread) {
  const int v = base + static_cast<int>(rng.uniform_index(static_cast<uint64_t>(2 * spread + 1))) - spread;
  return static_cast<uint8_t>(std::clamp(v, 0, 255));
}

}  // namespace

std::vector<double> synth_envelope(int n_frames, nn::Rng& rng, bool silent) {
  std::vector<double> env(static_cast<size_t>(n_frames), 0.0);
  if (silent) return env;
  int t = 0;
  bool voiced = rng.uniform() < 0.5;
  while (t < n_frames) {
    if (voiced) {
      const int len = 4 + static_cast<int>(rng.uniform_index(7));  // 4..10 frames
      const double amp = 0.55 + 0.45 * rng.uniform();
      for (int j = 0; j < len && t < n_frames; ++j, ++t)
        env[static_cast<size_t>(t)] = amp * std::sin(kPi * (j + 0.5) / len);
    } else {
      const int len = 3 + static_cast<int>(rng.uniform_index(6));  // 3..8 frames
      t += len;
    }
    voiced = !voiced;
  }
  return env;
}

SyntheticFace synth_face_params(uint64_t seed, const std::string& utt_id, int frame_size) {
  nn::Rng rng(derive_seed(seed, "face:" + utt_id));
  SyntheticFace f{};
  const double s = frame_size / 144.0;
  f.cx = frame_size / 2.0 + rng.uniform(-4.0, 4.0) * s;
  f.cy = frame_size / 2.0 - 2.0 * s + rng.uniform(-3.0, 3.0) * s;
  f.rx = rng.uniform(38.0, 44.0) * s;
  f.ry = rng.uniform(48.0, 54.0) * s;
  f.mouth_width = f.rx * rng.uniform(0.36, 0.42);
  f.mouth_y = f.cy + f.ry * rng.uniform(0.42, 0.48);
  f.lip_thickness = rng.uniform(3.5, 5.0) * s;
  f.max_aperture_px = f.ry * rng.uniform(0.24, 0.30);
  f.carrier_hz = rng.uniform(180.0, 300.0);
  const uint8_t skins[4][3] = {{224, 172, 140}, {198, 140, 110}, {240, 196, 170}, {172, 120, 92}};
  const auto skin_pick = skins[rng.uniform_index(4)];
  for (int c = 0; c < 3; ++c) f.skin[c] = jitter_channel(rng, skin_pick[c], 8);
  f.lip[0] = jitter_channel(rng, 168, 20);
  f.lip[1] = jitter_channel(rng, 72, 14);
  f.lip[2] = jitter_channel(rng, 78, 14);
  f.mouth[0] = jitter_channel(rng, 42, 10);
  f.mouth[1] = jitter_channel(rng, 18, 8);
  f.mouth[2] = jitter_channel(rng, 22, 8);
  f.bg[0] = jitter_channel(rng, 84, 30);
  f.bg[1] = jitter_channel(rng, 110, 30);
  f.bg[2] = jitter_channel(rng, 140, 30);
  f.eye[0] = jitter_channel(rng, 40, 12);
  f.eye[1] = jitter_channel(rng, 34, 12);
  f.eye[2] = jitter_channel(rng, 30, 12);
  f.hair[0] = jitter_channel(rng, 60, 24);
  f.hair[1] = jitter_channel(rng, 44, 18);
  f.hair[2] = jitter_channel(rng, 34, 14);
  f.bob_phase = rng.uniform(0.0, 2.0 * kPi);
  return f;
}

Image8 synth_draw_frame(const SyntheticFace& face, int frame_index, double envelope,
                        int frame_size, LandmarkRecord* record) {
  Image8 im = Image8::create(frame_size, frame_size);
  // Small vertical head bob so consecutive frames are not identical.
  const double cy = face.cy + 1.5 * std::sin(2.0 * kPi * frame_index / 40.0 + face.bob_phase);
  const double cx = face.cx;
  const double rx = face.rx, ry = face.ry;

  fill_rect(im, 0, 0, frame_size - 1, frame_size - 1, face.bg);
  // Hair cap behind the head.
  fill_ellipse(im, cx, cy - 0.28 * ry, rx * 1.04, ry * 0.88, face.hair);
  fill_ellipse(im, cx, cy, rx, ry, face.skin);

  // Eyes: sclera + iris.
  const double eye_dx = 0.42 * rx, eye_y = cy - 0.30 * ry;
  const double eye_rx = 0.17 * rx, eye_ry = 0.11 * ry;
  const uint8_t white[3] = {245, 245, 245};
  for (int side = -1; side <= 1; side += 2) {
    const double ex = cx + side * eye_dx;
    fill_ellipse(im, ex, eye_y, eye_rx, eye_ry, white);
    fill_ellipse(im, ex, eye_y, eye_rx * 0.45, eye_ry * 0.8, face.eye);
  }
  // Brows.
  for (int side = -1; side <= 1; side += 2) {
    const double ex = cx + side * eye_dx;
    fill_rect(im, static_cast<int>(ex - eye_rx * 1.2), static_cast<int>(eye_y - eye_ry * 2.6),
              static_cast<int>(ex + eye_rx * 1.2), static_cast<int>(eye_y - eye_ry * 2.0),
              face.hair);
  }
  // Nose: bridge + base strip.
  const uint8_t nose_col[3] = {static_cast<uint8_t>(face.skin[0] * 3 / 4),
                               static_cast<uint8_t>(face.skin[1] * 3 / 4),
                               static_cast<uint8_t>(face.skin[2] * 3 / 4)};
  fill_rect(im, static_cast<int>(cx - 1), static_cast<int>(cy - 0.15 * ry),
            static_cast<int>(cx + 1), static_cast<int>(cy + 0.18 * ry), nose_col);
  fill_rect(im, static_cast<int>(cx - 0.14 * rx), static_cast<int>(cy + 0.18 * ry),
            static_cast<int>(cx + 0.14 * rx), static_cast<int>(cy + 0.22 * ry), nose_col);

  // Mouth. Inner edges y_u/y_l straddle mouth_y with half-gap a/2 * shape(u);
  // lip bands sit outside the inner edges.
  const double aperture = face.max_aperture_px * envelope;
  const double mw = face.mouth_width, my = face.mouth_y;
  const int mx0 = static_cast<int>(std::ceil(cx - mw)), mx1 = static_cast<int>(std::floor(cx + mw));
  for (int x = mx0; x <= mx1; ++x) {
    const double u = (x - cx) / mw;
    const double half_gap = 0.5 * aperture * gap_shape(u);
    const double y_u = my - half_gap, y_l = my + half_gap;
    const double t = face.lip_thickness * outer_shape(u);
    // Lip bands (drawn first so the dark interior wins the overlap row).
    fill_rect(im, x, static_cast<int>(std::lround(y_u - t)), x,
              static_cast<int>(std::lround(y_u)), face.lip);
    fill_rect(im, x, static_cast<int>(std::lround(y_l)), x,
              static_cast<int>(std::lround(y_l + t)), face.lip);
    if (half_gap >= 0.5)
      fill_rect(im, x, static_cast<int>(std::lround(y_u + 0.5)), x,
                static_cast<int>(std::lround(y_l - 0.5)), face.mouth);
  }

  if (record != nullptr) {
    record->frame_index = frame_index;
    std::vector<Point> pts(static_cast<size_t>(geometry::kNumPoints));
    auto set = [&pts](int i, double x, double y) {
      pts[static_cast<size_t>(i)] = {x, y};
    };
    auto ellipse_pt = [&](double theta_deg) {
      const double th = theta_deg * kPi / 180.0;
      return Point{cx + rx * std::cos(th), cy + ry * std::sin(th)};
    };
    const double aperture_l = aperture;
    // Outer lip ring: 10 columns across the top edge, 9 back across the bottom.
    for (int i = 0; i < 10; ++i) {
      const double u = -1.0 + 2.0 * i / 9.0;
      const double x = cx + u * mw;
      const double y = my - 0.5 * aperture_l * gap_shape(u) -
                       face.lip_thickness * outer_shape(u);
      set(i, x, y);
    }
    for (int i = 0; i < 9; ++i) {
      const double u = 0.8 - 0.2 * i;
      const double x = cx + u * mw;
      const double y = my + 0.5 * aperture_l * gap_shape(u) +
                       face.lip_thickness * outer_shape(u);
      set(10 + i, x, y);
    }
    // Inner lip rows: 11 shared columns.
    for (int i = 0; i < geometry::kInnerColumns; ++i) {
      const double u = -1.0 + 0.2 * i;
      const double x = cx + u * mw;
      const double half_gap = 0.5 * aperture_l * gap_shape(u);
      set(geometry::kInnerUpperBegin + i, x, my - half_gap);
      set(geometry::kInnerLowerBegin + i, x, my + half_gap);
    }
    // Jaw: bottom arc, left to right (screen y grows downward).
    for (int i = 0; i < geometry::kNumJaw; ++i)
      set(41 + i, ellipse_pt(160.0 - 140.0 * i / 15.0).x,
          ellipse_pt(160.0 - 140.0 * i / 15.0).y);
    // Upper face arc.
    for (int i = 0; i < 17; ++i) {
      const Point p = ellipse_pt(200.0 + 140.0 * i / 16.0);
      set(57 + i, p.x, p.y);
    }
    // Eyes (8-point loops).
    for (int side = 0; side < 2; ++side) {
      const double ex = cx + (side == 0 ? -eye_dx : eye_dx);
      for (int i = 0; i < 8; ++i) {
        const double th = 2.0 * kPi * i / 8.0;
        set(74 + side * 8 + i, ex + eye_rx * std::cos(th), eye_y + eye_ry * std::sin(th));
      }
    }
    // Brows.
    for (int side = 0; side < 2; ++side) {
      const double ex = cx + (side == 0 ? -eye_dx : eye_dx);
      for (int i = 0; i < 6; ++i) {
        const double u = -1.0 + 2.0 * i / 5.0;
        set(90 + side * 6 + i, ex + u * eye_rx * 1.2, eye_y - eye_ry * 2.3 - 0.8 * (1.0 - u * u));
      }
    }
    // Nose bridge and base.
    for (int i = 0; i < 4; ++i)
      set(102 + i, cx, cy - 0.15 * ry + (0.33 * ry) * i / 3.0);
    for (int i = 0; i < 5; ++i)
      set(106 + i, cx + (-1.0 + 0.5 * i) * 0.14 * rx, cy + 0.20 * ry);
    // Cheeks on the face ellipse.
    for (int i = 0; i < 5; ++i) {
      const Point p = ellipse_pt(196.0 - 8.0 * i);
      set(111 + i, p.x, p.y);
    }
    for (int i = 0; i < 5; ++i) {
      const Point p = ellipse_pt(344.0 + 8.0 * i);
      set(116 + i, p.x, p.y);
    }
    // Forehead row.
    for (int i = 0; i < 10; ++i)
      set(121 + i, cx + (-1.0 + 2.0 * i / 9.0) * 0.5 * rx, cy - 0.62 * ry);

    record->points_px = std::move(pts);
    record->box = {cx - rx - 2.0, cy - ry - 2.0, 2.0 * rx + 4.0, 2.0 * ry + 4.0};
  }
  return im;
}

namespace {

std::vector<float> synth_audio(const SyntheticFace& face, const std::vector<double>& env,
                               int n_frames) {
  const int samples_per_frame = kSampleRate / kFps;  // 640
  const int need_cols = chunk_start_column(n_frames - 1) + kMelChunkSteps;
  const int n_samples = need_cols * 200 + 400;
  std::vector<float> audio(static_cast<size_t>(n_samples), 0.0f);
  for (int s = 0; s < n_samples; ++s) {
    // Piecewise-linear envelope between frame anchors.
    const double pos = static_cast<double>(s) / samples_per_frame;
    const int f0 = std::min(static_cast<int>(pos), n_frames - 1);
    const int f1 = std::min(f0 + 1, n_frames - 1);
    const double w = std::clamp(pos - f0, 0.0, 1.0);
    const double e = env[static_cast<size_t>(f0)] * (1.0 - w) + env[static_cast<size_t>(f1)] * w;
    audio[static_cast<size_t>(s)] = static_cast<float>(
        0.55 * e * std::sin(2.0 * kPi * face.carrier_hz * s / kSampleRate));
  }
  return audio;
}

uint64_t file_digest(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  TG_CHECK(is.good(), "file_digest: cannot open ", path);
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[4096];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0)
    h = fnv1a(buf, static_cast<size_t>(is.gcount()), h);
  return h;
}

json write_utterance(const SyntheticCorpusSpec& spec, const std::string& out_dir,
                     const std::string& split, int index, bool silent) {
  const std::string id = split + "_" + std::to_string(index);
  const std::string rel = split + "/utt_" + std::to_string(index);
  const std::string dir = out_dir + "/" + rel;
  std::filesystem::create_directories(dir + "/frames");

  const SyntheticFace face = synth_face_params(spec.seed, id, spec.frame_size);
  nn::Rng env_rng(derive_seed(spec.seed, "env:" + id));
  const std::vector<double> env = synth_envelope(spec.frames_per_utterance, env_rng, silent);

  std::vector<LandmarkRecord> records;
  records.reserve(static_cast<size_t>(spec.frames_per_utterance));
  for (int t = 0; t < spec.frames_per_utterance; ++t) {
    LandmarkRecord rec;
    const Image8 frame =
        synth_draw_frame(face, t, env[static_cast<size_t>(t)], spec.frame_size, &rec);
    write_frame(dir + "/frames", t, frame);
    records.push_back(std::move(rec));
  }
  write_landmark_records(dir + "/landmarks.jsonl", records);
  write_wav(dir + "/audio.wav", synth_audio(face, env, spec.frames_per_utterance));

  uint64_t digest = file_digest(dir + "/landmarks.jsonl");
  digest = fnv1a(std::to_string(file_digest(dir + "/audio.wav")), digest);
  for (int t = 0; t < spec.frames_per_utterance; ++t)
    digest = fnv1a(std::to_string(file_digest(dir + "/frames/" + frame_filename(t) + ".ppm")),
                   digest);

  json j;
  j["id"] = id;
  j["dir"] = rel;
  j["frames"] = spec.frames_per_utterance;
  j["digest"] = hex64(digest);
  return j;
}

}  // namespace

std::string generate_synthetic_corpus(const SyntheticCorpusSpec& spec,
                                      const std::string& out_dir) {
  TG_CHECK_ARG(spec.n_train > 0 && spec.frames_per_utterance >= ClipSample::kT,
               "generate_synthetic_corpus: bad spec");
  std::filesystem::create_directories(out_dir);
  json manifest;
  manifest["seed"] = spec.seed;
  manifest["spec"] = {{"n_train", spec.n_train},
                      {"n_eval", spec.n_eval},
                      {"n_silent", spec.n_silent},
                      {"frames_per_utterance", spec.frames_per_utterance},
                      {"frame_size", spec.frame_size}};
  json train = json::array(), eval_arr = json::array(), silent_arr = json::array();
  for (int i = 0; i < spec.n_train; ++i)
    train.push_back(write_utterance(spec, out_dir, "train", i, false));
  for (int i = 0; i < spec.n_eval; ++i)
    eval_arr.push_back(write_utterance(spec, out_dir, "eval", i, false));
  for (int i = 0; i < spec.n_silent; ++i)
    silent_arr.push_back(write_utterance(spec, out_dir, "silent", i, true));
  manifest["train"] = std::move(train);
  manifest["eval"] = std::move(eval_arr);
  manifest["silent"] = std::move(silent_arr);

  const std::string path = out_dir + "/corpus.json";
  std::ofstream os(path, std::ios::trunc);
  TG_CHECK(os.good(), "generate_synthetic_corpus: cannot write manifest");
  os << manifest.dump(2) << "\n";
  return path;
}

}  // namespace talkgen::data

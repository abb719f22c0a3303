#include "talkgen/providers/landmark_extractor.hpp"

#include <cmath>

namespace talkgen::providers {

namespace {
constexpr int kHeat = 16;  // heatmap resolution
constexpr int kPts = geometry::kNumLip + geometry::kNumJaw;
}  // namespace

LandmarkExtractor::LandmarkExtractor(uint64_t seed) {
  nn::Rng rng(derive_seed(seed, "landmark_extractor"));
  c1_ = nn::Conv2dLayer::make(store_, "c1", 3, 32, 5, 2, 2, rng);
  c2_ = nn::Conv2dLayer::make(store_, "c2", 32, 64, 3, 2, 1, rng);
  c3_ = nn::Conv2dLayer::make(store_, "c3", 64, 96, 3, 2, 1, rng);
  c4_ = nn::Conv2dLayer::make(store_, "c4", 96, 128, 3, 1, 1, rng);
  head_ = nn::Conv2dLayer::make(store_, "head", 128, kPts, 1, 1, 0, rng);

  std::vector<float> grid(kHeat * kHeat * 2);
  for (int y = 0; y < kHeat; ++y)
    for (int x = 0; x < kHeat; ++x) {
      grid[static_cast<size_t>((y * kHeat + x) * 2)] = (x + 0.5f) / kHeat;
      grid[static_cast<size_t>((y * kHeat + x) * 2 + 1)] = (y + 0.5f) / kHeat;
    }
  grid_ = nn::Tensor::from_data({kHeat * kHeat, 2}, std::move(grid));
}

nn::Tensor LandmarkExtractor::extract_lip_jaw(const nn::Tensor& images) {
  TG_CHECK_ARG(images.ndim() == 4 && images.dim(1) == 3 && images.dim(2) == 128 &&
                   images.dim(3) == 128,
               "LandmarkExtractor: need [N,3,128,128]");
  const int64_t N = images.dim(0);
  nn::Tensor h = nn::relu(c1_(images));
  h = nn::relu(c2_(h));
  h = nn::relu(c3_(h));
  h = nn::relu(c4_(h));
  nn::Tensor logits = head_(h);  // [N,57,16,16]
  nn::Tensor flat = nn::reshape(logits, {N * kPts, kHeat * kHeat});
  nn::Tensor weights = nn::softmax_lastdim(flat);
  nn::Tensor coords = nn::matmul(weights, grid_);  // [N*57, 2]
  return nn::reshape(coords, {N, kPts, 2});
}

std::string LandmarkExtractor::digest() const {
  return hex64(fnv1a("soft_argmax_extractor_v1"));
}

std::vector<double> LandmarkExtractor::aperture_from_coords(const nn::Tensor& coords) {
  TG_CHECK_ARG(coords.ndim() == 3 && coords.dim(1) == kPts && coords.dim(2) == 2,
               "aperture_from_coords: need [N,57,2]");
  const int64_t N = coords.dim(0);
  std::vector<double> out(static_cast<size_t>(N));
  for (int64_t n = 0; n < N; ++n) {
    double gap = 0.0;
    for (size_t k = 0; k < geometry::kApertureUpper.size(); ++k) {
      const float y_up = coords.data()[(n * kPts + geometry::kApertureUpper[k]) * 2 + 1];
      const float y_lo = coords.data()[(n * kPts + geometry::kApertureLower[k]) * 2 + 1];
      gap += static_cast<double>(y_lo) - y_up;
    }
    out[static_cast<size_t>(n)] = std::max(0.0, gap / 3.0);
  }
  return out;
}

nn::Tensor lip_jaw_targets(const std::vector<const geometry::LandmarkSet*>& sets) {
  std::vector<float> data;
  data.reserve(sets.size() * kPts * 2);
  for (const auto* ls : sets) {
    const auto parts = geometry::split_landmarks(*ls);
    for (const auto& p : parts.lip) {
      data.push_back(static_cast<float>(p.x));
      data.push_back(static_cast<float>(p.y));
    }
    for (const auto& p : parts.jaw) {
      data.push_back(static_cast<float>(p.x));
      data.push_back(static_cast<float>(p.y));
    }
  }
  return nn::Tensor::from_data({static_cast<int64_t>(sets.size()), kPts, 2}, std::move(data));
}

ExtractorTrainResult train_landmark_extractor(LandmarkExtractor& ex,
                                              const std::vector<data::Utterance>& utts,
                                              int steps, int batch,
                                              const nn::AdamSettings& adam, uint64_t seed) {
  TG_CHECK(!utts.empty(), "train_landmark_extractor: empty corpus");
  struct Item {
    const data::FaceFrame* frame;
    const geometry::LandmarkSet* landmarks;
  };
  std::vector<Item> items;
  for (const auto& u : utts)
    for (int t = 0; t < u.n_frames(); ++t)
      items.push_back({&u.crops[static_cast<size_t>(t)], &u.landmarks[static_cast<size_t>(t)]});

  nn::Rng rng(derive_seed(seed, "train_extractor"));
  nn::Adam opt(ex.store().trainable(), adam);
  ExtractorTrainResult result;
  result.loss_curve.reserve(static_cast<size_t>(steps));
  for (int step = 0; step < steps; ++step) {
    std::vector<data::FaceFrame> frames;
    std::vector<const geometry::LandmarkSet*> targets;
    for (int b = 0; b < batch; ++b) {
      const auto& item = items[rng.uniform_index(items.size())];
      data::FaceFrame noisy = *item.frame;
      // Noise + brightness jitter so generated frames stay in-distribution.
      const float shift = static_cast<float>(rng.normal(0.0, 0.05));
      for (auto& v : noisy.chw)
        v = std::clamp(v + shift + static_cast<float>(rng.normal(0.0, 0.04)), -1.0f, 1.0f);
      frames.push_back(std::move(noisy));
      targets.push_back(item.landmarks);
    }
    nn::Tensor x = data::faces_to_batch(frames);
    nn::Tensor gt = lip_jaw_targets(targets);
    opt.zero_grad();
    nn::Tensor loss = nn::mae(ex.extract_lip_jaw(x), gt);
    TG_CHECK(std::isfinite(loss.item()), "train_landmark_extractor: non-finite loss at step ",
             step);
    loss.backward();
    opt.step();
    result.loss_curve.push_back(loss.item());
  }
  ex.freeze();

  // Report the clean-image pixel error.
  double err = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < items.size(); i += std::max<size_t>(1, items.size() / 64)) {
    nn::Tensor x = data::faces_to_batch({*items[i].frame});
    nn::Tensor pred = ex.extract_lip_jaw(x);
    nn::Tensor gt = lip_jaw_targets({items[i].landmarks});
    for (int64_t j = 0; j < pred.numel(); j += 2) {
      const double dx = (pred.data()[j] - gt.data()[j]) * 128.0;
      const double dy = (pred.data()[j + 1] - gt.data()[j + 1]) * 128.0;
      err += std::sqrt(dx * dx + dy * dy);
      ++count;
    }
  }
  result.mean_px_error = err / static_cast<double>(count);
  return result;
}

}  // namespace talkgen::providers

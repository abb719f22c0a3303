#include "talkgen/editor/mouth_classifier.hpp"

#include <cmath>

namespace talkgen::editor {

using nn::Tensor;

MouthClassifier::MouthClassifier(uint64_t seed) {
  nn::Rng rng(derive_seed(seed, "mouth_classifier"));
  c0_ = nn::Conv2dLayer::make(store_, "c0", 3, 32, 3, 2, 1, rng);
  r1a_ = nn::Conv2dLayer::make(store_, "r1a", 32, 32, 3, 1, 1, rng);
  r1b_ = nn::Conv2dLayer::make(store_, "r1b", 32, 32, 3, 1, 1, rng);
  c1_ = nn::Conv2dLayer::make(store_, "c1", 32, 64, 3, 2, 1, rng);
  r2a_ = nn::Conv2dLayer::make(store_, "r2a", 64, 64, 3, 1, 1, rng);
  r2b_ = nn::Conv2dLayer::make(store_, "r2b", 64, 64, 3, 1, 1, rng);
  c2_ = nn::Conv2dLayer::make(store_, "c2", 64, 96, 3, 2, 1, rng);
  fc1_ = nn::LinearLayer::make(store_, "fc1", 96, 64, rng);
  fc2_ = nn::LinearLayer::make(store_, "fc2", 64, 1, rng);
}

Tensor MouthClassifier::trunk(const Tensor& faces) {
  TG_CHECK_ARG(faces.ndim() == 4 && faces.dim(1) == 3 && faces.dim(2) == 128 &&
                   faces.dim(3) == 128,
               "MouthClassifier: need [N,3,128,128] faces");
  Tensor x = nn::slice_spatial(faces, kCropTop, kCropTop + kCropSize, kCropLeft,
                               kCropLeft + kCropSize);
  Tensor h = nn::relu(c0_(x));
  h = nn::relu(nn::add(h, r1b_(nn::relu(r1a_(h)))));
  h = nn::relu(c1_(h));
  h = nn::relu(nn::add(h, r2b_(nn::relu(r2a_(h)))));
  h = nn::relu(c2_(h));
  return nn::relu(fc1_(nn::global_avg_pool2d(h)));
}

Tensor MouthClassifier::logits(const Tensor& faces) { return fc2_(trunk(faces)); }

Tensor MouthClassifier::embed(const Tensor& faces) { return trunk(faces); }

double MouthClassifier::open_probability(const data::FaceFrame& face) {
  Tensor x = nn::reshape(data::face_to_tensor(face), {1, 3, 128, 128});
  const float z = logits(x).item();
  return 1.0 / (1.0 + std::exp(-static_cast<double>(z)));
}

ClassifierTrainResult train_mouth_classifier(MouthClassifier& model,
                                             const std::vector<data::Utterance>& utts,
                                             double tau, int steps, int batch,
                                             const nn::AdamSettings& adam, uint64_t seed) {
  TG_CHECK(!utts.empty(), "train_mouth_classifier: empty corpus");
  struct Item {
    const data::FaceFrame* frame;
    float open;
  };
  std::vector<Item> items;
  for (const auto& u : utts)
    for (int t = 0; t < u.n_frames(); ++t) {
      const bool open = geometry::label_mouth_state(u.landmarks[static_cast<size_t>(t)], tau) ==
                        geometry::MouthState::kOpen;
      items.push_back({&u.crops[static_cast<size_t>(t)], open ? 1.0f : 0.0f});
    }

  nn::Rng rng(derive_seed(seed, "train_mouth"));
  nn::Adam opt(model.store().trainable(), adam);
  ClassifierTrainResult result;
  result.loss_curve.reserve(static_cast<size_t>(steps));
  for (int step = 0; step < steps; ++step) {
    std::vector<data::FaceFrame> frames;
    std::vector<float> labels;
    for (int b = 0; b < batch; ++b) {
      const auto& item = items[rng.uniform_index(items.size())];
      data::FaceFrame noisy = *item.frame;
      for (auto& v : noisy.chw)
        v = std::clamp(v + static_cast<float>(rng.normal(0.0, 0.04)), -1.0f, 1.0f);
      frames.push_back(std::move(noisy));
      labels.push_back(item.open);
    }
    Tensor x = data::faces_to_batch(frames);
    Tensor y = Tensor::from_data({static_cast<int64_t>(labels.size()), 1}, labels);
    opt.zero_grad();
    Tensor loss = nn::bce_with_logits(model.logits(x), y);
    TG_CHECK(std::isfinite(loss.item()), "train_mouth_classifier: non-finite loss at step ",
             step);
    loss.backward();
    opt.step();
    result.loss_curve.push_back(loss.item());
  }
  model.freeze();
  result.train_accuracy = classifier_accuracy(model, utts, tau);
  return result;
}

double classifier_accuracy(MouthClassifier& model, const std::vector<data::Utterance>& utts,
                           double tau) {
  int64_t correct = 0, total = 0;
  for (const auto& u : utts)
    for (int t = 0; t < u.n_frames(); ++t) {
      const bool open = geometry::label_mouth_state(u.landmarks[static_cast<size_t>(t)], tau) ==
                        geometry::MouthState::kOpen;
      const bool pred = model.open_probability(u.crops[static_cast<size_t>(t)]) > 0.5;
      correct += pred == open ? 1 : 0;
      ++total;
    }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace talkgen::editor

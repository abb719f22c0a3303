#include "talkgen/landmark/predictor.hpp"

#include <cmath>

namespace talkgen::landmark {

using geometry::LandmarkSet;
using geometry::Point;
using nn::Tensor;

namespace {

// Channel ramp 2 -> 512 across the 20 conv layers.
constexpr int kChannels[20] = {8,  16,  16,  32,  32,  48,  48,  64,  64,  96,
                               96, 128, 128, 160, 192, 256, 320, 384, 448, 512};

std::vector<float> set_to_channels(const LandmarkSet& ls) {
  std::vector<float> data(2 * geometry::kNumPoints);
  for (int i = 0; i < geometry::kNumPoints; ++i) {
    data[static_cast<size_t>(i)] = static_cast<float>(ls[i].x);
    data[static_cast<size_t>(geometry::kNumPoints + i)] = static_cast<float>(ls[i].y);
  }
  return data;
}

}  // namespace

LandmarkTokenEncoder LandmarkTokenEncoder::make(nn::ParamStore& ps, const std::string& name,
                                                int depth, nn::Rng& rng) {
  TG_CHECK_ARG(depth == 20, "LandmarkTokenEncoder: depth is fixed at 20");
  LandmarkTokenEncoder enc;
  int in_ch = 2;
  for (int i = 0; i < depth; ++i) {
    const int out_ch = kChannels[i];
    enc.convs.push_back(nn::Conv1dLayer::make(ps, name + ".conv" + std::to_string(i), in_ch,
                                              out_ch, 3, 1, 1, rng));
    if (i + 1 < depth)
      enc.norms.push_back(nn::LayerNormLayer::make(ps, name + ".ln" + std::to_string(i), out_ch));
    in_ch = out_ch;
  }
  return enc;
}

Tensor LandmarkTokenEncoder::operator()(const Tensor& x) const {
  Tensor h = x;
  for (size_t i = 0; i < convs.size(); ++i) {
    h = convs[i](h);
    if (i < norms.size()) {
      h = nn::transpose_12(h);  // [N,L,C] for channel-wise layer norm
      h = norms[i](h);
      h = nn::transpose_12(h);
      h = nn::gelu(h);
    }
  }
  // [N,512,L] -> [N,512]
  return nn::global_avg_pool2d(nn::reshape(h, {h.dim(0), h.dim(1), 1, h.dim(2)}));
}

TransformerLayer TransformerLayer::make(nn::ParamStore& ps, const std::string& name, int dim,
                                        int heads, nn::Rng& rng) {
  TransformerLayer l;
  l.heads = heads;
  l.ln1 = nn::LayerNormLayer::make(ps, name + ".ln1", dim);
  l.ln2 = nn::LayerNormLayer::make(ps, name + ".ln2", dim);
  l.qkv = nn::LinearLayer::make(ps, name + ".qkv", dim, 3 * dim, rng);
  l.proj = nn::LinearLayer::make(ps, name + ".proj", dim, dim, rng);
  l.fc1 = nn::LinearLayer::make(ps, name + ".fc1", dim, 4 * dim, rng);
  l.fc2 = nn::LinearLayer::make(ps, name + ".fc2", 4 * dim, dim, rng);
  return l;
}

Tensor TransformerLayer::operator()(const Tensor& tokens) const {
  const int64_t N = tokens.dim(0), T = tokens.dim(1), D = tokens.dim(2);
  const int64_t dh = D / heads;

  Tensor a = ln1(tokens);
  Tensor qkv_out = qkv(nn::reshape(a, {N * T, D}));
  Tensor q = nn::split_heads(nn::reshape(nn::slice_lastdim(qkv_out, 0, D), {N, T, D}), heads);
  Tensor k = nn::split_heads(nn::reshape(nn::slice_lastdim(qkv_out, D, 2 * D), {N, T, D}), heads);
  Tensor v =
      nn::split_heads(nn::reshape(nn::slice_lastdim(qkv_out, 2 * D, 3 * D), {N, T, D}), heads);
  Tensor scores = nn::mul_scalar(nn::bmm(q, k, /*transpose_b=*/true),
                                 static_cast<float>(1.0 / std::sqrt(static_cast<double>(dh))));
  Tensor attn = nn::bmm(nn::softmax_lastdim(scores), v);
  Tensor merged = nn::merge_heads(attn, heads);
  Tensor h = nn::add(tokens, nn::reshape(proj(nn::reshape(merged, {N * T, D})), {N, T, D}));

  Tensor m = ln2(h);
  Tensor mm = fc2(nn::gelu(fc1(nn::reshape(m, {N * T, D}))));
  return nn::add(h, nn::reshape(mm, {N, T, D}));
}

LandmarkPredictor::LandmarkPredictor(const PredictorConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  nn::Rng rng(derive_seed(seed, "landmark_predictor"));
  ref_encoder_ = LandmarkTokenEncoder::make(store_, "ref", cfg_.encoder_depth, rng);
  pose_encoder_ = LandmarkTokenEncoder::make(store_, "pose", cfg_.encoder_depth, rng);
  for (int i = 0; i < cfg_.transformer_layers; ++i)
    layers_.push_back(
        TransformerLayer::make(store_, "te" + std::to_string(i), cfg_.token_dim, cfg_.heads, rng));
  {
    std::vector<float> pe(static_cast<size_t>((cfg_.k + 1) * cfg_.token_dim));
    for (auto& v : pe) v = static_cast<float>(rng.normal(0.0, 0.02));
    pos_embed_ = store_.param("pos_embed", {cfg_.k + 1, cfg_.token_dim}, pe);
  }
  const int64_t head_in = static_cast<int64_t>(cfg_.k + 1) * cfg_.token_dim;
  head1_ = nn::LinearLayer::make(store_, "head1", head_in, cfg_.mlp_hidden, rng);
  head2_ = nn::LinearLayer::make(store_, "head2", cfg_.mlp_hidden,
                                 2 * (geometry::kNumLip + geometry::kNumJaw), rng);
}

Tensor LandmarkPredictor::forward(const Tensor& prev, const Tensor& pose) const {
  TG_CHECK_ARG(prev.ndim() == 4 && prev.dim(1) == cfg_.k && prev.dim(2) == 2 &&
                   prev.dim(3) == geometry::kNumPoints,
               "LandmarkPredictor: prev must be [N,", cfg_.k, ",2,131], got ",
               nn::shape_str(prev.shape()));
  TG_CHECK_ARG(pose.ndim() == 3 && pose.dim(1) == 2 && pose.dim(2) == geometry::kNumPose,
               "LandmarkPredictor: pose must be [N,2,74]");
  const int64_t N = prev.dim(0);
  const int64_t D = cfg_.token_dim;

  Tensor refs = ref_encoder_(nn::reshape(prev, {N * cfg_.k, 2, geometry::kNumPoints}));
  Tensor ref_tokens = nn::reshape(refs, {N, cfg_.k, D, 1});
  Tensor pose_token = nn::reshape(pose_encoder_(pose), {N, 1, D, 1});
  Tensor tokens = nn::reshape(nn::concat_channels(ref_tokens, pose_token), {N, cfg_.k + 1, D});
  tokens = nn::add_broadcast(tokens, pos_embed_);
  for (const auto& layer : layers_) tokens = layer(tokens);

  Tensor flat = nn::reshape(tokens, {N, static_cast<int64_t>(cfg_.k + 1) * D});
  Tensor out = nn::sigmoid(head2_(nn::gelu(head1_(flat))));
  return nn::reshape(out, {N, geometry::kNumLip + geometry::kNumJaw, 2});
}

Tensor LandmarkPredictor::encode_reference_input(const std::vector<LandmarkSet>& sets) {
  std::vector<float> data;
  data.reserve(sets.size() * 2 * geometry::kNumPoints);
  for (const auto& ls : sets) {
    const auto ch = set_to_channels(ls);
    data.insert(data.end(), ch.begin(), ch.end());
  }
  return Tensor::from_data({static_cast<int64_t>(sets.size()), 2, geometry::kNumPoints},
                           std::move(data));
}

Tensor LandmarkPredictor::encode_pose_input(const std::vector<const LandmarkSet*>& sets) {
  std::vector<float> data;
  data.reserve(sets.size() * 2 * geometry::kNumPose);
  for (const auto* ls : sets) {
    const auto parts = geometry::split_landmarks(*ls);
    for (const auto& p : parts.pose) data.push_back(static_cast<float>(p.x));
    for (const auto& p : parts.pose) data.push_back(static_cast<float>(p.y));
  }
  return Tensor::from_data({static_cast<int64_t>(sets.size()), 2, geometry::kNumPose},
                           std::move(data));
}

NeutralPrediction LandmarkPredictor::predict_neutral(
    const std::vector<LandmarkSet>& prev_frames, const std::vector<Point>& pose) const {
  TG_CHECK_ARG(static_cast<int>(prev_frames.size()) == cfg_.k,
               "predict_neutral: expected k=", cfg_.k, " previous frames, got ",
               prev_frames.size());
  TG_CHECK_ARG(pose.size() == geometry::kNumPose, "predict_neutral: pose needs ",
               geometry::kNumPose, " points");
  Tensor prev = nn::reshape(encode_reference_input(prev_frames),
                            {1, cfg_.k, 2, geometry::kNumPoints});
  std::vector<float> pose_data;
  pose_data.reserve(2 * geometry::kNumPose);
  for (const auto& p : pose) pose_data.push_back(static_cast<float>(p.x));
  for (const auto& p : pose) pose_data.push_back(static_cast<float>(p.y));
  Tensor pose_t = Tensor::from_data({1, 2, geometry::kNumPose}, std::move(pose_data));

  Tensor out = forward(prev, pose_t);
  NeutralPrediction np;
  np.lip.resize(geometry::kNumLip);
  np.jaw.resize(geometry::kNumJaw);
  for (int i = 0; i < geometry::kNumLip; ++i)
    np.lip[static_cast<size_t>(i)] = {out.data()[2 * i], out.data()[2 * i + 1]};
  for (int i = 0; i < geometry::kNumJaw; ++i)
    np.jaw[static_cast<size_t>(i)] = {out.data()[2 * (geometry::kNumLip + i)],
                                      out.data()[2 * (geometry::kNumLip + i) + 1]};
  return np;
}

LandmarkSet LandmarkPredictor::predict_merged(const std::vector<LandmarkSet>& prev_frames,
                                              const LandmarkSet& current) const {
  const auto parts = geometry::split_landmarks(current);
  NeutralPrediction np = predict_neutral(prev_frames, parts.pose);
  auto clamp01 = [](std::vector<Point>& pts) {
    for (auto& p : pts) {
      p.x = std::clamp(p.x, 0.0, 1.0);
      p.y = std::clamp(p.y, 0.0, 1.0);
    }
  };
  clamp01(np.lip);
  clamp01(np.jaw);
  return geometry::merge_landmarks(np.lip, np.jaw, parts.pose, current.partition());
}

Tensor landmark_loss(const Tensor& pred_lip, const Tensor& pred_jaw, const Tensor& gt_lip,
                     const Tensor& gt_jaw, double lambda) {
  TG_CHECK_ARG(pred_lip.shape() == gt_lip.shape(), "landmark_loss: lip shape mismatch ",
               nn::shape_str(pred_lip.shape()), " vs ", nn::shape_str(gt_lip.shape()));
  TG_CHECK_ARG(pred_jaw.shape() == gt_jaw.shape(), "landmark_loss: jaw shape mismatch");
  Tensor jaw_term = nn::mae(pred_jaw, gt_jaw);
  Tensor lip_term = nn::mul_scalar(nn::mae(pred_lip, gt_lip), static_cast<float>(lambda));
  return nn::add(jaw_term, lip_term);
}

double landmark_loss_value(const NeutralPrediction& pred, const std::vector<Point>& gt_lip,
                           const std::vector<Point>& gt_jaw, double lambda) {
  TG_CHECK_ARG(pred.lip.size() == gt_lip.size() && pred.jaw.size() == gt_jaw.size(),
               "landmark_loss_value: shape mismatch");
  double lip = 0.0, jaw = 0.0;
  for (size_t i = 0; i < gt_lip.size(); ++i)
    lip += std::fabs(pred.lip[i].x - gt_lip[i].x) + std::fabs(pred.lip[i].y - gt_lip[i].y);
  for (size_t i = 0; i < gt_jaw.size(); ++i)
    jaw += std::fabs(pred.jaw[i].x - gt_jaw[i].x) + std::fabs(pred.jaw[i].y - gt_jaw[i].y);
  lip /= static_cast<double>(2 * gt_lip.size());
  jaw /= static_cast<double>(2 * gt_jaw.size());
  return jaw + lambda * lip;
}

PredictorTrainResult train_landmark_predictor(LandmarkPredictor& model,
                                              const std::vector<data::Stage1Sample>& dataset,
                                              int steps, int batch,
                                              const nn::AdamSettings& adam, uint64_t seed) {
  TG_CHECK(!dataset.empty(), "train_landmark_predictor: empty dataset");
  const int k = model.config().k;
  for (const auto& s : dataset)
    TG_CHECK_ARG(static_cast<int>(s.prev.size()) == k,
                 "train_landmark_predictor: sample has ", s.prev.size(),
                 " previous frames, model expects ", k);

  nn::Rng rng(derive_seed(seed, "train_predictor"));
  nn::Adam opt(model.store().trainable(), adam);
  PredictorTrainResult result;
  result.loss_curve.reserve(static_cast<size_t>(steps));

  for (int step = 0; step < steps; ++step) {
    std::vector<const data::Stage1Sample*> chosen;
    for (int b = 0; b < batch; ++b)
      chosen.push_back(&dataset[rng.uniform_index(dataset.size())]);

    std::vector<LandmarkSet> prev_sets;
    std::vector<const LandmarkSet*> cur_sets;
    for (const auto* s : chosen) {
      for (const auto& p : s->prev) prev_sets.push_back(p);
      cur_sets.push_back(&s->current);
    }
    Tensor prev = nn::reshape(LandmarkPredictor::encode_reference_input(prev_sets),
                              {static_cast<int64_t>(chosen.size()), k, 2, geometry::kNumPoints});
    Tensor pose = LandmarkPredictor::encode_pose_input(cur_sets);

    std::vector<float> lip_gt, jaw_gt;
    for (const auto* s : chosen) {
      const auto parts = geometry::split_landmarks(s->current);
      for (const auto& p : parts.lip) {
        lip_gt.push_back(static_cast<float>(p.x));
        lip_gt.push_back(static_cast<float>(p.y));
      }
      for (const auto& p : parts.jaw) {
        jaw_gt.push_back(static_cast<float>(p.x));
        jaw_gt.push_back(static_cast<float>(p.y));
      }
    }
    const int64_t N = static_cast<int64_t>(chosen.size());
    Tensor gt_lip = Tensor::from_data({N, geometry::kNumLip, 2}, std::move(lip_gt));
    Tensor gt_jaw = Tensor::from_data({N, geometry::kNumJaw, 2}, std::move(jaw_gt));

    opt.zero_grad();
    Tensor out = model.forward(prev, pose);
    Tensor pred_lip = nn::slice_channels(nn::reshape(out, {N, 57, 2, 1}), 0, geometry::kNumLip);
    Tensor pred_jaw = nn::slice_channels(nn::reshape(out, {N, 57, 2, 1}), geometry::kNumLip, 57);
    Tensor loss = landmark_loss(nn::reshape(pred_lip, {N, geometry::kNumLip, 2}),
                                nn::reshape(pred_jaw, {N, geometry::kNumJaw, 2}), gt_lip, gt_jaw);
    const float lv = loss.item();
    TG_CHECK(std::isfinite(lv), "train_landmark_predictor: non-finite loss at step ", step,
             " (aborting; check inputs and learning rate)");
    loss.backward();
    opt.step();
    result.loss_curve.push_back(lv);
  }
  result.initial_loss = result.loss_curve.front();
  result.final_loss = result.loss_curve.back();
  return result;
}

}  // namespace talkgen::landmark

#pragma once

#include "talkgen/data/corpus.hpp"
#include "talkgen/geometry/landmarks.hpp"
#include "talkgen/nn/checkpoint.hpp"
#include "talkgen/nn/layers.hpp"
#include "talkgen/nn/optim.hpp"

namespace talkgen::landmark {

struct PredictorConfig {
  int k = 1;                  // previous frames fed as reference tokens
  int token_dim = 512;
  int encoder_depth = 20;     // 1-D conv layers per encoder
  int transformer_layers = 4;
  int heads = 8;
  int mlp_hidden = 512;       // head MLP width

  void validate() const {
    TG_CHECK_ARG(k >= 1, "PredictorConfig: k must be >= 1");
    TG_CHECK_ARG(token_dim == 512, "PredictorConfig: token_dim is fixed at 512");
    TG_CHECK_ARG(encoder_depth == 20, "PredictorConfig: encoder_depth is fixed at 20");
    TG_CHECK_ARG(transformer_layers == 4, "PredictorConfig: transformer_layers is fixed at 4");
    TG_CHECK_ARG(heads >= 1 && token_dim % heads == 0, "PredictorConfig: bad head count");
  }
};

// Predicted neutral-mouth lip and jaw landmarks for one frame.
struct NeutralPrediction {
  std::vector<geometry::Point> lip;  // 41
  std::vector<geometry::Point> jaw;  // 16
};

// 20-layer 1-D conv encoder producing one 512-d token per landmark group.
struct LandmarkTokenEncoder {
  std::vector<nn::Conv1dLayer> convs;
  std::vector<nn::LayerNormLayer> norms;  // between layers, over channels

  static LandmarkTokenEncoder make(nn::ParamStore& ps, const std::string& name,
                                   int depth, nn::Rng& rng);
  nn::Tensor operator()(const nn::Tensor& x) const;  // [N,2,L] -> [N,512]
};

struct TransformerLayer {
  nn::LayerNormLayer ln1, ln2;
  nn::LinearLayer qkv, proj, fc1, fc2;
  int heads = 8;

  static TransformerLayer make(nn::ParamStore& ps, const std::string& name, int dim,
                               int heads, nn::Rng& rng);
  nn::Tensor operator()(const nn::Tensor& tokens) const;  // [N,T,D]
};

// The neutral-landmark prediction model: reference encoder over each of the
// k previous frames, pose encoder over the current frame's pose landmarks,
// learned positional embeddings, 4 transformer layers, MLP head over the
// concatenated final tokens.
class LandmarkPredictor {
 public:
  LandmarkPredictor(const PredictorConfig& cfg, uint64_t seed);

  // prev: [N, k, 2, 131] reference landmarks; pose: [N, 2, 74].
  // Returns [N, 57, 2] in (0,1).
  nn::Tensor forward(const nn::Tensor& prev, const nn::Tensor& pose) const;

  NeutralPrediction predict_neutral(const std::vector<geometry::LandmarkSet>& prev_frames,
                                    const std::vector<geometry::Point>& pose) const;

  // Predicted lip/jaw merged with the frame's pose landmarks, coordinates
  // clamped into [0,1].
  geometry::LandmarkSet predict_merged(const std::vector<geometry::LandmarkSet>& prev_frames,
                                       const geometry::LandmarkSet& current) const;

  const PredictorConfig& config() const { return cfg_; }
  nn::ParamStore& store() { return store_; }
  const nn::ParamStore& store() const { return store_; }

  static nn::Tensor encode_reference_input(const std::vector<geometry::LandmarkSet>& sets);
  static nn::Tensor encode_pose_input(const std::vector<const geometry::LandmarkSet*>& sets);

  nn::Tensor encode_pose_token(const nn::Tensor& pose) const { return pose_encoder_(pose); }
  nn::Tensor encode_reference_token(const nn::Tensor& ref) const { return ref_encoder_(ref); }

 private:
  PredictorConfig cfg_;
  nn::ParamStore store_;
  LandmarkTokenEncoder ref_encoder_, pose_encoder_;
  std::vector<TransformerLayer> layers_;
  nn::Tensor pos_embed_;  // [k+1, 512]
  nn::LinearLayer head1_, head2_;
};

// L_l = MAE(jaw) + lambda * MAE(lip); tensors shaped [N,41,2] / [N,16,2].
nn::Tensor landmark_loss(const nn::Tensor& pred_lip, const nn::Tensor& pred_jaw,
                         const nn::Tensor& gt_lip, const nn::Tensor& gt_jaw,
                         double lambda = 10.0);

double landmark_loss_value(const NeutralPrediction& pred, const std::vector<geometry::Point>& gt_lip,
                           const std::vector<geometry::Point>& gt_jaw, double lambda = 10.0);

struct PredictorTrainResult {
  std::vector<float> loss_curve;
  float initial_loss = 0.0f;
  float final_loss = 0.0f;
};

PredictorTrainResult train_landmark_predictor(LandmarkPredictor& model,
                                              const std::vector<data::Stage1Sample>& dataset,
                                              int steps, int batch,
                                              const nn::AdamSettings& adam, uint64_t seed);

}  // namespace talkgen::landmark

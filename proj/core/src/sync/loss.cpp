#include "talkgen/sync/loss.hpp"

#include <cmath>

namespace talkgen::sync {

using nn::Tensor;

double cosine(const SyncEmbedding& a, const SyncEmbedding& b) {
  TG_CHECK_ARG(a.v.size() == b.v.size(), "cosine: dimension mismatch");
  double d = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) d += static_cast<double>(a.v[i]) * b.v[i];
  return d;
}

double adapted_sync_loss(const SyncEmbedding& f_a, const SyncEmbedding& f_gen,
                         const SyncEmbedding& f_gt, double eps) {
  TG_CHECK_ARG(eps > 0.0 && eps < 1.0, "adapted_sync_loss: eps must lie in (0,1)");
  const double gap = std::fabs(cosine(f_a, f_gen) - cosine(f_a, f_gt));
  const double arg = std::clamp(1.0 - gap, eps, 1.0);
  return -std::log(arg);
}

Tensor adapted_sync_loss_t(const Tensor& f_a, const Tensor& f_gen, const Tensor& f_gt,
                           float eps) {
  TG_CHECK_ARG(f_a.numel() == f_gen.numel() && f_a.numel() == f_gt.numel(),
               "adapted_sync_loss_t: dimension mismatch");
  const int64_t d = f_a.numel();
  Tensor a = nn::reshape(f_a, {d});
  Tensor gen = nn::reshape(f_gen, {d});
  Tensor gt = nn::reshape(f_gt, {d});
  Tensor gap = nn::abs(nn::sub(nn::dot(a, gen), nn::dot(a, gt)));
  Tensor arg = nn::clamp(nn::add_scalar(nn::neg(gap), 1.0f), eps, 1.0f);
  return nn::neg(nn::log(arg));
}

}  // namespace talkgen::sync

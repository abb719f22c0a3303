#pragma once

#include "talkgen/sync/nets.hpp"

namespace talkgen::sync {

inline constexpr double kDefaultSyncEps = 1e-7;

// Cosine similarity of two unit embeddings (their dot product).
double cosine(const SyncEmbedding& a, const SyncEmbedding& b);

// L_ads = -log(clamp(1 - |D(f_a,f_gen) - D(f_a,f_gt)|, eps, 1)).
double adapted_sync_loss(const SyncEmbedding& f_a, const SyncEmbedding& f_gen,
                         const SyncEmbedding& f_gt, double eps = kDefaultSyncEps);

// Graph version over [1,512] unit-row tensors; gradients flow through f_gen.
nn::Tensor adapted_sync_loss_t(const nn::Tensor& f_a, const nn::Tensor& f_gen,
                               const nn::Tensor& f_gt, float eps = 1e-7f);

}  // namespace talkgen::sync

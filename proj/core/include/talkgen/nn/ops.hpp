#pragma once

#include "talkgen/nn/tensor.hpp"

namespace talkgen::nn {

// ---- elementwise ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, float s);
Tensor mul_scalar(const Tensor& a, float s);
Tensor neg(const Tensor& a);
Tensor abs(const Tensor& a);
Tensor log(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, float slope);
Tensor gelu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor clamp(const Tensor& a, float lo, float hi);

// Adds b to a where b's shape is a trailing suffix of a's shape.
Tensor add_broadcast(const Tensor& a, const Tensor& b);

// ---- reductions ----
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
Tensor dot(const Tensor& a, const Tensor& b);  // 1-D inner product

// ---- shape ----
Tensor reshape(const Tensor& a, Shape s);
Tensor concat_channels(const Tensor& a, const Tensor& b);        // [N,C,H,W]
Tensor slice_channels(const Tensor& a, int64_t c0, int64_t c1);  // [c0,c1)
Tensor slice_spatial(const Tensor& a, int64_t r0, int64_t r1, int64_t c0, int64_t c1);
Tensor concat_batch(const std::vector<Tensor>& items);  // stacks [C,...] -> [N,C,...]
Tensor pixel_shuffle(const Tensor& a, int r);
Tensor broadcast_spatial(const Tensor& vec, int64_t H, int64_t W);  // [N,C] -> [N,C,H,W]
Tensor channel_affine(const Tensor& x, const Tensor& gamma, const Tensor& beta);  // per (n,c)
Tensor avg_pool2d(const Tensor& a, int k);  // kernel = stride = k
Tensor global_avg_pool2d(const Tensor& a);  // [N,C,H,W] -> [N,C]
Tensor split_heads(const Tensor& x, int heads);   // [N,T,D] -> [N*heads,T,D/heads]
Tensor merge_heads(const Tensor& x, int heads);   // inverse of split_heads
Tensor transpose_12(const Tensor& x);             // [N,A,B] -> [N,B,A]
Tensor slice_lastdim(const Tensor& x, int64_t a, int64_t b);
Tensor stack_tokens(const std::vector<Tensor>& items);  // T x [N,D] -> [N,T,D]

// ---- linear algebra ----
Tensor matmul(const Tensor& a, const Tensor& b);  // [m,k]x[k,n]
Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b = false);
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias);  // y = x w^T + bias

// ---- losses / norms on vectors ----
Tensor mae(const Tensor& a, const Tensor& b);
Tensor mse(const Tensor& a, const Tensor& b);
Tensor bce_with_logits(const Tensor& logits, const Tensor& targets);
Tensor l2_normalize(const Tensor& x, float eps = 1e-12f);  // whole tensor as one vector
Tensor l2_normalize_rows(const Tensor& x, float eps = 1e-12f);  // per last-dim row

// ---- conv (conv.cpp) ----
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int stride, int pad);
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& bias, int stride, int pad);

// ---- normalization (norm.cpp) ----
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, float eps = 1e-5f);
Tensor instance_norm2d(const Tensor& x, float eps = 1e-6f);
Tensor batch_norm2d(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                    Tensor& running_mean, Tensor& running_var,
                    bool training, float momentum = 0.1f, float eps = 1e-5f);
Tensor softmax_lastdim(const Tensor& x);

// Sum of all values as double (no graph).
double sum_values(const Tensor& a);
bool all_finite(const Tensor& a);

}  // namespace talkgen::nn

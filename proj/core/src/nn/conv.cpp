#include <Eigen/Dense>
#include <cstring>

#include "talkgen/nn/ops.hpp"

namespace talkgen::nn {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConst = Eigen::Map<const RowMat>;

namespace {

struct ConvDims {
  int64_t N, C, H, W, O, kh, kw, Ho, Wo;
  int stride, pad_h, pad_w;
  int64_t ckk() const { return C * kh * kw; }
  int64_t howo() const { return Ho * Wo; }
};

void im2col(const float* x, const ConvDims& d, float* col) {
  // col is [C*kh*kw, Ho*Wo] row-major; x points at one sample [C,H,W].
  for (int64_t c = 0; c < d.C; ++c)
    for (int64_t ki = 0; ki < d.kh; ++ki)
      for (int64_t kj = 0; kj < d.kw; ++kj) {
        float* row = col + ((c * d.kh + ki) * d.kw + kj) * d.howo();
        for (int64_t ho = 0; ho < d.Ho; ++ho) {
          const int64_t h = ho * d.stride - d.pad_h + ki;
          float* dst = row + ho * d.Wo;
          if (h < 0 || h >= d.H) {
            std::memset(dst, 0, sizeof(float) * d.Wo);
            continue;
          }
          const float* src = x + (c * d.H + h) * d.W;
          for (int64_t wo = 0; wo < d.Wo; ++wo) {
            const int64_t w = wo * d.stride - d.pad_w + kj;
            dst[wo] = (w >= 0 && w < d.W) ? src[w] : 0.0f;
          }
        }
      }
}

void col2im_add(const float* col, const ConvDims& d, float* gx) {
  for (int64_t c = 0; c < d.C; ++c)
    for (int64_t ki = 0; ki < d.kh; ++ki)
      for (int64_t kj = 0; kj < d.kw; ++kj) {
        const float* row = col + ((c * d.kh + ki) * d.kw + kj) * d.howo();
        for (int64_t ho = 0; ho < d.Ho; ++ho) {
          const int64_t h = ho * d.stride - d.pad_h + ki;
          if (h < 0 || h >= d.H) continue;
          float* dst = gx + (c * d.H + h) * d.W;
          const float* src = row + ho * d.Wo;
          for (int64_t wo = 0; wo < d.Wo; ++wo) {
            const int64_t w = wo * d.stride - d.pad_w + kj;
            if (w >= 0 && w < d.W) dst[w] += src[wo];
          }
        }
      }
}

Tensor conv_impl(const Tensor& x, const Tensor& w, const Tensor& bias, int stride,
                 int pad_h, int pad_w) {
  TG_CHECK_ARG(x.dim(1) == w.dim(1), "conv: channel mismatch, x has ", x.dim(1),
               " w expects ", w.dim(1));
  ConvDims d;
  d.N = x.dim(0); d.C = x.dim(1); d.H = x.dim(2); d.W = x.dim(3);
  d.O = w.dim(0); d.kh = w.dim(2); d.kw = w.dim(3);
  d.stride = stride; d.pad_h = pad_h; d.pad_w = pad_w;
  d.Ho = (d.H + 2 * pad_h - d.kh) / stride + 1;
  d.Wo = (d.W + 2 * pad_w - d.kw) / stride + 1;
  TG_CHECK_ARG(d.Ho > 0 && d.Wo > 0, "conv: empty output");
  const bool has_bias = bias.defined();
  if (has_bias) TG_CHECK_ARG(bias.numel() == d.O, "conv: bias size mismatch");

  std::vector<Tensor> parents = {x, w};
  if (has_bias) parents.push_back(bias);
  Tensor out = make_op({d.N, d.O, d.Ho, d.Wo}, std::move(parents), [d](Node& n) {
    auto& px = *n.parents[0];
    auto& pw = *n.parents[1];
    Node* pb = n.parents.size() > 2 ? n.parents[2].get() : nullptr;
    if (px.requires_grad) px.ensure_grad();
    if (pw.requires_grad) pw.ensure_grad();
    if (pb && pb->requires_grad) pb->ensure_grad();
    std::vector<float> col(static_cast<size_t>(d.ckk() * d.howo()));
    std::vector<float> gcol;
    MapConst W(pw.v.data(), d.O, d.ckk());
    for (int64_t ni = 0; ni < d.N; ++ni) {
      MapConst G(n.g.data() + ni * d.O * d.howo(), d.O, d.howo());
      if (pw.requires_grad)
        im2col(px.v.data() + ni * d.C * d.H * d.W, d, col.data());
      if (pw.requires_grad) {
        MapMat GW(pw.g.data(), d.O, d.ckk());
        MapConst Col(col.data(), d.ckk(), d.howo());
        GW.noalias() += G * Col.transpose();
      }
      if (px.requires_grad) {
        gcol.resize(col.size());
        MapMat GCol(gcol.data(), d.ckk(), d.howo());
        GCol.noalias() = W.transpose() * G;
        col2im_add(gcol.data(), d, px.g.data() + ni * d.C * d.H * d.W);
      }
      if (pb && pb->requires_grad) {
        for (int64_t o = 0; o < d.O; ++o) {
          double s = 0.0;
          const float* g = n.g.data() + (ni * d.O + o) * d.howo();
          for (int64_t j = 0; j < d.howo(); ++j) s += g[j];
          pb->g[o] += static_cast<float>(s);
        }
      }
    }
  });

  std::vector<float> col(static_cast<size_t>(d.ckk() * d.howo()));
  MapConst W(w.data(), d.O, d.ckk());
  for (int64_t ni = 0; ni < d.N; ++ni) {
    im2col(x.data() + ni * d.C * d.H * d.W, d, col.data());
    MapConst Col(col.data(), d.ckk(), d.howo());
    MapMat O(out.data() + ni * d.O * d.howo(), d.O, d.howo());
    O.noalias() = W * Col;
    if (has_bias) {
      float* dst = out.data() + ni * d.O * d.howo();
      for (int64_t o = 0; o < d.O; ++o) {
        const float b = bias.data()[o];
        for (int64_t j = 0; j < d.howo(); ++j) dst[o * d.howo() + j] += b;
      }
    }
  }
  return out;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int stride, int pad) {
  TG_CHECK_ARG(x.ndim() == 4 && w.ndim() == 4, "conv2d: need x NCHW, w OCKK");
  return conv_impl(x, w, bias, stride, pad, pad);
}

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& bias, int stride, int pad) {
  TG_CHECK_ARG(x.ndim() == 3 && w.ndim() == 3, "conv1d: need x NCL, w OCK");
  Tensor x4 = reshape(x, {x.dim(0), x.dim(1), 1, x.dim(2)});
  Tensor w4 = reshape(w, {w.dim(0), w.dim(1), 1, w.dim(2)});
  Tensor y4 = conv_impl(x4, w4, bias, stride, /*pad_h=*/0, /*pad_w=*/pad);
  return reshape(y4, {y4.dim(0), y4.dim(1), y4.dim(3)});
}

}  // namespace talkgen::nn

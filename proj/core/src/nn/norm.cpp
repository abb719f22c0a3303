#include <cmath>

#include "talkgen/nn/ops.hpp"

namespace talkgen::nn {

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, float eps) {
  const int64_t D = x.dim(-1);
  TG_CHECK_ARG(gamma.numel() == D && beta.numel() == D, "layer_norm: affine size mismatch");
  const int64_t rows = x.numel() / D;
  auto stats = std::make_shared<std::vector<float>>(rows * 2);  // mean, invstd per row
  Tensor out = make_op(x.shape(), {x, gamma, beta}, [rows, D, stats](Node& n) {
    auto& px = *n.parents[0];
    auto& pg = *n.parents[1];
    auto& pb = *n.parents[2];
    if (px.requires_grad) px.ensure_grad();
    if (pg.requires_grad) pg.ensure_grad();
    if (pb.requires_grad) pb.ensure_grad();
    for (int64_t r = 0; r < rows; ++r) {
      const float mean = (*stats)[r * 2], invstd = (*stats)[r * 2 + 1];
      const float* xv = px.v.data() + r * D;
      const float* gy = n.g.data() + r * D;
      double sum_gxh = 0.0, sum_gxh_xh = 0.0;
      for (int64_t j = 0; j < D; ++j) {
        const float xh = (xv[j] - mean) * invstd;
        const float gxh = gy[j] * pg.v[j];
        sum_gxh += gxh;
        sum_gxh_xh += static_cast<double>(gxh) * xh;
        if (pg.requires_grad) pg.g[j] += gy[j] * xh;
        if (pb.requires_grad) pb.g[j] += gy[j];
      }
      if (px.requires_grad) {
        const float m1 = static_cast<float>(sum_gxh / D);
        const float m2 = static_cast<float>(sum_gxh_xh / D);
        float* gx = px.g.data() + r * D;
        for (int64_t j = 0; j < D; ++j) {
          const float xh = (xv[j] - mean) * invstd;
          gx[j] += invstd * (gy[j] * pg.v[j] - m1 - xh * m2);
        }
      }
    }
  });
  for (int64_t r = 0; r < rows; ++r) {
    const float* xv = x.data() + r * D;
    double s = 0.0;
    for (int64_t j = 0; j < D; ++j) s += xv[j];
    const double mean = s / D;
    double v = 0.0;
    for (int64_t j = 0; j < D; ++j) {
      const double dxx = xv[j] - mean;
      v += dxx * dxx;
    }
    const float invstd = static_cast<float>(1.0 / std::sqrt(v / D + eps));
    (*stats)[r * 2] = static_cast<float>(mean);
    (*stats)[r * 2 + 1] = invstd;
    float* yv = out.data() + r * D;
    for (int64_t j = 0; j < D; ++j)
      yv[j] = (static_cast<float>(xv[j] - mean)) * invstd * gamma.data()[j] + beta.data()[j];
  }
  return out;
}

Tensor instance_norm2d(const Tensor& x, float eps) {
  TG_CHECK_ARG(x.ndim() == 4, "instance_norm2d: need NCHW");
  const int64_t rows = x.dim(0) * x.dim(1), D = x.dim(2) * x.dim(3);
  auto stats = std::make_shared<std::vector<float>>(rows * 2);
  Tensor out = make_op(x.shape(), {x}, [rows, D, stats](Node& n) {
    auto& px = *n.parents[0];
    if (!px.requires_grad) return;
    px.ensure_grad();
    for (int64_t r = 0; r < rows; ++r) {
      const float mean = (*stats)[r * 2], invstd = (*stats)[r * 2 + 1];
      const float* xv = px.v.data() + r * D;
      const float* gy = n.g.data() + r * D;
      double sum_g = 0.0, sum_g_xh = 0.0;
      for (int64_t j = 0; j < D; ++j) {
        const float xh = (xv[j] - mean) * invstd;
        sum_g += gy[j];
        sum_g_xh += static_cast<double>(gy[j]) * xh;
      }
      const float m1 = static_cast<float>(sum_g / D);
      const float m2 = static_cast<float>(sum_g_xh / D);
      float* gx = px.g.data() + r * D;
      for (int64_t j = 0; j < D; ++j) {
        const float xh = (xv[j] - mean) * invstd;
        gx[j] += invstd * (gy[j] - m1 - xh * m2);
      }
    }
  });
  for (int64_t r = 0; r < rows; ++r) {
    const float* xv = x.data() + r * D;
    double s = 0.0;
    for (int64_t j = 0; j < D; ++j) s += xv[j];
    const double mean = s / D;
    double v = 0.0;
    for (int64_t j = 0; j < D; ++j) {
      const double dxx = xv[j] - mean;
      v += dxx * dxx;
    }
    const float invstd = static_cast<float>(1.0 / std::sqrt(v / D + eps));
    (*stats)[r * 2] = static_cast<float>(mean);
    (*stats)[r * 2 + 1] = invstd;
    float* yv = out.data() + r * D;
    for (int64_t j = 0; j < D; ++j)
      yv[j] = (static_cast<float>(xv[j] - mean)) * invstd;
  }
  return out;
}

Tensor batch_norm2d(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                    Tensor& running_mean, Tensor& running_var, bool training,
                    float momentum, float eps) {
  TG_CHECK_ARG(x.ndim() == 4, "batch_norm2d: need NCHW");
  const int64_t N = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
  TG_CHECK_ARG(gamma.numel() == C && beta.numel() == C &&
                   running_mean.numel() == C && running_var.numel() == C,
               "batch_norm2d: per-channel size mismatch");
  const int64_t R = N * HW;

  auto stats = std::make_shared<std::vector<float>>(C * 2);  // mean, invstd
  if (training) {
    for (int64_t c = 0; c < C; ++c) {
      double s = 0.0;
      for (int64_t ni = 0; ni < N; ++ni) {
        const float* xv = x.data() + (ni * C + c) * HW;
        for (int64_t j = 0; j < HW; ++j) s += xv[j];
      }
      const double mean = s / R;
      double v = 0.0;
      for (int64_t ni = 0; ni < N; ++ni) {
        const float* xv = x.data() + (ni * C + c) * HW;
        for (int64_t j = 0; j < HW; ++j) {
          const double dxx = xv[j] - mean;
          v += dxx * dxx;
        }
      }
      const double var = v / R;
      (*stats)[c * 2] = static_cast<float>(mean);
      (*stats)[c * 2 + 1] = static_cast<float>(1.0 / std::sqrt(var + eps));
      running_mean.data()[c] =
          (1.0f - momentum) * running_mean.data()[c] + momentum * static_cast<float>(mean);
      running_var.data()[c] =
          (1.0f - momentum) * running_var.data()[c] + momentum * static_cast<float>(var);
    }
  } else {
    for (int64_t c = 0; c < C; ++c) {
      (*stats)[c * 2] = running_mean.data()[c];
      (*stats)[c * 2 + 1] = 1.0f / std::sqrt(running_var.data()[c] + eps);
    }
  }

  Tensor out = make_op(x.shape(), {x, gamma, beta}, [N, C, HW, R, stats, training](Node& n) {
    auto& px = *n.parents[0];
    auto& pg = *n.parents[1];
    auto& pb = *n.parents[2];
    if (px.requires_grad) px.ensure_grad();
    if (pg.requires_grad) pg.ensure_grad();
    if (pb.requires_grad) pb.ensure_grad();
    for (int64_t c = 0; c < C; ++c) {
      const float mean = (*stats)[c * 2], invstd = (*stats)[c * 2 + 1];
      const float gam = pg.v[c];
      double sum_g = 0.0, sum_g_xh = 0.0;
      for (int64_t ni = 0; ni < N; ++ni) {
        const float* xv = px.v.data() + (ni * C + c) * HW;
        const float* gy = n.g.data() + (ni * C + c) * HW;
        for (int64_t j = 0; j < HW; ++j) {
          sum_g += gy[j];
          sum_g_xh += static_cast<double>(gy[j]) * (xv[j] - mean) * invstd;
        }
      }
      if (pg.requires_grad) pg.g[c] += static_cast<float>(sum_g_xh);
      if (pb.requires_grad) pb.g[c] += static_cast<float>(sum_g);
      if (!px.requires_grad) continue;
      if (training) {
        const float m1 = static_cast<float>(sum_g / R);
        const float m2 = static_cast<float>(sum_g_xh / R);
        for (int64_t ni = 0; ni < N; ++ni) {
          const float* xv = px.v.data() + (ni * C + c) * HW;
          const float* gy = n.g.data() + (ni * C + c) * HW;
          float* gx = px.g.data() + (ni * C + c) * HW;
          for (int64_t j = 0; j < HW; ++j) {
            const float xh = (xv[j] - mean) * invstd;
            gx[j] += gam * invstd * (gy[j] - m1 - xh * m2);
          }
        }
      } else {
        for (int64_t ni = 0; ni < N; ++ni) {
          const float* gy = n.g.data() + (ni * C + c) * HW;
          float* gx = px.g.data() + (ni * C + c) * HW;
          for (int64_t j = 0; j < HW; ++j) gx[j] += gam * invstd * gy[j];
        }
      }
    }
  });

  for (int64_t ni = 0; ni < N; ++ni)
    for (int64_t c = 0; c < C; ++c) {
      const float mean = (*stats)[c * 2], invstd = (*stats)[c * 2 + 1];
      const float gam = gamma.data()[c], bet = beta.data()[c];
      const float* xv = x.data() + (ni * C + c) * HW;
      float* yv = out.data() + (ni * C + c) * HW;
      for (int64_t j = 0; j < HW; ++j) yv[j] = (xv[j] - mean) * invstd * gam + bet;
    }
  return out;
}

Tensor softmax_lastdim(const Tensor& x) {
  const int64_t D = x.dim(-1);
  const int64_t rows = x.numel() / D;
  Tensor out = make_op(x.shape(), {x}, [rows, D](Node& n) {
    auto& px = *n.parents[0];
    if (!px.requires_grad) return;
    px.ensure_grad();
    for (int64_t r = 0; r < rows; ++r) {
      const float* y = n.v.data() + r * D;
      const float* gy = n.g.data() + r * D;
      double dotv = 0.0;
      for (int64_t j = 0; j < D; ++j) dotv += static_cast<double>(gy[j]) * y[j];
      float* gx = px.g.data() + r * D;
      for (int64_t j = 0; j < D; ++j)
        gx[j] += y[j] * (gy[j] - static_cast<float>(dotv));
    }
  });
  for (int64_t r = 0; r < rows; ++r) {
    const float* xv = x.data() + r * D;
    float* yv = out.data() + r * D;
    float mx = xv[0];
    for (int64_t j = 1; j < D; ++j) mx = std::max(mx, xv[j]);
    double s = 0.0;
    for (int64_t j = 0; j < D; ++j) {
      yv[j] = std::exp(xv[j] - mx);
      s += yv[j];
    }
    const float inv = static_cast<float>(1.0 / s);
    for (int64_t j = 0; j < D; ++j) yv[j] *= inv;
  }
  return out;
}

}  // namespace talkgen::nn

#include "talkgen/nn/ops.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

namespace talkgen::nn {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConst = Eigen::Map<const RowMat>;

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  TG_CHECK_ARG(a.shape() == b.shape(), op, ": shape mismatch ", shape_str(a.shape()),
               " vs ", shape_str(b.shape()));
}

// Unary op with pointwise value + derivative-given-input-and-output.
template <typename FwdFn, typename DervFn>
Tensor pointwise(const Tensor& a, FwdFn fwd, DervFn derv) {
  Tensor out = make_op(a.shape(), {a}, [a, derv](Node& n) mutable {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    const int64_t m = n.numel();
    for (int64_t i = 0; i < m; ++i) pa.g[i] += n.g[i] * derv(pa.v[i], n.v[i]);
  });
  const int64_t m = a.numel();
  const float* src = a.data();
  float* dst = out.data();
  for (int64_t i = 0; i < m; ++i) dst[i] = fwd(src[i]);
  return out;
}

}  // namespace

double sum_values(const Tensor& a) {
  double s = 0.0;
  for (float v : a.values()) s += v;
  return s;
}

bool all_finite(const Tensor& a) {
  for (float v : a.values())
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Tensor out = make_op(a.shape(), {a, b}, [](Node& n) {
    for (int k = 0; k < 2; ++k) {
      auto& p = *n.parents[k];
      if (!p.requires_grad) continue;
      p.ensure_grad();
      for (int64_t i = 0; i < n.numel(); ++i) p.g[i] += n.g[i];
    }
  });
  const int64_t m = a.numel();
  for (int64_t i = 0; i < m; ++i) out.data()[i] = a.data()[i] + b.data()[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  Tensor out = make_op(a.shape(), {a, b}, [](Node& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int64_t i = 0; i < n.numel(); ++i) pa.g[i] += n.g[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int64_t i = 0; i < n.numel(); ++i) pb.g[i] -= n.g[i];
    }
  });
  const int64_t m = a.numel();
  for (int64_t i = 0; i < m; ++i) out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  Tensor out = make_op(a.shape(), {a, b}, [](Node& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int64_t i = 0; i < n.numel(); ++i) pa.g[i] += n.g[i] * pb.v[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int64_t i = 0; i < n.numel(); ++i) pb.g[i] += n.g[i] * pa.v[i];
    }
  });
  const int64_t m = a.numel();
  for (int64_t i = 0; i < m; ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

Tensor add_scalar(const Tensor& a, float s) {
  return pointwise(a, [s](float x) { return x + s; }, [](float, float) { return 1.0f; });
}

Tensor mul_scalar(const Tensor& a, float s) {
  return pointwise(a, [s](float x) { return x * s; }, [s](float, float) { return s; });
}

Tensor neg(const Tensor& a) { return mul_scalar(a, -1.0f); }

Tensor abs(const Tensor& a) {
  return pointwise(a, [](float x) { return std::fabs(x); },
                   [](float x, float) { return x > 0.0f ? 1.0f : (x < 0.0f ? -1.0f : 0.0f); });
}

Tensor log(const Tensor& a) {
  return pointwise(a, [](float x) { return std::log(x); },
                   [](float x, float) { return 1.0f / x; });
}

Tensor relu(const Tensor& a) {
  return pointwise(a, [](float x) { return x > 0.0f ? x : 0.0f; },
                   [](float x, float) { return x > 0.0f ? 1.0f : 0.0f; });
}

Tensor leaky_relu(const Tensor& a, float slope) {
  return pointwise(a, [slope](float x) { return x > 0.0f ? x : slope * x; },
                   [slope](float x, float) { return x > 0.0f ? 1.0f : slope; });
}

Tensor gelu(const Tensor& a) {
  // tanh approximation
  constexpr float kC = 0.7978845608028654f;  // sqrt(2/pi)
  constexpr float kA = 0.044715f;
  return pointwise(
      a,
      [](float x) {
        const float u = kC * (x + kA * x * x * x);
        return 0.5f * x * (1.0f + std::tanh(u));
      },
      [](float x, float) {
        const float u = kC * (x + kA * x * x * x);
        const float t = std::tanh(u);
        const float du = kC * (1.0f + 3.0f * kA * x * x);
        return 0.5f * (1.0f + t) + 0.5f * x * (1.0f - t * t) * du;
      });
}

Tensor tanh(const Tensor& a) {
  return pointwise(a, [](float x) { return std::tanh(x); },
                   [](float, float y) { return 1.0f - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return pointwise(a, [](float x) { return 1.0f / (1.0f + std::exp(-x)); },
                   [](float, float y) { return y * (1.0f - y); });
}

Tensor clamp(const Tensor& a, float lo, float hi) {
  return pointwise(a, [lo, hi](float x) { return x < lo ? lo : (x > hi ? hi : x); },
                   [lo, hi](float x, float) { return (x >= lo && x <= hi) ? 1.0f : 0.0f; });
}

Tensor add_broadcast(const Tensor& a, const Tensor& b) {
  const auto& sa = a.shape();
  const auto& sb = b.shape();
  TG_CHECK_ARG(sb.size() <= sa.size(), "add_broadcast: b has higher rank");
  for (size_t i = 0; i < sb.size(); ++i)
    TG_CHECK_ARG(sb[sb.size() - 1 - i] == sa[sa.size() - 1 - i],
                 "add_broadcast: trailing dims differ");
  const int64_t bn = b.numel();
  Tensor out = make_op(sa, {a, b}, [bn](Node& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int64_t i = 0; i < n.numel(); ++i) pa.g[i] += n.g[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int64_t i = 0; i < n.numel(); ++i) pb.g[i % bn] += n.g[i];
    }
  });
  const int64_t m = a.numel();
  for (int64_t i = 0; i < m; ++i) out.data()[i] = a.data()[i] + b.data()[i % bn];
  return out;
}

Tensor sum_all(const Tensor& a) {
  Tensor out = make_op({1}, {a}, [](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    const float g = n.g[0];
    for (int64_t i = 0; i < pa.numel(); ++i) pa.g[i] += g;
  });
  out.data()[0] = static_cast<float>(sum_values(a));
  return out;
}

Tensor mean_all(const Tensor& a) {
  const double inv = 1.0 / static_cast<double>(a.numel());
  Tensor out = make_op({1}, {a}, [inv](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    const float g = n.g[0] * static_cast<float>(inv);
    for (int64_t i = 0; i < pa.numel(); ++i) pa.g[i] += g;
  });
  out.data()[0] = static_cast<float>(sum_values(a) * inv);
  return out;
}

Tensor dot(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "dot");
  Tensor out = make_op({1}, {a, b}, [](Node& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    const float g = n.g[0];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int64_t i = 0; i < pa.numel(); ++i) pa.g[i] += g * pb.v[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int64_t i = 0; i < pb.numel(); ++i) pb.g[i] += g * pa.v[i];
    }
  });
  double s = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i)
    s += static_cast<double>(a.data()[i]) * b.data()[i];
  out.data()[0] = static_cast<float>(s);
  return out;
}

Tensor reshape(const Tensor& a, Shape s) {
  TG_CHECK_ARG(shape_numel(s) == a.numel(), "reshape: element count mismatch ",
               shape_str(a.shape()), " -> ", shape_str(s));
  Tensor out = make_op(std::move(s), {a}, [](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t i = 0; i < n.numel(); ++i) pa.g[i] += n.g[i];
  });
  std::memcpy(out.data(), a.data(), sizeof(float) * a.numel());
  return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  TG_CHECK_ARG(a.ndim() == 4 && b.ndim() == 4, "concat_channels: need NCHW");
  TG_CHECK_ARG(a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) && a.dim(3) == b.dim(3),
               "concat_channels: N/H/W mismatch");
  const int64_t N = a.dim(0), Ca = a.dim(1), Cb = b.dim(1), H = a.dim(2), W = a.dim(3);
  const int64_t hw = H * W;
  Tensor out = make_op({N, Ca + Cb, H, W}, {a, b}, [N, Ca, Cb, hw](Node& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) pa.ensure_grad();
    if (pb.requires_grad) pb.ensure_grad();
    for (int64_t i = 0; i < N; ++i) {
      const float* gn = n.g.data() + i * (Ca + Cb) * hw;
      if (pa.requires_grad) {
        float* ga = pa.g.data() + i * Ca * hw;
        for (int64_t j = 0; j < Ca * hw; ++j) ga[j] += gn[j];
      }
      if (pb.requires_grad) {
        float* gb = pb.g.data() + i * Cb * hw;
        for (int64_t j = 0; j < Cb * hw; ++j) gb[j] += gn[Ca * hw + j];
      }
    }
  });
  for (int64_t i = 0; i < N; ++i) {
    float* dst = out.data() + i * (Ca + Cb) * hw;
    std::memcpy(dst, a.data() + i * Ca * hw, sizeof(float) * Ca * hw);
    std::memcpy(dst + Ca * hw, b.data() + i * Cb * hw, sizeof(float) * Cb * hw);
  }
  return out;
}

Tensor slice_channels(const Tensor& a, int64_t c0, int64_t c1) {
  TG_CHECK_ARG(a.ndim() == 4, "slice_channels: need NCHW");
  const int64_t N = a.dim(0), C = a.dim(1), H = a.dim(2), W = a.dim(3);
  TG_CHECK_ARG(0 <= c0 && c0 < c1 && c1 <= C, "slice_channels: bad range");
  const int64_t hw = H * W, Cs = c1 - c0;
  Tensor out = make_op({N, Cs, H, W}, {a}, [N, C, c0, Cs, hw](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t i = 0; i < N; ++i) {
      float* ga = pa.g.data() + (i * C + c0) * hw;
      const float* gn = n.g.data() + i * Cs * hw;
      for (int64_t j = 0; j < Cs * hw; ++j) ga[j] += gn[j];
    }
  });
  for (int64_t i = 0; i < N; ++i)
    std::memcpy(out.data() + i * Cs * hw, a.data() + (i * C + c0) * hw,
                sizeof(float) * Cs * hw);
  return out;
}

Tensor slice_spatial(const Tensor& a, int64_t r0, int64_t r1, int64_t c0, int64_t c1) {
  TG_CHECK_ARG(a.ndim() == 4, "slice_spatial: need NCHW");
  const int64_t N = a.dim(0), C = a.dim(1), H = a.dim(2), W = a.dim(3);
  TG_CHECK_ARG(0 <= r0 && r0 < r1 && r1 <= H && 0 <= c0 && c0 < c1 && c1 <= W,
               "slice_spatial: bad window");
  const int64_t Hs = r1 - r0, Ws = c1 - c0;
  Tensor out = make_op({N, C, Hs, Ws}, {a}, [=](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t i = 0; i < N * C; ++i)
      for (int64_t r = 0; r < Hs; ++r) {
        float* ga = pa.g.data() + (i * H + r0 + r) * W + c0;
        const float* gn = n.g.data() + (i * Hs + r) * Ws;
        for (int64_t c = 0; c < Ws; ++c) ga[c] += gn[c];
      }
  });
  for (int64_t i = 0; i < N * C; ++i)
    for (int64_t r = 0; r < Hs; ++r)
      std::memcpy(out.data() + (i * Hs + r) * Ws,
                  a.data() + (i * H + r0 + r) * W + c0, sizeof(float) * Ws);
  return out;
}

Tensor concat_batch(const std::vector<Tensor>& items) {
  TG_CHECK_ARG(!items.empty(), "concat_batch: empty list");
  const Shape inner = items[0].shape();
  for (const auto& t : items)
    TG_CHECK_ARG(t.shape() == inner, "concat_batch: mismatched item shapes");
  const int64_t per = items[0].numel();
  Shape out_shape;
  out_shape.push_back(static_cast<int64_t>(items.size()));
  for (int64_t d : inner) out_shape.push_back(d);
  Tensor out = make_op(out_shape, items, [per](Node& n) {
    for (size_t k = 0; k < n.parents.size(); ++k) {
      auto& p = *n.parents[k];
      if (!p.requires_grad) continue;
      p.ensure_grad();
      const float* gn = n.g.data() + static_cast<int64_t>(k) * per;
      for (int64_t j = 0; j < per; ++j) p.g[j] += gn[j];
    }
  });
  for (size_t k = 0; k < items.size(); ++k)
    std::memcpy(out.data() + static_cast<int64_t>(k) * per, items[k].data(),
                sizeof(float) * per);
  return out;
}

Tensor pixel_shuffle(const Tensor& a, int r) {
  TG_CHECK_ARG(a.ndim() == 4, "pixel_shuffle: need NCHW");
  const int64_t N = a.dim(0), C = a.dim(1), H = a.dim(2), W = a.dim(3);
  const int64_t r2 = static_cast<int64_t>(r) * r;
  TG_CHECK_ARG(C % r2 == 0, "pixel_shuffle: channels not divisible by r^2");
  const int64_t Co = C / r2, Ho = H * r, Wo = W * r;
  auto map_index = [=](int64_t n_i, int64_t co, int64_t ho, int64_t wo) {
    // input channel layout: c = co*r2 + dy*r + dx
    const int64_t dy = ho % r, dx = wo % r;
    const int64_t ci = co * r2 + dy * r + dx;
    return ((n_i * C + ci) * H + ho / r) * W + wo / r;
  };
  Tensor out = make_op({N, Co, Ho, Wo}, {a}, [=](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    int64_t o = 0;
    for (int64_t ni = 0; ni < N; ++ni)
      for (int64_t co = 0; co < Co; ++co)
        for (int64_t ho = 0; ho < Ho; ++ho)
          for (int64_t wo = 0; wo < Wo; ++wo, ++o)
            pa.g[map_index(ni, co, ho, wo)] += n.g[o];
  });
  int64_t o = 0;
  for (int64_t ni = 0; ni < N; ++ni)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t ho = 0; ho < Ho; ++ho)
        for (int64_t wo = 0; wo < Wo; ++wo, ++o)
          out.data()[o] = a.data()[map_index(ni, co, ho, wo)];
  return out;
}

Tensor broadcast_spatial(const Tensor& vec, int64_t H, int64_t W) {
  TG_CHECK_ARG(vec.ndim() == 2, "broadcast_spatial: need [N,C]");
  const int64_t N = vec.dim(0), C = vec.dim(1), hw = H * W;
  Tensor out = make_op({N, C, H, W}, {vec}, [N, C, hw](Node& n) {
    auto& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int64_t i = 0; i < N * C; ++i) {
      double s = 0.0;
      const float* gn = n.g.data() + i * hw;
      for (int64_t j = 0; j < hw; ++j) s += gn[j];
      p.g[i] += static_cast<float>(s);
    }
  });
  for (int64_t i = 0; i < N * C; ++i) {
    const float v = vec.data()[i];
    float* dst = out.data() + i * hw;
    for (int64_t j = 0; j < hw; ++j) dst[j] = v;
  }
  return out;
}

Tensor channel_affine(const Tensor& x, const Tensor& gamma, const Tensor& beta) {
  TG_CHECK_ARG(x.ndim() == 4 && gamma.ndim() == 2 && beta.ndim() == 2,
               "channel_affine: need x NCHW, gamma/beta [N,C]");
  const int64_t N = x.dim(0), C = x.dim(1), hw = x.dim(2) * x.dim(3);
  TG_CHECK_ARG(gamma.dim(0) == N && gamma.dim(1) == C && beta.shape() == gamma.shape(),
               "channel_affine: modulation shape mismatch");
  Tensor out = make_op(x.shape(), {x, gamma, beta}, [N, C, hw](Node& n) {
    auto& px = *n.parents[0];
    auto& pg = *n.parents[1];
    auto& pb = *n.parents[2];
    if (px.requires_grad) px.ensure_grad();
    if (pg.requires_grad) pg.ensure_grad();
    if (pb.requires_grad) pb.ensure_grad();
    for (int64_t i = 0; i < N * C; ++i) {
      const float* gn = n.g.data() + i * hw;
      const float gam = pg.v[i];
      if (px.requires_grad) {
        float* gx = px.g.data() + i * hw;
        for (int64_t j = 0; j < hw; ++j) gx[j] += gn[j] * gam;
      }
      if (pg.requires_grad) {
        const float* xv = px.v.data() + i * hw;
        double s = 0.0;
        for (int64_t j = 0; j < hw; ++j) s += static_cast<double>(gn[j]) * xv[j];
        pg.g[i] += static_cast<float>(s);
      }
      if (pb.requires_grad) {
        double s = 0.0;
        for (int64_t j = 0; j < hw; ++j) s += gn[j];
        pb.g[i] += static_cast<float>(s);
      }
    }
  });
  for (int64_t i = 0; i < N * C; ++i) {
    const float* src = x.data() + i * hw;
    float* dst = out.data() + i * hw;
    const float gam = gamma.data()[i], bet = beta.data()[i];
    for (int64_t j = 0; j < hw; ++j) dst[j] = src[j] * gam + bet;
  }
  return out;
}

Tensor avg_pool2d(const Tensor& a, int k) {
  TG_CHECK_ARG(a.ndim() == 4, "avg_pool2d: need NCHW");
  const int64_t NC = a.dim(0) * a.dim(1), H = a.dim(2), W = a.dim(3);
  TG_CHECK_ARG(H % k == 0 && W % k == 0, "avg_pool2d: size not divisible by kernel");
  const int64_t Ho = H / k, Wo = W / k;
  const float inv = 1.0f / static_cast<float>(k * k);
  Tensor out = make_op({a.dim(0), a.dim(1), Ho, Wo}, {a}, [=](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t i = 0; i < NC; ++i)
      for (int64_t r = 0; r < Ho; ++r)
        for (int64_t c = 0; c < Wo; ++c) {
          const float g = n.g[(i * Ho + r) * Wo + c] * inv;
          for (int64_t dr = 0; dr < k; ++dr)
            for (int64_t dc = 0; dc < k; ++dc)
              pa.g[(i * H + r * k + dr) * W + c * k + dc] += g;
        }
  });
  for (int64_t i = 0; i < NC; ++i)
    for (int64_t r = 0; r < Ho; ++r)
      for (int64_t c = 0; c < Wo; ++c) {
        double s = 0.0;
        for (int64_t dr = 0; dr < k; ++dr)
          for (int64_t dc = 0; dc < k; ++dc)
            s += a.data()[(i * H + r * k + dr) * W + c * k + dc];
        out.data()[(i * Ho + r) * Wo + c] = static_cast<float>(s * inv);
      }
  return out;
}

Tensor global_avg_pool2d(const Tensor& a) {
  TG_CHECK_ARG(a.ndim() == 4, "global_avg_pool2d: need NCHW");
  const int64_t NC = a.dim(0) * a.dim(1), hw = a.dim(2) * a.dim(3);
  const float inv = 1.0f / static_cast<float>(hw);
  Tensor out = make_op({a.dim(0), a.dim(1)}, {a}, [NC, hw, inv](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t i = 0; i < NC; ++i) {
      const float g = n.g[i] * inv;
      float* gx = pa.g.data() + i * hw;
      for (int64_t j = 0; j < hw; ++j) gx[j] += g;
    }
  });
  for (int64_t i = 0; i < NC; ++i) {
    double s = 0.0;
    const float* src = a.data() + i * hw;
    for (int64_t j = 0; j < hw; ++j) s += src[j];
    out.data()[i] = static_cast<float>(s * inv);
  }
  return out;
}

Tensor split_heads(const Tensor& x, int heads) {
  TG_CHECK_ARG(x.ndim() == 3, "split_heads: need [N,T,D]");
  const int64_t N = x.dim(0), T = x.dim(1), D = x.dim(2);
  TG_CHECK_ARG(D % heads == 0, "split_heads: D not divisible by heads");
  const int64_t dh = D / heads;
  auto src_index = [=](int64_t o) {
    // o indexes [N*heads, T, dh]
    const int64_t j = o % dh, t = (o / dh) % T, nh = o / (dh * T);
    const int64_t h = nh % heads, n_i = nh / heads;
    return (n_i * T + t) * D + h * dh + j;
  };
  Tensor out = make_op({N * heads, T, dh}, {x}, [src_index](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t o = 0; o < n.numel(); ++o) pa.g[src_index(o)] += n.g[o];
  });
  for (int64_t o = 0; o < out.numel(); ++o) out.data()[o] = x.data()[src_index(o)];
  return out;
}

Tensor merge_heads(const Tensor& x, int heads) {
  TG_CHECK_ARG(x.ndim() == 3, "merge_heads: need [N*heads,T,dh]");
  const int64_t NH = x.dim(0), T = x.dim(1), dh = x.dim(2);
  TG_CHECK_ARG(NH % heads == 0, "merge_heads: batch not divisible by heads");
  const int64_t N = NH / heads, D = dh * heads;
  auto src_index = [=](int64_t o) {
    // o indexes [N,T,D]
    const int64_t d = o % D, t = (o / D) % T, n_i = o / (D * T);
    const int64_t h = d / dh, j = d % dh;
    return ((n_i * heads + h) * T + t) * dh + j;
  };
  Tensor out = make_op({N, T, D}, {x}, [src_index](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t o = 0; o < n.numel(); ++o) pa.g[src_index(o)] += n.g[o];
  });
  for (int64_t o = 0; o < out.numel(); ++o) out.data()[o] = x.data()[src_index(o)];
  return out;
}

Tensor transpose_12(const Tensor& x) {
  TG_CHECK_ARG(x.ndim() == 3, "transpose_12: need [N,A,B]");
  const int64_t N = x.dim(0), A = x.dim(1), B = x.dim(2);
  auto src_index = [A, B](int64_t o) {
    // o indexes [N,B,A]
    const int64_t a = o % A, b = (o / A) % B, n_i = o / (A * B);
    return (n_i * A + a) * B + b;
  };
  Tensor out = make_op({N, B, A}, {x}, [src_index](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t o = 0; o < n.numel(); ++o) pa.g[src_index(o)] += n.g[o];
  });
  for (int64_t o = 0; o < out.numel(); ++o) out.data()[o] = x.data()[src_index(o)];
  return out;
}

Tensor slice_lastdim(const Tensor& x, int64_t a, int64_t b) {
  const int64_t D = x.dim(-1);
  TG_CHECK_ARG(0 <= a && a < b && b <= D, "slice_lastdim: bad range");
  const int64_t rows = x.numel() / D, S = b - a;
  Shape out_shape = x.shape();
  out_shape.back() = S;
  Tensor out = make_op(out_shape, {x}, [rows, D, a, S](Node& n) {
    auto& pa = *n.parents[0];
    if (!pa.requires_grad) return;
    pa.ensure_grad();
    for (int64_t r = 0; r < rows; ++r)
      for (int64_t j = 0; j < S; ++j) pa.g[r * D + a + j] += n.g[r * S + j];
  });
  for (int64_t r = 0; r < rows; ++r)
    std::memcpy(out.data() + r * S, x.data() + r * D + a, sizeof(float) * S);
  return out;
}

Tensor stack_tokens(const std::vector<Tensor>& items) {
  TG_CHECK_ARG(!items.empty(), "stack_tokens: empty list");
  const int64_t N = items[0].dim(0), D = items[0].dim(1);
  const int64_t T = static_cast<int64_t>(items.size());
  for (const auto& t : items)
    TG_CHECK_ARG(t.ndim() == 2 && t.dim(0) == N && t.dim(1) == D,
                 "stack_tokens: mismatched token shapes");
  Tensor out = make_op({N, T, D}, items, [N, T, D](Node& n) {
    for (int64_t t = 0; t < T; ++t) {
      auto& p = *n.parents[static_cast<size_t>(t)];
      if (!p.requires_grad) continue;
      p.ensure_grad();
      for (int64_t i = 0; i < N; ++i)
        for (int64_t j = 0; j < D; ++j) p.g[i * D + j] += n.g[(i * T + t) * D + j];
    }
  });
  for (int64_t t = 0; t < T; ++t)
    for (int64_t i = 0; i < N; ++i)
      std::memcpy(out.data() + (i * T + t) * D, items[static_cast<size_t>(t)].data() + i * D,
                  sizeof(float) * D);
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  TG_CHECK_ARG(a.ndim() == 2 && b.ndim() == 2 && a.dim(1) == b.dim(0),
               "matmul: bad shapes ", shape_str(a.shape()), " x ", shape_str(b.shape()));
  const int64_t m = a.dim(0), k = a.dim(1), n_cols = b.dim(1);
  Tensor out = make_op({m, n_cols}, {a, b}, [m, k, n_cols](Node& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    MapConst G(n.g.data(), m, n_cols);
    if (pa.requires_grad) {
      pa.ensure_grad();
      MapMat GA(pa.g.data(), m, k);
      MapConst B(pb.v.data(), k, n_cols);
      GA.noalias() += G * B.transpose();
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      MapMat GB(pb.g.data(), k, n_cols);
      MapConst A(pa.v.data(), m, k);
      GB.noalias() += A.transpose() * G;
    }
  });
  MapConst A(a.data(), m, k);
  MapConst B(b.data(), k, n_cols);
  MapMat O(out.data(), m, n_cols);
  O.noalias() = A * B;
  return out;
}

Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b) {
  TG_CHECK_ARG(a.ndim() == 3 && b.ndim() == 3 && a.dim(0) == b.dim(0),
               "bmm: need matching [B,..] batches");
  const int64_t B = a.dim(0), m = a.dim(1), k = a.dim(2);
  const int64_t bk = transpose_b ? b.dim(2) : b.dim(1);
  const int64_t n_cols = transpose_b ? b.dim(1) : b.dim(2);
  TG_CHECK_ARG(bk == k, "bmm: inner dims differ");
  Tensor out = make_op({B, m, n_cols}, {a, b}, [=](Node& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) pa.ensure_grad();
    if (pb.requires_grad) pb.ensure_grad();
    for (int64_t i = 0; i < B; ++i) {
      MapConst G(n.g.data() + i * m * n_cols, m, n_cols);
      MapConst A(pa.v.data() + i * m * k, m, k);
      if (!transpose_b) {
        MapConst Bm(pb.v.data() + i * k * n_cols, k, n_cols);
        if (pa.requires_grad) {
          MapMat GA(pa.g.data() + i * m * k, m, k);
          GA.noalias() += G * Bm.transpose();
        }
        if (pb.requires_grad) {
          MapMat GB(pb.g.data() + i * k * n_cols, k, n_cols);
          GB.noalias() += A.transpose() * G;
        }
      } else {
        MapConst Bm(pb.v.data() + i * n_cols * k, n_cols, k);
        if (pa.requires_grad) {
          MapMat GA(pa.g.data() + i * m * k, m, k);
          GA.noalias() += G * Bm;
        }
        if (pb.requires_grad) {
          MapMat GB(pb.g.data() + i * n_cols * k, n_cols, k);
          GB.noalias() += G.transpose() * A;
        }
      }
    }
  });
  for (int64_t i = 0; i < B; ++i) {
    MapConst A(a.data() + i * m * k, m, k);
    MapMat O(out.data() + i * m * n_cols, m, n_cols);
    if (!transpose_b) {
      MapConst Bm(b.data() + i * k * n_cols, k, n_cols);
      O.noalias() = A * Bm;
    } else {
      MapConst Bm(b.data() + i * n_cols * k, n_cols, k);
      O.noalias() = A * Bm.transpose();
    }
  }
  return out;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias) {
  TG_CHECK_ARG(x.ndim() == 2 && w.ndim() == 2 && x.dim(1) == w.dim(1),
               "linear: bad shapes ", shape_str(x.shape()), " w ", shape_str(w.shape()));
  const int64_t N = x.dim(0), in = x.dim(1), out_dim = w.dim(0);
  const bool has_bias = bias.defined();
  if (has_bias)
    TG_CHECK_ARG(bias.numel() == out_dim, "linear: bias size mismatch");
  std::vector<Tensor> parents = {x, w};
  if (has_bias) parents.push_back(bias);
  Tensor out = make_op({N, out_dim}, std::move(parents), [=](Node& n) {
    auto& px = *n.parents[0];
    auto& pw = *n.parents[1];
    MapConst G(n.g.data(), N, out_dim);
    if (px.requires_grad) {
      px.ensure_grad();
      MapMat GX(px.g.data(), N, in);
      MapConst W(pw.v.data(), out_dim, in);
      GX.noalias() += G * W;
    }
    if (pw.requires_grad) {
      pw.ensure_grad();
      MapMat GW(pw.g.data(), out_dim, in);
      MapConst X(px.v.data(), N, in);
      GW.noalias() += G.transpose() * X;
    }
    if (n.parents.size() > 2 && n.parents[2]->requires_grad) {
      auto& pb = *n.parents[2];
      pb.ensure_grad();
      for (int64_t i = 0; i < N; ++i)
        for (int64_t j = 0; j < out_dim; ++j) pb.g[j] += n.g[i * out_dim + j];
    }
  });
  MapConst X(x.data(), N, in);
  MapConst W(w.data(), out_dim, in);
  MapMat O(out.data(), N, out_dim);
  O.noalias() = X * W.transpose();
  if (has_bias)
    for (int64_t i = 0; i < N; ++i)
      for (int64_t j = 0; j < out_dim; ++j) out.data()[i * out_dim + j] += bias.data()[j];
  return out;
}

Tensor mae(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mae");
  return mean_all(abs(sub(a, b)));
}

Tensor mse(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mse");
  Tensor d = sub(a, b);
  return mean_all(mul(d, d));
}

Tensor bce_with_logits(const Tensor& logits, const Tensor& targets) {
  check_same_shape(logits, targets, "bce_with_logits");
  const int64_t m = logits.numel();
  Tensor out = make_op({1}, {logits, targets}, [m](Node& n) {
    auto& pz = *n.parents[0];
    auto& pt = *n.parents[1];
    if (!pz.requires_grad) return;
    pz.ensure_grad();
    const float g = n.g[0] / static_cast<float>(m);
    for (int64_t i = 0; i < m; ++i) {
      const float s = 1.0f / (1.0f + std::exp(-pz.v[i]));
      pz.g[i] += g * (s - pt.v[i]);
    }
  });
  double s = 0.0;
  for (int64_t i = 0; i < m; ++i) {
    const double z = logits.data()[i], t = targets.data()[i];
    s += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::fabs(z)));
  }
  out.data()[0] = static_cast<float>(s / static_cast<double>(m));
  return out;
}

Tensor l2_normalize_rows(const Tensor& x, float eps) {
  const int64_t D = x.dim(-1);
  const int64_t rows = x.numel() / D;
  auto inv_r = std::make_shared<std::vector<float>>(static_cast<size_t>(rows));
  Tensor out = make_op(x.shape(), {x}, [rows, D, inv_r](Node& n) {
    auto& px = *n.parents[0];
    if (!px.requires_grad) return;
    px.ensure_grad();
    for (int64_t r = 0; r < rows; ++r) {
      const float* y = n.v.data() + r * D;
      const float* gy = n.g.data() + r * D;
      double gdoty = 0.0;
      for (int64_t j = 0; j < D; ++j) gdoty += static_cast<double>(gy[j]) * y[j];
      float* gx = px.g.data() + r * D;
      const float ir = (*inv_r)[static_cast<size_t>(r)];
      for (int64_t j = 0; j < D; ++j)
        gx[j] += ir * (gy[j] - static_cast<float>(gdoty) * y[j]);
    }
  });
  for (int64_t r = 0; r < rows; ++r) {
    const float* xv = x.data() + r * D;
    double ss = 0.0;
    for (int64_t j = 0; j < D; ++j) ss += static_cast<double>(xv[j]) * xv[j];
    const float ir = static_cast<float>(1.0 / (std::sqrt(ss) + eps));
    (*inv_r)[static_cast<size_t>(r)] = ir;
    float* yv = out.data() + r * D;
    for (int64_t j = 0; j < D; ++j) yv[j] = xv[j] * ir;
  }
  return out;
}

Tensor l2_normalize(const Tensor& x, float eps) {
  const int64_t m = x.numel();
  double ss = 0.0;
  for (int64_t i = 0; i < m; ++i) ss += static_cast<double>(x.data()[i]) * x.data()[i];
  const double r = std::sqrt(ss) + eps;
  const float inv_r = static_cast<float>(1.0 / r);
  Tensor out = make_op(x.shape(), {x}, [m, inv_r](Node& n) {
    auto& px = *n.parents[0];
    if (!px.requires_grad) return;
    px.ensure_grad();
    double gy_dot_y = 0.0;
    for (int64_t i = 0; i < m; ++i) gy_dot_y += static_cast<double>(n.g[i]) * n.v[i];
    for (int64_t i = 0; i < m; ++i)
      px.g[i] += inv_r * (n.g[i] - static_cast<float>(gy_dot_y) * n.v[i]);
  });
  for (int64_t i = 0; i < m; ++i) out.data()[i] = x.data()[i] * inv_r;
  return out;
}

}  // namespace talkgen::nn

#pragma once

#include <optional>
#include <vector>

#include "talkgen/data/image.hpp"

namespace talkgen::metrics {

// Planar float image in [0,1] used by the pixel metrics.
struct MetricImage {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> v;  // [c][y][x]

  float at(int c, int y, int x) const {
    return v[static_cast<size_t>((c * height + y) * width + x)];
  }
  static MetricImage from_image8(const data::Image8& im);
  static MetricImage from_face(const data::FaceFrame& f);  // [-1,1] -> [0,1]
};

// Mean SSIM over uniform 8x8 windows (stride 8) per channel,
// c1 = (0.01*peak)^2, c2 = (0.03*peak)^2, biased window statistics.
double ssim(const MetricImage& x, const MetricImage& y, double peak = 1.0);

// 10*log10(peak^2 / MSE); zero MSE yields +infinity (reported as the
// "infinite" sentinel and excluded from means).
double psnr(const MetricImage& x, const MetricImage& y, double peak = 1.0);

inline bool psnr_is_infinite(double v) { return std::isinf(v); }

// Inter-frame consistency: mean over consecutive pairs of mean |difference|.
double ifc(const std::vector<MetricImage>& frames);

// Cosine similarity of two embeddings; zero vectors are rejected.
double csim(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace talkgen::metrics

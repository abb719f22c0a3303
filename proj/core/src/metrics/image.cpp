#include "talkgen/metrics/image.hpp"

#include <cmath>

namespace talkgen::metrics {

MetricImage MetricImage::from_image8(const data::Image8& im) {
  MetricImage m;
  m.channels = 3;
  m.height = im.height;
  m.width = im.width;
  m.v.resize(static_cast<size_t>(3) * im.height * im.width);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < im.height; ++y)
      for (int x = 0; x < im.width; ++x)
        m.v[static_cast<size_t>((c * im.height + y) * im.width + x)] =
            static_cast<float>(im.px(x, y)[c]) / 255.0f;
  return m;
}

MetricImage MetricImage::from_face(const data::FaceFrame& f) {
  MetricImage m;
  m.channels = 3;
  m.height = data::FaceFrame::kSize;
  m.width = data::FaceFrame::kSize;
  m.v.resize(f.chw.size());
  for (size_t i = 0; i < f.chw.size(); ++i)
    m.v[i] = (std::clamp(f.chw[i], -1.0f, 1.0f) + 1.0f) * 0.5f;
  return m;
}

double ssim(const MetricImage& x, const MetricImage& y, double peak) {
  TG_CHECK_ARG(x.channels == y.channels && x.height == y.height && x.width == y.width,
               "ssim: shape mismatch");
  constexpr int kWin = 8;
  TG_CHECK_ARG(x.height >= kWin && x.width >= kWin, "ssim: image smaller than the 8x8 window");
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  double total = 0.0;
  int64_t count = 0;
  for (int c = 0; c < x.channels; ++c)
    for (int wy = 0; wy + kWin <= x.height; wy += kWin)
      for (int wx = 0; wx + kWin <= x.width; wx += kWin) {
        double mx = 0.0, my = 0.0;
        for (int i = 0; i < kWin; ++i)
          for (int j = 0; j < kWin; ++j) {
            mx += x.at(c, wy + i, wx + j);
            my += y.at(c, wy + i, wx + j);
          }
        const double n = kWin * kWin;
        mx /= n;
        my /= n;
        double vx = 0.0, vy = 0.0, cov = 0.0;
        for (int i = 0; i < kWin; ++i)
          for (int j = 0; j < kWin; ++j) {
            const double dx = x.at(c, wy + i, wx + j) - mx;
            const double dy = y.at(c, wy + i, wx + j) - my;
            vx += dx * dx;
            vy += dy * dy;
            cov += dx * dy;
          }
        vx /= n;
        vy /= n;
        cov /= n;
        total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
  return total / static_cast<double>(count);
}

double psnr(const MetricImage& x, const MetricImage& y, double peak) {
  TG_CHECK_ARG(x.channels == y.channels && x.height == y.height && x.width == y.width,
               "psnr: shape mismatch");
  double mse = 0.0;
  for (size_t i = 0; i < x.v.size(); ++i) {
    const double d = static_cast<double>(x.v[i]) - y.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(x.v.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ifc(const std::vector<MetricImage>& frames) {
  TG_CHECK_ARG(frames.size() >= 2, "ifc: need at least 2 frames");
  double total = 0.0;
  for (size_t i = 0; i + 1 < frames.size(); ++i) {
    TG_CHECK_ARG(frames[i].v.size() == frames[i + 1].v.size(), "ifc: frame shape mismatch");
    double mean_abs = 0.0;
    for (size_t j = 0; j < frames[i].v.size(); ++j)
      mean_abs += std::fabs(static_cast<double>(frames[i + 1].v[j]) - frames[i].v[j]);
    total += mean_abs / static_cast<double>(frames[i].v.size());
  }
  return total / static_cast<double>(frames.size() - 1);
}

double csim(const std::vector<double>& a, const std::vector<double>& b) {
  TG_CHECK_ARG(a.size() == b.size(), "csim: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  TG_CHECK_ARG(na > 0.0 && nb > 0.0, "csim: zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace talkgen::metrics

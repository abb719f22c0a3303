#include "talkgen/data/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace talkgen::data {

void write_ppm(const std::string& path, const Image8& im) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  TG_CHECK(os.good(), "write_ppm: cannot open ", path);
  os << "P6\n" << im.width << " " << im.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(im.rgb.data()),
           static_cast<std::streamsize>(im.rgb.size()));
  TG_CHECK(os.good(), "write_ppm: write failed ", path);
}

Image8 read_ppm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  TG_CHECK(is.good(), "read_ppm: cannot open ", path);
  std::string magic;
  is >> magic;
  TG_CHECK(magic == "P6", "read_ppm: not a P6 file: ", path);
  int w = 0, h = 0, maxval = 0;
  is >> w >> h >> maxval;
  TG_CHECK(w > 0 && h > 0 && maxval == 255, "read_ppm: unsupported header in ", path);
  is.get();  // single whitespace after header
  Image8 im = Image8::create(w, h);
  is.read(reinterpret_cast<char*>(im.rgb.data()), static_cast<std::streamsize>(im.rgb.size()));
  TG_CHECK(static_cast<bool>(is), "read_ppm: truncated pixel data in ", path);
  return im;
}

std::string frame_filename(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d", index);
  return buf;
}

void write_frame(const std::string& dir, int index, const Image8& im) {
  std::filesystem::create_directories(dir);
  write_ppm(dir + "/" + frame_filename(index) + ".ppm", im);
}

Image8 read_frame(const std::string& dir, int index) {
  // Extension-agnostic lookup; PPM is the bundled codec.
  const std::string stem = frame_filename(index);
  const std::string ppm = dir + "/" + stem + ".ppm";
  if (std::filesystem::exists(ppm)) return read_ppm(ppm);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().stem() == stem) {
      TG_CHECK(entry.path().extension() == ".ppm",
               "read_frame: unsupported frame format ", entry.path().string());
      return read_ppm(entry.path().string());
    }
  }
  throw RuntimeFault(str_cat("read_frame: no frame ", stem, " in ", dir));
}

int count_frames(const std::string& dir) {
  TG_CHECK(std::filesystem::is_directory(dir), "count_frames: not a directory: ", dir);
  int count = 0;
  while (std::filesystem::exists(dir + "/" + frame_filename(count) + ".ppm")) ++count;
  return count;
}

Image8 resize_bilinear(const Image8& src, int out_w, int out_h) {
  TG_CHECK_ARG(src.width > 0 && src.height > 0 && out_w > 0 && out_h > 0,
               "resize_bilinear: empty image");
  Image8 dst = Image8::create(out_w, out_h);
  const double sx = static_cast<double>(src.width) / out_w;
  const double sy = static_cast<double>(src.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, src.height - 1);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = std::clamp(fy - y0, 0.0, 1.0);
    for (int x = 0; x < out_w; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, src.width - 1);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double wx = std::clamp(fx - x0, 0.0, 1.0);
      for (int c = 0; c < 3; ++c) {
        const double top = src.px(x0, y0)[c] * (1.0 - wx) + src.px(x1, y0)[c] * wx;
        const double bot = src.px(x0, y1)[c] * (1.0 - wx) + src.px(x1, y1)[c] * wx;
        dst.px(x, y)[c] =
            static_cast<uint8_t>(std::clamp(std::lround(top * (1.0 - wy) + bot * wy), 0l, 255l));
      }
    }
  }
  return dst;
}

FaceFrame to_face_frame(const Image8& crop, const IntRect& box, int frame_index) {
  TG_CHECK_ARG(crop.width == FaceFrame::kSize && crop.height == FaceFrame::kSize,
               "to_face_frame: crop must be 128x128, got ", crop.width, "x", crop.height);
  FaceFrame f;
  f.crop_box = box;
  f.frame_index = frame_index;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < FaceFrame::kSize; ++y)
      for (int x = 0; x < FaceFrame::kSize; ++x)
        f.at(c, y, x) = static_cast<float>(crop.px(x, y)[c]) / 255.0f * 2.0f - 1.0f;
  return f;
}

Image8 to_image8(const FaceFrame& f) {
  Image8 im = Image8::create(FaceFrame::kSize, FaceFrame::kSize);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < FaceFrame::kSize; ++y)
      for (int x = 0; x < FaceFrame::kSize; ++x) {
        const float v = std::clamp(f.at(c, y, x), -1.0f, 1.0f);
        im.px(x, y)[c] =
            static_cast<uint8_t>(std::lround((v + 1.0f) * 0.5f * 255.0f));
      }
  return im;
}

nn::Tensor face_to_tensor(const FaceFrame& f) {
  return nn::Tensor::from_data({3, FaceFrame::kSize, FaceFrame::kSize}, f.chw);
}

FaceFrame tensor_to_face(const nn::Tensor& t, const IntRect& box, int frame_index) {
  TG_CHECK_ARG(t.numel() == 3 * FaceFrame::kSize * FaceFrame::kSize,
               "tensor_to_face: wrong element count");
  FaceFrame f;
  f.chw.assign(t.data(), t.data() + t.numel());
  f.crop_box = box;
  f.frame_index = frame_index;
  clamp_face(f);
  return f;
}

nn::Tensor faces_to_batch(const std::vector<FaceFrame>& fs) {
  TG_CHECK_ARG(!fs.empty(), "faces_to_batch: empty list");
  const int64_t per = 3 * FaceFrame::kSize * FaceFrame::kSize;
  std::vector<float> data(static_cast<size_t>(per) * fs.size());
  for (size_t i = 0; i < fs.size(); ++i)
    std::copy(fs[i].chw.begin(), fs[i].chw.end(), data.begin() + static_cast<int64_t>(i) * per);
  return nn::Tensor::from_data(
      {static_cast<int64_t>(fs.size()), 3, FaceFrame::kSize, FaceFrame::kSize}, std::move(data));
}

void clamp_face(FaceFrame& f) {
  for (auto& v : f.chw) v = std::clamp(v, -1.0f, 1.0f);
}

}  // namespace talkgen::data

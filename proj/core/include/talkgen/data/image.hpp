#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "talkgen/common.hpp"
#include "talkgen/nn/tensor.hpp"

namespace talkgen::data {

struct IntRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

// Interleaved 8-bit RGB image.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;

  static Image8 create(int w, int h, uint8_t fill = 0) {
    Image8 im;
    im.width = w;
    im.height = h;
    im.rgb.assign(static_cast<size_t>(w) * h * 3, fill);
    return im;
  }
  uint8_t* px(int x, int y) { return rgb.data() + (static_cast<size_t>(y) * width + x) * 3; }
  const uint8_t* px(int x, int y) const {
    return rgb.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
};

// 128x128 face crop in [-1,1], planar CHW, plus paste-back metadata.
struct FaceFrame {
  static constexpr int kSize = 128;
  std::vector<float> chw = std::vector<float>(3 * kSize * kSize, 0.0f);
  IntRect crop_box;
  int frame_index = 0;

  float& at(int c, int y, int x) { return chw[static_cast<size_t>((c * kSize + y) * kSize + x)]; }
  float at(int c, int y, int x) const {
    return chw[static_cast<size_t>((c * kSize + y) * kSize + x)];
  }
};

// PPM (P6) frame I/O; frames are named frame_%06d.<ext> inside a directory.
void write_ppm(const std::string& path, const Image8& im);
Image8 read_ppm(const std::string& path);
std::string frame_filename(int index);
void write_frame(const std::string& dir, int index, const Image8& im);
Image8 read_frame(const std::string& dir, int index);
int count_frames(const std::string& dir);

// Bilinear resize with half-pixel-center sampling.
Image8 resize_bilinear(const Image8& src, int out_w, int out_h);

// u8 <-> [-1,1] float conversions.
FaceFrame to_face_frame(const Image8& crop, const IntRect& box, int frame_index);
Image8 to_image8(const FaceFrame& f);

nn::Tensor face_to_tensor(const FaceFrame& f);             // [3,128,128]
FaceFrame tensor_to_face(const nn::Tensor& t, const IntRect& box, int frame_index);
nn::Tensor faces_to_batch(const std::vector<FaceFrame>& fs);  // [N,3,128,128]

// Clamps every value into [-1,1].
void clamp_face(FaceFrame& f);

}  // namespace talkgen::data

#include "talkgen/data/crop.hpp"

#include <algorithm>
#include <cmath>

namespace talkgen::data {

FaceFrame crop_face(const Image8& frame, const IntRect& bbox, int frame_index) {
  TG_CHECK_ARG(bbox.w > 0 && bbox.h > 0, "crop_face: degenerate bbox");
  IntRect r = bbox;
  r.h += static_cast<int>(std::lround(kBottomMargin * bbox.h));
  // Clip at the frame edges.
  const int x0 = std::clamp(r.x, 0, frame.width);
  const int y0 = std::clamp(r.y, 0, frame.height);
  const int x1 = std::clamp(r.x + r.w, 0, frame.width);
  const int y1 = std::clamp(r.y + r.h, 0, frame.height);
  TG_CHECK_ARG(x1 > x0 && y1 > y0, "crop_face: bbox outside frame");
  IntRect clipped{x0, y0, x1 - x0, y1 - y0};

  Image8 region = Image8::create(clipped.w, clipped.h);
  for (int y = 0; y < clipped.h; ++y)
    for (int x = 0; x < clipped.w; ++x)
      for (int c = 0; c < 3; ++c)
        region.px(x, y)[c] = frame.px(clipped.x + x, clipped.y + y)[c];

  const Image8 resized = resize_bilinear(region, FaceFrame::kSize, FaceFrame::kSize);
  return to_face_frame(resized, clipped, frame_index);
}

Image8 paste_back(const Image8& frame, const FaceFrame& face) {
  const IntRect& r = face.crop_box;
  TG_CHECK_ARG(r.w > 0 && r.h > 0, "paste_back: degenerate crop box");
  TG_CHECK_ARG(r.x >= 0 && r.y >= 0 && r.x + r.w <= frame.width && r.y + r.h <= frame.height,
               "paste_back: crop box outside frame");
  Image8 out = frame;
  const Image8 face8 = to_image8(face);
  const Image8 resized = resize_bilinear(face8, r.w, r.h);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x)
      for (int c = 0; c < 3; ++c)
        out.px(r.x + x, r.y + y)[c] = resized.px(x, y)[c];
  return out;
}

}  // namespace talkgen::data

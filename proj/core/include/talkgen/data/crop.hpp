#pragma once

#include "talkgen/data/image.hpp"

namespace talkgen::data {

inline constexpr double kBottomMargin = 0.10;

// Extends the detector bbox downward by 10% of its height, clips to the
// frame, and resizes the region to 128x128. Crop metadata is retained for
// paste-back.
FaceFrame crop_face(const Image8& frame, const IntRect& bbox, int frame_index = 0);

// Resizes the face back to its crop rect and writes it into a copy of the
// frame. Pixels outside the crop rect are preserved bit-exactly.
Image8 paste_back(const Image8& frame, const FaceFrame& face);

}  // namespace talkgen::data

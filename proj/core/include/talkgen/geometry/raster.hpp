#pragma once

#include <cstdint>
#include <vector>

#include "talkgen/geometry/landmarks.hpp"

namespace talkgen::geometry {

inline constexpr int kMapSize = 128;

// 3-channel binary raster, planar layout [channel][y][x], values {0, 255}.
// ch0 = lip polylines, ch1 = jaw polyline, ch2 = pose polylines.
struct LandmarkMap {
  std::vector<uint8_t> pixels = std::vector<uint8_t>(3 * kMapSize * kMapSize, 0);

  uint8_t at(int ch, int y, int x) const {
    return pixels[static_cast<size_t>((ch * kMapSize + y) * kMapSize + x)];
  }
  void set(int ch, int y, int x) {
    pixels[static_cast<size_t>((ch * kMapSize + y) * kMapSize + x)] = 255;
  }
  bool operator==(const LandmarkMap& o) const { return pixels == o.pixels; }
};

// Deterministic width-1 Bresenham rasterization of the layout's polylines.
LandmarkMap render_landmark_map(const LandmarkSet& ls);

// Integer line segment; exposed for tests.
void draw_line(LandmarkMap& map, int ch, int x0, int y0, int x1, int y1);

}  // namespace talkgen::geometry

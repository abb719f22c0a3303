#include "talkgen/geometry/raster.hpp"

#include <cmath>

namespace talkgen::geometry {

namespace {

struct Polyline {
  int first;  // position within the partition group
  int count;
  bool closed;
};

// Rendering connectivity of LANDMARK_LAYOUT_V1, positions local to each group.
constexpr Polyline kLipLines[] = {
    {0, 19, true},    // outer ring
    {19, 11, false},  // inner upper
    {30, 11, false},  // inner lower
};
constexpr Polyline kJawLines[] = {
    {0, 16, false},
};
constexpr Polyline kPoseLines[] = {
    {0, 17, false},   // upper face arc
    {17, 8, true},    // left eye
    {25, 8, true},    // right eye
    {33, 6, false},   // left brow
    {39, 6, false},   // right brow
    {45, 4, false},   // nose bridge
    {49, 5, false},   // nose base
    {54, 5, false},   // left cheek
    {59, 5, false},   // right cheek
    {64, 10, false},  // forehead row
};

int to_px(double v) {
  const int p = static_cast<int>(std::lround(v * (kMapSize - 1)));
  return std::clamp(p, 0, kMapSize - 1);
}

template <size_t G, size_t N>
void draw_group(LandmarkMap& map, int ch, const LandmarkSet& ls,
                const std::array<int, G>& group, const Polyline (&lines)[N]) {
  for (const auto& line : lines) {
    for (int i = 0; i + 1 < line.count; ++i) {
      const Point& a = ls[group[static_cast<size_t>(line.first + i)]];
      const Point& b = ls[group[static_cast<size_t>(line.first + i + 1)]];
      draw_line(map, ch, to_px(a.x), to_px(a.y), to_px(b.x), to_px(b.y));
    }
    if (line.closed && line.count > 2) {
      const Point& a = ls[group[static_cast<size_t>(line.first + line.count - 1)]];
      const Point& b = ls[group[static_cast<size_t>(line.first)]];
      draw_line(map, ch, to_px(a.x), to_px(a.y), to_px(b.x), to_px(b.y));
    }
  }
}

}  // namespace

void draw_line(LandmarkMap& map, int ch, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    map.set(ch, y0, x0);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

LandmarkMap render_landmark_map(const LandmarkSet& ls) {
  LandmarkMap map;
  draw_group(map, 0, ls, ls.partition().lip, kLipLines);
  draw_group(map, 1, ls, ls.partition().jaw, kJawLines);
  draw_group(map, 2, ls, ls.partition().pose, kPoseLines);
  return map;
}

}  // namespace talkgen::geometry

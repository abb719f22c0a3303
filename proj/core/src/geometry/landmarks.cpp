#include "talkgen/geometry/landmarks.hpp"

#include <algorithm>
#include <cmath>

namespace talkgen::geometry {

void Partition::validate() const {
  std::array<int, kNumPoints> seen{};
  seen.fill(0);
  auto mark = [&seen](int idx) {
    TG_CHECK_ARG(idx >= 0 && idx < kNumPoints, "partition index out of range: ", idx);
    TG_CHECK_ARG(seen[static_cast<size_t>(idx)] == 0, "partition index repeated: ", idx);
    seen[static_cast<size_t>(idx)] = 1;
  };
  for (int i : lip) mark(i);
  for (int i : jaw) mark(i);
  for (int i : pose) mark(i);
}

const Partition& Partition::layout_v1() {
  static const Partition p = [] {
    Partition q;
    for (int i = 0; i < kNumLip; ++i) q.lip[static_cast<size_t>(i)] = i;
    for (int i = 0; i < kNumJaw; ++i) q.jaw[static_cast<size_t>(i)] = kNumLip + i;
    for (int i = 0; i < kNumPose; ++i) q.pose[static_cast<size_t>(i)] = kNumLip + kNumJaw + i;
    q.validate();
    return q;
  }();
  return p;
}

LandmarkSet::LandmarkSet(std::vector<Point> points, const Partition& partition)
    : points_(std::move(points)), partition_(partition) {
  TG_CHECK_ARG(points_.size() == kNumPoints, "LandmarkSet: expected ", kNumPoints,
               " points, got ", points_.size());
  partition_.validate();
  for (size_t i = 0; i < points_.size(); ++i) {
    const Point& p = points_[i];
    TG_CHECK_ARG(std::isfinite(p.x) && std::isfinite(p.y),
                 "LandmarkSet: non-finite coordinate at index ", i);
    TG_CHECK_ARG(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0,
                 "LandmarkSet: coordinate outside [0,1] at index ", i, ": (", p.x,
                 ", ", p.y, ")");
  }
}

bool LandmarkSet::operator==(const LandmarkSet& other) const {
  for (int i = 0; i < kNumPoints; ++i)
    if (points_[static_cast<size_t>(i)].x != other.points_[static_cast<size_t>(i)].x ||
        points_[static_cast<size_t>(i)].y != other.points_[static_cast<size_t>(i)].y)
      return false;
  return true;
}

SplitLandmarks split_landmarks(const LandmarkSet& ls) {
  SplitLandmarks out;
  out.lip.reserve(kNumLip);
  out.jaw.reserve(kNumJaw);
  out.pose.reserve(kNumPose);
  for (int i : ls.partition().lip) out.lip.push_back(ls[i]);
  for (int i : ls.partition().jaw) out.jaw.push_back(ls[i]);
  for (int i : ls.partition().pose) out.pose.push_back(ls[i]);
  return out;
}

LandmarkSet merge_landmarks(const std::vector<Point>& lip, const std::vector<Point>& jaw,
                            const std::vector<Point>& pose, const Partition& partition) {
  TG_CHECK_ARG(lip.size() == kNumLip && jaw.size() == kNumJaw && pose.size() == kNumPose,
               "merge_landmarks: group sizes must be ", kNumLip, "/", kNumJaw, "/", kNumPose);
  std::vector<Point> pts(kNumPoints);
  for (int i = 0; i < kNumLip; ++i) pts[static_cast<size_t>(partition.lip[static_cast<size_t>(i)])] = lip[static_cast<size_t>(i)];
  for (int i = 0; i < kNumJaw; ++i) pts[static_cast<size_t>(partition.jaw[static_cast<size_t>(i)])] = jaw[static_cast<size_t>(i)];
  for (int i = 0; i < kNumPose; ++i) pts[static_cast<size_t>(partition.pose[static_cast<size_t>(i)])] = pose[static_cast<size_t>(i)];
  return LandmarkSet(std::move(pts), partition);
}

LandmarkSet normalize_landmarks(const std::vector<Point>& points_px, const CropRect& box,
                                const Partition& partition) {
  TG_CHECK_ARG(box.width > 0.0 && box.height > 0.0, "normalize_landmarks: degenerate crop box");
  TG_CHECK_ARG(points_px.size() == kNumPoints, "normalize_landmarks: expected ", kNumPoints,
               " points, got ", points_px.size());
  std::vector<Point> out(kNumPoints);
  for (size_t i = 0; i < points_px.size(); ++i) {
    const double nx = (points_px[i].x - box.left) / box.width;
    const double ny = (points_px[i].y - box.top) / box.height;
    TG_CHECK_ARG(nx >= -0.05 && nx <= 1.05 && ny >= -0.05 && ny <= 1.05,
                 "normalize_landmarks: point ", i, " lies more than 5% outside the crop box");
    out[i].x = std::clamp(nx, 0.0, 1.0);
    out[i].y = std::clamp(ny, 0.0, 1.0);
  }
  return LandmarkSet(std::move(out), partition);
}

std::vector<Point> denormalize_landmarks(const LandmarkSet& ls, const CropRect& box) {
  TG_CHECK_ARG(box.width > 0.0 && box.height > 0.0, "denormalize_landmarks: degenerate crop box");
  std::vector<Point> out(kNumPoints);
  for (int i = 0; i < kNumPoints; ++i) {
    out[static_cast<size_t>(i)].x = box.left + ls[i].x * box.width;
    out[static_cast<size_t>(i)].y = box.top + ls[i].y * box.height;
  }
  return out;
}

double mouth_aperture(const LandmarkSet& ls) {
  double gap = 0.0;
  for (size_t k = 0; k < kApertureUpper.size(); ++k)
    gap += ls[kApertureLower[k]].y - ls[kApertureUpper[k]].y;
  gap /= static_cast<double>(kApertureUpper.size());
  return std::max(0.0, gap);
}

MouthState label_mouth_state(const LandmarkSet& ls, double tau) {
  TG_CHECK_ARG(tau > 0.0, "label_mouth_state: tau must be positive");
  return mouth_aperture(ls) <= tau ? MouthState::kClosed : MouthState::kOpen;
}

}  // namespace talkgen::geometry

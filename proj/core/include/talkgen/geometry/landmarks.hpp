#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "talkgen/common.hpp"

namespace talkgen::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct CropRect {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;
};

inline constexpr int kNumPoints = 131;
inline constexpr int kNumLip = 41;
inline constexpr int kNumJaw = 16;
inline constexpr int kNumPose = 74;

// Index partition of the 131-point layout. The default is LANDMARK_LAYOUT_V1
// (see layout_v1()); any disjoint cover of {0..130} with the same group sizes
// is accepted.
struct Partition {
  std::array<int, kNumLip> lip{};
  std::array<int, kNumJaw> jaw{};
  std::array<int, kNumPose> pose{};

  void validate() const;
  static const Partition& layout_v1();
};

// LANDMARK_LAYOUT_V1, the repo's fixed point convention:
//   0..18    outer lip ring (closed loop)
//   19..29   inner upper lip, left to right
//   30..40   inner lower lip, left to right (same columns as upper)
//   41..56   jawline, left ear to right ear
//   57..73   upper face arc
//   74..81   left eye (loop), 82..89 right eye (loop)
//   90..95   left brow, 96..101 right brow
//   102..105 nose bridge, 106..110 nose base
//   111..115 left cheek, 116..120 right cheek
//   121..130 forehead row
inline constexpr int kInnerUpperBegin = 19;
inline constexpr int kInnerLowerBegin = 30;
inline constexpr int kInnerColumns = 11;
// Central upper/lower inner-lip pairs used for the mouth aperture.
inline constexpr std::array<int, 3> kApertureUpper = {23, 24, 25};
inline constexpr std::array<int, 3> kApertureLower = {34, 35, 36};
// Single center points used for the vertical lip-center distance.
inline constexpr int kUpperLipCenter = 24;
inline constexpr int kLowerLipCenter = 35;

// One frame's landmarks in normalized crop coordinates, both in [0,1].
class LandmarkSet {
 public:
  LandmarkSet(std::vector<Point> points, const Partition& partition = Partition::layout_v1());

  const std::vector<Point>& points() const { return points_; }
  const Partition& partition() const { return partition_; }
  const Point& operator[](int i) const { return points_[static_cast<size_t>(i)]; }

  bool operator==(const LandmarkSet& other) const;

 private:
  std::vector<Point> points_;
  Partition partition_;
};

struct SplitLandmarks {
  std::vector<Point> lip;   // 41
  std::vector<Point> jaw;   // 16
  std::vector<Point> pose;  // 74
};

SplitLandmarks split_landmarks(const LandmarkSet& ls);

// Inverse of split_landmarks under the same partition.
LandmarkSet merge_landmarks(const std::vector<Point>& lip, const std::vector<Point>& jaw,
                            const std::vector<Point>& pose,
                            const Partition& partition = Partition::layout_v1());

// Pixel coordinates -> normalized crop coordinates. Points up to 5% of the
// box extent outside are clamped to the boundary; farther out is an error.
LandmarkSet normalize_landmarks(const std::vector<Point>& points_px, const CropRect& crop_box,
                                const Partition& partition = Partition::layout_v1());

std::vector<Point> denormalize_landmarks(const LandmarkSet& ls, const CropRect& crop_box);

// Mean vertical gap over the central inner-lip pairs, in normalized units.
double mouth_aperture(const LandmarkSet& ls);

enum class MouthState { kOpen, kClosed };

MouthState label_mouth_state(const LandmarkSet& ls, double tau);

inline constexpr double kDefaultApertureTau = 0.015;

}  // namespace talkgen::geometry

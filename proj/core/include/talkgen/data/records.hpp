#pragma once

#include <string>
#include <vector>

#include "talkgen/data/image.hpp"
#include "talkgen/geometry/landmarks.hpp"

namespace talkgen::data {

// One ingestion record: detector output for one video frame, in full-frame
// pixel coordinates. Serialized as one JSON object per line:
//   {"frame":0,"box":[left,top,width,height],"pts":[x0,y0,...,x130,y130]}
struct LandmarkRecord {
  int frame_index = 0;
  geometry::CropRect box;
  std::vector<geometry::Point> points_px;  // 131 points
};

void write_landmark_records(const std::string& path, const std::vector<LandmarkRecord>& records);
std::vector<LandmarkRecord> read_landmark_records(const std::string& path);

}  // namespace talkgen::data

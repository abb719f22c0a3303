#include "talkgen/data/records.hpp"

#include <fstream>
#include <json.hpp>

namespace talkgen::data {

using nlohmann::json;

void write_landmark_records(const std::string& path,
                            const std::vector<LandmarkRecord>& records) {
  std::ofstream os(path, std::ios::trunc);
  TG_CHECK(os.good(), "write_landmark_records: cannot open ", path);
  for (const auto& r : records) {
    TG_CHECK_ARG(r.points_px.size() == geometry::kNumPoints,
                 "write_landmark_records: record needs ", geometry::kNumPoints, " points");
    json j;
    j["frame"] = r.frame_index;
    j["box"] = {r.box.left, r.box.top, r.box.width, r.box.height};
    json pts = json::array();
    for (const auto& p : r.points_px) {
      pts.push_back(p.x);
      pts.push_back(p.y);
    }
    j["pts"] = std::move(pts);
    os << j.dump() << "\n";
  }
  TG_CHECK(os.good(), "write_landmark_records: write failed ", path);
}

std::vector<LandmarkRecord> read_landmark_records(const std::string& path) {
  std::ifstream is(path);
  TG_CHECK(is.good(), "read_landmark_records: cannot open ", path);
  std::vector<LandmarkRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    TG_CHECK(!j.is_discarded(), "read_landmark_records: bad JSON at ", path, ":", line_no);
    LandmarkRecord r;
    r.frame_index = j.at("frame").get<int>();
    const auto& box = j.at("box");
    TG_CHECK(box.size() == 4, "read_landmark_records: box needs 4 values at line ", line_no);
    r.box = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
             box[3].get<double>()};
    const auto& pts = j.at("pts");
    TG_CHECK(pts.size() == 2 * geometry::kNumPoints,
             "read_landmark_records: expected ", 2 * geometry::kNumPoints,
             " coordinates at line ", line_no, ", got ", pts.size());
    r.points_px.resize(geometry::kNumPoints);
    for (int i = 0; i < geometry::kNumPoints; ++i) {
      r.points_px[static_cast<size_t>(i)].x = pts[static_cast<size_t>(2 * i)].get<double>();
      r.points_px[static_cast<size_t>(i)].y = pts[static_cast<size_t>(2 * i + 1)].get<double>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace talkgen::data

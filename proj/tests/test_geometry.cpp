#include <doctest.h>

#include <cmath>

#include "talkgen/geometry/landmarks.hpp"
#include "talkgen/geometry/raster.hpp"
#include "talkgen/nn/rng.hpp"

using namespace talkgen;
using geometry::LandmarkSet;
using geometry::Partition;
using geometry::Point;

namespace {

std::vector<Point> random_points(nn::Rng& rng, double lo = 0.05, double hi = 0.95) {
  std::vector<Point> pts(geometry::kNumPoints);
  for (auto& p : pts) {
    p.x = rng.uniform(lo, hi);
    p.y = rng.uniform(lo, hi);
  }
  return pts;
}

// Landmarks with a controlled aperture: central inner-lip pairs separated
// vertically by `gap`.
LandmarkSet aperture_set(double gap) {
  std::vector<Point> pts(geometry::kNumPoints, Point{0.5, 0.5});
  for (int i = 0; i < geometry::kInnerColumns; ++i) {
    pts[static_cast<size_t>(geometry::kInnerUpperBegin + i)] = {0.3 + 0.04 * i, 0.70};
    pts[static_cast<size_t>(geometry::kInnerLowerBegin + i)] = {0.3 + 0.04 * i, 0.70 + gap};
  }
  return LandmarkSet(std::move(pts));
}

}  // namespace

TEST_CASE("partition layout is a disjoint cover with the right sizes") {
  const Partition& p = Partition::layout_v1();
  p.validate();
  CHECK(p.lip.size() + p.jaw.size() + p.pose.size() == geometry::kNumPoints);
}

TEST_CASE("split produces 41/16/74 groups and merge restores bit-exactly") {
  nn::Rng rng(31);
  LandmarkSet ls(random_points(rng));
  const auto parts = split_landmarks(ls);
  CHECK(parts.lip.size() == 41);
  CHECK(parts.jaw.size() == 16);
  CHECK(parts.pose.size() == 74);
  const LandmarkSet merged = merge_landmarks(parts.lip, parts.jaw, parts.pose);
  CHECK(merged == ls);
}

TEST_CASE("split/merge round-trips under random partition permutations") {
  nn::Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> order(geometry::kNumPoints);
    for (int i = 0; i < geometry::kNumPoints; ++i) order[static_cast<size_t>(i)] = i;
    rng.shuffle(order);
    Partition perm;
    for (int i = 0; i < geometry::kNumLip; ++i) perm.lip[static_cast<size_t>(i)] = order[static_cast<size_t>(i)];
    for (int i = 0; i < geometry::kNumJaw; ++i)
      perm.jaw[static_cast<size_t>(i)] = order[static_cast<size_t>(geometry::kNumLip + i)];
    for (int i = 0; i < geometry::kNumPose; ++i)
      perm.pose[static_cast<size_t>(i)] =
          order[static_cast<size_t>(geometry::kNumLip + geometry::kNumJaw + i)];
    LandmarkSet ls(random_points(rng), perm);
    const auto parts = split_landmarks(ls);
    const LandmarkSet merged = merge_landmarks(parts.lip, parts.jaw, parts.pose, perm);
    CHECK(merged == ls);
  }
}

TEST_CASE("construction rejects invalid coordinates") {
  nn::Rng rng(33);
  auto pts = random_points(rng);
  pts[10].x = 1.2;
  CHECK_THROWS_AS(LandmarkSet(std::move(pts)), ArgumentError);
  auto pts2 = random_points(rng);
  pts2[3].y = std::nan("");
  CHECK_THROWS_AS(LandmarkSet(std::move(pts2)), ArgumentError);
  std::vector<Point> short_list(100, Point{0.5, 0.5});
  CHECK_THROWS_AS(LandmarkSet(std::move(short_list)), ArgumentError);
}

TEST_CASE("normalize maps box corners and center as expected") {
  nn::Rng rng(34);
  geometry::CropRect box{20.0, 40.0, 100.0, 80.0};
  auto pts = random_points(rng);
  // Pixel positions inside the box.
  std::vector<Point> px(geometry::kNumPoints);
  for (size_t i = 0; i < px.size(); ++i)
    px[i] = {box.left + pts[i].x * box.width, box.top + pts[i].y * box.height};
  px[0] = {box.left, box.top};
  px[1] = {box.left + box.width / 2.0, box.top + box.height / 2.0};
  const LandmarkSet ls = geometry::normalize_landmarks(px, box);
  CHECK(ls[0].x == doctest::Approx(0.0));
  CHECK(ls[0].y == doctest::Approx(0.0));
  CHECK(ls[1].x == doctest::Approx(0.5));
  CHECK(ls[1].y == doctest::Approx(0.5));
}

TEST_CASE("normalize/denormalize round-trip within 1e-6") {
  nn::Rng rng(35);
  geometry::CropRect box{13.5, 27.25, 111.0, 97.5};
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {  // 8 x 131 > 1000 points
    auto pts = random_points(rng);
    std::vector<Point> px(geometry::kNumPoints);
    for (size_t i = 0; i < px.size(); ++i)
      px[i] = {box.left + pts[i].x * box.width, box.top + pts[i].y * box.height};
    const LandmarkSet ls = geometry::normalize_landmarks(px, box);
    const auto back = geometry::denormalize_landmarks(ls, box);
    for (size_t i = 0; i < px.size(); ++i) {
      worst = std::max(worst, std::fabs(back[i].x - px[i].x));
      worst = std::max(worst, std::fabs(back[i].y - px[i].y));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("normalize rejects points more than 5% outside, clamps closer ones") {
  geometry::CropRect box{0.0, 0.0, 100.0, 100.0};
  std::vector<Point> px(geometry::kNumPoints, Point{50.0, 50.0});
  px[7] = {-4.9, 50.0};  // 4.9% outside: clamped
  const LandmarkSet ok = geometry::normalize_landmarks(px, box);
  CHECK(ok[7].x == 0.0);
  px[7] = {-5.1, 50.0};  // beyond tolerance
  CHECK_THROWS_AS(geometry::normalize_landmarks(px, box), ArgumentError);
  CHECK_THROWS_AS(geometry::normalize_landmarks(px, geometry::CropRect{0, 0, -1, 5}),
                  ArgumentError);
}

TEST_CASE("mouth aperture: coincident, uniform offset, open vs closed") {
  CHECK(geometry::mouth_aperture(aperture_set(0.0)) == doctest::Approx(0.0));
  CHECK(geometry::mouth_aperture(aperture_set(0.08)) == doctest::Approx(0.08));

  // Oracle: mean pairwise vertical distance computed directly.
  const LandmarkSet open_set = aperture_set(0.11);
  const LandmarkSet closed_set = aperture_set(0.004);
  double oracle_open = 0.0;
  for (size_t k = 0; k < geometry::kApertureUpper.size(); ++k)
    oracle_open += open_set[geometry::kApertureLower[k]].y -
                   open_set[geometry::kApertureUpper[k]].y;
  oracle_open /= 3.0;
  CHECK(geometry::mouth_aperture(open_set) == doctest::Approx(oracle_open));
  CHECK(geometry::mouth_aperture(open_set) > geometry::mouth_aperture(closed_set));
}

TEST_CASE("mouth state labeling matches the threshold oracle") {
  nn::Rng rng(36);
  CHECK(geometry::label_mouth_state(aperture_set(0.0), 0.01) == geometry::MouthState::kClosed);
  CHECK(geometry::label_mouth_state(aperture_set(0.1), 0.05) == geometry::MouthState::kOpen);
  CHECK_THROWS_AS(geometry::label_mouth_state(aperture_set(0.1), 0.0), ArgumentError);

  int closed_count = 0;
  for (int i = 0; i < 200; ++i) {
    const double gap = rng.uniform(0.0, 0.05);
    const double tau = 0.02;
    const auto ls = aperture_set(gap);
    const bool oracle_closed = geometry::mouth_aperture(ls) <= tau;
    const bool labeled_closed =
        geometry::label_mouth_state(ls, tau) == geometry::MouthState::kClosed;
    CHECK(oracle_closed == labeled_closed);
    closed_count += labeled_closed ? 1 : 0;
  }
  CHECK(closed_count > 0);
  CHECK(closed_count < 200);
}

TEST_CASE("labeling is monotone in aperture") {
  nn::Rng rng(37);
  for (int i = 0; i < 50; ++i) {
    const double ga = rng.uniform(0.0, 0.06), gb = rng.uniform(0.0, 0.06);
    const double tau = rng.uniform(0.005, 0.05);
    const auto a = aperture_set(std::min(ga, gb));
    const auto b = aperture_set(std::max(ga, gb));
    if (geometry::label_mouth_state(b, tau) == geometry::MouthState::kClosed)
      CHECK(geometry::label_mouth_state(a, tau) == geometry::MouthState::kClosed);
  }
}

TEST_CASE("degenerate landmark set renders one lit pixel per channel") {
  std::vector<Point> pts(geometry::kNumPoints, Point{0.5, 0.5});
  const auto map = geometry::render_landmark_map(LandmarkSet(std::move(pts)));
  for (int ch = 0; ch < 3; ++ch) {
    int lit = 0;
    for (int y = 0; y < geometry::kMapSize; ++y)
      for (int x = 0; x < geometry::kMapSize; ++x)
        if (map.at(ch, y, x) != 0) {
          ++lit;
          CHECK(x == 64);
          CHECK(y == 64);
          CHECK(map.at(ch, y, x) == 255);
        }
    CHECK(lit == 1);
  }
}

TEST_CASE("rendering is deterministic and channel-separated") {
  nn::Rng rng(38);
  const LandmarkSet ls(random_points(rng));
  const auto a = geometry::render_landmark_map(ls);
  const auto b = geometry::render_landmark_map(ls);
  CHECK(a == b);

  // Lip-only modification must change ch0 only.
  auto parts = split_landmarks(ls);
  for (auto& p : parts.lip) p.y = std::min(0.99, p.y + 0.07);
  const LandmarkSet moved = merge_landmarks(parts.lip, parts.jaw, parts.pose);
  const auto c = geometry::render_landmark_map(moved);
  bool ch0_changed = false;
  for (int y = 0; y < geometry::kMapSize; ++y)
    for (int x = 0; x < geometry::kMapSize; ++x) {
      if (c.at(0, y, x) != a.at(0, y, x)) ch0_changed = true;
      CHECK(c.at(1, y, x) == a.at(1, y, x));
      CHECK(c.at(2, y, x) == a.at(2, y, x));
    }
  CHECK(ch0_changed);
}

TEST_CASE("rendered values are binary") {
  nn::Rng rng(39);
  const auto map = geometry::render_landmark_map(LandmarkSet(random_points(rng)));
  for (uint8_t v : map.pixels) CHECK((v == 0 || v == 255));
}

#include <benchmark/benchmark.h>

#include "talkgen/data/mel.hpp"
#include "talkgen/geometry/raster.hpp"
#include "talkgen/nn/ops.hpp"
#include "talkgen/nn/rng.hpp"

using namespace talkgen;

namespace {

nn::Tensor randn(nn::Shape s, uint64_t seed, bool rg = false) {
  nn::Rng rng(seed);
  std::vector<float> d(static_cast<size_t>(nn::shape_numel(s)));
  for (auto& v : d) v = static_cast<float>(rng.normal());
  return nn::Tensor::from_data(std::move(s), std::move(d), rg);
}

void Conv2dForward(benchmark::State& state) {
  const int64_t c = state.range(0);
  nn::Tensor x = randn({1, c, 32, 32}, 1);
  nn::Tensor w = randn({c, c, 3, 3}, 2);
  nn::Tensor b = randn({c}, 3);
  for (auto _ : state) {
    auto y = nn::conv2d(x, w, b, 1, 1);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * c * c * 9 * 32 * 32);
}
BENCHMARK(Conv2dForward)->Arg(64)->Arg(128)->Arg(256);

void Conv2dTrainStep(benchmark::State& state) {
  nn::Tensor x = randn({1, 64, 64, 64}, 1);
  nn::Tensor w = randn({64, 64, 3, 3}, 2, true);
  nn::Tensor b = randn({64}, 3, true);
  for (auto _ : state) {
    w.zero_grad();
    b.zero_grad();
    auto loss = nn::mean_all(nn::abs(nn::conv2d(x, w, b, 1, 1)));
    loss.backward();
    benchmark::DoNotOptimize(loss.item());
  }
}
BENCHMARK(Conv2dTrainStep);

void MelExtraction(benchmark::State& state) {
  std::vector<float> audio(16000, 0.0f);
  for (size_t i = 0; i < audio.size(); ++i)
    audio[i] = 0.3f * std::sin(2.0 * M_PI * 220.0 * static_cast<double>(i) / 16000.0);
  for (auto _ : state) {
    auto chunks = data::extract_mels(audio, 20);
    benchmark::DoNotOptimize(chunks.data());
  }
}
BENCHMARK(MelExtraction);

void RenderLandmarkMap(benchmark::State& state) {
  nn::Rng rng(9);
  std::vector<geometry::Point> pts(geometry::kNumPoints);
  for (auto& p : pts) p = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
  geometry::LandmarkSet ls(pts);
  for (auto _ : state) {
    auto map = geometry::render_landmark_map(ls);
    benchmark::DoNotOptimize(map.pixels.data());
  }
}
BENCHMARK(RenderLandmarkMap);

}  // namespace

BENCHMARK_MAIN();

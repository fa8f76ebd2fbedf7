#include <benchmark/benchmark.h>

#include "nirfuse/fusion.hpp"
#include "nirfuse/jblf.hpp"
#include "nirfuse/metrics.hpp"
#include "nirfuse/noise_model.hpp"
#include "nirfuse/rtv.hpp"
#include "nirfuse/synthetic.hpp"

namespace {

using namespace nirfuse;

ImagePlanar test_plane(int side, std::uint64_t seed) {
  ImagePlanar img = synthetic::random_clean_plane(side, side, seed);
  return add_gaussian_noise(img, 0.02, seed + 7);
}

void BM_RtvSmooth(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ImagePlanar img = test_plane(side, 11);
  RtvParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rtv_smooth(img, params));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_RtvSmooth)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Jblf(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ImagePlanar img = test_plane(side, 23);
  const ImagePlanar guide = local_variance(img, 3);
  JblfParams params;
  params.s = 5.0;
  params.radius = jblf_radius_for_scale(params.s, 15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(joint_bilateral_threshold(img, guide, params));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Jblf)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LocalVariance(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ImagePlanar img = test_plane(side, 37);
  for (auto _ : state) {
    benchmark::DoNotOptimize(local_variance(img, 3));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_LocalVariance)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ImagePlanar a = test_plane(side, 41);
  const ImagePlanar b = test_plane(side, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssim(a, b));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Ssim)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_FuseEndToEnd(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ImagePlanar luma = test_plane(side, 51);
  ImagePlanar rgb(side, side, 3);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < luma.plane_size(); ++i) {
      rgb.plane(c)[i] = luma.data()[i] * (0.7 + 0.1 * c);
    }
  }
  const ImagePlanar nir = test_plane(side, 52);
  const NoiseModel& model = builtin_model();
  const FusionConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuse(rgb, nir, model, config));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_FuseEndToEnd)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

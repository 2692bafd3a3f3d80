// Serial reference kernels against their OpenMP counterparts on a synthetic
// network image. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>

#include "netgrab/distance.hpp"
#include "netgrab/preprocess.hpp"
#include "netgrab/segment.hpp"
#include "netgrab/thinning.hpp"
#include "synthetic.hpp"

using namespace netgrab;

namespace {

const GrayImage& gray_input(int side) {
  static std::map<int, GrayImage> cache;
  auto it = cache.find(side);
  if (it == cache.end()) {
    const RgbImage rgb = testsupport::render_network(side * 3 / 2, side, 11, 90);
    it = cache.emplace(side, gaussian_blur(to_grayscale(rgb), 5)).first;
  }
  return it->second;
}

const BinaryImage& mask_input(int side) {
  static std::map<int, BinaryImage> cache;
  auto it = cache.find(side);
  if (it == cache.end()) it = cache.emplace(side, otsu_threshold(gray_input(side), Side::Below).mask).first;
  return it->second;
}

void set_pixels(benchmark::State& state, const Plane<std::uint8_t>& img) {
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.width()) * img.height());
}

template <typename Fn>
void bm_mask(benchmark::State& state, Fn fn) {
  const BinaryImage& mask = mask_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fn(mask));
  set_pixels(state, mask);
}

template <typename Fn>
void bm_blur(benchmark::State& state, Fn fn) {
  const GrayImage& gray = gray_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fn(gray, 5));
  set_pixels(state, gray);
}

template <typename Fn>
void bm_adaptive(benchmark::State& state, Fn fn) {
  const GrayImage& gray = gray_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fn(gray, 41, 5, Side::Below));
  set_pixels(state, gray);
}

DistanceField (*const edt_parallel)(const BinaryImage&) = &distance_transform;
DistanceField (*const edt_serial)(const BinaryImage&) = &serial::distance_transform;
Skeleton (*const thin_parallel)(const BinaryImage&) = &guo_hall_thin;
Skeleton (*const thin_serial)(const BinaryImage&) = &serial::guo_hall_thin;
GrayImage (*const gauss_parallel)(const GrayImage&, int) = &gaussian_blur;
GrayImage (*const gauss_serial)(const GrayImage&, int) = &serial::gaussian_blur;
GrayImage (*const median_parallel)(const GrayImage&, int) = &median_blur;
GrayImage (*const median_serial)(const GrayImage&, int) = &serial::median_blur;
SegmentationResult (*const adaptive_parallel)(const GrayImage&, int, int, Side) = &adaptive_mean_threshold;
SegmentationResult (*const adaptive_serial)(const GrayImage&, int, int, Side) = &serial::adaptive_mean_threshold;

}  // namespace

#define SIZES ->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond)

BENCHMARK_CAPTURE(bm_mask, distance_transform/serial, edt_serial) SIZES;
BENCHMARK_CAPTURE(bm_mask, distance_transform/parallel, edt_parallel) SIZES;
BENCHMARK_CAPTURE(bm_mask, guo_hall_thin/serial, thin_serial) SIZES;
BENCHMARK_CAPTURE(bm_mask, guo_hall_thin/parallel, thin_parallel) SIZES;
BENCHMARK_CAPTURE(bm_blur, gaussian_blur/serial, gauss_serial) SIZES;
BENCHMARK_CAPTURE(bm_blur, gaussian_blur/parallel, gauss_parallel) SIZES;
BENCHMARK_CAPTURE(bm_blur, median_blur/serial, median_serial) SIZES;
BENCHMARK_CAPTURE(bm_blur, median_blur/parallel, median_parallel) SIZES;
BENCHMARK_CAPTURE(bm_adaptive, adaptive_mean_threshold/serial, adaptive_serial) SIZES;
BENCHMARK_CAPTURE(bm_adaptive, adaptive_mean_threshold/parallel, adaptive_parallel) SIZES;

BENCHMARK_MAIN();

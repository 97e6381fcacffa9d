// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "hazealign/channel_stats.hpp"
#include "hazealign/gamma.hpp"
#include "hazealign/metrics.hpp"

using namespace hazealign;

namespace {

ImageBuffer noise(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ImageBuffer img(w, h);
    for (Rgb& p : img.pixels()) {
        for (auto& v : p) v = static_cast<std::uint8_t>(rng() & 0xff);
    }
    return img;
}

const ImageBuffer& frame() {
    static const ImageBuffer img = noise(1600, 1200, 1);
    return img;
}

const std::vector<ImageBuffer>& frames() {
    static const std::vector<ImageBuffer> imgs = [] {
        std::vector<ImageBuffer> v;
        for (int i = 0; i < 8; ++i) v.push_back(noise(800, 600, 10 + static_cast<std::uint64_t>(i)));
        return v;
    }();
    return imgs;
}

void set_pixels(benchmark::State& state, std::int64_t per_iteration) {
    state.SetItemsProcessed(state.iterations() * per_iteration);
}

void BM_histogram_parallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(histogram_of(frame()));
    set_pixels(state, static_cast<std::int64_t>(frame().pixel_count()));
}

void BM_histogram_serial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(histogram_of_serial(frame()));
    set_pixels(state, static_cast<std::int64_t>(frame().pixel_count()));
}

void BM_channel_stats_parallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(channel_stats(frames()));
}

void BM_channel_stats_serial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(channel_stats_serial(frames()));
}

const GammaTriple kGammas{1.7, 1.2, 0.8};

void BM_gamma_apply_parallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(gamma_apply(frame(), kGammas));
    set_pixels(state, static_cast<std::int64_t>(frame().pixel_count()));
}

void BM_gamma_apply_serial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(gamma_apply_serial(frame(), kGammas));
    set_pixels(state, static_cast<std::int64_t>(frame().pixel_count()));
}

void BM_ssim_parallel(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const Plane a = channel_plane(noise(side, side, 2), Channel::G);
    const Plane b = channel_plane(noise(side, side, 3), Channel::G);
    for (auto _ : state) benchmark::DoNotOptimize(ssim_components(a, b, {}));
}

void BM_ssim_reference(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const Plane a = channel_plane(noise(side, side, 2), Channel::G);
    const Plane b = channel_plane(noise(side, side, 3), Channel::G);
    for (auto _ : state) benchmark::DoNotOptimize(ssim_components_reference(a, b, {}));
}

}  // namespace

BENCHMARK(BM_histogram_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_histogram_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_channel_stats_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_channel_stats_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_gamma_apply_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_gamma_apply_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ssim_parallel)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ssim_reference)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
    frame();
    frames();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

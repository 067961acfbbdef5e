// Serial reference kernels against their OpenMP counterparts.
#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "pupil/candidate_selection.hpp"
#include "pupil/roi_detector.hpp"
#include "pupil/synth_eval.hpp"

using namespace pupil;

namespace {

const GrayImage& frame()
{
    static const GrayImage img = render(random_visible_scene(2024)).image;
    return img;
}

const GrayImage& smoothed()
{
    static const GrayImage img = gaussian_smooth(frame(), 1.0);
    return img;
}

const IntegralImage& integral()
{
    static const IntegralImage ii(frame());
    return ii;
}

// n arcs of equal angular span around one ellipse
std::vector<EllipticalArc> ring_arcs(int n)
{
    const EllipseParams e{200, 180, 80, 65, 0.4};
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    std::vector<EllipticalArc> arcs(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        auto& px = arcs[static_cast<std::size_t>(k)].pixels;
        for (int i = 0; i < 40; ++i) {
            const double t = 2.0 * std::numbers::pi * (k + i / 40.0 * 0.8) / n;
            const double x = e.a * std::cos(t), y = e.b * std::sin(t);
            const Point p{static_cast<int>(std::lround(e.cx + x * c - y * s)), static_cast<int>(std::lround(e.cy + x * s + y * c))};
            if (px.empty() || !(px.back() == p))
                px.push_back(p);
        }
    }
    return arcs;
}

void BM_smooth_serial(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(serial::gaussian_smooth(frame(), 1.0));
}
void BM_smooth_omp(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(gaussian_smooth(frame(), 1.0));
}

void BM_gradients_serial(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(serial::compute_gradients(smoothed()));
}
void BM_gradients_omp(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(compute_gradients(smoothed()));
}

void BM_roi_serial(benchmark::State& st)
{
    const RoiConfig cfg;
    for (auto _ : st)
        benchmark::DoNotOptimize(serial::detect_roi(integral(), cfg));
}
void BM_roi_omp(benchmark::State& st)
{
    const RoiConfig cfg;
    for (auto _ : st)
        benchmark::DoNotOptimize(detect_roi(integral(), cfg));
}

void BM_candidates_serial(benchmark::State& st)
{
    const auto arcs = ring_arcs(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(serial::generate_candidates(arcs, CandidateConfig{}));
}
void BM_candidates_omp(benchmark::State& st)
{
    const auto arcs = ring_arcs(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(generate_candidates(arcs, CandidateConfig{}));
}

const EllipseParams kA{640, 360, 120, 95, 0.3};
const EllipseParams kB{646, 357, 118, 97, 0.35};

void BM_overlap_serial(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(serial::overlap_ratio(kA, kB, 1280, 720));
}
void BM_overlap_omp(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(overlap_ratio(kA, kB, 1280, 720));
}

} // namespace

BENCHMARK(BM_smooth_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_smooth_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradients_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradients_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_roi_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_roi_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_candidates_serial)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_candidates_omp)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_overlap_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_overlap_omp)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

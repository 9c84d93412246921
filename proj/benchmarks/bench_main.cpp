#include <benchmark/benchmark.h>

#include <vector>

#include "restorex/detection_eval.hpp"
#include "restorex/gradcam.hpp"
#include "restorex/rng.hpp"
#include "restorex/tensor.hpp"

using namespace restorex;

namespace {

Tensor3 seeded_tensor(std::uint64_t seed, std::uint32_t channels, std::uint32_t height,
                      std::uint32_t width) {
    SplitMix64 rng(seed);
    Tensor3 t = make_tensor(channels, height, width);
    for (auto& v : t.data) v = static_cast<float>(rng.next_in(-1.0, 1.0));
    return t;
}

ClassMatches ranked_matches(int n) {
    SplitMix64 rng(n);
    ClassMatches matches;
    matches.class_name = "car";
    matches.gt_count = n / 2 + 1;
    for (int i = 0; i < n; ++i) {
        MatchedDetection det;
        det.image_id = "img";
        det.label = "car";
        det.score = 1.0 - static_cast<double>(i) / (n + 1);
        det.true_positive = rng.next_below(2) == 0;
        matches.detections.push_back(det);
    }
    return matches;
}

void BM_NeuronWeights(benchmark::State& state) {
    Tensor3 gradients = seeded_tensor(1, 64, 16, 16);
    for (auto _ : state) benchmark::DoNotOptimize(neuron_weights(gradients));
}
BENCHMARK(BM_NeuronWeights);

void BM_Cam(benchmark::State& state) {
    Tensor3 features = seeded_tensor(2, 64, 16, 16);
    NeuronWeights weights = neuron_weights(seeded_tensor(3, 64, 16, 16));
    for (auto _ : state) benchmark::DoNotOptimize(cam(features, weights));
}
BENCHMARK(BM_Cam);

void BM_Upsample(benchmark::State& state) {
    Tensor3 features = seeded_tensor(4, 8, 16, 16);
    HeatMap heat = normalize(cam(features, neuron_weights(seeded_tensor(5, 8, 16, 16))));
    const auto side = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(upsample(heat, side, side));
}
BENCHMARK(BM_Upsample)->Arg(128)->Arg(512);

void BM_AveragePrecision(benchmark::State& state) {
    ClassMatches matches = ranked_matches(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(average_precision(matches));
}
BENCHMARK(BM_AveragePrecision)->Arg(100)->Arg(2000);

void BM_TensorRoundTrip(benchmark::State& state) {
    Tensor3 t = seeded_tensor(6, 16, 32, 32);
    for (auto _ : state) benchmark::DoNotOptimize(parse_tensor(write_tensor(t)));
}
BENCHMARK(BM_TensorRoundTrip);

} // namespace

BENCHMARK_MAIN();

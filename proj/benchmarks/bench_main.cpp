#include <benchmark/benchmark.h>

#include "restlab/exponents.hpp"
#include "restlab/extension.hpp"
#include "restlab/fractal.hpp"
#include "restlab/wavepackets.hpp"
#include "restlab/weights.hpp"

namespace {

using namespace restlab;

void BM_extend_field(benchmark::State& state) {
    const double R = static_cast<double>(state.range(0));
    const int m = [&] {
        int g = 8;
        while (g < 8.0 * R) g *= 2;
        return g;
    }();
    auto f = profile_random(2, m, 7, 4);
    std::size_t samples = 0;
    for (auto _ : state) {
        auto field = field_on_ball(f, R, 2.0);
        samples += field.values.size();
        benchmark::DoNotOptimize(field.values.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(samples));
}
BENCHMARK(BM_extend_field)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_spherical_average(benchmark::State& state) {
    auto mu = cantor_measure(2, 2, 0.25, 6);
    const double R = static_cast<double>(state.range(0));
    for (auto _ : state) {
        double v = spherical_average(mu, R);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_spherical_average)->Arg(8)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ball_mass(benchmark::State& state) {
    auto H = SampledWeight::uniform(2, 32, 0.25, 1.0);
    std::vector<double> center{3.0, -5.0};
    for (auto _ : state) {
        double v = H.ball_mass(center, static_cast<double>(state.range(0)));
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_ball_mass)->Arg(2)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_decompose(benchmark::State& state) {
    const double R = static_cast<double>(state.range(0));
    const int m = [&] {
        int g = 8;
        while (g < 8.0 * R) g *= 2;
        return g;
    }();
    auto f = profile_random(2, m, 11, 5);
    for (auto _ : state) {
        auto dec = decompose(f, R, 0.3);
        benchmark::DoNotOptimize(dec.packets.data());
    }
}
BENCHMARK(BM_decompose)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_beta_lower(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    for (auto _ : state) {
        for (int i = 1; i <= 100; ++i) {
            auto b = exponents::beta_lower(d, Rational(i * d, 100));
            benchmark::DoNotOptimize(&b);
        }
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 100);
}
BENCHMARK(BM_beta_lower)->Arg(3)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "porosity/porosity0.hpp"
#include "porosity/porosity_inf.hpp"
#include "porosity/pretangent.hpp"
#include "porosity/structure.hpp"

using namespace porosity;

namespace {

Protocol proto(long depth, double tol = 1e-6, int windows = 8) {
    Protocol p;
    p.depth = depth;
    p.tol = tol;
    p.windows = windows;
    return p;
}

void BM_LargestGapGeometric(benchmark::State& s) {
    const SetHandle e = SetHandle::geometric(Scalar::rational(1, 2));
    const Scalar h = Scalar::pow2(-static_cast<long>(s.range(0)), ScalarMode::exact) * Scalar::rational(3, 4);
    for (auto _ : s) benchmark::DoNotOptimize(largest_gap(e, h));
}
BENCHMARK(BM_LargestGapGeometric)->Arg(8)->Arg(32)->Arg(128);

void BM_LargestGapPower(benchmark::State& s) {
    const SetHandle e = SetHandle::power(1, ScalarMode::exact);
    const Scalar h = Scalar::rational(1, s.range(0));
    for (auto _ : s) benchmark::DoNotOptimize(largest_gap(e, h));
}
BENCHMARK(BM_LargestGapPower)->Arg(10)->Arg(1000)->Arg(100000);

void BM_UpperPorosityGeometric(benchmark::State& s) {
    for (auto _ : s) {
        const SetHandle e = SetHandle::geometric(Scalar::rational(1, 2));
        benchmark::DoNotOptimize(upper_porosity0(e, proto(s.range(0))));
    }
}
BENCHMARK(BM_UpperPorosityGeometric)->Arg(16)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_LowerPorositySupergeometric(benchmark::State& s) {
    for (auto _ : s) {
        const SetHandle e = SetHandle::supergeometric();
        benchmark::DoNotOptimize(lower_porosity0(e, proto(s.range(0))));
    }
}
BENCHMARK(BM_LowerPorositySupergeometric)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_LambdaInf(benchmark::State& s) {
    const ScalingFunction mu = ScalingFunction::power(1, ScalarMode::exact);
    const IntegerSet e = IntegerSet::primes();
    const auto n = static_cast<std::uint64_t>(s.range(0));
    for (auto _ : s) benchmark::DoNotOptimize(lambda_inf(e, mu, n));
}
BENCHMARK(BM_LambdaInf)->Arg(100)->Arg(10000);

void BM_ClassifyInf(benchmark::State& s) {
    const ScalingFunction mu = ScalingFunction::power(1, ScalarMode::exact);
    for (auto _ : s) benchmark::DoNotOptimize(classify_inf(IntegerSet::all(), mu, proto(22, 1e-6, 3)));
}
BENCHMARK(BM_ClassifyInf)->Unit(benchmark::kMillisecond);

void BM_BuildM(benchmark::State& s) {
    const ScalingFunction mu = ScalingFunction::power(1, ScalarMode::exact);
    const auto n = static_cast<std::uint64_t>(s.range(0));
    for (auto _ : s) {
        const SetHandle e = SetHandle::geometric(Scalar::rational(1, 2));
        benchmark::DoNotOptimize(build_M(e, mu, n));
    }
}
BENCHMARK(BM_BuildM)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_ClassifySSP(benchmark::State& s) {
    for (auto _ : s) {
        const SetHandle e = SetHandle::supergeometric();
        benchmark::DoNotOptimize(classify_ssp(e, proto(s.range(0))));
    }
}
BENCHMARK(BM_ClassifySSP)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_FCriterionGeometric(benchmark::State& s) {
    for (auto _ : s) {
        const SetHandle e = SetHandle::geometric(Scalar::rational(4, 5));
        benchmark::DoNotOptimize(f_criterion(e, proto(s.range(0))));
    }
}
BENCHMARK(BM_FCriterionGeometric)->Arg(16)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_CardProbe(benchmark::State& s) {
    const SetHandle e = SetHandle::geometric(Scalar::rational(1, 2));
    for (auto _ : s)
        benchmark::DoNotOptimize(omega_card_probe(e, NormalizingSequence::from_set_points(e), s.range(0)));
}
BENCHMARK(BM_CardProbe)->Arg(8)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

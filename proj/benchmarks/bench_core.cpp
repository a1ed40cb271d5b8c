#include "daa/evolution.hpp"
#include "daa/floquet.hpp"
#include "daa/model.hpp"
#include "daa/observables.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

daa::ModelParams driven(std::size_t n, double omega) {
    daa::ModelParams p;
    p.n_sites = n;
    p.disorder_strength = 3.0;
    p.drive_amplitude = 3.0;
    p.drive_angular_frequency = omega;
    return p;
}

void BM_ApplyHamiltonian(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const daa::ModelParams p = driven(n, 1.0);
    const Eigen::VectorXd profile = daa::onsite_profile(p);
    const Eigen::MatrixXd in = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(n), 2 * static_cast<Eigen::Index>(n));
    Eigen::MatrixXd out(in.rows(), in.cols());
    double t = 0.0;
    for (auto _ : state) {
        daa::apply_hamiltonian(p, profile, t, in, out);
        benchmark::DoNotOptimize(out.data());
        t += 0.01;
    }
    state.SetItemsProcessed(state.iterations() * in.size());
}
BENCHMARK(BM_ApplyHamiltonian)->Arg(50)->Arg(100)->Arg(200);

void BM_OnePeriodPropagator(benchmark::State& state) {
    const double omega = static_cast<double>(state.range(0)) / 10.0;
    const daa::ModelParams p = driven(50, omega);
    for (auto _ : state) {
        benchmark::DoNotOptimize(daa::one_period_propagator(p).matrix.data());
    }
}
BENCHMARK(BM_OnePeriodPropagator)->Arg(10)->Arg(60)->Arg(180)->Unit(benchmark::kMillisecond);

void BM_StepwiseExponential(benchmark::State& state) {
    const daa::ModelParams p = driven(50, 6.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            daa::one_period_propagator(p, daa::PropagatorMethod::stepwise_exponential).matrix.data());
    }
}
BENCHMARK(BM_StepwiseExponential)->Unit(benchmark::kMillisecond);

void BM_FloquetDecompose(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const daa::Propagator u = daa::one_period_propagator(driven(n, 6.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(daa::floquet_decompose(u).quasienergies.data());
    }
}
BENCHMARK(BM_FloquetDecompose)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ImbalanceFromPeriod(benchmark::State& state) {
    const daa::ModelParams p = driven(50, 6.0);
    const daa::PeriodSampling s = daa::sample_period(p, daa::uniform_offsets(p.period(), 20));
    for (auto _ : state) {
        benchmark::DoNotOptimize(daa::imbalance_from_period(p, s, 100).time_average);
    }
}
BENCHMARK(BM_ImbalanceFromPeriod)->Unit(benchmark::kMillisecond);

void BM_StaticImbalance(benchmark::State& state) {
    daa::ModelParams p;
    p.disorder_strength = 2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(daa::imbalance_trace(p, 1000.0, 2000).time_average);
    }
}
BENCHMARK(BM_StaticImbalance)->Unit(benchmark::kMillisecond);

} // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

#include <random>

#include <benchmark/benchmark.h>

#include "sbqe/circuit.hpp"
#include "sbqe/model.hpp"
#include "sbqe/train.hpp"

namespace {

void BM_CircuitUnitaryDense(benchmark::State& state) {
    const sbqe::CircuitSpec spec{static_cast<int>(state.range(0)), 4};
    const auto params = sbqe::init_params(spec, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sbqe::build_circuit_unitary(spec, params));
    }
}
BENCHMARK(BM_CircuitUnitaryDense)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

void BM_CircuitUnitaryGates(benchmark::State& state) {
    const sbqe::CircuitSpec spec{static_cast<int>(state.range(0)), 4};
    const auto params = sbqe::init_params(spec, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            sbqe::evolve_columns(spec, params, sbqe::ComplexMatrix::identity(spec.dim())));
    }
}
BENCHMARK(BM_CircuitUnitaryGates)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

void BM_ParameterShift(benchmark::State& state) {
    const sbqe::CircuitSpec spec{static_cast<int>(state.range(0)), 4};
    const auto params = sbqe::init_params(spec, 1);
    const auto cols = sbqe::ComplexMatrix::identity(spec.dim());
    const sbqe::ColumnObjective objective = [](const sbqe::ComplexMatrix& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            s += std::norm(v(i, i));
        }
        return s;
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(sbqe::parameter_shift_gradient(spec, params, cols, objective));
    }
}
BENCHMARK(BM_ParameterShift)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

void run_forward(benchmark::State& state, sbqe::ModelKind kind) {
    const sbqe::Model model = sbqe::init_model(sbqe::make_model_spec(kind), 1);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(state.range(0), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sbqe::forward_logits(model, x));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void run_gradient(benchmark::State& state, sbqe::ModelKind kind) {
    const sbqe::Model model = sbqe::init_model(sbqe::make_model_spec(kind), 1);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(state.range(0), 8);
    std::vector<int> y(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = static_cast<int>(i % 10);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(sbqe::grad_params(model, x, y));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(run_forward, probabilistic, sbqe::ModelKind::probabilistic_hybrid)
    ->Arg(1000)->Arg(7000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_forward, amplitude, sbqe::ModelKind::amplitude_hybrid)
    ->Arg(1000)->Arg(7000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_gradient, probabilistic, sbqe::ModelKind::probabilistic_hybrid)
    ->Arg(1115)->Arg(7000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_gradient, amplitude, sbqe::ModelKind::amplitude_hybrid)
    ->Arg(1115)->Arg(7000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_gradient, linear, sbqe::ModelKind::width_matched_linear)
    ->Arg(1115)->Arg(7000)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();

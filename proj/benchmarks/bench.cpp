// microbenchmarks for the hot paths: eigendecomposition, time evolution,
// a full protocol run, and the coupling derivation

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include <aqst/couplings.hpp>
#include <aqst/hamiltonians.hpp>
#include <aqst/protocol.hpp>
#include <aqst/qcore.hpp>

namespace {

constexpr double pi = std::numbers::pi;

aqst::DenseOperator random_hermitian(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal;
  aqst::Matrix a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = {normal(rng), normal(rng)};
  return aqst::DenseOperator::make(0.5 * (a + a.adjoint()).eval(), true);
}

void BM_eigensystem(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto h = random_hermitian(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto sys = aqst::hermitian_eigensystem(h);
    benchmark::DoNotOptimize(sys.eigenvalues);
  }
}
BENCHMARK(BM_eigensystem)->Arg(4)->Arg(8);

void BM_propagate(benchmark::State& state) {
  const auto set = aqst::make_hamiltonians({1.0, 1.0, 1.0},
                                           {0.05, 0.05, 0.05});
  const auto psi0 = aqst::StateVector::basis_state(3, "egg");
  double t = 0.1;
  for (auto _ : state) {
    auto psi = aqst::propagate(set.h_eff, t, psi0);
    benchmark::DoNotOptimize(psi.amplitudes);
    t += 0.1;
  }
}
BENCHMARK(BM_propagate);

void BM_propagate_prediagonalized(benchmark::State& state) {
  const auto set = aqst::make_hamiltonians({1.0, 1.0, 1.0},
                                           {0.05, 0.05, 0.05});
  const auto sys = aqst::hermitian_eigensystem(set.h_eff);
  const auto psi0 = aqst::StateVector::basis_state(3, "egg");
  double t = 0.1;
  for (auto _ : state) {
    auto psi = aqst::propagate(sys, t, psi0);
    benchmark::DoNotOptimize(psi.amplitudes);
    t += 0.1;
  }
}
BENCHMARK(BM_propagate_prediagonalized);

void BM_run_transfer(benchmark::State& state) {
  const std::array<double, 3> gamma{0.05, 0.05, 0.05};
  const auto roles = aqst::make_roles(1, 2);
  const auto schedule = aqst::make_schedule(roles, gamma, pi / 4);
  const aqst::QubitState target{std::cos(0.3), std::sin(0.3)};
  for (auto _ : state) {
    auto outcomes = aqst::run_transfer(schedule, target, gamma);
    benchmark::DoNotOptimize(outcomes.success_branch.fidelity);
  }
}
BENCHMARK(BM_run_transfer);

void BM_derive_couplings(benchmark::State& state) {
  const auto p = aqst::symmetric_params({0.4, 0.1}, 0.3, 1.0, 0.02, 1.1,
                                        {1e-9, 1e-9, 1e-9});
  for (auto _ : state) {
    auto c = aqst::derive_couplings(p);
    benchmark::DoNotOptimize(c.j);
  }
}
BENCHMARK(BM_derive_couplings);

void BM_secular_error(benchmark::State& state) {
  const auto psi0 = aqst::StateVector::basis_state(3, "egg");
  std::vector<double> grid(100);
  for (int i = 0; i < 100; ++i) grid[i] = 15.0 * i / 99.0;
  for (auto _ : state) {
    double e = aqst::secular_error(1.0, {0.1, 0.1, 0.1}, psi0, grid);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_secular_error);

}  // namespace

BENCHMARK_MAIN();

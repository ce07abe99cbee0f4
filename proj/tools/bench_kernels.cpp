// Serial vs OpenMP kernels and the main pipeline stages.
#include <benchmark/benchmark.h>

#include "w4d/deformation.hpp"
#include "w4d/geometry.hpp"
#include "w4d/reduction1d.hpp"

using namespace w4d;

namespace {

cfield field(const Grid& g) {
    return sample(g, [](cplx z) { return std::exp(-std::norm(z) / 8) * std::exp(I * z.real()); });
}

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_dx(benchmark::State& s) {
    const Grid g = Grid::box(4.0, int(s.range(0)));
    const auto f = field(g);
    for (auto _ : s) benchmark::DoNotOptimize(dx(f, g, exec_of(s)));
    s.SetItemsProcessed(s.iterations() * std::int64_t(g.size()));
}

void BM_dzdzbar(benchmark::State& s) {
    const Grid g = Grid::box(4.0, int(s.range(0)));
    const auto f = field(g);
    for (auto _ : s) benchmark::DoNotOptimize(dzdzbar(f, g, 4, exec_of(s)));
    s.SetItemsProcessed(s.iterations() * std::int64_t(g.size()));
}

void BM_soliton_fields(benchmark::State& s) {
    const Grid g = Grid::box(20.0, int(s.range(0)));
    SolitonParams sp;
    sp.lambda = {0.5, 0.8}, sp.mu = {0.0, 3.0}, sp.nu = {1.0, 1.0};
    for (auto _ : s) benchmark::DoNotOptimize(soliton_fields(sp, g, exec_of(s)));
}

void BM_geometry_numeric(benchmark::State& s) {
    const Grid g = Grid::box(6.0, int(s.range(0)));
    SolitonParams sp;
    sp.lambda = {0.5}, sp.mu = {0.0}, sp.nu = {1.0};
    const auto r = soliton_fields(sp, g);
    const auto patch = immerse(r.sq, {r.p, {}});
    for (auto _ : s) benchmark::DoNotOptimize(geometry_numeric(patch, exec_of(s)));
}

void BM_closedness(benchmark::State& s) {
    const Grid g = Grid::box(6.0, int(s.range(0)));
    SolitonParams sp;
    sp.lambda = {0.5}, sp.mu = {0.0}, sp.nu = {1.0};
    const auto w = weierstrass_form(soliton_fields(sp, g).sq);
    for (auto _ : s) benchmark::DoNotOptimize(closedness_residual(w, exec_of(s)));
}

void BM_ds2_step(benchmark::State& s) {
    const Grid g = Grid::box(PI, int(s.range(0)), true);
    const auto st = make_state(g, sample(g, [](cplx z) { return 0.2 * std::exp(I * z.real()) * std::cos(z.imag()); }), -1);
    const Spectral2D sp(g);
    const double dt = stable_dt(g);
    for (auto _ : s) benchmark::DoNotOptimize(ds2_step(st, dt, sp));
}

void BM_nls_evolve(benchmark::State& s) {
    const Grid1D g{-20, 40, int(s.range(0)), true};
    cfield p(g.n);
    for (int i = 0; i < g.n; ++i) p[i] = 1.0 / std::cosh(g.x(i));
    Evolve1DOptions eo;
    eo.T = 0.1;
    eo.sample_every = 1 << 30;
    for (auto _ : s) benchmark::DoNotOptimize(nls_evolve(p, -1, g, eo));
}

}  // namespace

BENCHMARK(BM_dx)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dzdzbar)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_soliton_fields)->ArgsProduct({{256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_geometry_numeric)->ArgsProduct({{256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_closedness)->ArgsProduct({{256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ds2_step)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nls_evolve)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

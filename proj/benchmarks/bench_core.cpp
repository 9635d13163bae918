// Microbenchmarks for the hot paths of one registration iteration.

#include <benchmark/benchmark.h>

#include <random>

#include "edgereg/bspline.hpp"
#include "edgereg/edge_map.hpp"
#include "edgereg/registration.hpp"
#include "edgereg/similarity.hpp"
#include "edgereg/transform.hpp"

using namespace edgereg;

namespace {

Image2D random_image(int n, uint64_t seed) {
    std::mt19937_64 engine(seed);
    Image2D img(n, n);
    for (double& v : img.data) v = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return img;
}

VectorField2D smooth_field(int n, double amplitude, uint64_t seed) {
    std::mt19937_64 engine(seed);
    Image2D nx(n, n), ny(n, n);
    for (double& v : nx.data) v = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
    for (double& v : ny.data) v = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
    const Image2D sx = gaussian_smooth(nx, n / 16.0);
    const Image2D sy = gaussian_smooth(ny, n / 16.0);
    VectorField2D f(n, n);
    double maxc = 0.0;
    for (size_t i = 0; i < f.pixels(); ++i) {
        f.comp[2 * i] = sx.data[i];
        f.comp[2 * i + 1] = sy.data[i];
        maxc = std::max({maxc, std::abs(sx.data[i]), std::abs(sy.data[i])});
    }
    for (double& c : f.comp) c *= amplitude / maxc;
    return f;
}

void BM_WarpImage(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Image2D img = random_image(n, 1);
    const VectorField2D u = smooth_field(n, 4.0, 2);
    for (auto _ : state) benchmark::DoNotOptimize(warp_image(img, u));
}
BENCHMARK(BM_WarpImage)->Arg(96)->Arg(192);

void BM_SvfExp(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const VectorField2D v = smooth_field(n, 4.0, 3);
    for (auto _ : state) benchmark::DoNotOptimize(svf_exp(v, SquaringConfig{6}));
}
BENCHMARK(BM_SvfExp)->Arg(96)->Arg(192);

void BM_SvfExpAdjoint(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const VectorField2D v = smooth_field(n, 4.0, 4);
    const VectorField2D cot = smooth_field(n, 1.0, 5);
    for (auto _ : state) benchmark::DoNotOptimize(svf_exp_adjoint(v, SquaringConfig{6}, cot));
}
BENCHMARK(BM_SvfExpAdjoint)->Arg(96)->Arg(192);

void BM_Lncc(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Image2D f = random_image(n, 6);
    const Image2D m = random_image(n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(lncc(f, m, 9, 1e-5));
}
BENCHMARK(BM_Lncc)->Arg(96)->Arg(192);

void BM_Nmi(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Image2D f = random_image(n, 8);
    const Image2D m = random_image(n, 9);
    for (auto _ : state) benchmark::DoNotOptimize(nmi(f, m, 64, 0.5));
}
BENCHMARK(BM_Nmi)->Arg(96)->Arg(192);

void BM_Ngf(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Image2D f = random_image(n, 10);
    const Image2D m = random_image(n, 11);
    for (auto _ : state) benchmark::DoNotOptimize(ngf(f, m, 0.01));
}
BENCHMARK(BM_Ngf)->Arg(96)->Arg(192);

void BM_BsplineToDense(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    BSplineGrid grid = make_bspline_grid(n, n, 8);
    std::mt19937_64 engine(12);
    for (double& c : grid.control_points)
        c = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
    for (auto _ : state) benchmark::DoNotOptimize(bspline_to_dense(grid, n, n));
}
BENCHMARK(BM_BsplineToDense)->Arg(96)->Arg(192);

void BM_CompositeLossGrad(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Image2D f = random_image(n, 13);
    const Image2D m = random_image(n, 14);
    const Image2D e_f = edge_map(f, 1.0);
    const Image2D e_m = edge_map(m, 1.0);
    RegistrationConfig cfg;
    const VelocityModel model = VelocityModel::dense(n, n);
    const VectorField2D v = smooth_field(n, 3.0, 15);
    for (auto _ : state)
        benchmark::DoNotOptimize(composite_loss_and_grad(f, m, e_f, e_m, v.comp, model, cfg));
}
BENCHMARK(BM_CompositeLossGrad)->Arg(96)->Arg(192);

} // namespace

BENCHMARK_MAIN();

// Microbenchmarks for the hot paths: operator assembly, dense generalized
// eigensolve, semigroup propagation, Gramian construction/application, and
// the Carleman integrand sweep.  Grid sizes are express-lane versions of the
// configurations the test suites run at.

#include "grushin/control.hpp"
#include "grushin/extension.hpp"
#include "grushin/inequalities.hpp"
#include "grushin/operator.hpp"
#include "grushin/semigroup.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

using namespace grushin;

void bm_assemble(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const auto grid = build_grid(cells, 2.0);
  const auto spec = designed_extension(0.3);
  for (auto _ : state) {
    auto op = assemble(grid, spec, 1, 1.0);
    benchmark::DoNotOptimize(op.stiffness().norm());
  }
}
BENCHMARK(bm_assemble)->Arg(64)->Arg(128)->Arg(256);

void bm_eigensolve(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const auto op = assemble(build_grid(cells, 2.0), designed_extension(0.3), 1,
                           1.0);
  for (auto _ : state) {
    auto eig = eigensolve(op);
    benchmark::DoNotOptimize(eig.values(0));
  }
}
BENCHMARK(bm_eigensolve)->Arg(64)->Arg(128);

void bm_evolve2d(benchmark::State& state) {
  const auto fam = build_mode_family(build_grid(64, 2.0),
                                     designed_extension(0.3), 1.0, 8);
  const auto f0 = fourier_project(bump2d(-0.5, 0.3, 0.5, 0.25), 8, fam);
  for (auto _ : state) {
    auto f = evolve2d(f0, fam, 0.5);
    benchmark::DoNotOptimize(field_norm(f, fam));
  }
}
BENCHMARK(bm_evolve2d);

void bm_gramian_build(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const auto fam = build_mode_family(build_grid(cells, 2.0),
                                     designed_extension(0.3), 1.0, 8);
  const OmegaProjector proj(fam, Rect{-0.8, -0.2, 0.2, 0.8});
  for (auto _ : state) {
    GramianOperator gram(fam, proj, 1.0);
    benchmark::DoNotOptimize(gram.matrix().norm());
  }
}
BENCHMARK(bm_gramian_build)->Arg(64)->Arg(128);

void bm_gramian_apply(benchmark::State& state) {
  const auto fam = build_mode_family(build_grid(128, 2.0),
                                     designed_extension(0.3), 1.0, 8);
  const OmegaProjector proj(fam, Rect{-0.8, -0.2, 0.2, 0.8});
  const GramianOperator gram(fam, proj, 1.0);
  const auto g = fourier_project(bump2d(0.5, 0.3, 0.5, 0.25), 8, fam);
  for (auto _ : state) {
    auto h = gram.apply(g, fam);
    benchmark::DoNotOptimize(field_norm(h, fam));
  }
}
BENCHMARK(bm_gramian_apply);

void bm_carleman_sides(benchmark::State& state) {
  const auto family = standard_family(1.0, 1, 42u);
  const CarlemanQuadrature quad{80, 0.25, 6};
  for (auto _ : state) {
    auto sides = carleman_sides(family.front(), 1, 0.75, 1.0, 50.0, 1.0, quad);
    benchmark::DoNotOptimize(sides.lhs + sides.rhs);
  }
}
BENCHMARK(bm_carleman_sides);

void bm_hardy_check(benchmark::State& state) {
  const SpaceTestFunction z(Poly{1.0, -0.5, 0.25});
  for (auto _ : state) {
    auto rep = hardy_check(z, 0.0);
    benchmark::DoNotOptimize(rep.lhs + rep.rhs);
  }
}
BENCHMARK(bm_hardy_check);

} // namespace

BENCHMARK_MAIN();

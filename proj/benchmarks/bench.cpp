#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "xlag/functional.hpp"
#include "xlag/gamma.hpp"
#include "xlag/linalg.hpp"

using namespace xlag;

namespace {

Mat random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Mat q(n, n);
  for (int j = 0; j < n; ++j) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    for (int k = 0; k < j; ++k) {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += v[i] * q(i, k);
      for (int i = 0; i < n; ++i) v[i] -= c * q(i, k);
    }
    const double nrm = norm2(v);
    if (nrm < 1e-8) {
      --j;
      continue;
    }
    for (int i = 0; i < n; ++i) q(i, j) = v[i] / nrm;
  }
  return q;
}

std::vector<Mat> make_corpus(int count) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> sv(0.5, 2.5);
  std::vector<Mat> out;
  for (int i = 0; i < count; ++i) {
    const int m = dim(rng), n = dim(rng);
    std::uniform_int_distribution<int> rr(0, std::min(m, n));
    const int r = rr(rng);
    Mat sigma(m, n);
    for (int k = 0; k < r; ++k) sigma(k, k) = sv(rng);
    out.push_back(random_orthogonal(rng, m) * sigma * random_orthogonal(rng, n).transpose());
  }
  return out;
}

void bm_pinv_svd(benchmark::State& state) {
  const auto corpus = make_corpus(64);
  for (auto _ : state) {
    for (const Mat& a : corpus) benchmark::DoNotOptimize(pinv_svd(a));
  }
}
BENCHMARK(bm_pinv_svd);

void bm_pinv_limit(benchmark::State& state) {
  const auto corpus = make_corpus(64);
  for (auto _ : state) {
    for (const Mat& a : corpus) benchmark::DoNotOptimize(pinv_limit(a));
  }
}
BENCHMARK(bm_pinv_limit);

void bm_point_algebra(benchmark::State& state) {
  const auto corpus = make_corpus(64);
  for (auto _ : state) {
    for (const Mat& a : corpus) benchmark::DoNotOptimize(point_algebra(a));
  }
}
BENCHMARK(bm_point_algebra);

void bm_gradient_fd(benchmark::State& state) {
  const GridDomain d(Box{{0.0, 0.0}, {1.0, 1.0}},
                     {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))});
  const GridFunction u = sample(d, [](std::span<const double> x) {
    return std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]);
  });
  for (auto _ : state) benchmark::DoNotOptimize(gradient_fd(u));
}
BENCHMARK(bm_gradient_fd)->Arg(33)->Arg(65)->Arg(129);

void bm_eval_functional(benchmark::State& state) {
  const FunctionalSpec spec{Lagrangian::parse("2*((z1+z2)/2)^2", LagKind::anisotropic),
                            make_field("degenerate_pair"), 2.0};
  const GridDomain d(Box{{0.0, 0.0}, {1.0, 1.0}},
                     {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))});
  const GridFunction u = sample(d, [](std::span<const double> x) {
    return std::sin(std::numbers::pi * x[0]) * x[1];
  });
  for (auto _ : state) benchmark::DoNotOptimize(eval_functional(spec, u));
}
BENCHMARK(bm_eval_functional)->Arg(33)->Arg(65);

void bm_minimize_1d(benchmark::State& state) {
  const FunctionalSpec spec{Lagrangian::parse("z1^2", LagKind::anisotropic),
                            make_field("euclidean:1"), 2.0};
  const GridDomain d(Box{{0.0}, {1.0}}, {33});
  const Expr boundary = Expr::parse("x1");
  for (auto _ : state) benchmark::DoNotOptimize(minimize(spec, d, boundary));
}
BENCHMARK(bm_minimize_1d);

}  // namespace

BENCHMARK_MAIN();

// Copyright 2026 The robust-is Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "ris/estimators.hpp"
#include "ris/models.hpp"
#include "ris/rng.hpp"
#include "ris/statespace.hpp"

namespace {

using namespace ris;

struct SsmFixture {
  explicit SsmFixture(std::size_t length)
      : spec(Ar1Spec::from_stationary_variance(0.0, 0.8, 0.5, length)),
        prior([&] {
          auto [mean, q] = ar1_precision(spec);
          return GaussianPrior(mean, q);
        }()),
        model(counts(length), -1.4) {}

  static std::vector<int> counts(std::size_t length) {
    Rng rng(1);
    std::poisson_distribution<int> pois(0.25);
    std::vector<int> y(length);
    for (auto& v : y) v = pois(rng);
    return y;
  }

  Ar1Spec spec;
  GaussianPrior prior;
  PoissonSsmModel model;
};

void BM_Factorize(benchmark::State& state) {
  const std::size_t len = static_cast<std::size_t>(state.range(0));
  const auto q = ar1_precision(Ar1Spec::from_stationary_variance(0.0, 0.8, 0.5, len)).second;
  for (auto _ : state) benchmark::DoNotOptimize(factorize(q));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Factorize)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_SampleGaussian(benchmark::State& state) {
  const std::size_t len = static_cast<std::size_t>(state.range(0));
  const auto q = ar1_precision(Ar1Spec::from_stationary_variance(0.0, 0.8, 0.5, len)).second;
  const auto chol = factorize_or_throw(q);
  const Vector mean = Vector::Zero(static_cast<Eigen::Index>(len));
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_gaussian(mean, chol, rng));
}
BENCHMARK(BM_SampleGaussian)->Arg(500)->Arg(5000);

void BM_SpdkFit(benchmark::State& state) {
  const SsmFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spdk_fit(f.model, f.prior));
}
BENCHMARK(BM_SpdkFit)->Arg(500)->Arg(5000);

void BM_EstimateLikelihood(benchmark::State& state) {
  const SsmFixture f(500);
  const auto proposal = spdk_proposal(spdk_fit(f.model, f.prior), f.prior);
  const GaussianLatentTarget target(f.model, f.prior);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_likelihood(target, proposal, static_cast<std::size_t>(state.range(0)), ++seed));
}
BENCHMARK(BM_EstimateLikelihood)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

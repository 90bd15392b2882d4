#include <benchmark/benchmark.h>

#include "graphda/data.hpp"
#include "graphda/pipeline.hpp"
#include "graphda/weight_update.hpp"

namespace {

using namespace graphda;

DomainPair synthetic(Index n) {
  SyntheticConfig sc;
  sc.n_per_domain = n;
  return generate_synthetic(sc);
}

void BM_KnnGraph(benchmark::State& state) {
  const auto data = synthetic(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_knn_graph(data.target.points, 10));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnGraph)->Arg(200)->Arg(400)->Arg(800)->Complexity();

void BM_Eigenpairs(benchmark::State& state) {
  const auto data = synthetic(state.range(0));
  const auto l = normalized_laplacian(build_knn_graph(data.target.points, 10));
  for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpairs(l, 20));
}
BENCHMARK(BM_Eigenpairs)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Coefficients(benchmark::State& state) {
  const auto data = synthetic(200);
  const auto ex = make_experiment(data, 40, std::nullopt, 1);
  const auto& p = ex.problem;
  const auto bs = smallest_eigenpairs(normalized_laplacian(build_knn_graph(p.source_points, 10)), state.range(0));
  const auto bt = smallest_eigenpairs(normalized_laplacian(build_knn_graph(p.target_points, 10)), state.range(0));
  const auto ys = label_indicator(p.source_labels, 2);
  const auto yt = label_indicator(p.target_labels, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_coefficients(bs, bt, p.source_labeled, p.target_labeled, ys, yt, 1.0));
  }
}
BENCHMARK(BM_Coefficients)->Arg(10)->Arg(20)->Arg(40);

void BM_WeightLp(benchmark::State& state) {
  const auto data = synthetic(state.range(0));
  const auto& pts = data.target.points;
  const auto w = build_knn_graph(pts, 10);
  const Eigen::MatrixXd f = label_indicator(data.target.labels, 2);
  const auto d = degree_vector(w);
  const double mean = d.mean();
  for (auto _ : state) benchmark::DoNotOptimize(solve_weight_update(pts, w, f, d, 0.01, mean, 2.0 * mean));
}
BENCHMARK(BM_WeightLp)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  const auto data = synthetic(state.range(0));
  const auto ex = make_experiment(data, 40, std::nullopt, 1);
  const Method m = state.range(1) ? Method::SdaDagl : Method::Sda;
  const DaglConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(run_method(m, ex, cfg));
  state.SetLabel(state.range(1) ? "sda-dagl" : "sda");
}
BENCHMARK(BM_Pipeline)->Args({200, 0})->Args({200, 1})->Args({400, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

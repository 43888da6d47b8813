#include <benchmark/benchmark.h>

#include <random>

#include "epc/embedding.hpp"
#include "epc/geometry.hpp"
#include "epc/pipeline.hpp"
#include "epc/rules.hpp"

namespace {

using namespace epc;

std::vector<std::vector<double>> random_rows(std::size_t rows, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> out(rows, std::vector<double>(dims));
  for (auto& r : out) {
    for (auto& v : r) v = u(rng);
  }
  return out;
}

void BM_IntersectEqualEllipses(benchmark::State& state) {
  const auto e = EllipseSpec::unit_circle();
  const SideEllipse a{{1, -0.3}, -0.3, Guide::kRightOfM, ArcSide::kUpper, PairRole::kFirst};
  const SideEllipse b{{1, 0.5}, 0.5, Guide::kRightOfM, ArcSide::kLower, PairRole::kSecond};
  for (auto _ : state) {
    benchmark::DoNotOptimize(intersect_equal_ellipses(e, a, b, RootSelection::kOrderedAlongGuide));
  }
}
BENCHMARK(BM_IntersectEqualEllipses);

void BM_Embed(benchmark::State& state) {
  LayoutConfig c;
  c.dims = static_cast<std::size_t>(state.range(0));
  const Layout layout(c, EllipseSpec::unit_circle());
  const auto rows = random_rows(1024, c.dims, 1);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(embed(rows[k++ % rows.size()], layout));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_Embed)->Arg(4)->Arg(10)->Arg(32);

void BM_Invert(benchmark::State& state) {
  LayoutConfig c;
  c.dims = static_cast<std::size_t>(state.range(0));
  const Layout layout(c, EllipseSpec::unit_circle());
  std::vector<EpcGraph> graphs;
  for (const auto& r : random_rows(1024, c.dims, 2)) graphs.push_back(embed(r, layout));
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert(graphs[k++ % graphs.size()], layout));
  }
}
BENCHMARK(BM_Invert)->Arg(4)->Arg(10);

struct Scene {
  std::vector<EpcGraph> graphs;
  LabelSpace space;
};

Scene labelled_scene(std::size_t cases) {
  auto rows = random_rows(cases, 4, 3);
  std::vector<std::string> labels;
  for (auto& r : rows) {
    const bool hi = r[0] + r[1] > 1.0;
    labels.push_back(hi ? "hi" : "lo");
  }
  const auto prepared = prepare(make_dataset({"a", "b", "c", "d"}, rows, labels), {});
  return {prepared.graphs, label_space(prepared.data.labels, prepared.data.classes, {})};
}

void BM_EvaluateRect(benchmark::State& state) {
  const auto s = labelled_scene(static_cast<std::size_t>(state.range(0)));
  const Rect r{-0.2, -0.2, 0.2, 0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evaluate_rect(r, s.graphs, s.space.labels, s.space.classes, MatchMode::kIntersect));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_EvaluateRect)->Arg(1000)->Arg(100000);

void BM_Mine(benchmark::State& state) {
  const auto s = labelled_scene(static_cast<std::size_t>(state.range(0)));
  MiningParams p;
  p.rect_width = 0.2;
  p.rect_height = 0.2;
  p.stride = 0.05;
  p.mode = MatchMode::kIntersect;
  p.min_precision = 0.8;
  for (auto _ : state) benchmark::DoNotOptimize(mine(s.graphs, s.space, p));
}
BENCHMARK(BM_Mine)->Arg(1000)->Arg(50000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "aicare/analytics/calibration.hpp"
#include "aicare/analytics/metrics.hpp"
#include "aicare/ehr/labeling.hpp"
#include "aicare/ehr/preprocess.hpp"
#include "aicare/ehr/synthetic.hpp"
#include "aicare/model/assessment.hpp"
#include "aicare/model/model.hpp"

namespace {

namespace ehr = aicare::ehr;
namespace m = aicare::model;
namespace an = aicare::analytics;

struct Scored {
  std::vector<double> scores;
  std::vector<int> labels;
};

Scored scored(std::size_t n) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z(0.0, 1.0);
  Scored s;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = gen() % 5 == 0;
    s.labels.push_back(y);
    s.scores.push_back(z(gen) + y);
  }
  return s;
}

struct Fixture {
  ehr::LabeledCohort cohort;
  ehr::Preprocessor pre;
  m::Model model;
  std::vector<ehr::PatientTensor> tensors;
};

const Fixture& fixture(std::size_t hidden) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(hidden);
  if (it != cache.end()) return it->second;
  Fixture f;
  ehr::SyntheticSpec spec;
  spec.n_patients = 200;
  f.cohort = ehr::assign_mortality_labels(ehr::generate_synthetic_cohort(spec));
  std::vector<std::size_t> all(f.cohort.patients.size());
  std::iota(all.begin(), all.end(), 0);
  f.pre = ehr::fit_preprocessor(f.cohort, all, "bench");
  auto h = m::preset("xy");
  h.hidden_dim = hidden;
  h.dynamic_dim = 0;
  h.static_dim = 0;
  f.model = m::init_model(f.cohort.schema, h);
  f.tensors = ehr::apply_preprocessor(f.cohort, all, f.pre);
  return cache.emplace(hidden, std::move(f)).first->second;
}

void BM_Auroc(benchmark::State& state) {
  const auto s = scored(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(an::auroc(s.scores, s.labels));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Auroc)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

void BM_Auprc(benchmark::State& state) {
  const auto s = scored(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(an::auprc(s.scores, s.labels));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Auprc)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

void BM_Calibrate(benchmark::State& state) {
  const auto s = scored(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(an::calibrate(s.scores, s.labels));
}
BENCHMARK(BM_Calibrate)->Arg(1000)->Arg(10000);

void BM_FitPreprocessor(benchmark::State& state) {
  const auto& f = fixture(32);
  std::vector<std::size_t> all(f.cohort.patients.size());
  std::iota(all.begin(), all.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(ehr::fit_preprocessor(f.cohort, all, "bench"));
}
BENCHMARK(BM_FitPreprocessor);

void BM_PredictTrajectory(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m::predict_trajectory(f.model, f.tensors[i % f.tensors.size()]));
    ++i;
  }
}
BENCHMARK(BM_PredictTrajectory)->Arg(16)->Arg(32)->Arg(64);

// One training step's worth of work: forward, loss and reverse sweep on a batch.
void BM_LossAndGradient(benchmark::State& state) {
  const auto& f = fixture(32);
  const auto batch_size = static_cast<std::size_t>(state.range(0));
  std::vector<const ehr::PatientTensor*> ptrs;
  for (std::size_t i = 0; i < batch_size; ++i) ptrs.push_back(&f.tensors[i % f.tensors.size()]);
  const auto batch = m::make_batch(ptrs);
  const auto values = f.model.params.values();
  for (auto _ : state) {
    aicare::num::Tape tape;
    std::vector<aicare::num::Var> vars;
    for (const auto& v : values) vars.push_back(tape.leaf(v));
    const auto loss = m::total_loss(m::forward_graph(tape, vars, f.model, batch), batch, 1e-3);
    tape.backward(loss);
    benchmark::DoNotOptimize(tape.grad(vars.front()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch_size));
}
BENCHMARK(BM_LossAndGradient)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "congnet/instance_gen.hpp"
#include "congnet/optim.hpp"
#include "congnet/reduction.hpp"

using namespace congnet;

namespace {

Instance make_instance(int d, int hidden, int C, int M) {
  GeneratorSpec spec;
  spec.shape = hidden > 0 ? std::vector<int>{d, hidden, C}
                          : std::vector<int>{d, C};
  spec.samples = M;
  spec.weight_seed = 1;
  spec.normalized_inputs = true;
  spec.classification_loss = true;
  return generate_instance(spec);
}

void BM_forward(benchmark::State& state) {
  Instance inst = make_instance(static_cast<int>(state.range(0)),
                                static_cast<int>(state.range(1)), 4, 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(network_loss(inst.dnn, inst.data, inst.loss));
}
BENCHMARK(BM_forward)->Args({4, 8})->Args({8, 16})->Args({16, 32});

void BM_build_game(benchmark::State& state) {
  Instance inst = make_instance(static_cast<int>(state.range(0)),
                                static_cast<int>(state.range(1)), 4, 8);
  for (auto _ : state) {
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    benchmark::DoNotOptimize(game.resources.size());
  }
}
BENCHMARK(BM_build_game)->Args({4, 8})->Args({8, 16})->Args({16, 32});

void BM_social_cost(benchmark::State& state) {
  Instance inst = make_instance(static_cast<int>(state.range(0)), 8, 4, 8);
  CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
  MarginalFlow flow = weights_to_flow(inst.dnn, game);
  for (auto _ : state)
    benchmark::DoNotOptimize(social_cost(game, flow));
}
BENCHMARK(BM_social_cost)->Arg(4)->Arg(8)->Arg(16);

void BM_train_marginal(benchmark::State& state) {
  Instance inst = make_instance(static_cast<int>(state.range(0)), 0, 3, 4);
  TrainConfig cfg;
  cfg.mode = TrainMode::MarginalSpace;
  cfg.max_iters = 2000;
  for (auto _ : state) {
    TrainReport rep = train(inst.dnn, inst.data, inst.loss, cfg);
    benchmark::DoNotOptimize(rep.final_loss);
  }
}
BENCHMARK(BM_train_marginal)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();

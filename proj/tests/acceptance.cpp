// Acceptance suite: one line per criterion, exit 0 only if every criterion
// passes. Each block re-derives its expected values independently of the
// code under test where an oracle exists (finite differences, grid search,
// path enumeration).
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "congnet/optim.hpp"
#include "congnet/reduction.hpp"
#include "congnet/relu_model.hpp"
#include "congnet/squared_loss.hpp"
#include "support.hpp"

using namespace congnet;
using namespace congnet::testing;

namespace {

int failures = 0;

void report(int idx, const char* what, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", idx, what,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

// 1: loss equals social cost on 500 random triples.
void criterion1() {
  std::mt19937_64 rng(1001);
  int ok = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    Instance inst = random_instance(rng, 4, 4, 6, 5, 2, rep % 2 == 0);
    const double loss = network_loss(inst.dnn, inst.data, inst.loss);
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    MarginalFlow flow = weights_to_flow(inst.dnn, game);
    const double sc = social_cost(game, flow);
    const double err = std::abs(loss - sc) / (1.0 + loss);
    worst = std::max(worst, err);
    if (err <= 1e-10) ++ok;
  }
  report(1, "network loss equals social cost (500 random triples)", ok == 500,
         fmt("%.0f/500, worst rel err %.2e", ok, worst));
}

// 2: converged training points are Wardrop equilibria, 20 seeds x 5 shapes.
void criterion2() {
  const std::vector<std::vector<int>> shapes = {
      {1, 2}, {2, 2}, {2, 3, 3}, {3, 4, 3}, {2, 4, 4, 2}};
  int ok = 0, total = 0;
  double worst_residual = 0.0;
  for (const auto& shape : shapes) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      GeneratorSpec spec;
      spec.shape = shape;
      spec.samples = 2;
      spec.weight_seed = seed * 7 + 1;
      spec.data_seed = seed * 7 + 2;
      spec.loss_seed = seed * 7 + 3;
      spec.normalized_inputs = true;
      spec.classification_loss = (seed % 2 == 0);
      Instance inst = generate_instance(spec);
      TrainConfig cfg;
      cfg.mode = TrainMode::WeightSpace;
      cfg.seed = seed;
      cfg.restarts = 3;  // deep compositions have saddle faces; keep the best
      cfg.grad_tol = 1e-11;
      TrainReport tr = train(inst.dnn, inst.data, inst.loss, cfg);
      CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
      MarginalFlow flow{tr.final_b};
      EquilibriumReport def = wardrop_check_definition(game, flow, 1e-8);
      EquilibriumReport vi = wardrop_check_vi(game, flow, 1e-8);
      worst_residual = std::min(worst_residual, vi.vi_residual);
      ++total;
      if (tr.converged && def.is_equilibrium && vi.is_equilibrium &&
          vi.vi_residual >= -1e-8)
        ++ok;
    }
  }
  report(2, "trained networks sit at Wardrop equilibria (20 seeds x 5 shapes)",
         ok == total, fmt("%.0f/100, worst VI residual %.2e",
                          static_cast<double>(ok), worst_residual));
}

// 3: local minima are global, against the grid oracle.
void criterion3() {
  struct Case {
    std::vector<int> shape;
    int samples;
    uint64_t seed;
  };
  const std::vector<Case> cases = {
      {{1, 2}, 1, 1}, {{2, 3, 2}, 2, 2}, {{1, 4, 3}, 2, 3}, {{2, 2}, 3, 4}};
  bool all = true;
  std::string detail;
  for (const Case& c : cases) {
    GeneratorSpec spec;
    spec.shape = c.shape;
    spec.samples = c.samples;
    spec.weight_seed = c.seed;
    spec.data_seed = c.seed + 50;
    spec.loss_seed = c.seed + 90;
    Instance inst = generate_instance(spec);
    TrainConfig cfg;
    cfg.mode = TrainMode::WeightSpace;
    cfg.restarts = 20;
    cfg.seed = c.seed;
    TrainReport tr = train(inst.dnn, inst.data, inst.loss, cfg);
    GridOracleResult oracle = grid_oracle(inst.data, inst.loss, 1e-3);
    double lo = tr.restart_losses[0], hi = tr.restart_losses[0];
    for (double v : tr.restart_losses) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double scale = 1.0 + std::abs(oracle.value);
    const bool tight = (hi - lo) <= 1e-4 * scale;
    bool near = true;
    for (double v : tr.restart_losses)
      near = near && std::abs(v - oracle.value) <= 1e-4 * scale;
    if (!(tr.converged && tight && near)) {
      all = false;
      detail += fmt("spread %.2e vs oracle gap %.2e; ", hi - lo,
                    std::abs(lo - oracle.value));
    }
  }
  report(3, "20 restarts per instance all match the grid-oracle optimum",
         all, detail);
}

// 4: price of anarchy is 1 wherever it is defined.
void criterion4() {
  std::mt19937_64 rng(4004);
  bool all = true;
  double worst = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    Instance inst = random_instance(rng, 3, 3, 5, 3, 1, rep % 3 == 0);
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    PoaResult res = price_of_anarchy(game, rng());
    if (res.so_value > 1e-10) {
      worst = std::max(worst, std::abs(res.poa - 1.0));
      all = all && std::abs(res.poa - 1.0) <= 1e-6;
    } else {
      all = all && res.we_value <= 1e-10 && res.poa == 1.0;
    }
  }
  report(4, "price of anarchy equals 1 on 30 random games", all,
         fmt("worst |PoA-1| %.2e", worst));
}

// 5: exact stochastic factorization and flow round trips.
void criterion5() {
  std::mt19937_64 rng(5005);
  std::uniform_int_distribution<int> c_dist(2, 4), d_dist(1, 4),
      depth_dist(1, 5);
  int ok = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int C = c_dist(rng), d = d_dist(rng), depth = depth_dist(rng);
    Matrix target = random_flow(C, d, rng);
    std::vector<int> sizes;
    sizes.push_back(d);
    std::uniform_int_distribution<int> w_dist(C, 6);
    for (int l = 1; l < depth; ++l) sizes.push_back(w_dist(rng));
    sizes.push_back(C);
    std::vector<Matrix> factors = factorize(target, sizes);
    Matrix prod = factors.front();
    for (size_t l = 1; l < factors.size(); ++l) prod = factors[l] * prod;
    double err = (prod - target).cwiseAbs().maxCoeff();
    double col_err = 0.0;
    for (const Matrix& f : factors)
      for (int c = 0; c < f.cols(); ++c)
        col_err = std::max(col_err, std::abs(f.col(c).sum() - 1.0));
    // round trip through the network representation
    MarginalFlow flow{target};
    LayeredDnn net = flow_to_weights(flow, sizes);
    Matrix labels = Matrix::Zero(C, d);
    labels.row(0).setOnes();
    Dataset data(Matrix::Identity(d, d), labels);
    PowerLoss loss(Matrix::Ones(C, d), 2.0);
    CongestionGame game = build_game(net, data, loss);
    const double rt_err =
        (weights_to_flow(net, game).z - target).cwiseAbs().maxCoeff();
    worst = std::max({worst, err, rt_err});
    if (err <= 1e-12 && col_err <= 1e-14 && rt_err <= 1e-12) ++ok;
  }
  report(5, "stochastic factorization is exact (200 targets, depths 1-5)",
         ok == 200, fmt("%.0f/200, worst error %.2e", ok, worst));
}

// 6: ReLU path-failure loss scales as rho^beta; Monte Carlo agreement.
void criterion6() {
  std::mt19937_64 rng(6006);
  bool ratio_ok = true;
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    Instance inst = random_instance(rng, 3, 3, 4, 2, 1);
    const double base = network_loss(inst.dnn, inst.data, inst.loss);
    for (double rho : {0.0, 0.25, 0.5, 1.0}) {
      ReluPathModel model(inst.dnn, rho);
      const double scaled = relu_model_loss(model, inst.data, inst.loss);
      const double err = std::abs(scaled - rho * rho * base);
      worst = std::max(worst, err);
      ratio_ok = ratio_ok && err <= 1e-12 * (1.0 + base);
    }
  }

  Instance inst = f1();
  ReluPathModel model(inst.dnn, 0.5);
  const Matrix expect = expected_outputs(model, inst.data);
  int mc_ok = 0;
  for (uint64_t rep = 0; rep < 100; ++rep) {
    SampleStats stats = sample_outputs(model, inst.data, 100000, 600 + rep);
    bool inside = true;
    for (int k = 0; k < expect.rows(); ++k)
      for (int j = 0; j < expect.cols(); ++j)
        inside = inside && std::abs(stats.mean(k, j) - expect(k, j)) <=
                               4.0 * stats.stderr_(k, j);
    if (inside) ++mc_ok;
  }
  report(6, "path-failure loss is rho^2 * loss; Monte Carlo within 4 sigma",
         ratio_ok && mc_ok >= 99,
         fmt("worst ratio err %.2e, MC %.0f/100", worst,
             static_cast<double>(mc_ok)));
}

// 7: squared loss is twice the two-class loss; three-class negative control.
void criterion7() {
  bool all = true;
  std::string detail;
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    GeneratorSpec spec;
    spec.shape = {2, 3, 2};
    spec.samples = 2;
    spec.weight_seed = seed;
    spec.data_seed = seed + 10;
    spec.normalized_inputs = true;
    spec.classification_loss = true;
    Instance inst = generate_instance(spec);
    TrainConfig cfg;
    cfg.mode = TrainMode::MarginalSpace;
    cfg.seed = seed;
    Corollary3Report rep = corollary3_check(inst.dnn, inst.data, cfg);
    if (!(rep.factor_two_holds && rep.ratio_max_error <= 1e-12)) {
      all = false;
      detail += fmt("ratio err %.2e; ", rep.ratio_max_error);
    }
  }
  // three classes: the factor-2 shortcut fails but the exact decomposition
  // still holds.
  Instance three = f3(9, 2);
  LossDecomposition dec = loss_decomposition(three.dnn, three.data);
  const bool decomposes =
      std::abs(dec.squared - dec.paper_loss - dec.constant) <= 1e-12;
  const bool not_double =
      std::abs(dec.squared - 2.0 * dec.paper_loss) > 1e-6;
  if (!(decomposes && not_double)) {
    all = false;
    detail += fmt("3-class decomposition err %.2e",
                  std::abs(dec.squared - dec.paper_loss - dec.constant));
  }
  report(7, "squared loss = 2x loss for two classes; exact decomposition",
         all, detail);
}

// 8: analytic gradients match finite differences and the class-cost identity.
void criterion8() {
  std::mt19937_64 rng(8008);
  int fd_ok = 0, id_ok = 0;
  double worst_fd = 0.0, worst_id = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Instance inst = random_instance(rng, 3, 3, 5, 3, 1);
    AggregateCoefficients agg = aggregates(inst.dnn, inst.data);
    const Matrix g = loss_gradient_b(agg, inst.data, inst.loss);
    const Matrix fd = fd_gradient_b(agg.b, inst.data, inst.loss);
    const double fd_err =
        (g - fd).cwiseAbs().maxCoeff() / (1.0 + g.cwiseAbs().maxCoeff());
    worst_fd = std::max(worst_fd, fd_err);
    if (fd_err <= 1e-5) ++fd_ok;

    // gradient entry (k,i) = beta * class cost of population i, class k
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    MarginalFlow flow = weights_to_flow(inst.dnn, game);
    const Matrix costs = class_cost_matrix(game, flow);
    const double id_err = (g - inst.loss.beta * costs).cwiseAbs().maxCoeff() /
                          (1.0 + g.cwiseAbs().maxCoeff());
    worst_id = std::max(worst_id, id_err);
    if (id_err <= 1e-10) ++id_ok;
  }
  report(8, "gradient matches finite differences and beta * class costs",
         fd_ok == 100 && id_ok == 100,
         fmt("worst FD err %.2e, worst identity err %.2e", worst_fd,
             worst_id));
}

// 9: the two equilibrium checks never disagree.
void criterion9() {
  std::mt19937_64 rng(9009);
  int agree = 0;
  const int total = 1000;
  for (int rep = 0; rep < total; ++rep) {
    Instance inst = random_instance(rng, 3, 3, 4, 3, 1);
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    MarginalFlow flow{rep % 4 == 0 ? weights_to_flow(inst.dnn, game).z
                                   : random_flow(game.C, game.d, rng)};
    EquilibriumReport def = wardrop_check_definition(game, flow, 1e-8);
    EquilibriumReport vi = wardrop_check_vi(game, flow, 1e-8);
    if (def.is_equilibrium == vi.is_equilibrium) ++agree;
  }
  report(9, "definitional and VI equilibrium checks agree (1000 flows)",
         agree == total, fmt("%.0f/1000 agreements", agree));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures == 0) {
    std::printf("all 9 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}

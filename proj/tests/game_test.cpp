#include <doctest.h>

#include <random>

#include "congnet/optim.hpp"
#include "congnet/reduction.hpp"
#include "support.hpp"

using namespace congnet;
using namespace congnet::testing;

namespace {
CongestionGame f1_game() {
  Instance inst = f1();
  return build_game(inst.dnn, inst.data, inst.loss);
}

MarginalFlow flow2(double a, double b) {
  MarginalFlow f;
  f.z = (Matrix(2, 1) << a, b).finished();
  return f;
}
}  // namespace

TEST_CASE("social cost on F1 matches the closed form") {
  CongestionGame game = f1_game();
  CHECK(social_cost(game, flow2(2.0 / 3.0, 1.0 / 3.0)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("zero-cost routing has zero social cost") {
  Instance inst = f2();
  CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
  CHECK(social_cost(game, flow2(1.0, 0.0)) == 0.0);
}

TEST_CASE("uniform flow on F3 with the classification loss") {
  Instance inst = f3(5);
  // One sample x = (0.5, 0.5): SC = sum over two penalized classes of (1/3)^2.
  Matrix X(2, 1);
  X << 0.5, 0.5;
  inst.data = Dataset(X, inst.data.labels, true);
  inst.loss = PowerLoss::classification(inst.data, 2.0);
  CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
  CHECK(social_cost(game, uniform_flow(game)) ==
        doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("social cost rejects negative flow") {
  CongestionGame game = f1_game();
  CHECK_THROWS_AS(social_cost(game, flow2(1.5, -0.5)), std::invalid_argument);
}

TEST_CASE("class costs on F1") {
  CongestionGame game = f1_game();
  MarginalFlow eq = flow2(2.0 / 3.0, 1.0 / 3.0);
  CHECK(strategy_class_cost(game, eq, 0, 0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(strategy_class_cost(game, eq, 0, 1) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  MarginalFlow corner = flow2(1.0, 0.0);
  CHECK(strategy_class_cost(game, corner, 0, 0) == doctest::Approx(1.0));
  CHECK(strategy_class_cost(game, corner, 0, 1) == 0.0);
}

TEST_CASE("class cost is zero on an empty class") {
  Instance inst = f3(7);
  CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
  MarginalFlow f;
  f.z = Matrix::Zero(3, 2);
  f.z.row(0).setOnes();
  for (int i = 0; i < game.d; ++i)
    CHECK(strategy_class_cost(game, f, i, 2) == 0.0);
}

TEST_CASE("every path of a class has the same cost") {
  Instance inst = f3(9, 2);
  CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
  std::mt19937_64 rng(2);
  MarginalFlow f{random_flow(3, 2, rng)};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 3; ++k) {
      const double expect = strategy_class_cost(game, f, i, k);
      for (int h = 0; h < 3; ++h)  // all three hidden choices
        CHECK(path_cost(game, f, i, {h}, k) ==
              doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("unknown indices are rejected") {
  CongestionGame game = f1_game();
  MarginalFlow f = flow2(0.5, 0.5);
  CHECK_THROWS_AS(strategy_class_cost(game, f, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(strategy_class_cost(game, f, 0, 2), std::invalid_argument);
}

TEST_CASE("wardrop definition check on F1") {
  CongestionGame game = f1_game();
  CHECK(wardrop_check_definition(game, flow2(2.0 / 3.0, 1.0 / 3.0), 1e-8)
            .is_equilibrium);
  CHECK_FALSE(
      wardrop_check_definition(game, flow2(1.0, 0.0), 1e-8).is_equilibrium);
}

TEST_CASE("F2 corner with zero cost on the support is an equilibrium") {
  Instance inst = f2();
  CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
  CHECK(wardrop_check_definition(game, flow2(1.0, 0.0), 1e-8).is_equilibrium);
}

TEST_CASE("VI residual on F1") {
  CongestionGame game = f1_game();
  EquilibriumReport eq = wardrop_check_vi(game, flow2(2.0 / 3.0, 1.0 / 3.0));
  CHECK(eq.is_equilibrium);
  CHECK(std::abs(eq.vi_residual) <= 1e-14);
  EquilibriumReport bad = wardrop_check_vi(game, flow2(1.0, 0.0));
  CHECK_FALSE(bad.is_equilibrium);
  CHECK(bad.vi_residual == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("definition and VI checks agree on random flows") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 1000; ++rep) {
    Instance inst = random_instance(rng, 3, 3, 5, 3, 1);
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    MarginalFlow f{random_flow(game.C, game.d, rng)};
    CHECK(wardrop_check_definition(game, f, 1e-8).is_equilibrium ==
          wardrop_check_vi(game, f, 1e-8).is_equilibrium);
  }
}

TEST_CASE("social optimum of F1 and F2") {
  {
    CongestionGame game = f1_game();
    OptimumResult so = social_optimum(game);
    CHECK(so.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(so.flow.z(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  }
  {
    Instance inst = f2();
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    OptimumResult so = social_optimum(game);
    CHECK(so.value <= 1e-12);
  }
}

TEST_CASE("solver optimum stays inside the grid-oracle sandwich") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 5; ++rep) {
    Instance inst = random_instance(rng, 2, 2, 4, 2, 1);
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    OptimumResult so = social_optimum(game);
    GridOracleResult oracle = grid_oracle(inst.data, inst.loss, 1e-2);
    CHECK(oracle.value >= so.value - 1e-6);
    CHECK(so.value <= oracle.value + 1e-6);  // grid point is feasible
  }
}

TEST_CASE("beckmann potential and social cost give the same minimizer value") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    Instance inst = random_instance(rng, 3, 3, 5, 3, 1);
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    OptimumResult so = social_optimum(game);
    OptimumResult we = equilibrium_flow(game);
    CHECK(std::abs(social_cost(game, we.flow) - so.value) <=
          1e-8 * (1.0 + so.value));
  }
}

TEST_CASE("equilibria from different seeds share one value") {
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 5; ++rep) {
    Instance inst = random_instance(rng, 3, 3, 5, 3, 1);
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    const double v1 = social_cost(game, equilibrium_flow(game, 1).flow);
    const double v2 = social_cost(game, equilibrium_flow(game, 99).flow);
    CHECK(std::abs(v1 - v2) <= 1e-6 * (1.0 + v1));
  }
}

TEST_CASE("price of anarchy is one") {
  CongestionGame game = f1_game();
  CHECK(price_of_anarchy(game).poa == doctest::Approx(1.0).epsilon(1e-6));
  Instance perfect = f2();
  CongestionGame zero_game =
      build_game(perfect.dnn, perfect.data, perfect.loss);
  PoaResult res = price_of_anarchy(zero_game);
  CHECK(res.so_is_zero);
  CHECK(res.poa == 1.0);
}

TEST_CASE("solver-found equilibrium passes the VI check") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    Instance inst = random_instance(rng, 3, 3, 5, 3, 1);
    CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
    OptimumResult we = equilibrium_flow(game);
    CHECK(wardrop_check_vi(game, we.flow, 1e-6).is_equilibrium);
  }
}

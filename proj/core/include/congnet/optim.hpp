#pragma once

#include <cstdint>
#include <functional>

#include "congnet/game.hpp"

namespace congnet {

// Euclidean projection onto {u >= 0, sum u = 1}.
Vector project_simplex(const Vector& v);
Matrix project_columns_simplex(const Matrix& m);

using MatList = std::vector<Matrix>;

struct PgdOptions {
  double init_step = 1.0;
  int max_iters = 100000;
  double grad_tol = 1e-9;   // on the projected-gradient norm
  double armijo_c = 1e-4;
  double shrink = 0.5;
  // Invoked after every accepted step with the new iterate and its value.
  std::function<void(const MatList&, double)> on_iterate;
};

struct PgdResult {
  MatList point;
  double value = 0.0;
  double pg_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient descent with Armijo backtracking over a list of
// matrices whose columns are each constrained to the probability simplex.
PgdResult projected_gradient_descent(
    const std::function<double(const MatList&)>& f,
    const std::function<MatList(const MatList&)>& grad, MatList init,
    const PgdOptions& opts);

enum class TrainMode { WeightSpace, MarginalSpace };

struct TrainConfig {
  TrainMode mode = TrainMode::MarginalSpace;
  double init_step = 1.0;
  int max_iters = 100000;
  double grad_tol = 1e-9;
  uint64_t seed = 0;
  int restarts = 1;
};

struct TrainReport {
  double final_loss = 0.0;
  int iterations = 0;
  double pg_norm = 0.0;
  bool converged = false;
  std::vector<double> restart_losses;
  Matrix final_b;                     // C x d aggregates of the best restart
  std::vector<Matrix> final_weights;  // weight-space mode only
};

// Full-batch projected gradient descent on the network loss. The first
// restart starts from the supplied weights, later restarts from random
// column-stochastic points with seeds derived from cfg.seed.
TrainReport train(const LayeredDnn& dnn, const Dataset& data,
                  const PowerLoss& loss, const TrainConfig& cfg);

struct GridOracleResult {
  MarginalFlow flow;
  double value = 0.0;
  long long points_scanned = 0;
};

// Exhaustive enumeration of the product-of-simplices grid at spacing h;
// independent of the gradient path used everywhere else.
GridOracleResult grid_oracle(const Dataset& data, const PowerLoss& loss,
                             double h, long long budget = 10'000'000);

struct TheoremReport {
  TrainReport training;
  double loss_value = 0.0;
  double vi_residual = 0.0;
  bool equilibrium_definition = false;
  bool equilibrium_vi = false;
  double we_value = 0.0;
  double so_value = 0.0;
  double poa = 1.0;
  bool success = false;
};

// Trains to convergence, maps the result onto the associated game and runs
// both equilibrium checks plus the value comparisons.
TheoremReport verify_theorem1(const LayeredDnn& dnn, const Dataset& data,
                              const PowerLoss& loss, const TrainConfig& cfg);

}  // namespace congnet

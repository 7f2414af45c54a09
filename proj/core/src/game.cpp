#include "congnet/game.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "congnet/optim.hpp"

namespace congnet {

namespace {
constexpr double kFormAgreementTol = 1e-12;

void check_flow(const CongestionGame& game, const MarginalFlow& flow) {
  if (flow.z.rows() != game.C || flow.z.cols() != game.d)
    throw std::invalid_argument("flow dimensions do not match game");
  if ((flow.z.array() < 0.0).any())
    throw std::invalid_argument("flow has negative entries");
}

double edge_cost(const CongestionGame& game, int k, int j, double xi) {
  if (xi == 0.0) return 0.0;  // c(0) = 0 for beta >= 2
  return game.coefficients(k, j) * std::pow(xi, game.beta - 1.0);
}
}  // namespace

int CongestionGame::count(Resource::Set s) const {
  int n = 0;
  for (const auto& r : resources)
    if (r.set == s) ++n;
  return n;
}

long long CongestionGame::paths_per_class() const {
  long long n = 1;
  for (size_t l = 1; l + 1 < layer_sizes.size(); ++l) n *= layer_sizes[l];
  return n;
}

Matrix MarginalFlow::congestion(const CongestionGame& game) const {
  return z * game.inputs;  // z_tilde_k^j = sum_i x_i^j z_{k,i}
}

MarginalFlow uniform_flow(const CongestionGame& game) {
  MarginalFlow flow;
  flow.z = Matrix::Constant(game.C, game.d, 1.0 / game.C);
  return flow;
}

double social_cost(const CongestionGame& game, const MarginalFlow& flow) {
  check_flow(game, flow);
  const Matrix zt = flow.congestion(game);

  // Edge-sum form: walk the resource list; only T edges carry cost.
  double edge_sum = 0.0;
  for (const auto& r : game.resources) {
    if (r.set != Resource::Set::T) continue;
    const double xi = zt(r.k, r.j);
    edge_sum += edge_cost(game, r.k, r.j, xi) * xi;
  }

  const double sample_sum =
      (game.coefficients.array() * zt.array().pow(game.beta)).sum();

  if (std::abs(edge_sum - sample_sum) >
      kFormAgreementTol * (1.0 + std::abs(sample_sum)))
    throw std::logic_error("social_cost: edge-sum and sample-sum forms differ");
  return sample_sum;
}

double strategy_class_cost(const CongestionGame& game, const MarginalFlow& flow,
                           int population, int klass) {
  check_flow(game, flow);
  if (population < 0 || population >= game.d)
    throw std::invalid_argument("unknown population index");
  if (klass < 0 || klass >= game.C)
    throw std::invalid_argument("unknown class index");
  const Matrix zt = flow.congestion(game);
  double cost = 0.0;
  for (int j = 0; j < game.M; ++j)
    cost += game.inputs(population, j) * edge_cost(game, klass, j, zt(klass, j));
  return cost;
}

Matrix class_cost_matrix(const CongestionGame& game, const MarginalFlow& flow) {
  check_flow(game, flow);
  const Matrix zt = flow.congestion(game);
  Matrix costs(game.C, game.M);
  for (int k = 0; k < game.C; ++k)
    for (int j = 0; j < game.M; ++j) costs(k, j) = edge_cost(game, k, j, zt(k, j));
  return costs * game.inputs.transpose();  // C x d
}

double path_cost(const CongestionGame& game, const MarginalFlow& flow,
                 int population, const std::vector<int>& hidden_nodes,
                 int klass) {
  check_flow(game, flow);
  const int hidden_layers = static_cast<int>(game.layer_sizes.size()) - 2;
  if (static_cast<int>(hidden_nodes.size()) != hidden_layers)
    throw std::invalid_argument("path_cost: wrong number of hidden nodes");
  const Matrix zt = flow.congestion(game);
  double cost = 0.0;
  // B and J edges have zero cost; walk them anyway so the path is validated.
  std::vector<int> nodes;
  nodes.push_back(population);
  for (int h : hidden_nodes) nodes.push_back(h);
  nodes.push_back(klass);
  for (size_t l = 0; l + 1 < nodes.size(); ++l) {
    if (nodes[l] < 0 || nodes[l] >= game.layer_sizes[l])
      throw std::invalid_argument("path_cost: node index out of range");
  }
  for (int j = 0; j < game.M; ++j)
    cost += game.inputs(population, j) * edge_cost(game, klass, j, zt(klass, j));
  return cost;
}

EquilibriumReport wardrop_check_definition(const CongestionGame& game,
                                           const MarginalFlow& flow,
                                           double tol) {
  EquilibriumReport rep;
  rep.class_costs = class_cost_matrix(game, flow);
  rep.is_equilibrium = true;
  double worst = 0.0;
  for (int i = 0; i < game.d; ++i) {
    const double cheapest = rep.class_costs.col(i).minCoeff();
    for (int k = 0; k < game.C; ++k) {
      if (flow.z(k, i) <= tol) continue;  // unused class
      const double excess = rep.class_costs(k, i) - cheapest;
      if (excess > tol) rep.is_equilibrium = false;
      if (excess > worst) {
        worst = excess;
        rep.worst_population = i;
      }
    }
  }
  rep.vi_residual = -worst;
  return rep;
}

EquilibriumReport wardrop_check_vi(const CongestionGame& game,
                                   const MarginalFlow& flow, double tol) {
  EquilibriumReport rep;
  rep.class_costs = class_cost_matrix(game, flow);
  double residual = 0.0;
  double worst_term = std::numeric_limits<double>::infinity();
  for (int i = 0; i < game.d; ++i) {
    const double cheapest = rep.class_costs.col(i).minCoeff();
    const double current = rep.class_costs.col(i).dot(flow.z.col(i));
    const double term = cheapest - current;  // <= 0 always
    residual += term;
    if (term < worst_term) {
      worst_term = term;
      rep.worst_population = i;
    }
  }
  rep.vi_residual = residual;
  rep.is_equilibrium = residual >= -tol;
  return rep;
}

namespace {
OptimumResult minimize_scaled_cost(const CongestionGame& game, double scale,
                                   uint64_t seed, int max_iters,
                                   double grad_tol) {
  auto objective = [&game, scale](const MatList& vars) {
    const Matrix zt = vars[0] * game.inputs;
    return scale * (game.coefficients.array() * zt.array().pow(game.beta)).sum();
  };
  auto gradient = [&game, scale](const MatList& vars) {
    const Matrix zt = vars[0] * game.inputs;
    Matrix dzt = scale * game.beta * game.coefficients.array() *
                 zt.array().pow(game.beta - 1.0);
    return MatList{dzt * game.inputs.transpose()};
  };

  PgdOptions opts;
  opts.max_iters = max_iters;
  opts.grad_tol = grad_tol;

  // Deterministic multi-start: uniform point plus two seeded random points.
  std::vector<Matrix> starts;
  starts.push_back(Matrix::Constant(game.C, game.d, 1.0 / game.C));
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < 2; ++s) {
    Matrix m(game.C, game.d);
    for (int i = 0; i < m.size(); ++i)
      m.data()[i] = -std::log(1.0 - unif(rng));  // exponential -> Dirichlet
    for (int c = 0; c < m.cols(); ++c) m.col(c) /= m.col(c).sum();
    starts.push_back(std::move(m));
  }

  OptimumResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    PgdResult res =
        projected_gradient_descent(objective, gradient, {start}, opts);
    if (res.value < best.value) {
      best.flow.z = res.point[0];
      best.value = res.value;
      best.converged = res.converged;
      best.iterations = res.iterations;
      best.pg_norm = res.pg_norm;
    }
  }
  best.value /= scale;  // report in SC units
  return best;
}
}  // namespace

OptimumResult social_optimum(const CongestionGame& game, uint64_t seed,
                             int max_iters, double grad_tol) {
  return minimize_scaled_cost(game, 1.0, seed, max_iters, grad_tol);
}

OptimumResult equilibrium_flow(const CongestionGame& game, uint64_t seed,
                               int max_iters, double grad_tol) {
  // Beckmann potential Phi = SC / beta for the power-cost family.
  return minimize_scaled_cost(game, 1.0 / game.beta, seed, max_iters, grad_tol);
}

PoaResult price_of_anarchy(const CongestionGame& game, uint64_t seed) {
  PoaResult res;
  OptimumResult so = social_optimum(game, seed);
  OptimumResult we = equilibrium_flow(game, seed + 1);
  res.so_value = so.value;
  res.so_flow = so.flow;
  res.we_value = social_cost(game, we.flow);
  res.we_flow = we.flow;
  if (res.so_value <= 1e-10) {
    res.so_is_zero = true;
    res.poa = (res.we_value <= 1e-10)
                  ? 1.0
                  : std::numeric_limits<double>::infinity();
  } else {
    res.poa = res.we_value / res.so_value;
  }
  return res;
}

}  // namespace congnet

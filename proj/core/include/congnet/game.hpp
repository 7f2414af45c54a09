#pragma once

#include "congnet/dnn.hpp"

namespace congnet {

// One resource of the congestion game. B edges mirror network edges, J edges
// split hidden/output nodes, T edges carry the per-(class, sample) costs and
// lead to the common sink.
struct Resource {
  enum class Set { B, J, T };
  Set set;
  int layer = -1;  // B: source layer index; J: layer of the split node
  int from = -1;   // B: node index in `layer`; J: node index
  int to = -1;     // B: node index in layer+1
  int k = -1;      // T: output class (0-based)
  int j = -1;      // T: sample index (0-based)
};

// Non-atomic congestion game induced by a layered network and a training set.
// One population per input node (size 1); strategies are the source-to-sink
// paths, grouped by the output class they traverse. Costs are zero on B and J
// and A_k^j * xi^(beta-1) on T edge e_k^j; rates are 1 on B and J and x_i^j
// on e_k^j.
struct CongestionGame {
  int d = 0;  // populations
  int C = 0;  // output classes
  int M = 0;  // samples
  std::vector<int> layer_sizes;
  std::vector<Resource> resources;
  Matrix inputs;        // d x M, rates on T edges
  Matrix coefficients;  // C x M
  double beta = 2.0;

  int count(Resource::Set s) const;
  // Paths of one population through one class (same for every pair): the
  // product of hidden-layer widths.
  long long paths_per_class() const;
};

// Marginal action distribution: z(k, i) is the mass of population i routed
// through output class k. Each column lies on the C-vertex simplex.
struct MarginalFlow {
  Matrix z;  // C x d

  Matrix congestion(const CongestionGame& game) const;  // z_tilde, C x M
};

MarginalFlow uniform_flow(const CongestionGame& game);

struct EquilibriumReport {
  bool is_equilibrium = false;
  double vi_residual = 0.0;
  int worst_population = -1;
  Matrix class_costs;  // C x d
};

// Total cost over all players; the edge-sum and per-sample forms are both
// evaluated and must agree to 1e-12.
double social_cost(const CongestionGame& game, const MarginalFlow& flow);

// Cost of any strategy of population i through class k:
// sum_j x_i^j A_k^j (z_tilde_k^j)^(beta-1).
double strategy_class_cost(const CongestionGame& game, const MarginalFlow& flow,
                           int population, int klass);

Matrix class_cost_matrix(const CongestionGame& game, const MarginalFlow& flow);

// Walks an explicit path (one node index per layer) edge by edge. Agrees with
// strategy_class_cost for every path of the class; exposed for cross-checks.
double path_cost(const CongestionGame& game, const MarginalFlow& flow,
                 int population, const std::vector<int>& hidden_nodes,
                 int klass);

EquilibriumReport wardrop_check_definition(const CongestionGame& game,
                                           const MarginalFlow& flow,
                                           double tol = 1e-8);

// Variational-inequality test: the VI form is linear in z over a product of
// simplices, so its minimum sits at a vertex where each population routes all
// mass to its cheapest class.
EquilibriumReport wardrop_check_vi(const CongestionGame& game,
                                   const MarginalFlow& flow, double tol = 1e-8);

struct OptimumResult {
  MarginalFlow flow;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double pg_norm = 0.0;
};

OptimumResult social_optimum(const CongestionGame& game, uint64_t seed = 0,
                             int max_iters = 100000, double grad_tol = 1e-10);

// A Wardrop equilibrium, found by minimizing the Beckmann potential
// Phi = SC / beta over the flow polytope.
OptimumResult equilibrium_flow(const CongestionGame& game, uint64_t seed = 0,
                               int max_iters = 100000, double grad_tol = 1e-10);

struct PoaResult {
  double we_value = 0.0;
  double so_value = 0.0;
  double poa = 1.0;       // +inf encoded as infinity() when WE > 0, SO = 0
  bool so_is_zero = false;
  MarginalFlow we_flow;
  MarginalFlow so_flow;
};

// WE value / SO value. When SO <= 1e-10 the ratio is 1 if the WE value is
// also <= 1e-10, +infinity otherwise.
PoaResult price_of_anarchy(const CongestionGame& game, uint64_t seed = 0);

}  // namespace congnet

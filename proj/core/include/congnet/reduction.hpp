#pragma once

#include "congnet/game.hpp"

namespace congnet {

struct ReductionCertificate {
  uint64_t dnn_digest = 0;
  uint64_t game_digest = 0;
  double network_loss_value = 0.0;
  double social_cost_value = 0.0;
  std::vector<double> per_sample_loss;  // loss terms, one per sample
  std::vector<double> per_edge_cost;    // T-edge cost*congestion terms
  double discrepancy = 0.0;             // |loss - SC|
};

// Network-to-game construction: every network edge becomes a
// B resource, every hidden/output node a J resource, every output node a run
// of M T resources into the common sink; one unit population per input.
CongestionGame build_game(const LayeredDnn& dnn, const Dataset& data,
                          const PowerLoss& loss);

// z_{k,i} = b_{k,i}: route each population along the network's own
// probability tree.
MarginalFlow weights_to_flow(const LayeredDnn& dnn, const CongestionGame& game);

// Builds a network with the given widths whose aggregate matrix equals the
// flow marginals exactly.
LayeredDnn flow_to_weights(const MarginalFlow& flow,
                           const std::vector<int>& layer_sizes);

// Factors a column-stochastic C x d matrix into depth column-stochastic
// factors w^(L) * ... * w^(1) for the given widths [d, n_2, ..., C].
std::vector<Matrix> factorize(const Matrix& w_prime,
                              const std::vector<int>& layer_sizes);

ReductionCertificate certify_reduction(const LayeredDnn& dnn,
                                       const Dataset& data,
                                       const PowerLoss& loss);

}  // namespace congnet

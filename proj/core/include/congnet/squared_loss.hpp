#pragma once

#include "congnet/optim.hpp"

namespace congnet {

// Sloss = sum_j [ sum_{k != e_j} (b_tilde_k^j)^2 + (1 - b_tilde_{e_j}^j)^2 ].
double squared_loss(const LayeredDnn& dnn, const Dataset& data);
double squared_loss(const Matrix& b_tilde, const Dataset& data);

struct LossDecomposition {
  double paper_loss = 0.0;  // classification power loss, beta = 2
  double constant = 0.0;    // sum_j (sum_{k != e_j} b_tilde_k^j)^2
  double squared = 0.0;
  double max_identity_error = 0.0;  // worst |b_tilde_{e_j} - (1 - sum_rest)|
};

// Verifies Sloss = loss + const via the b_tilde_{e_j} = 1 - sum identity.
LossDecomposition loss_decomposition(const LayeredDnn& dnn,
                                     const Dataset& data);

struct Corollary3Report {
  double ratio_max_error = 0.0;  // worst |Sloss/loss - 2| over probe points
  double trained_paper_loss = 0.0;
  double trained_squared_loss = 0.0;
  bool factor_two_holds = false;
};

// C = 2 only: checks Sloss = 2*loss at random feasible points and compares
// trainings under the two losses from shared seeds.
Corollary3Report corollary3_check(const LayeredDnn& dnn, const Dataset& data,
                                  const TrainConfig& cfg);

}  // namespace congnet

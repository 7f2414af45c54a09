#pragma once

#include "congnet/io.hpp"

namespace congnet {

struct GeneratorSpec {
  std::vector<int> shape;  // [d, hidden..., C]
  int samples = 1;
  uint64_t weight_seed = 0;
  uint64_t data_seed = 0;
  bool normalized_inputs = true;
  bool classification_loss = true;
  double beta = 2.0;
  uint64_t loss_seed = 0;  // used when classification_loss is false
};

// Deterministic random instance: weights drawn nonnegative then column
// normalized; inputs nonnegative (sum-normalized on request); labels one-hot
// uniform; generic-loss coefficients drawn positive.
Instance generate_instance(const GeneratorSpec& spec);

}  // namespace congnet

// Shared fixtures and independent oracles for the test suites. The oracles
// here (path enumeration, finite differences) deliberately avoid the library
// code paths they are used to check.
#pragma once

#include <random>

#include "congnet/instance_gen.hpp"

namespace congnet::testing {

// F1: d=1, C=2, no hidden layer, M=1, x=(1), A=(1,2), beta=2.
// The loss b1^2 + 2(1-b1)^2 has its optimum 2/3 at b1 = 2/3.
inline Instance f1(double b1 = 2.0 / 3.0) {
  Instance inst;
  inst.dnn.layer_sizes = {1, 2};
  inst.dnn.weights = {(Matrix(2, 1) << b1, 1.0 - b1).finished()};
  Matrix X = Matrix::Constant(1, 1, 1.0);
  Matrix Y(2, 1);
  Y << 1.0, 0.0;
  inst.data = Dataset(X, Y, true);
  inst.loss = PowerLoss((Matrix(2, 1) << 1.0, 2.0).finished(), 2.0);
  return inst;
}

// F2: F1's shape with the classification loss, true class 0 -> A = (0, 1).
inline Instance f2(double b1 = 1.0) {
  Instance inst = f1(b1);
  inst.loss = PowerLoss::classification(inst.data, 2.0);
  inst.classification_loss = true;
  return inst;
}

// F3: the d=2, hidden 3, C=3 shape.
inline Instance f3(uint64_t seed = 0, int samples = 1) {
  GeneratorSpec spec;
  spec.shape = {2, 3, 3};
  spec.samples = samples;
  spec.weight_seed = seed;
  spec.data_seed = seed + 1;
  spec.normalized_inputs = true;
  spec.classification_loss = true;
  return generate_instance(spec);
}

inline Instance random_instance(std::mt19937_64& rng, int max_d = 4,
                                int max_c = 4, int max_hidden_width = 6,
                                int max_samples = 5, int max_hidden_layers = 2,
                                bool classification = false) {
  std::uniform_int_distribution<int> d_dist(1, max_d), c_dist(2, max_c),
      m_dist(1, max_samples), l_dist(0, max_hidden_layers);
  GeneratorSpec spec;
  const int C = c_dist(rng);
  spec.shape.push_back(d_dist(rng));
  const int hidden = l_dist(rng);
  std::uniform_int_distribution<int> w_dist(C, max_hidden_width);
  for (int l = 0; l < hidden; ++l) spec.shape.push_back(w_dist(rng));
  spec.shape.push_back(C);
  spec.samples = m_dist(rng);
  spec.weight_seed = rng();
  spec.data_seed = rng();
  spec.loss_seed = rng();
  spec.normalized_inputs = classification;
  spec.classification_loss = classification;
  return generate_instance(spec);
}

// Path-enumeration oracle: walks every input-to-output path of the layered
// graph by explicit recursion and sums x * (product of weights).
inline double path_sum_oracle(const LayeredDnn& dnn, const Vector& x,
                              int output) {
  double total = 0.0;
  const int L = dnn.depth();
  std::function<double(int, int)> from = [&](int layer, int node) -> double {
    if (layer == L) return node == output ? 1.0 : 0.0;
    double s = 0.0;
    for (int next = 0; next < dnn.layer_sizes[layer + 1]; ++next)
      s += dnn.weights[layer](next, node) * from(layer + 1, next);
    return s;
  };
  for (int i = 0; i < dnn.input_dim(); ++i) total += x[i] * from(0, i);
  return total;
}

// Central finite differences of the power loss as a function of b.
inline Matrix fd_gradient_b(const Matrix& b, const Dataset& data,
                            const PowerLoss& loss, double h = 1e-6) {
  auto value = [&](const Matrix& bb) {
    const Matrix bt = bb * data.inputs;
    return (loss.coefficients.array() * bt.array().pow(loss.beta)).sum();
  };
  Matrix g(b.rows(), b.cols());
  for (int r = 0; r < b.rows(); ++r)
    for (int c = 0; c < b.cols(); ++c) {
      Matrix hi = b, lo = b;
      hi(r, c) += h;
      lo(r, c) -= h;
      g(r, c) = (value(hi) - value(lo)) / (2.0 * h);
    }
  return g;
}

inline Matrix random_flow(int C, int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix z(C, d);
  for (int i = 0; i < z.size(); ++i) z.data()[i] = -std::log(1.0 - unif(rng));
  for (int c = 0; c < d; ++c) z.col(c) /= z.col(c).sum();
  return z;
}

}  // namespace congnet::testing

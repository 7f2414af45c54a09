#include "congnet/instance_gen.hpp"

#include <random>
#include <stdexcept>

namespace congnet {

namespace {
Matrix random_stochastic(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = -std::log(1.0 - unif(rng));
  for (int c = 0; c < cols; ++c) m.col(c) /= m.col(c).sum();
  return m;
}
}  // namespace

Instance generate_instance(const GeneratorSpec& spec) {
  if (spec.shape.size() < 2)
    throw std::invalid_argument("generate_instance: shape needs >= 2 layers");
  const int d = spec.shape.front();
  const int C = spec.shape.back();
  for (size_t l = 1; l + 1 < spec.shape.size(); ++l)
    if (spec.shape[l] < C)
      throw std::invalid_argument(
          "generate_instance: hidden width " + std::to_string(spec.shape[l]) +
          " below output width " + std::to_string(C));
  if (spec.samples < 1)
    throw std::invalid_argument("generate_instance: need samples >= 1");

  Instance inst;
  inst.dnn.layer_sizes = spec.shape;
  inst.dnn.activation = Activation::Identity;
  std::mt19937_64 wrng(spec.weight_seed * 0x9E3779B97F4A7C15ull + 0xA5A5A5A5ull);
  for (size_t l = 0; l + 1 < spec.shape.size(); ++l)
    inst.dnn.weights.push_back(
        random_stochastic(spec.shape[l + 1], spec.shape[l], wrng));

  std::mt19937_64 drng(spec.data_seed * 0x9E3779B97F4A7C15ull + 0x5A5A5A5Aull);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix X(d, spec.samples), Y = Matrix::Zero(C, spec.samples);
  for (int j = 0; j < spec.samples; ++j) {
    for (int i = 0; i < d; ++i) X(i, j) = unif(drng);
    if (spec.normalized_inputs) X.col(j) /= X.col(j).sum();
    std::uniform_int_distribution<int> pick(0, C - 1);
    Y(pick(drng), j) = 1.0;
  }
  inst.data = Dataset(std::move(X), std::move(Y), spec.normalized_inputs);

  if (spec.classification_loss) {
    inst.loss = PowerLoss::classification(inst.data, spec.beta);
    inst.classification_loss = true;
  } else {
    std::mt19937_64 lrng(spec.loss_seed * 0x9E3779B97F4A7C15ull + 0x0F0F0F0Full);
    Matrix A(C, spec.samples);
    for (int i = 0; i < A.size(); ++i)
      A.data()[i] = 0.1 + unif(lrng);  // bounded away from zero
    inst.loss = PowerLoss(std::move(A), spec.beta);
  }
  return inst;
}

}  // namespace congnet

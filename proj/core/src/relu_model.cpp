#include "congnet/relu_model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "congnet/reduction.hpp"

namespace congnet {

ReluPathModel::ReluPathModel(LayeredDnn b, double r) : base(std::move(b)), rho(r) {
  if (rho < 0.0 || rho > 1.0)
    throw std::invalid_argument("ReluPathModel: rho must lie in [0,1]");
  base.activation = Activation::Identity;
}

std::vector<Path> enumerate_paths(const LayeredDnn& dnn) {
  std::vector<Path> paths;
  const int L = dnn.depth();
  std::vector<int> nodes(L + 1, 0);
  std::function<void(int, double)> walk = [&](int layer, double product) {
    if (layer == L) {
      Path p;
      p.input = nodes.front();
      p.output = nodes.back();
      p.nodes = nodes;
      p.weight_product = product;
      paths.push_back(std::move(p));
      return;
    }
    for (int next = 0; next < dnn.layer_sizes[layer + 1]; ++next) {
      nodes[layer + 1] = next;
      walk(layer + 1, product * dnn.weights[layer](next, nodes[layer]));
    }
  };
  for (int i = 0; i < dnn.input_dim(); ++i) {
    nodes[0] = i;
    walk(0, 1.0);
  }
  return paths;
}

Matrix expected_outputs(const ReluPathModel& model, const Dataset& data) {
  return model.rho * aggregates(model.base, data).b_tilde;
}

SampleStats sample_outputs(const ReluPathModel& model, const Dataset& data,
                           long long n_samples, uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("sample_outputs: need at least one sample");
  const std::vector<Path> paths = enumerate_paths(model.base);
  const int C = model.base.output_dim();
  const int M = data.size();

  Matrix sum = Matrix::Zero(C, M);
  Matrix sum_sq = Matrix::Zero(C, M);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution alive(model.rho);

  Matrix out(C, M);
  for (long long s = 0; s < n_samples; ++s) {
    out.setZero();
    for (const Path& p : paths) {
      if (!alive(rng)) continue;
      for (int j = 0; j < M; ++j)
        out(p.output, j) += data.inputs(p.input, j) * p.weight_product;
    }
    sum += out;
    sum_sq += out.cwiseProduct(out);
  }

  SampleStats stats;
  stats.samples = n_samples;
  stats.mean = sum / static_cast<double>(n_samples);
  if (n_samples > 1) {
    Matrix var = (sum_sq - n_samples * stats.mean.cwiseProduct(stats.mean)) /
                 static_cast<double>(n_samples - 1);
    stats.stderr_ = (var.cwiseMax(0.0) / static_cast<double>(n_samples))
                        .cwiseSqrt();
  } else {
    stats.stderr_ = Matrix::Zero(C, M);
  }
  return stats;
}

double relu_model_loss(const ReluPathModel& model, const Dataset& data,
                       const PowerLoss& loss) {
  const Matrix eo = expected_outputs(model, data);
  const double direct =
      (loss.coefficients.array() * eo.array().pow(loss.beta)).sum();
  const double linear = network_loss(model.base, data, loss);
  const double scaled = std::pow(model.rho, loss.beta) * linear;
  if (std::abs(direct - scaled) > 1e-12 * (1.0 + std::abs(scaled)))
    throw std::logic_error("relu_model_loss: rho^beta identity violated");
  return direct;
}

FailureGameDescriptor build_failure_game(const LayeredDnn& dnn,
                                         const Dataset& data,
                                         const PowerLoss& loss,
                                         const Vector& penalties) {
  if (penalties.size() != dnn.input_dim())
    throw std::invalid_argument(
        "build_failure_game: one penalty per population required");
  if ((penalties.array() < 0.0).any())
    throw std::invalid_argument("build_failure_game: negative penalty");
  FailureGameDescriptor desc;
  desc.game = build_game(dnn, data, loss);
  desc.penalties = penalties;
  for (size_t r = 0; r < desc.game.resources.size(); ++r)
    if (desc.game.resources[r].set == Resource::Set::J)
      desc.failable_resources.push_back(static_cast<int>(r));
  return desc;
}

ReluGapReport real_relu_gap(const LayeredDnn& dnn, const Dataset& data,
                            double rho, long long n_samples, uint64_t seed) {
  if (dnn.activation != Activation::Relu)
    throw std::invalid_argument("real_relu_gap: relu activation required");

  ReluGapReport rep;
  rep.actual = Matrix(dnn.output_dim(), data.size());
  for (int j = 0; j < data.size(); ++j)
    rep.actual.col(j) = forward(dnn, data.inputs.col(j)).outputs;

  LayeredDnn linear = dnn;
  linear.activation = Activation::Identity;
  ReluPathModel model(std::move(linear), rho);
  rep.model_mean = sample_outputs(model, data, n_samples, seed).mean;
  rep.gap = rep.actual - rep.model_mean;
  return rep;
}

}  // namespace congnet

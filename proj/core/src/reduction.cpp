#include "congnet/reduction.hpp"

#include <cmath>
#include <stdexcept>

namespace congnet {

namespace {

uint64_t fnv1a(const double* data, size_t n, uint64_t h = 0xCBF29CE484222325ull) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

uint64_t dnn_digest(const LayeredDnn& dnn) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (const auto& w : dnn.weights) h = fnv1a(w.data(), w.size(), h);
  return h;
}

}  // namespace

CongestionGame build_game(const LayeredDnn& dnn, const Dataset& data,
                          const PowerLoss& loss) {
  if (dnn.activation != Activation::Identity)
    throw std::invalid_argument(
        "build_game: relu activation not admitted, use the path-failure model");
  ValidationReport v = validate_dnn(dnn);
  for (const auto& c : v.checks)
    if (!c.passed)
      throw std::invalid_argument("build_game: network violates '" + c.name +
                                  "' (" + c.detail + ")");
  if (data.dim() != dnn.input_dim() ||
      data.num_classes() != dnn.output_dim())
    throw std::invalid_argument("build_game: dataset does not fit network");
  if (loss.coefficients.rows() != data.num_classes() ||
      loss.coefficients.cols() != data.size())
    throw std::invalid_argument("build_game: loss does not fit dataset");

  CongestionGame game;
  game.d = dnn.input_dim();
  game.C = dnn.output_dim();
  game.M = data.size();
  game.layer_sizes = dnn.layer_sizes;
  game.inputs = data.inputs;
  game.coefficients = loss.coefficients;
  game.beta = loss.beta;

  // Step 1: every network edge becomes a B resource.
  for (size_t l = 0; l + 1 < dnn.layer_sizes.size(); ++l)
    for (int to = 0; to < dnn.layer_sizes[l + 1]; ++to)
      for (int from = 0; from < dnn.layer_sizes[l]; ++from)
        game.resources.push_back({Resource::Set::B, static_cast<int>(l), from,
                                  to, -1, -1});

  // Step 2: every hidden and output node becomes a J resource.
  for (size_t l = 1; l < dnn.layer_sizes.size(); ++l)
    for (int node = 0; node < dnn.layer_sizes[l]; ++node)
      game.resources.push_back(
          {Resource::Set::J, static_cast<int>(l), node, node, -1, -1});

  // Step 3: every output node gets M concatenated T resources into the sink.
  for (int k = 0; k < game.C; ++k)
    for (int j = 0; j < game.M; ++j)
      game.resources.push_back({Resource::Set::T, -1, -1, -1, k, j});

  return game;
}

MarginalFlow weights_to_flow(const LayeredDnn& dnn,
                             const CongestionGame& game) {
  Matrix b = dnn.weights.front();
  for (size_t l = 1; l < dnn.weights.size(); ++l) b = dnn.weights[l] * b;
  if (b.rows() != game.C || b.cols() != game.d)
    throw std::invalid_argument("weights_to_flow: network does not fit game");
  for (int i = 0; i < b.cols(); ++i)
    if (std::abs(b.col(i).sum() - 1.0) > 1e-10)
      throw std::invalid_argument(
          "weights_to_flow: marginals infeasible, normalization violated");
  return MarginalFlow{std::move(b)};
}

std::vector<Matrix> factorize(const Matrix& w_prime,
                              const std::vector<int>& layer_sizes) {
  const int C = static_cast<int>(w_prime.rows());
  const int d = static_cast<int>(w_prime.cols());
  if (layer_sizes.size() < 2 || layer_sizes.front() != d ||
      layer_sizes.back() != C)
    throw std::invalid_argument("factorize: widths do not match the target");
  for (size_t l = 1; l + 1 < layer_sizes.size(); ++l)
    if (layer_sizes[l] < C)
      throw std::invalid_argument("factorize: hidden width below C");
  if ((w_prime.array() < 0.0).any())
    throw std::invalid_argument("factorize: negative entry in target");
  double max_err = 0.0;
  for (int c = 0; c < d; ++c)
    max_err = std::max(max_err, std::abs(w_prime.col(c).sum() - 1.0));
  if (max_err > 1e-12)
    throw std::invalid_argument(
        "factorize: target not column-stochastic, max column-sum error " +
        std::to_string(max_err));

  const int L = static_cast<int>(layer_sizes.size()) - 1;
  std::vector<Matrix> out;
  if (L == 1) {
    out.push_back(w_prime);
    return out;
  }

  // First factor carries w' in the top C rows; the dead rows stay zero.
  Matrix w1 = Matrix::Zero(layer_sizes[1], d);
  w1.topRows(C) = w_prime;
  out.push_back(std::move(w1));

  // Later factors pass the top C coordinates through and park the dead
  // columns on the first row so every column still sums to 1.
  for (int l = 1; l < L; ++l) {
    Matrix w = Matrix::Zero(layer_sizes[l + 1], layer_sizes[l]);
    w.topLeftCorner(C, C) = Matrix::Identity(C, C);
    for (int c = C; c < layer_sizes[l]; ++c) w(0, c) = 1.0;
    out.push_back(std::move(w));
  }
  return out;
}

LayeredDnn flow_to_weights(const MarginalFlow& flow,
                           const std::vector<int>& layer_sizes) {
  LayeredDnn dnn;
  dnn.layer_sizes = layer_sizes;
  dnn.activation = Activation::Identity;
  dnn.weights = factorize(flow.z, layer_sizes);
  return dnn;
}

ReductionCertificate certify_reduction(const LayeredDnn& dnn,
                                       const Dataset& data,
                                       const PowerLoss& loss) {
  CongestionGame game = build_game(dnn, data, loss);
  AggregateCoefficients agg = aggregates(dnn, data);
  MarginalFlow flow = weights_to_flow(dnn, game);

  ReductionCertificate cert;
  cert.dnn_digest = dnn_digest(dnn);
  cert.game_digest = fnv1a(game.inputs.data(), game.inputs.size(),
                           fnv1a(game.coefficients.data(),
                                 game.coefficients.size()));
  cert.network_loss_value = network_loss(agg, loss);
  cert.social_cost_value = social_cost(game, flow);
  cert.discrepancy =
      std::abs(cert.network_loss_value - cert.social_cost_value);

  for (int j = 0; j < data.size(); ++j) {
    double term = 0.0;
    for (int k = 0; k < game.C; ++k)
      term += loss.coefficients(k, j) *
              std::pow(agg.b_tilde(k, j), loss.beta);
    cert.per_sample_loss.push_back(term);
  }
  const Matrix zt = flow.congestion(game);
  for (const auto& r : game.resources) {
    if (r.set != Resource::Set::T) continue;
    const double xi = zt(r.k, r.j);
    const double c =
        (xi == 0.0) ? 0.0
                    : game.coefficients(r.k, r.j) * std::pow(xi, game.beta - 1.0);
    cert.per_edge_cost.push_back(c * xi);
  }
  return cert;
}

}  // namespace congnet

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace congnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { Identity, Relu };

// Layered feed-forward network with dense connections between consecutive
// layers. weights[l] has shape layer_sizes[l+1] x layer_sizes[l]; entry (k,j)
// is the weight on the edge from node j of layer l to node k of layer l+1.
// Valid networks are nonnegative and column-stochastic (each node's outgoing
// weights sum to 1).
struct LayeredDnn {
  std::vector<int> layer_sizes;  // n_1 = d inputs, ..., n_{L+1} = C outputs
  std::vector<Matrix> weights;
  Activation activation = Activation::Identity;

  int depth() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int num_edges() const;
  int num_hidden_and_output_nodes() const;
};

// Full-batch training set: inputs as d x M, one-hot labels as C x M.
struct Dataset {
  Matrix inputs;
  Matrix labels;
  std::vector<int> true_class;  // index e_j with y^j[e_j] = 1
  bool normalized_inputs = false;

  Dataset() = default;
  Dataset(Matrix inputs, Matrix labels, bool require_normalized = false);

  int dim() const { return static_cast<int>(inputs.rows()); }
  int num_classes() const { return static_cast<int>(labels.rows()); }
  int size() const { return static_cast<int>(inputs.cols()); }
};

// Loss family l(xi, y_k^j) = A_k^j * xi^beta with A >= 0, beta >= 2.
struct PowerLoss {
  Matrix coefficients;  // C x M
  double beta = 2.0;
  bool strictly_positive = false;

  PowerLoss() = default;
  PowerLoss(Matrix coefficients, double beta);

  // Classification mode: A_k^j = 1 off the true class, 0 on it.
  static PowerLoss classification(const Dataset& data, double beta);
};

// Per-layer values of one forward pass.
struct ForwardTrace {
  std::vector<Vector> pre_activations;  // z per layer 2..L+1
  std::vector<Vector> activations;      // g per layer 1..L+1 (layer 1 = input)
  Vector outputs;
};

// b_{k,i} = sum over input->output paths of the path weight product;
// b_tilde_k^j = sum_i x_i^j b_{k,i}.
struct AggregateCoefficients {
  Matrix b;        // C x d
  Matrix b_tilde;  // C x M
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
  std::string summary() const;
};

ValidationReport validate_dnn(const LayeredDnn& dnn);
ValidationReport validate_dataset(const Dataset& data);

ForwardTrace forward(const LayeredDnn& dnn, const Vector& x);

AggregateCoefficients aggregates(const LayeredDnn& dnn, const Dataset& data);

double network_loss(const LayeredDnn& dnn, const Dataset& data,
                    const PowerLoss& loss);
double network_loss(const AggregateCoefficients& agg, const PowerLoss& loss);

// Gradient of the loss with respect to the aggregate matrix b:
// entry (k,i) = sum_j beta * A_k^j * (b_tilde_k^j)^(beta-1) * x_i^j.
Matrix loss_gradient_b(const AggregateCoefficients& agg, const Dataset& data,
                       const PowerLoss& loss);

}  // namespace congnet

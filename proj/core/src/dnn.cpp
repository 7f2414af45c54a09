#include "congnet/dnn.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace congnet {

namespace {
constexpr double kStochasticTol = 1e-12;
}

int LayeredDnn::num_edges() const {
  int n = 0;
  for (const auto& w : weights) n += static_cast<int>(w.size());
  return n;
}

int LayeredDnn::num_hidden_and_output_nodes() const {
  return std::accumulate(layer_sizes.begin() + 1, layer_sizes.end(), 0);
}

Dataset::Dataset(Matrix in, Matrix lab, bool require_normalized)
    : inputs(std::move(in)), labels(std::move(lab)) {
  if (inputs.cols() != labels.cols())
    throw std::invalid_argument("Dataset: inputs/labels sample count mismatch");
  if ((inputs.array() < 0.0).any())
    throw std::invalid_argument("Dataset: negative input coordinate");
  const int M = static_cast<int>(inputs.cols());
  const int C = static_cast<int>(labels.rows());
  true_class.resize(M);
  for (int j = 0; j < M; ++j) {
    int hot = -1;
    for (int k = 0; k < C; ++k) {
      const double v = labels(k, j);
      if (v == 1.0) {
        if (hot >= 0)
          throw std::invalid_argument("Dataset: label has two unit entries");
        hot = k;
      } else if (v != 0.0) {
        throw std::invalid_argument("Dataset: label entry not in {0,1}");
      }
    }
    if (hot < 0) throw std::invalid_argument("Dataset: label has no unit entry");
    true_class[j] = hot;
  }
  if (require_normalized) {
    for (int j = 0; j < M; ++j) {
      if (std::abs(inputs.col(j).sum() - 1.0) > kStochasticTol)
        throw std::invalid_argument("Dataset: input column not normalized");
    }
    normalized_inputs = true;
  }
}

PowerLoss::PowerLoss(Matrix A, double b) : coefficients(std::move(A)), beta(b) {
  if (beta < 2.0) throw std::invalid_argument("PowerLoss: beta must be >= 2");
  if ((coefficients.array() < 0.0).any())
    throw std::invalid_argument("PowerLoss: negative coefficient");
  strictly_positive = (coefficients.array() > 0.0).all();
}

PowerLoss PowerLoss::classification(const Dataset& data, double beta) {
  Matrix A = Matrix::Ones(data.num_classes(), data.size());
  for (int j = 0; j < data.size(); ++j) A(data.true_class[j], j) = 0.0;
  return PowerLoss(std::move(A), beta);
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "[pass] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << '\n';
  }
  return os.str();
}

ValidationReport validate_dnn(const LayeredDnn& dnn) {
  ValidationReport rep;
  auto add = [&rep](std::string name, bool ok, std::string detail = "") {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  {
    bool ok = dnn.layer_sizes.size() >= 2 &&
              dnn.weights.size() + 1 == dnn.layer_sizes.size();
    for (int n : dnn.layer_sizes) ok = ok && n > 0;
    std::ostringstream os;
    os << "widths [";
    for (size_t i = 0; i < dnn.layer_sizes.size(); ++i)
      os << (i ? "," : "") << dnn.layer_sizes[i];
    os << "]";
    add("layer structure", ok, os.str());
    if (!ok) return rep;
  }

  {
    bool ok = true;
    std::string detail;
    for (size_t l = 0; l < dnn.weights.size() && ok; ++l) {
      const Matrix& w = dnn.weights[l];
      if (w.rows() != dnn.layer_sizes[l + 1] || w.cols() != dnn.layer_sizes[l]) {
        ok = false;
        detail = "matrix " + std::to_string(l) + " shape mismatch";
      }
    }
    add("weight shapes", ok, detail);
    if (!ok) return rep;
  }

  {
    bool ok = true;
    std::string detail;
    for (size_t l = 0; l < dnn.weights.size() && ok; ++l) {
      const Matrix& w = dnn.weights[l];
      for (int r = 0; r < w.rows() && ok; ++r)
        for (int c = 0; c < w.cols() && ok; ++c)
          if (w(r, c) < 0.0) {
            ok = false;
            std::ostringstream os;
            os << "(layer " << l << ", row " << r << ", col " << c << ")";
            detail = os.str();
          }
    }
    add("nonnegative weights", ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (size_t l = 0; l < dnn.weights.size() && ok; ++l) {
      const Matrix& w = dnn.weights[l];
      for (int c = 0; c < w.cols() && ok; ++c) {
        const double s = w.col(c).sum();
        if (std::abs(s - 1.0) > kStochasticTol) {
          ok = false;
          std::ostringstream os;
          os << "layer " << l << " col " << c << " sums to " << s;
          detail = os.str();
        }
      }
    }
    add("column-stochastic weights", ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    const int C = dnn.output_dim();
    for (size_t l = 1; l + 1 < dnn.layer_sizes.size() && ok; ++l) {
      if (dnn.layer_sizes[l] < C) {
        ok = false;
        detail = "hidden layer " + std::to_string(l) + " narrower than output";
      }
    }
    add("hidden widths >= C", ok, detail);
  }

  return rep;
}

ValidationReport validate_dataset(const Dataset& data) {
  ValidationReport rep;
  rep.checks.push_back(
      {"nonnegative inputs", !(data.inputs.array() < 0.0).any(), ""});
  bool onehot = true;
  for (int j = 0; j < data.size() && onehot; ++j)
    onehot = data.labels.col(j).sum() == 1.0 &&
             data.labels.col(j).maxCoeff() == 1.0;
  rep.checks.push_back({"one-hot labels", onehot, ""});
  if (data.normalized_inputs) {
    bool norm = true;
    for (int j = 0; j < data.size() && norm; ++j)
      norm = std::abs(data.inputs.col(j).sum() - 1.0) <= kStochasticTol;
    rep.checks.push_back({"normalized inputs", norm, ""});
  }
  return rep;
}

ForwardTrace forward(const LayeredDnn& dnn, const Vector& x) {
  if (x.size() != dnn.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  ForwardTrace trace;
  trace.activations.push_back(x);
  Vector g = x;
  for (const Matrix& w : dnn.weights) {
    Vector z = w * g;
    trace.pre_activations.push_back(z);
    g = (dnn.activation == Activation::Relu) ? z.cwiseMax(0.0).eval() : z;
    trace.activations.push_back(g);
  }
  trace.outputs = g;
  return trace;
}

AggregateCoefficients aggregates(const LayeredDnn& dnn, const Dataset& data) {
  if (dnn.activation != Activation::Identity)
    throw std::invalid_argument("aggregates: requires identity activation");
  if (data.dim() != dnn.input_dim())
    throw std::invalid_argument("aggregates: dataset dimension mismatch");
  AggregateCoefficients agg;
  Matrix b = dnn.weights.front();
  for (size_t l = 1; l < dnn.weights.size(); ++l) b = dnn.weights[l] * b;
  agg.b = std::move(b);
  agg.b_tilde = agg.b * data.inputs;
  return agg;
}

double network_loss(const AggregateCoefficients& agg, const PowerLoss& loss) {
  if (agg.b_tilde.rows() != loss.coefficients.rows() ||
      agg.b_tilde.cols() != loss.coefficients.cols())
    throw std::invalid_argument("network_loss: dimension mismatch");
  return (loss.coefficients.array() * agg.b_tilde.array().pow(loss.beta)).sum();
}

double network_loss(const LayeredDnn& dnn, const Dataset& data,
                    const PowerLoss& loss) {
  return network_loss(aggregates(dnn, data), loss);
}

Matrix loss_gradient_b(const AggregateCoefficients& agg, const Dataset& data,
                       const PowerLoss& loss) {
  // d loss / d b_tilde, then chain through b_tilde = b * X.
  Matrix dbt = loss.beta * loss.coefficients.array() *
               agg.b_tilde.array().pow(loss.beta - 1.0);
  return dbt * data.inputs.transpose();
}

}  // namespace congnet

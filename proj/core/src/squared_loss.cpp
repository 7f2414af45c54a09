#include "congnet/squared_loss.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace congnet {

namespace {
void require_classification_setup(const Dataset& data) {
  if (!data.normalized_inputs)
    throw std::invalid_argument("squared loss requires normalized inputs");
}
}  // namespace

double squared_loss(const Matrix& b_tilde, const Dataset& data) {
  require_classification_setup(data);
  double total = 0.0;
  for (int j = 0; j < data.size(); ++j) {
    const int e = data.true_class[j];
    for (int k = 0; k < data.num_classes(); ++k) {
      const double t = (k == e) ? 1.0 - b_tilde(k, j) : b_tilde(k, j);
      total += t * t;
    }
  }
  return total;
}

double squared_loss(const LayeredDnn& dnn, const Dataset& data) {
  require_classification_setup(data);
  return squared_loss(aggregates(dnn, data).b_tilde, data);
}

LossDecomposition loss_decomposition(const LayeredDnn& dnn,
                                     const Dataset& data) {
  require_classification_setup(data);
  const Matrix bt = aggregates(dnn, data).b_tilde;

  LossDecomposition dec;
  for (int j = 0; j < data.size(); ++j) {
    const int e = data.true_class[j];
    double off_sum = 0.0;
    for (int k = 0; k < data.num_classes(); ++k) {
      if (k == e) continue;
      dec.paper_loss += bt(k, j) * bt(k, j);
      off_sum += bt(k, j);
    }
    dec.constant += off_sum * off_sum;
    dec.max_identity_error =
        std::max(dec.max_identity_error, std::abs(bt(e, j) - (1.0 - off_sum)));
  }
  dec.squared = squared_loss(bt, data);

  if (dec.max_identity_error > 1e-10)
    throw std::logic_error(
        "loss_decomposition: b_tilde identity violated, normalization broken");
  if (std::abs(dec.squared - dec.paper_loss - dec.constant) >
      1e-12 * (1.0 + std::abs(dec.squared)))
    throw std::logic_error("loss_decomposition: three-term identity violated");
  return dec;
}

Corollary3Report corollary3_check(const LayeredDnn& dnn, const Dataset& data,
                                  const TrainConfig& cfg) {
  require_classification_setup(data);
  if (dnn.output_dim() != 2)
    throw std::invalid_argument("corollary3_check: C = 2 required");

  Corollary3Report rep;
  const int C = 2;
  const int d = dnn.input_dim();

  // Factor-2 identity at random feasible marginal points.
  std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ull + 17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const PowerLoss cls = PowerLoss::classification(data, 2.0);
  for (int probe = 0; probe < 100; ++probe) {
    Matrix b(C, d);
    for (int i = 0; i < d; ++i) {
      const double p = unif(rng);
      b(0, i) = p;
      b(1, i) = 1.0 - p;
    }
    const Matrix bt = b * data.inputs;
    const double paper =
        (cls.coefficients.array() * bt.array().square()).sum();
    const double sq = squared_loss(bt, data);
    if (paper > 0.0)
      rep.ratio_max_error =
          std::max(rep.ratio_max_error, std::abs(sq / paper - 2.0));
    else
      rep.ratio_max_error = std::max(rep.ratio_max_error, std::abs(sq));
  }

  // The identity must hold along the whole optimization path, not only at
  // the converged point.
  {
    PgdOptions opts;
    opts.max_iters = cfg.max_iters;
    opts.grad_tol = cfg.grad_tol;
    double worst = 0.0;
    opts.on_iterate = [&](const MatList& vars, double) {
      const Matrix bt = vars[0] * data.inputs;
      const double paper =
          (cls.coefficients.array() * bt.array().square()).sum();
      const double sq = squared_loss(bt, data);
      worst = std::max(worst, std::abs(sq - 2.0 * paper));
    };
    auto objective = [&](const MatList& vars) {
      const Matrix bt = vars[0] * data.inputs;
      return (cls.coefficients.array() * bt.array().square()).sum();
    };
    auto gradient = [&](const MatList& vars) {
      const Matrix bt = vars[0] * data.inputs;
      Matrix dbt = 2.0 * cls.coefficients.array() * bt.array();
      return MatList{dbt * data.inputs.transpose()};
    };
    Matrix init(C, d);
    for (int i = 0; i < d; ++i) {
      const double p = unif(rng);
      init(0, i) = p;
      init(1, i) = 1.0 - p;
    }
    projected_gradient_descent(objective, gradient, {init}, opts);
    if (worst > 1e-12)
      throw std::logic_error(
          "corollary3_check: factor-2 identity broke along the iterates");
  }

  // Train under both losses from shared seeds; converged values must keep
  // the factor-2 relation.
  TrainReport paper_run = train(dnn, data, cls, cfg);
  rep.trained_paper_loss = paper_run.final_loss;
  rep.trained_squared_loss =
      squared_loss(Matrix(paper_run.final_b * data.inputs), data);
  rep.factor_two_holds =
      rep.ratio_max_error <= 1e-12 &&
      std::abs(rep.trained_squared_loss - 2.0 * rep.trained_paper_loss) <= 1e-8;
  return rep;
}

}  // namespace congnet

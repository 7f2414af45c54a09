#include "congnet/optim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "congnet/reduction.hpp"

namespace congnet {

Vector project_simplex(const Vector& v) {
  const int n = static_cast<int>(v.size());
  if (n == 0) return v;
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    const double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      tau = t;
    }
  }
  (void)rho;
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

Matrix project_columns_simplex(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (int c = 0; c < m.cols(); ++c) out.col(c) = project_simplex(m.col(c));
  return out;
}

namespace {

MatList project_all(const MatList& vars) {
  MatList out;
  out.reserve(vars.size());
  for (const auto& m : vars) out.push_back(project_columns_simplex(m));
  return out;
}

double dot(const MatList& a, const MatList& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    s += (a[i].array() * b[i].array()).sum();
  return s;
}

double norm(const MatList& a) { return std::sqrt(dot(a, a)); }

MatList axpy(const MatList& x, double alpha, const MatList& g) {
  MatList out;
  out.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) out.push_back(x[i] - alpha * g[i]);
  return out;
}

MatList diff(const MatList& a, const MatList& b) {
  MatList out;
  out.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
  return out;
}

}  // namespace

PgdResult projected_gradient_descent(
    const std::function<double(const MatList&)>& f,
    const std::function<MatList(const MatList&)>& grad, MatList init,
    const PgdOptions& opts) {
  PgdResult res;
  MatList x = project_all(init);
  double fx = f(x);
  if (!std::isfinite(fx)) throw std::runtime_error("pgd: non-finite objective");

  for (int it = 0; it < opts.max_iters; ++it) {
    MatList g = grad(x);

    // Gradient mapping at the reference step 1: convergence measure.
    MatList mapped = project_all(axpy(x, 1.0, g));
    MatList pg = diff(x, mapped);
    res.pg_norm = norm(pg);
    res.iterations = it;
    if (res.pg_norm <= opts.grad_tol) {
      res.converged = true;
      break;
    }

    // Armijo backtracking on the projected step.
    double step = opts.init_step;
    bool moved = false;
    while (step > 1e-18) {
      MatList cand = project_all(axpy(x, step, g));
      const double fc = f(cand);
      if (!std::isfinite(fc))
        throw std::runtime_error("pgd: non-finite objective during line search");
      const double decrease = dot(g, diff(cand, x));  // <= 0 for a descent move
      // Predicted improvement below the representable resolution of f: the
      // line search cannot make progress here, hand over to the polish phase.
      if (-opts.armijo_c * decrease <= 1e-16 * (1.0 + std::abs(fx))) break;
      if (fc <= fx + opts.armijo_c * decrease) {
        x = std::move(cand);
        fx = fc;
        moved = true;
        if (opts.on_iterate) opts.on_iterate(x, fx);
        break;
      }
      step *= opts.shrink;
    }
    if (!moved) {
      // The line search hit the floating-point noise floor: near the
      // minimizer the objective differences fall below machine precision
      // while the gradient mapping is still measurable. Refine with a
      // fixed step scaled by a local curvature estimate and judge progress
      // by the gradient mapping alone.
      const double dist = res.pg_norm;
      double step = opts.init_step;
      if (dist > 0.0) {
        MatList g2 = grad(mapped);
        const double curv = norm(diff(g, g2)) / dist;
        if (curv > 0.0 && std::isfinite(curv))
          step = std::min(opts.init_step, 1.0 / curv);
      }
      double best_pg = res.pg_norm;
      MatList best_x = x;
      int since_improve = 0;
      for (; it < opts.max_iters && since_improve < 50; ++it) {
        x = project_all(axpy(x, step, g));
        g = grad(x);
        MatList pg2 = diff(x, project_all(axpy(x, 1.0, g)));
        res.pg_norm = norm(pg2);
        res.iterations = it;
        if (res.pg_norm < best_pg) {
          if (res.pg_norm < 0.9 * best_pg) since_improve = 0;
          best_pg = res.pg_norm;
          best_x = x;
        } else {
          ++since_improve;
        }
        if (res.pg_norm <= opts.grad_tol) {
          res.converged = true;
          break;
        }
      }
      x = std::move(best_x);
      res.pg_norm = best_pg;
      fx = f(x);
      break;
    }
  }

  res.point = std::move(x);
  res.value = fx;
  return res;
}

namespace {

std::mt19937_64 derived_rng(uint64_t seed, int restart) {
  return std::mt19937_64(seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull * (restart + 1));
}

Matrix random_stochastic(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i)
    m.data()[i] = -std::log(1.0 - unif(rng));
  for (int c = 0; c < cols; ++c) m.col(c) /= m.col(c).sum();
  return m;
}

}  // namespace

TrainReport train(const LayeredDnn& dnn, const Dataset& data,
                  const PowerLoss& loss, const TrainConfig& cfg) {
  if (cfg.mode == TrainMode::WeightSpace &&
      dnn.activation != Activation::Identity)
    throw std::invalid_argument("train: identity activation required");

  PgdOptions opts;
  opts.init_step = cfg.init_step;
  opts.max_iters = cfg.max_iters;
  opts.grad_tol = cfg.grad_tol;

  TrainReport report;
  double best = std::numeric_limits<double>::infinity();

  for (int r = 0; r < cfg.restarts; ++r) {
    PgdResult res;
    if (cfg.mode == TrainMode::MarginalSpace) {
      auto objective = [&](const MatList& vars) {
        const Matrix bt = vars[0] * data.inputs;
        return (loss.coefficients.array() * bt.array().pow(loss.beta)).sum();
      };
      auto gradient = [&](const MatList& vars) {
        const Matrix bt = vars[0] * data.inputs;
        Matrix dbt = loss.beta * loss.coefficients.array() *
                     bt.array().pow(loss.beta - 1.0);
        return MatList{dbt * data.inputs.transpose()};
      };
      Matrix init;
      if (r == 0) {
        init = aggregates(dnn, data).b;
      } else {
        auto rng = derived_rng(cfg.seed, r);
        init = random_stochastic(dnn.output_dim(), dnn.input_dim(), rng);
      }
      res = projected_gradient_descent(objective, gradient, {init}, opts);
    } else {
      auto objective = [&](const MatList& vars) {
        Matrix b = vars.front();
        for (size_t l = 1; l < vars.size(); ++l) b = vars[l] * b;
        const Matrix bt = b * data.inputs;
        return (loss.coefficients.array() * bt.array().pow(loss.beta)).sum();
      };
      auto gradient = [&](const MatList& vars) {
        const size_t L = vars.size();
        // Prefixes Q_l = w^(l-1) ... w^(1), suffixes P_l = w^(L) ... w^(l+1).
        std::vector<Matrix> prefix(L), suffix(L);
        Matrix acc = Matrix::Identity(vars[0].cols(), vars[0].cols());
        for (size_t l = 0; l < L; ++l) {
          prefix[l] = acc;
          acc = vars[l] * acc;
        }
        const Matrix b = acc;
        Matrix sacc = Matrix::Identity(b.rows(), b.rows());
        for (size_t l = L; l-- > 0;) {
          suffix[l] = sacc;
          sacc = sacc * vars[l];
        }
        const Matrix bt = b * data.inputs;
        Matrix dbt = loss.beta * loss.coefficients.array() *
                     bt.array().pow(loss.beta - 1.0);
        const Matrix db = dbt * data.inputs.transpose();
        MatList g(L);
        for (size_t l = 0; l < L; ++l)
          g[l] = suffix[l].transpose() * db * prefix[l].transpose();
        return g;
      };
      MatList init;
      if (r == 0) {
        init = dnn.weights;
      } else {
        auto rng = derived_rng(cfg.seed, r);
        for (size_t l = 0; l + 1 < dnn.layer_sizes.size(); ++l)
          init.push_back(random_stochastic(dnn.layer_sizes[l + 1],
                                           dnn.layer_sizes[l], rng));
      }
      res = projected_gradient_descent(objective, gradient, std::move(init),
                                       opts);
    }

    report.restart_losses.push_back(res.value);
    if (res.value < best) {
      best = res.value;
      report.final_loss = res.value;
      report.iterations = res.iterations;
      report.pg_norm = res.pg_norm;
      report.converged = res.converged;
      if (cfg.mode == TrainMode::MarginalSpace) {
        report.final_b = res.point[0];
        report.final_weights.clear();
      } else {
        report.final_weights = res.point;
        Matrix b = res.point.front();
        for (size_t l = 1; l < res.point.size(); ++l) b = res.point[l] * b;
        report.final_b = b;
      }
    }
  }
  return report;
}

namespace {

// Compositions of n into `parts` nonnegative integers, visited in
// lexicographic order of the leading coordinates.
void enumerate_column(int parts, int n, std::vector<int>& cur,
                      const std::function<void()>& leaf) {
  if (parts == 1) {
    cur.push_back(n);
    leaf();
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= n; ++v) {
    cur.push_back(v);
    enumerate_column(parts - 1, n - v, cur, leaf);
    cur.pop_back();
  }
}

long long simplex_grid_count(int parts, int n) {
  // C(n + parts - 1, parts - 1)
  long long r = 1;
  for (int i = 1; i < parts; ++i) {
    r = r * (n + i) / i;
    if (r > (1ll << 62) / (n + parts)) return 1ll << 62;
  }
  return r;
}

}  // namespace

GridOracleResult grid_oracle(const Dataset& data, const PowerLoss& loss,
                             double h, long long budget) {
  if (h <= 0.0) throw std::invalid_argument("grid_oracle: h must be positive");
  const int d = data.dim();
  const int C = static_cast<int>(loss.coefficients.rows());
  const int n = std::max(1, static_cast<int>(std::llround(1.0 / h)));

  const long long per_column = simplex_grid_count(C, n);
  long long total = 1;
  for (int i = 0; i < d; ++i) {
    if (per_column > budget / std::max(total, 1ll))
      throw std::invalid_argument(
          "grid_oracle: budget exceeded, about " +
          std::to_string(per_column) + "^" + std::to_string(d) + " points");
    total *= per_column;
  }

  GridOracleResult best;
  best.value = std::numeric_limits<double>::infinity();
  Matrix z = Matrix::Zero(C, d);
  std::vector<int> cur;

  std::function<void(int)> per_population = [&](int i) {
    if (i == d) {
      const Matrix zt = z * data.inputs;
      const double v =
          (loss.coefficients.array() * zt.array().pow(loss.beta)).sum();
      ++best.points_scanned;
      if (v < best.value) {  // strict: keeps the lexicographically first
        best.value = v;
        best.flow.z = z;
      }
      return;
    }
    enumerate_column(C, n, cur, [&] {
      const size_t off = cur.size() - C;  // cur stacks one block per level
      for (int k = 0; k < C; ++k)
        z(k, i) = static_cast<double>(cur[off + k]) / n;
      per_population(i + 1);
    });
  };
  per_population(0);
  return best;
}

TheoremReport verify_theorem1(const LayeredDnn& dnn, const Dataset& data,
                              const PowerLoss& loss, const TrainConfig& cfg) {
  TheoremReport rep;
  rep.training = train(dnn, data, loss, cfg);
  rep.loss_value = rep.training.final_loss;

  CongestionGame game = build_game(dnn, data, loss);
  MarginalFlow flow{rep.training.final_b};

  EquilibriumReport by_def = wardrop_check_definition(game, flow);
  EquilibriumReport by_vi = wardrop_check_vi(game, flow);
  rep.equilibrium_definition = by_def.is_equilibrium;
  rep.equilibrium_vi = by_vi.is_equilibrium;
  rep.vi_residual = by_vi.vi_residual;
  rep.we_value = social_cost(game, flow);

  PoaResult poa = price_of_anarchy(game, cfg.seed);
  rep.so_value = poa.so_value;
  rep.poa = poa.poa;

  const double rel = 1e-6;
  auto close = [rel](double a, double b) {
    return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
  };
  rep.success = rep.training.converged && rep.equilibrium_definition &&
                rep.equilibrium_vi && close(rep.loss_value, rep.we_value) &&
                close(rep.loss_value, rep.so_value);
  return rep;
}

}  // namespace congnet

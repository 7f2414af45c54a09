#pragma once

#include "congnet/game.hpp"

namespace congnet {

// ReLU gating modeled as whole input-to-output paths failing i.i.d. with
// success probability rho, independent of inputs and weights.
struct ReluPathModel {
  LayeredDnn base;  // identity-activation network whose weights are reused
  double rho = 1.0;

  ReluPathModel(LayeredDnn base, double rho);
};

struct Path {
  int input = 0;
  int output = 0;
  std::vector<int> nodes;  // one node index per layer, input..output
  double weight_product = 1.0;
};

// All source-to-sink paths of the layered graph, deterministic order
// (lexicographic in node indices).
std::vector<Path> enumerate_paths(const LayeredDnn& dnn);

// E(o_k^j) = rho * b_tilde_k^j.
Matrix expected_outputs(const ReluPathModel& model, const Dataset& data);

struct SampleStats {
  Matrix mean;    // C x M
  Matrix stderr_; // C x M empirical standard error of the mean
  long long samples = 0;
};

// Monte Carlo draws of the path-failure model.
SampleStats sample_outputs(const ReluPathModel& model, const Dataset& data,
                           long long n_samples, uint64_t seed);

// Loss on expected outputs; equals rho^beta times the linear loss and the
// identity is asserted to 1e-12.
double relu_model_loss(const ReluPathModel& model, const Dataset& data,
                       const PowerLoss& loss);

struct FailureGameDescriptor {
  CongestionGame game;
  std::vector<int> failable_resources;  // indices into game.resources, all J
  Vector penalties;                     // w_i per population
};

FailureGameDescriptor build_failure_game(const LayeredDnn& dnn,
                                         const Dataset& data,
                                         const PowerLoss& loss,
                                         const Vector& penalties);

struct ReluGapReport {
  Matrix actual;      // real ReLU forward outputs, C x M
  Matrix model_mean;  // Monte Carlo mean under the path model
  Matrix gap;         // actual - model_mean
};

// Diagnostic only: compares real (correlated) ReLU gating against the
// independent-path model. No agreement is asserted.
ReluGapReport real_relu_gap(const LayeredDnn& dnn, const Dataset& data,
                            double rho, long long n_samples, uint64_t seed);

}  // namespace congnet

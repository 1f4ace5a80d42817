#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "matrix.hpp"
#include "types.hpp"

namespace nids {

// Multinomial softmax regression with an L2 penalty on the weights (bias
// unregularized), trained by deterministic full-batch gradient descent.
struct LogRegModel {
  std::size_t dim = 0;
  std::vector<double> weights;  // kNumClasses x dim, row-major
  std::array<double, kNumClasses> bias{};
  double lambda = 0.0;
};

struct LogRegConfig {
  double lambda = -1.0;  // < 0: resolved to 1/n at fit time
  int max_iters = 200;
  double tolerance = 1e-6;    // stop when the gradient norm drops below this
  double initial_step = 1.0;  // backtracking line search parameters
  double backtrack = 0.5;
  double armijo = 1e-4;
  double step_growth = 2.0;
  std::uint64_t seed = 0;  // recorded for provenance; the solver is deterministic
};

// Max-subtracted softmax of one score vector.
std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& scores);

// Mean cross-entropy plus (lambda/2)*||W||^2.
double nll_loss(const LogRegModel& model, const DesignMatrix& X);

struct LogRegGradient {
  std::vector<double> weights;  // kNumClasses x dim
  std::array<double, kNumClasses> bias{};

  double squared_norm() const;
};

LogRegGradient gradient(const LogRegModel& model, const DesignMatrix& X);

struct LogRegTraining {
  LogRegModel model;
  std::vector<double> loss_history;  // loss at initialization, then after each accepted step
  int iterations = 0;
  bool converged = false;
};

LogRegTraining train_logreg(const DesignMatrix& X, const LogRegConfig& cfg);

std::vector<double> predict_proba(const LogRegModel& model, const DesignMatrix& X);
std::vector<std::uint8_t> predict(const LogRegModel& model, const DesignMatrix& X);

// Shared tie rule: the lowest class index wins.
std::uint8_t argmax_class(std::span<const double> row);

}  // namespace nids

#include "linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace nids {

namespace {

constexpr std::size_t kChunkRows = 8192;

inline void row_scores(const double* x, const LogRegModel& m, double* out) {
  for (int k = 0; k < kNumClasses; ++k) {
    const double* w = m.weights.data() + static_cast<std::size_t>(k) * m.dim;
    double acc = m.bias[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < m.dim; ++j) acc += w[j] * x[j];
    out[k] = acc;
  }
}

inline void softmax_inplace(double* z) {
  double zmax = z[0];
  for (int k = 1; k < kNumClasses; ++k) zmax = std::max(zmax, z[k]);
  double sum = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    z[k] = std::exp(z[k] - zmax);
    sum += z[k];
  }
  const double inv = 1.0 / sum;
  for (int k = 0; k < kNumClasses; ++k) z[k] *= inv;
}

void check_model(const LogRegModel& m, const DesignMatrix& X) {
  if (m.dim != X.dim) throw std::invalid_argument("model dimension does not match matrix");
  if (m.weights.size() != static_cast<std::size_t>(kNumClasses) * m.dim)
    throw std::invalid_argument("weight matrix has wrong size");
}

}  // namespace

std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& scores) {
  std::array<double, kNumClasses> p = scores;
  softmax_inplace(p.data());
  return p;
}

double LogRegGradient::squared_norm() const {
  double acc = 0.0;
  for (double w : weights) acc += w * w;
  for (double b : bias) acc += b * b;
  return acc;
}

double nll_loss(const LogRegModel& model, const DesignMatrix& X) {
  check_model(model, X);
  const std::size_t chunks = (X.rows + kChunkRows - 1) / kChunkRows;
  std::vector<double> partial(chunks, 0.0);
  parallel_chunks(X.rows, kChunkRows, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    double acc = 0.0;
    double z[kNumClasses];
    for (std::size_t i = begin; i < end; ++i) {
      row_scores(X.row(i), model, z);
      double zmax = z[0];
      for (int k = 1; k < kNumClasses; ++k) zmax = std::max(zmax, z[k]);
      double sum = 0.0;
      for (int k = 0; k < kNumClasses; ++k) sum += std::exp(z[k] - zmax);
      // -log p_y = log(sum exp(z - zmax)) - (z_y - zmax)
      acc += std::log(sum) - (z[X.labels[i]] - zmax);
    }
    partial[chunk] = acc;
  });
  double loss = 0.0;
  for (double p : partial) loss += p;  // fixed chunk order
  loss /= static_cast<double>(X.rows);

  double reg = 0.0;
  for (double w : model.weights) reg += w * w;
  return loss + 0.5 * model.lambda * reg;
}

LogRegGradient gradient(const LogRegModel& model, const DesignMatrix& X) {
  check_model(model, X);
  const std::size_t wsize = static_cast<std::size_t>(kNumClasses) * model.dim;
  const std::size_t chunks = (X.rows + kChunkRows - 1) / kChunkRows;

  std::vector<std::vector<double>> partial_w(chunks);
  std::vector<std::array<double, kNumClasses>> partial_b(chunks);
  parallel_chunks(X.rows, kChunkRows, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto& dw = partial_w[chunk];
    dw.assign(wsize, 0.0);
    auto& db = partial_b[chunk];
    db.fill(0.0);
    double p[kNumClasses];
    for (std::size_t i = begin; i < end; ++i) {
      const double* x = X.row(i);
      row_scores(x, model, p);
      softmax_inplace(p);
      p[X.labels[i]] -= 1.0;  // p - y
      for (int k = 0; k < kNumClasses; ++k) {
        const double pk = p[k];
        if (pk == 0.0) continue;
        double* row = dw.data() + static_cast<std::size_t>(k) * model.dim;
        for (std::size_t j = 0; j < model.dim; ++j) row[j] += pk * x[j];
        db[static_cast<std::size_t>(k)] += pk;
      }
    }
  });

  LogRegGradient g;
  g.weights.assign(wsize, 0.0);
  for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
    for (std::size_t j = 0; j < wsize; ++j) g.weights[j] += partial_w[chunk][j];
    for (int k = 0; k < kNumClasses; ++k)
      g.bias[static_cast<std::size_t>(k)] += partial_b[chunk][static_cast<std::size_t>(k)];
  }
  const double inv_n = 1.0 / static_cast<double>(X.rows);
  for (std::size_t j = 0; j < wsize; ++j)
    g.weights[j] = g.weights[j] * inv_n + model.lambda * model.weights[j];
  for (auto& b : g.bias) b *= inv_n;
  return g;
}

LogRegTraining train_logreg(const DesignMatrix& X, const LogRegConfig& cfg) {
  if (X.rows == 0) throw std::invalid_argument("cannot train on an empty matrix");
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(cfg.tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  {
    bool classes[kNumClasses] = {};
    int present = 0;
    for (std::uint8_t label : X.labels)
      if (!classes[label]) {
        classes[label] = true;
        ++present;
      }
    if (present < 2) throw std::invalid_argument("training needs at least two classes");
  }

  LogRegTraining result;
  LogRegModel& model = result.model;
  model.dim = X.dim;
  model.weights.assign(static_cast<std::size_t>(kNumClasses) * X.dim, 0.0);
  model.bias.fill(0.0);
  model.lambda = cfg.lambda < 0 ? 1.0 / static_cast<double>(X.rows) : cfg.lambda;

  double loss = nll_loss(model, X);
  result.loss_history.push_back(loss);

  LogRegModel candidate = model;
  double step = cfg.initial_step;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const LogRegGradient g = gradient(model, X);
    const double gnorm2 = g.squared_norm();
    if (std::sqrt(gnorm2) <= cfg.tolerance) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    while (step > 1e-20) {
      for (std::size_t j = 0; j < model.weights.size(); ++j)
        candidate.weights[j] = model.weights[j] - step * g.weights[j];
      for (int k = 0; k < kNumClasses; ++k)
        candidate.bias[static_cast<std::size_t>(k)] =
            model.bias[static_cast<std::size_t>(k)] - step * g.bias[static_cast<std::size_t>(k)];
      candidate.lambda = model.lambda;

      const double candidate_loss = nll_loss(candidate, X);
      if (!std::isfinite(candidate_loss)) {
        step *= cfg.backtrack;
        continue;
      }
      if (candidate_loss <= loss - cfg.armijo * step * gnorm2) {
        accepted = true;
        loss = candidate_loss;
        std::swap(model.weights, candidate.weights);
        model.bias = candidate.bias;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      // no step length makes progress; the iterate is as good as converged
      result.converged = true;
      break;
    }
    result.loss_history.push_back(loss);
    ++result.iterations;
    step = std::min(step * cfg.step_growth, 1e12);
  }

  if (!std::isfinite(loss)) throw NumericError("logistic regression training diverged");
  return result;
}

std::vector<double> predict_proba(const LogRegModel& model, const DesignMatrix& X) {
  check_model(model, X);
  std::vector<double> proba(X.rows * kNumClasses);
  parallel_chunks(X.rows, kChunkRows, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* out = proba.data() + i * kNumClasses;
      row_scores(X.row(i), model, out);
      softmax_inplace(out);
    }
  });
  return proba;
}

std::uint8_t argmax_class(std::span<const double> row) {
  int best = 0;
  for (int k = 1; k < kNumClasses; ++k)
    if (row[static_cast<std::size_t>(k)] > row[static_cast<std::size_t>(best)]) best = k;
  return static_cast<std::uint8_t>(best);
}

std::vector<std::uint8_t> predict(const LogRegModel& model, const DesignMatrix& X) {
  const std::vector<double> proba = predict_proba(model, X);
  std::vector<std::uint8_t> labels(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i)
    labels[i] = argmax_class({proba.data() + i * kNumClasses, kNumClasses});
  return labels;
}

}  // namespace nids

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace nids {

// Dense row-major numeric matrix with class labels and a fixed column
// layout. pipeline_digest ties a transformed matrix back to the pipeline
// state that produced it; matrices built by hand in tests leave it empty.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // rows * dim
  std::vector<std::uint8_t> labels;
  std::vector<std::string> column_names;
  std::string pipeline_digest;

  // diagnostics filled by encode(): categorical tokens missing from the
  // fitted vocabulary (zero for the fitting data by construction)
  std::int64_t unseen_tokens = 0;
  std::vector<std::pair<std::string, std::int64_t>> unseen_by_feature;

  const double* row(std::size_t i) const { return values.data() + i * dim; }
  double* row(std::size_t i) { return values.data() + i * dim; }
  double at(std::size_t i, std::size_t j) const { return values[i * dim + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * dim + j]; }

  void check_dim(std::size_t expected) const {
    if (dim != expected)
      throw std::invalid_argument("matrix dimension " + std::to_string(dim) +
                                  " does not match expected " + std::to_string(expected));
  }
};

// Row subset preserving column layout, labels and provenance.
DesignMatrix take_rows(const DesignMatrix& m, std::span<const std::uint32_t> rows);

}  // namespace nids

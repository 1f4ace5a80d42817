#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "matrix.hpp"

namespace nids::testing {

// Design matrix from literal rows; labels index the global class order.
DesignMatrix make_matrix(const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& labels);

// Small mixed schema for preprocessing tests: two continuous features and
// two categorical features ("proto", "svc").
FeatureSchema tiny_schema();

RawRecord tiny_record(double f0, double f1, const std::string& proto, const std::string& svc,
                      int label);

struct SyntheticOptions {
  std::size_t rows = 500;
  std::uint64_t seed = 1;
  bool difficulty_column = true;
  // adds service tokens that never occur in train-mode data, mimicking the
  // novel-attack drift of the test partition
  bool novel_services = false;
  double label_noise = 0.03;  // fraction of rows with scrambled statistics
};

// Learnable five-class dataset over the full 41-feature connection schema.
// Class-conditional feature patterns keep the classes separable while the
// imbalance mirrors the benchmark (Normal and DoS dominate, U2R is rare).
LabeledDataset make_synthetic_dataset(const SyntheticOptions& options);

// Same data serialized in the NSL-KDD text format.
void write_synthetic_file(const std::string& path, const SyntheticOptions& options);

// Uniform random probability rows (each row sums to 1).
std::vector<double> random_proba(std::size_t rows, std::uint64_t seed);

}  // namespace nids::testing

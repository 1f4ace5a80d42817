#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "matrix.hpp"
#include "schema.hpp"

namespace nids {

// One-hot vocabularies learned from the fitting data, one per categorical
// feature in schema order. Token order is first appearance, which makes the
// encoded layout a pure function of the training file.
struct EncoderState {
  std::vector<std::vector<std::string>> vocabularies;

  std::size_t encoded_dim(const FeatureSchema& schema) const;
  std::vector<std::string> column_names(const FeatureSchema& schema) const;
};

EncoderState fit_encoder(const LabeledDataset& train);

// Numeric and binary features copy through; each categorical feature expands
// to its vocabulary-width indicator block. Tokens that were not in the
// vocabulary encode as an all-zero block and are counted on the matrix.
DesignMatrix encode(const LabeledDataset& ds, const EncoderState& enc);

// Per-column (min, max) observed on the fitting matrix. Only columns that
// originate from continuous features are scaled; binary and one-hot columns
// pass through.
struct ScalerState {
  std::vector<std::uint8_t> scaled;  // per encoded column
  std::vector<double> col_min;
  std::vector<double> col_max;
};

ScalerState fit_scaler(const DesignMatrix& train, const FeatureSchema& schema);

// x' = (x - min) / (max - min); degenerate columns (max == min) map to 0.
// Out-of-range values are not clamped, so test data may leave [0, 1].
DesignMatrix scale(DesignMatrix m, const ScalerState& s);

struct SplitSpec {
  double validation_fraction = 0.10;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> valid;
};

// Per class c, validation receives floor(fraction * n_c) rows chosen by a
// seeded in-class shuffle; both index lists come back in ascending row order.
SplitIndices stratified_split_indices(std::span<const std::uint8_t> labels, const SplitSpec& spec);

// Dataset-level split; requires every class to be present.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           const SplitSpec& spec);

// Fitted preprocessing state: encoder plus scaler, frozen on training data.
class Pipeline {
 public:
  static Pipeline fit(const LabeledDataset& train);
  static Pipeline load(const std::string& path);

  const FeatureSchema& schema() const { return schema_; }
  const EncoderState& encoder() const { return encoder_; }
  const ScalerState& scaler() const { return scaler_; }

  std::size_t encoded_dim() const { return encoder_.encoded_dim(schema_); }
  const std::string& digest() const { return digest_; }

  DesignMatrix transform(const LabeledDataset& ds) const;

  std::string to_text() const;
  void save(const std::string& path) const;

 private:
  Pipeline() = default;

  FeatureSchema schema_;
  EncoderState encoder_;
  ScalerState scaler_;
  std::string digest_;
};

// Headered CSV export of a transformed matrix (debugging aid).
void export_matrix_csv(const DesignMatrix& m, const std::string& path);

}  // namespace nids

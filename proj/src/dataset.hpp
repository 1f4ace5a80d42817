#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "schema.hpp"
#include "taxonomy.hpp"
#include "types.hpp"

namespace nids {

// One parsed connection record. Numeric and categorical cells are stored in
// schema slot order; difficulty is the auxiliary NSL-KDD score column, kept
// on the record but never used as a feature.
struct RawRecord {
  std::vector<double> numeric;
  std::vector<std::string> categorical;
  std::uint8_t label = 0;
  std::string attack_name;
  int difficulty = -1;  // -1 means absent

  bool has_difficulty() const { return difficulty >= 0; }
};

// Immutable columnar dataset. Columns are stored contiguously, which keeps
// loading cheap and lets the preprocessing stage stream one feature at a time.
class LabeledDataset {
 public:
  LabeledDataset(FeatureSchema schema, std::string provenance);

  static LabeledDataset from_records(const FeatureSchema& schema,
                                     const std::vector<RawRecord>& records,
                                     std::string provenance = "records");

  const FeatureSchema& schema() const { return schema_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& provenance() const { return provenance_; }

  std::span<const double> numeric_column(std::size_t slot) const { return numeric_columns_[slot]; }
  const std::vector<std::string>& categorical_column(std::size_t slot) const {
    return categorical_columns_[slot];
  }
  std::span<const std::uint8_t> labels() const { return labels_; }
  const std::string& attack_name(std::size_t row) const { return attack_names_[row]; }
  int difficulty(std::size_t row) const { return difficulties_[row]; }

  RawRecord record(std::size_t row) const;
  LabeledDataset subset(std::span<const std::uint32_t> rows) const;

  void append(const RawRecord& record);

 private:
  FeatureSchema schema_;
  std::string provenance_;
  std::vector<std::vector<double>> numeric_columns_;
  std::vector<std::vector<std::string>> categorical_columns_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::string> attack_names_;
  std::vector<int> difficulties_;
};

// Parses an NSL-KDD-format file: comma separated, no header, 41 feature
// fields plus the attack label and an optional trailing difficulty score.
// Surrounding whitespace is trimmed; anything else is a hard error carrying
// the 1-based line number.
LabeledDataset load_nslkdd(const std::string& path, const FeatureSchema& schema,
                           const AttackTaxonomy& taxonomy);

// Serializes back to the same format; numeric cells use the shortest
// representation that round-trips, so reload yields identical values.
void write_nslkdd(const LabeledDataset& ds, const std::string& path);

struct ClassDistribution {
  std::array<std::int64_t, kNumClasses> counts{};
  std::array<double, kNumClasses> fractions{};
  std::int64_t total = 0;
};

ClassDistribution class_distribution(const LabeledDataset& ds);
ClassDistribution class_distribution(std::span<const std::uint8_t> labels);

}  // namespace nids

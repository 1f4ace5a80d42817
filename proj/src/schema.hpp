#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "types.hpp"

namespace nids {

enum class FeatureKind { kContinuous, kBinary, kCategorical };

enum class FeatureGroup { kBasic, kContent, kTimeWindow, kHostWindow };

struct FeatureDesc {
  std::string name;
  FeatureKind kind;
  FeatureGroup group;
};

// Ordered feature layout of one connection record. Numeric features (both
// continuous and binary) and categorical features are stored in separate
// column groups; slot() maps a feature position to its index within the group.
class FeatureSchema {
 public:
  static FeatureSchema make(std::vector<FeatureDesc> features);

  std::size_t size() const { return features_.size(); }
  const FeatureDesc& feature(std::size_t i) const { return features_[i]; }
  const std::vector<FeatureDesc>& features() const { return features_; }

  bool is_numeric(std::size_t i) const { return features_[i].kind != FeatureKind::kCategorical; }

  // index within the numeric / categorical column group, -1 for the other kind
  int slot(std::size_t i) const { return slots_[i]; }

  std::size_t numeric_count() const { return numeric_count_; }
  std::size_t categorical_count() const { return categorical_.size(); }

  // schema positions of the categorical features, in order
  const std::vector<std::size_t>& categorical_positions() const { return categorical_; }

  bool operator==(const FeatureSchema& other) const;

 private:
  std::vector<FeatureDesc> features_;
  std::vector<int> slots_;
  std::vector<std::size_t> categorical_;
  std::size_t numeric_count_ = 0;
};

const char* feature_kind_name(FeatureKind kind);
const char* feature_group_name(FeatureGroup group);
FeatureKind feature_kind_from_name(const std::string& name);
FeatureGroup feature_group_from_name(const std::string& name);

// The canonical 41-feature NSL-KDD connection schema: positions 1-9 basic,
// 10-22 content, 23-31 time window, 32-41 host window; protocol_type,
// service and flag are the nominal features.
const FeatureSchema& nslkdd_schema();

}  // namespace nids

#include "schema.hpp"

#include <stdexcept>

namespace nids {

FeatureSchema FeatureSchema::make(std::vector<FeatureDesc> features) {
  FeatureSchema schema;
  schema.features_ = std::move(features);
  schema.slots_.resize(schema.features_.size());
  for (std::size_t i = 0; i < schema.features_.size(); ++i) {
    if (schema.features_[i].kind == FeatureKind::kCategorical) {
      schema.slots_[i] = static_cast<int>(schema.categorical_.size());
      schema.categorical_.push_back(i);
    } else {
      schema.slots_[i] = static_cast<int>(schema.numeric_count_++);
    }
  }
  return schema;
}

bool FeatureSchema::operator==(const FeatureSchema& other) const {
  if (features_.size() != other.features_.size()) return false;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& a = features_[i];
    const auto& b = other.features_[i];
    if (a.name != b.name || a.kind != b.kind || a.group != b.group) return false;
  }
  return true;
}

const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kContinuous: return "continuous";
    case FeatureKind::kBinary: return "binary";
    case FeatureKind::kCategorical: return "categorical";
  }
  throw std::logic_error("bad feature kind");
}

const char* feature_group_name(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::kBasic: return "basic";
    case FeatureGroup::kContent: return "content";
    case FeatureGroup::kTimeWindow: return "time_window";
    case FeatureGroup::kHostWindow: return "host_window";
  }
  throw std::logic_error("bad feature group");
}

FeatureKind feature_kind_from_name(const std::string& name) {
  if (name == "continuous") return FeatureKind::kContinuous;
  if (name == "binary") return FeatureKind::kBinary;
  if (name == "categorical") return FeatureKind::kCategorical;
  throw DataError("unknown feature kind: " + name);
}

FeatureGroup feature_group_from_name(const std::string& name) {
  if (name == "basic") return FeatureGroup::kBasic;
  if (name == "content") return FeatureGroup::kContent;
  if (name == "time_window") return FeatureGroup::kTimeWindow;
  if (name == "host_window") return FeatureGroup::kHostWindow;
  throw DataError("unknown feature group: " + name);
}

namespace {

FeatureSchema build_nslkdd_schema() {
  using K = FeatureKind;
  using G = FeatureGroup;
  std::vector<FeatureDesc> f;
  f.reserve(41);
  // basic features, positions 1-9
  f.push_back({"duration", K::kContinuous, G::kBasic});
  f.push_back({"protocol_type", K::kCategorical, G::kBasic});
  f.push_back({"service", K::kCategorical, G::kBasic});
  f.push_back({"flag", K::kCategorical, G::kBasic});
  f.push_back({"src_bytes", K::kContinuous, G::kBasic});
  f.push_back({"dst_bytes", K::kContinuous, G::kBasic});
  f.push_back({"land", K::kBinary, G::kBasic});
  f.push_back({"wrong_fragment", K::kContinuous, G::kBasic});
  f.push_back({"urgent", K::kContinuous, G::kBasic});
  // content features, positions 10-22
  f.push_back({"hot", K::kContinuous, G::kContent});
  f.push_back({"num_failed_logins", K::kContinuous, G::kContent});
  f.push_back({"logged_in", K::kBinary, G::kContent});
  f.push_back({"num_compromised", K::kContinuous, G::kContent});
  f.push_back({"root_shell", K::kBinary, G::kContent});
  // documented as 0/1 but the distributed files contain the value 2,
  // so it has to be treated as an ordinary count
  f.push_back({"su_attempted", K::kContinuous, G::kContent});
  f.push_back({"num_root", K::kContinuous, G::kContent});
  f.push_back({"num_file_creations", K::kContinuous, G::kContent});
  f.push_back({"num_shells", K::kContinuous, G::kContent});
  f.push_back({"num_access_files", K::kContinuous, G::kContent});
  f.push_back({"num_outbound_cmds", K::kContinuous, G::kContent});
  f.push_back({"is_host_login", K::kBinary, G::kContent});
  f.push_back({"is_guest_login", K::kBinary, G::kContent});
  // two-second time window statistics, positions 23-31
  f.push_back({"count", K::kContinuous, G::kTimeWindow});
  f.push_back({"srv_count", K::kContinuous, G::kTimeWindow});
  f.push_back({"serror_rate", K::kContinuous, G::kTimeWindow});
  f.push_back({"srv_serror_rate", K::kContinuous, G::kTimeWindow});
  f.push_back({"rerror_rate", K::kContinuous, G::kTimeWindow});
  f.push_back({"srv_rerror_rate", K::kContinuous, G::kTimeWindow});
  f.push_back({"same_srv_rate", K::kContinuous, G::kTimeWindow});
  f.push_back({"diff_srv_rate", K::kContinuous, G::kTimeWindow});
  f.push_back({"srv_diff_host_rate", K::kContinuous, G::kTimeWindow});
  // destination-host window statistics, positions 32-41
  f.push_back({"dst_host_count", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_srv_count", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_same_srv_rate", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_diff_srv_rate", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_same_src_port_rate", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_srv_diff_host_rate", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_serror_rate", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_srv_serror_rate", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_rerror_rate", K::kContinuous, G::kHostWindow});
  f.push_back({"dst_host_srv_rerror_rate", K::kContinuous, G::kHostWindow});
  return FeatureSchema::make(std::move(f));
}

}  // namespace

const FeatureSchema& nslkdd_schema() {
  static const FeatureSchema schema = build_nslkdd_schema();
  return schema;
}

}  // namespace nids

#include "preprocess.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "digest.hpp"
#include "io_util.hpp"
#include "rng.hpp"

namespace nids {

using json = nlohmann::json;

std::size_t EncoderState::encoded_dim(const FeatureSchema& schema) const {
  std::size_t dim = schema.numeric_count();
  for (const auto& vocab : vocabularies) dim += vocab.size();
  return dim;
}

std::vector<std::string> EncoderState::column_names(const FeatureSchema& schema) const {
  std::vector<std::string> names;
  names.reserve(encoded_dim(schema));
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const FeatureDesc& desc = schema.feature(i);
    if (schema.is_numeric(i)) {
      names.push_back(desc.name);
    } else {
      const auto& vocab = vocabularies[static_cast<std::size_t>(schema.slot(i))];
      for (const auto& token : vocab) names.push_back(desc.name + "=" + token);
    }
  }
  return names;
}

EncoderState fit_encoder(const LabeledDataset& train) {
  if (train.size() == 0) throw std::invalid_argument("cannot fit encoder on empty dataset");
  const FeatureSchema& schema = train.schema();
  EncoderState enc;
  enc.vocabularies.resize(schema.categorical_count());
  for (std::size_t slot = 0; slot < schema.categorical_count(); ++slot) {
    const auto& column = train.categorical_column(slot);
    auto& vocab = enc.vocabularies[slot];
    std::unordered_set<std::string> seen;
    for (const auto& token : column)
      if (seen.insert(token).second) vocab.push_back(token);
  }
  return enc;
}

DesignMatrix encode(const LabeledDataset& ds, const EncoderState& enc) {
  const FeatureSchema& schema = ds.schema();
  if (enc.vocabularies.size() != schema.categorical_count())
    throw std::invalid_argument("encoder state does not match schema");

  DesignMatrix m;
  m.rows = ds.size();
  m.dim = enc.encoded_dim(schema);
  m.column_names = enc.column_names(schema);
  m.values.assign(m.rows * m.dim, 0.0);
  m.labels.assign(ds.labels().begin(), ds.labels().end());

  std::vector<std::unordered_map<std::string, std::size_t>> token_index(schema.categorical_count());
  for (std::size_t slot = 0; slot < schema.categorical_count(); ++slot)
    for (std::size_t t = 0; t < enc.vocabularies[slot].size(); ++t)
      token_index[slot].emplace(enc.vocabularies[slot][t], t);

  for (std::size_t slot = 0; slot < schema.categorical_count(); ++slot) {
    const std::size_t pos = schema.categorical_positions()[slot];
    m.unseen_by_feature.emplace_back(schema.feature(pos).name, 0);
  }

  // column-at-a-time fill keeps the loop over rows tight
  std::size_t offset = 0;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema.is_numeric(i)) {
      const auto column = ds.numeric_column(static_cast<std::size_t>(schema.slot(i)));
      for (std::size_t row = 0; row < m.rows; ++row) m.values[row * m.dim + offset] = column[row];
      ++offset;
    } else {
      const std::size_t slot = static_cast<std::size_t>(schema.slot(i));
      const auto& column = ds.categorical_column(slot);
      const auto& index = token_index[slot];
      for (std::size_t row = 0; row < m.rows; ++row) {
        const auto it = index.find(column[row]);
        if (it == index.end()) {
          ++m.unseen_tokens;
          ++m.unseen_by_feature[slot].second;
        } else {
          m.values[row * m.dim + offset + it->second] = 1.0;
        }
      }
      offset += enc.vocabularies[slot].size();
    }
  }
  return m;
}

ScalerState fit_scaler(const DesignMatrix& train, const FeatureSchema& schema) {
  std::unordered_set<std::string> continuous_names;
  for (const auto& desc : schema.features())
    if (desc.kind == FeatureKind::kContinuous) continuous_names.insert(desc.name);

  ScalerState s;
  s.scaled.assign(train.dim, 0);
  s.col_min.assign(train.dim, 0.0);
  s.col_max.assign(train.dim, 0.0);
  for (std::size_t j = 0; j < train.dim; ++j) {
    if (!continuous_names.count(train.column_names[j])) continue;
    s.scaled[j] = 1;
    double lo = train.at(0, j);
    double hi = lo;
    for (std::size_t row = 1; row < train.rows; ++row) {
      const double v = train.at(row, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    s.col_min[j] = lo;
    s.col_max[j] = hi;
  }
  return s;
}

DesignMatrix scale(DesignMatrix m, const ScalerState& s) {
  if (m.dim != s.scaled.size())
    throw std::invalid_argument("scaler state does not match matrix layout");
  for (std::size_t j = 0; j < m.dim; ++j) {
    if (!s.scaled[j]) continue;
    const double lo = s.col_min[j];
    const double range = s.col_max[j] - lo;
    if (range == 0.0) {
      for (std::size_t row = 0; row < m.rows; ++row) m.values[row * m.dim + j] = 0.0;
    } else {
      const double inv = 1.0 / range;
      for (std::size_t row = 0; row < m.rows; ++row) {
        double& v = m.values[row * m.dim + j];
        v = (v - lo) * inv;
      }
    }
  }
  return m;
}

SplitIndices stratified_split_indices(std::span<const std::uint8_t> labels, const SplitSpec& spec) {
  if (!(spec.validation_fraction > 0.0 && spec.validation_fraction < 1.0))
    throw std::invalid_argument("validation fraction must lie strictly between 0 and 1");

  std::array<std::vector<std::uint32_t>, kNumClasses> by_class;
  for (std::size_t row = 0; row < labels.size(); ++row)
    by_class[labels[row]].push_back(static_cast<std::uint32_t>(row));

  SplitIndices split;
  Rng rng = Rng::stream(spec.seed, /*tag=*/0x5eed, 0);
  for (int k = 0; k < kNumClasses; ++k) {
    auto& rows = by_class[static_cast<std::size_t>(k)];
    if (rows.empty()) continue;
    rng.shuffle(rows);
    const std::size_t take =
        static_cast<std::size_t>(spec.validation_fraction * static_cast<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      (i < take ? split.valid : split.train).push_back(rows[i]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.valid.begin(), split.valid.end());
  return split;
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           const SplitSpec& spec) {
  const ClassDistribution dist = class_distribution(ds);
  for (int k = 0; k < kNumClasses; ++k)
    if (dist.counts[static_cast<std::size_t>(k)] == 0)
      throw std::invalid_argument(std::string("stratified split requires every class; missing ") +
                                  class_name(k));
  const SplitIndices split = stratified_split_indices(ds.labels(), spec);
  return {ds.subset(split.train), ds.subset(split.valid)};
}

DesignMatrix take_rows(const DesignMatrix& m, std::span<const std::uint32_t> rows) {
  DesignMatrix out;
  out.dim = m.dim;
  out.rows = rows.size();
  out.column_names = m.column_names;
  out.pipeline_digest = m.pipeline_digest;
  out.values.resize(out.rows * out.dim);
  out.labels.resize(out.rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = m.row(rows[i]);
    std::copy(src, src + m.dim, out.row(i));
    out.labels[i] = m.labels[rows[i]];
  }
  return out;
}

Pipeline Pipeline::fit(const LabeledDataset& train) {
  Pipeline p;
  p.schema_ = train.schema();
  p.encoder_ = fit_encoder(train);
  const DesignMatrix unscaled = encode(train, p.encoder_);
  p.scaler_ = fit_scaler(unscaled, p.schema_);
  p.digest_ = fnv1a64_hex(p.to_text());
  return p;
}

DesignMatrix Pipeline::transform(const LabeledDataset& ds) const {
  if (!(ds.schema() == schema_))
    throw std::invalid_argument("dataset schema does not match pipeline schema");
  DesignMatrix m = scale(encode(ds, encoder_), scaler_);
  m.pipeline_digest = digest_;
  return m;
}

std::string Pipeline::to_text() const {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "nidskit-pipeline";

  json schema_json = json::array();
  for (const auto& desc : schema_.features())
    schema_json.push_back({{"name", desc.name},
                           {"kind", feature_kind_name(desc.kind)},
                           {"group", feature_group_name(desc.group)}});
  doc["schema"] = std::move(schema_json);

  json vocab_json = json::array();
  for (std::size_t slot = 0; slot < encoder_.vocabularies.size(); ++slot) {
    const std::size_t pos = schema_.categorical_positions()[slot];
    vocab_json.push_back(
        {{"feature", schema_.feature(pos).name}, {"tokens", encoder_.vocabularies[slot]}});
  }
  doc["vocabularies"] = std::move(vocab_json);

  const std::vector<std::string> names = encoder_.column_names(schema_);
  json scaler_json = json::array();
  for (std::size_t j = 0; j < scaler_.scaled.size(); ++j) {
    if (!scaler_.scaled[j]) continue;
    scaler_json.push_back(
        {{"column", names[j]}, {"min", scaler_.col_min[j]}, {"max", scaler_.col_max[j]}});
  }
  doc["scaler"] = std::move(scaler_json);
  return doc.dump(2) + "\n";
}

void Pipeline::save(const std::string& path) const { atomic_write_file(path, to_text()); }

Pipeline Pipeline::load(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError("bad pipeline file " + path + ": " + e.what());
  }
  try {
    if (doc.at("kind").get<std::string>() != "nidskit-pipeline")
      throw DataError("not a pipeline file: " + path);
    if (doc.at("format_version").get<int>() != kFormatVersion)
      throw DataError("unsupported pipeline format version in " + path);

    std::vector<FeatureDesc> features;
    for (const auto& item : doc.at("schema"))
      features.push_back({item.at("name").get<std::string>(),
                          feature_kind_from_name(item.at("kind").get<std::string>()),
                          feature_group_from_name(item.at("group").get<std::string>())});

    Pipeline p;
    p.schema_ = FeatureSchema::make(std::move(features));
    p.encoder_.vocabularies.resize(p.schema_.categorical_count());
    for (const auto& item : doc.at("vocabularies")) {
      const std::string feature = item.at("feature").get<std::string>();
      bool found = false;
      for (std::size_t slot = 0; slot < p.schema_.categorical_count(); ++slot) {
        const std::size_t pos = p.schema_.categorical_positions()[slot];
        if (p.schema_.feature(pos).name == feature) {
          p.encoder_.vocabularies[slot] = item.at("tokens").get<std::vector<std::string>>();
          found = true;
          break;
        }
      }
      if (!found) throw DataError("pipeline vocabulary for unknown feature: " + feature);
    }

    const std::vector<std::string> names = p.encoder_.column_names(p.schema_);
    const std::size_t dim = names.size();
    p.scaler_.scaled.assign(dim, 0);
    p.scaler_.col_min.assign(dim, 0.0);
    p.scaler_.col_max.assign(dim, 0.0);
    for (const auto& item : doc.at("scaler")) {
      const std::string column = item.at("column").get<std::string>();
      const auto it = std::find(names.begin(), names.end(), column);
      if (it == names.end()) throw DataError("pipeline scaler entry for unknown column: " + column);
      const std::size_t j = static_cast<std::size_t>(it - names.begin());
      p.scaler_.scaled[j] = 1;
      p.scaler_.col_min[j] = item.at("min").get<double>();
      p.scaler_.col_max[j] = item.at("max").get<double>();
      if (p.scaler_.col_min[j] > p.scaler_.col_max[j])
        throw DataError("pipeline scaler has min > max for column " + column);
    }
    p.digest_ = fnv1a64_hex(p.to_text());
    return p;
  } catch (const json::exception& e) {
    throw DataError("bad pipeline file " + path + ": " + e.what());
  }
}

void export_matrix_csv(const DesignMatrix& m, const std::string& path) {
  std::string out;
  for (std::size_t j = 0; j < m.dim; ++j) {
    if (j != 0) out += ',';
    out += m.column_names.empty() ? ("c" + std::to_string(j)) : m.column_names[j];
  }
  out += ",label\n";
  for (std::size_t row = 0; row < m.rows; ++row) {
    for (std::size_t j = 0; j < m.dim; ++j) {
      if (j != 0) out += ',';
      out += format_double(m.at(row, j));
    }
    out += ',';
    out += class_name(m.labels[row]);
    out += '\n';
  }
  atomic_write_file(path, out);
}

}  // namespace nids

#include "dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nids {

LabeledDataset::LabeledDataset(FeatureSchema schema, std::string provenance)
    : schema_(std::move(schema)), provenance_(std::move(provenance)) {
  numeric_columns_.resize(schema_.numeric_count());
  categorical_columns_.resize(schema_.categorical_count());
}

LabeledDataset LabeledDataset::from_records(const FeatureSchema& schema,
                                            const std::vector<RawRecord>& records,
                                            std::string provenance) {
  LabeledDataset ds(schema, std::move(provenance));
  for (const auto& record : records) ds.append(record);
  return ds;
}

void LabeledDataset::append(const RawRecord& record) {
  if (record.numeric.size() != schema_.numeric_count() ||
      record.categorical.size() != schema_.categorical_count())
    throw std::invalid_argument("record does not match schema");
  for (std::size_t s = 0; s < record.numeric.size(); ++s)
    numeric_columns_[s].push_back(record.numeric[s]);
  for (std::size_t s = 0; s < record.categorical.size(); ++s)
    categorical_columns_[s].push_back(record.categorical[s]);
  labels_.push_back(record.label);
  attack_names_.push_back(record.attack_name);
  difficulties_.push_back(record.difficulty);
}

RawRecord LabeledDataset::record(std::size_t row) const {
  RawRecord r;
  r.numeric.reserve(schema_.numeric_count());
  r.categorical.reserve(schema_.categorical_count());
  for (std::size_t s = 0; s < schema_.numeric_count(); ++s) r.numeric.push_back(numeric_columns_[s][row]);
  for (std::size_t s = 0; s < schema_.categorical_count(); ++s)
    r.categorical.push_back(categorical_columns_[s][row]);
  r.label = labels_[row];
  r.attack_name = attack_names_[row];
  r.difficulty = difficulties_[row];
  return r;
}

LabeledDataset LabeledDataset::subset(std::span<const std::uint32_t> rows) const {
  LabeledDataset out(schema_, provenance_ + "[subset]");
  out.labels_.reserve(rows.size());
  for (auto& col : out.numeric_columns_) col.reserve(rows.size());
  for (std::uint32_t row : rows) {
    for (std::size_t s = 0; s < numeric_columns_.size(); ++s)
      out.numeric_columns_[s].push_back(numeric_columns_[s][row]);
    for (std::size_t s = 0; s < categorical_columns_.size(); ++s)
      out.categorical_columns_[s].push_back(categorical_columns_[s][row]);
    out.labels_.push_back(labels_[row]);
    out.attack_names_.push_back(attack_names_[row]);
    out.difficulties_.push_back(difficulties_[row]);
  }
  return out;
}

namespace {

void split_fields(std::string_view line, std::vector<std::string_view>& fields) {
  fields.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

double parse_number(std::string_view token, std::size_t line_no, const std::string& feature) {
  double value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    parse_fail(line_no, "unparsable numeric cell '" + std::string(token) + "' for " + feature);
  if (!std::isfinite(value) || value < 0)
    parse_fail(line_no, "numeric cell out of domain for " + feature + ": " + std::string(token));
  return value;
}

}  // namespace

LabeledDataset load_nslkdd(const std::string& path, const FeatureSchema& schema,
                           const AttackTaxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);

  LabeledDataset ds(schema, path);
  const std::size_t base_fields = schema.size() + 1;  // features + label
  std::vector<std::string_view> fields;
  std::string line;
  std::size_t line_no = 0;
  RawRecord record;
  record.numeric.resize(schema.numeric_count());
  record.categorical.resize(schema.categorical_count());

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    split_fields(line, fields);
    if (fields.size() != base_fields && fields.size() != base_fields + 1)
      parse_fail(line_no, "expected " + std::to_string(base_fields) + " or " +
                              std::to_string(base_fields + 1) + " fields, got " +
                              std::to_string(fields.size()));

    for (std::size_t i = 0; i < schema.size(); ++i) {
      const std::string_view token = trim(fields[i]);
      const FeatureDesc& desc = schema.feature(i);
      const int slot = schema.slot(i);
      switch (desc.kind) {
        case FeatureKind::kContinuous:
          record.numeric[static_cast<std::size_t>(slot)] = parse_number(token, line_no, desc.name);
          break;
        case FeatureKind::kBinary: {
          if (token == "0")
            record.numeric[static_cast<std::size_t>(slot)] = 0.0;
          else if (token == "1")
            record.numeric[static_cast<std::size_t>(slot)] = 1.0;
          else
            parse_fail(line_no, "binary cell must be 0 or 1 for " + desc.name + ", got '" +
                                    std::string(token) + "'");
          break;
        }
        case FeatureKind::kCategorical: {
          if (token.empty()) parse_fail(line_no, "empty categorical token for " + desc.name);
          record.categorical[static_cast<std::size_t>(slot)] = std::string(token);
          break;
        }
      }
    }

    const std::string_view label_token = trim(fields[schema.size()]);
    try {
      record.label = static_cast<std::uint8_t>(taxonomy.category(label_token));
    } catch (const DataError& e) {
      parse_fail(line_no, e.what());
    }
    record.attack_name = std::string(label_token);

    if (fields.size() == base_fields + 1) {
      const std::string_view diff_token = trim(fields[base_fields]);
      int difficulty = 0;
      const auto [ptr, ec] =
          std::from_chars(diff_token.data(), diff_token.data() + diff_token.size(), difficulty);
      if (ec != std::errc() || ptr != diff_token.data() + diff_token.size() || difficulty < 0)
        parse_fail(line_no, "bad difficulty score '" + std::string(diff_token) + "'");
      record.difficulty = difficulty;
    } else {
      record.difficulty = -1;
    }

    ds.append(record);
  }

  if (ds.size() == 0) throw DataError("dataset file has no records: " + path);
  return ds;
}

namespace {

// shortest decimal form that parses back to the same double
std::string format_numeric(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void write_nslkdd(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  const FeatureSchema& schema = ds.schema();
  std::string line;
  for (std::size_t row = 0; row < ds.size(); ++row) {
    line.clear();
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (i != 0) line += ',';
      const int slot = schema.slot(i);
      if (schema.is_numeric(i))
        line += format_numeric(ds.numeric_column(static_cast<std::size_t>(slot))[row]);
      else
        line += ds.categorical_column(static_cast<std::size_t>(slot))[row];
    }
    line += ',';
    line += ds.attack_name(row);
    if (ds.difficulty(row) >= 0) {
      line += ',';
      line += std::to_string(ds.difficulty(row));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing dataset file: " + path);
}

ClassDistribution class_distribution(std::span<const std::uint8_t> labels) {
  ClassDistribution dist;
  for (std::uint8_t label : labels) ++dist.counts[label];
  dist.total = static_cast<std::int64_t>(labels.size());
  if (dist.total > 0)
    for (int k = 0; k < kNumClasses; ++k)
      dist.fractions[static_cast<std::size_t>(k)] =
          static_cast<double>(dist.counts[static_cast<std::size_t>(k)]) /
          static_cast<double>(dist.total);
  return dist;
}

ClassDistribution class_distribution(const LabeledDataset& ds) {
  return class_distribution(ds.labels());
}

}  // namespace nids

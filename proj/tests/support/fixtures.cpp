#include "fixtures.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "rng.hpp"
#include "schema.hpp"
#include "taxonomy.hpp"

namespace nids::testing {

DesignMatrix make_matrix(const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& labels) {
  if (rows.size() != labels.size()) throw std::invalid_argument("rows/labels size mismatch");
  DesignMatrix m;
  m.rows = rows.size();
  m.dim = rows.empty() ? 0 : rows[0].size();
  m.values.reserve(m.rows * m.dim);
  for (const auto& row : rows) {
    if (row.size() != m.dim) throw std::invalid_argument("ragged rows");
    m.values.insert(m.values.end(), row.begin(), row.end());
  }
  for (const int label : labels) m.labels.push_back(static_cast<std::uint8_t>(label));
  for (std::size_t j = 0; j < m.dim; ++j) m.column_names.push_back("c" + std::to_string(j));
  return m;
}

FeatureSchema tiny_schema() {
  return FeatureSchema::make({
      {"f0", FeatureKind::kContinuous, FeatureGroup::kBasic},
      {"proto", FeatureKind::kCategorical, FeatureGroup::kBasic},
      {"svc", FeatureKind::kCategorical, FeatureGroup::kBasic},
      {"f1", FeatureKind::kContinuous, FeatureGroup::kBasic},
  });
}

RawRecord tiny_record(double f0, double f1, const std::string& proto, const std::string& svc,
                      int label) {
  RawRecord r;
  r.numeric = {f0, f1};
  r.categorical = {proto, svc};
  r.label = static_cast<std::uint8_t>(label);
  r.attack_name = label == 0 ? "normal" : "neptune";
  return r;
}

namespace {

class RecordBuilder {
 public:
  explicit RecordBuilder(const FeatureSchema& schema) : schema_(schema) {
    for (std::size_t i = 0; i < schema.size(); ++i) position_[schema.feature(i).name] = i;
  }

  RawRecord fresh() const {
    RawRecord r;
    r.numeric.assign(schema_.numeric_count(), 0.0);
    r.categorical.assign(schema_.categorical_count(), "");
    return r;
  }

  void set(RawRecord& r, const std::string& name, double value) const {
    const std::size_t i = position_.at(name);
    r.numeric[static_cast<std::size_t>(schema_.slot(i))] = value;
  }

  void set(RawRecord& r, const std::string& name, const std::string& token) const {
    const std::size_t i = position_.at(name);
    r.categorical[static_cast<std::size_t>(schema_.slot(i))] = token;
  }

 private:
  const FeatureSchema& schema_;
  std::unordered_map<std::string, std::size_t> position_;
};

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

LabeledDataset make_synthetic_dataset(const SyntheticOptions& options) {
  const FeatureSchema& schema = nslkdd_schema();
  const AttackTaxonomy taxonomy = AttackTaxonomy::builtin();
  const RecordBuilder build(schema);
  Rng rng(options.seed);

  const std::vector<std::vector<std::string>> services = {
      /*Normal*/ {"http", "smtp", "ftp_data", "domain_u"},
      /*DoS*/ {"ecr_i", "private", "http"},
      /*Probe*/ {"eco_i", "private", "ftp"},
      /*R2L*/ {"ftp", "telnet", "imap4", "pop_3"},
      /*U2R*/ {"telnet", "shell", "login"},
  };
  const std::vector<std::string> novel = {"xnet", "http_8001", "uucp_path"};
  const std::vector<std::vector<std::string>> flags = {
      {"SF"}, {"S0", "REJ", "SF"}, {"SF", "REJ", "RSTR"}, {"SF"}, {"SF"}};
  const std::vector<std::vector<std::string>> protocols = {
      {"tcp", "udp"}, {"tcp", "icmp"}, {"icmp", "tcp", "udp"}, {"tcp"}, {"tcp"}};
  // Normal and DoS dominate; U2R stays rare
  const double cumulative[kNumClasses] = {0.50, 0.84, 0.94, 0.98, 1.0};

  std::vector<RawRecord> records;
  records.reserve(options.rows);
  for (std::size_t i = 0; i < options.rows; ++i) {
    int label;
    if (i < 4 * kNumClasses) {
      label = static_cast<int>(i % kNumClasses);  // guarantee every class shows up
    } else {
      const double u = rng.next_double();
      label = 0;
      while (label + 1 < kNumClasses && u > cumulative[label]) ++label;
    }
    const std::size_t ls = static_cast<std::size_t>(label);

    RawRecord r = build.fresh();
    r.label = static_cast<std::uint8_t>(label);
    const auto names = taxonomy.names_for(static_cast<ClassLabel>(label));
    r.attack_name = names[rng.below(names.size())];
    if (r.attack_name == "guess_password") r.attack_name = "guess_passwd";
    if (options.difficulty_column) r.difficulty = static_cast<int>(rng.below(22));

    build.set(r, "protocol_type", protocols[ls][rng.below(protocols[ls].size())]);
    std::string service = services[ls][rng.below(services[ls].size())];
    if (options.novel_services && label == 3 && rng.next_double() < 0.3)
      service = novel[rng.below(novel.size())];
    build.set(r, "service", service);
    build.set(r, "flag", flags[ls][rng.below(flags[ls].size())]);

    const bool scrambled = rng.next_double() < options.label_noise;
    const int effective = scrambled ? static_cast<int>(rng.below(kNumClasses)) : label;
    switch (effective) {
      case 0:  // benign interactive traffic
        build.set(r, "duration", std::floor(rng.next_double() * 10));
        build.set(r, "src_bytes", 100 + std::floor(rng.next_double() * 1000));
        build.set(r, "dst_bytes", 100 + std::floor(rng.next_double() * 4000));
        build.set(r, "logged_in", rng.next_double() < 0.85 ? 1.0 : 0.0);
        build.set(r, "count", 1 + std::floor(rng.next_double() * 20));
        build.set(r, "srv_count", 1 + std::floor(rng.next_double() * 15));
        build.set(r, "same_srv_rate", round2(0.8 + 0.2 * rng.next_double()));
        build.set(r, "dst_host_count", 1 + std::floor(rng.next_double() * 255));
        build.set(r, "dst_host_same_srv_rate", round2(0.7 + 0.3 * rng.next_double()));
        break;
      case 1:  // flood: huge connection counts, SYN errors, no payload
        build.set(r, "src_bytes", std::floor(rng.next_double() * 60));
        build.set(r, "count", 200 + std::floor(rng.next_double() * 311));
        build.set(r, "srv_count", 200 + std::floor(rng.next_double() * 311));
        build.set(r, "serror_rate", round2(0.8 + 0.2 * rng.next_double()));
        build.set(r, "srv_serror_rate", round2(0.8 + 0.2 * rng.next_double()));
        build.set(r, "same_srv_rate", round2(rng.next_double() * 0.2));
        build.set(r, "dst_host_count", 255);
        build.set(r, "dst_host_serror_rate", round2(0.7 + 0.3 * rng.next_double()));
        break;
      case 2:  // scan: many services touched, rejects everywhere
        build.set(r, "src_bytes", std::floor(rng.next_double() * 30));
        build.set(r, "count", 2 + std::floor(rng.next_double() * 60));
        build.set(r, "diff_srv_rate", round2(0.5 + 0.5 * rng.next_double()));
        build.set(r, "rerror_rate", round2(0.4 + 0.6 * rng.next_double()));
        build.set(r, "srv_diff_host_rate", round2(0.4 + 0.5 * rng.next_double()));
        build.set(r, "dst_host_diff_srv_rate", round2(0.5 + 0.5 * rng.next_double()));
        build.set(r, "dst_host_rerror_rate", round2(0.3 + 0.6 * rng.next_double()));
        break;
      case 3:  // remote logins probing accounts
        build.set(r, "duration", 5 + std::floor(rng.next_double() * 120));
        build.set(r, "src_bytes", 50 + std::floor(rng.next_double() * 400));
        build.set(r, "dst_bytes", 50 + std::floor(rng.next_double() * 600));
        build.set(r, "num_failed_logins", 1 + std::floor(rng.next_double() * 5));
        build.set(r, "hot", 1 + std::floor(rng.next_double() * 6));
        build.set(r, "is_guest_login", rng.next_double() < 0.6 ? 1.0 : 0.0);
        build.set(r, "logged_in", rng.next_double() < 0.5 ? 1.0 : 0.0);
        build.set(r, "count", 1 + std::floor(rng.next_double() * 8));
        break;
      default:  // local privilege escalation
        build.set(r, "duration", 30 + std::floor(rng.next_double() * 300));
        build.set(r, "src_bytes", 200 + std::floor(rng.next_double() * 2000));
        build.set(r, "dst_bytes", 500 + std::floor(rng.next_double() * 4000));
        build.set(r, "logged_in", 1.0);
        build.set(r, "root_shell", rng.next_double() < 0.75 ? 1.0 : 0.0);
        build.set(r, "num_root", 1 + std::floor(rng.next_double() * 8));
        build.set(r, "num_file_creations", 1 + std::floor(rng.next_double() * 5));
        build.set(r, "hot", 2 + std::floor(rng.next_double() * 7));
        build.set(r, "num_compromised", std::floor(rng.next_double() * 3));
        break;
    }
    // a couple of low-signal columns with shared noise
    build.set(r, "dst_host_srv_count", 1 + std::floor(rng.next_double() * 255));
    build.set(r, "dst_host_same_src_port_rate", round2(rng.next_double()));
    records.push_back(std::move(r));
  }
  return LabeledDataset::from_records(schema, records, "synthetic");
}

void write_synthetic_file(const std::string& path, const SyntheticOptions& options) {
  write_nslkdd(make_synthetic_dataset(options), path);
}

std::vector<double> random_proba(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> proba(rows * kNumClasses);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (int k = 0; k < kNumClasses; ++k) {
      const double v = rng.next_double() + 1e-9;
      proba[i * kNumClasses + static_cast<std::size_t>(k)] = v;
      sum += v;
    }
    for (int k = 0; k < kNumClasses; ++k) proba[i * kNumClasses + static_cast<std::size_t>(k)] /= sum;
  }
  return proba;
}

}  // namespace nids::testing

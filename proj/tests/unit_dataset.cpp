#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dataset.hpp"
#include "io_util.hpp"
#include "schema.hpp"
#include "support/fixtures.hpp"
#include "taxonomy.hpp"

using namespace nids;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// a 42-field row (41 features + label) with the given leading cells
std::string make_row(const std::string& proto, const std::string& service, const std::string& flag,
                     const std::string& label, const std::string& difficulty = "") {
  std::string row = "0," + proto + "," + service + "," + flag;
  for (int i = 0; i < 37; ++i) row += ",0";
  row += "," + label;
  if (!difficulty.empty()) row += "," + difficulty;
  return row;
}

}  // namespace

TEST_CASE("nslkdd schema has the documented shape") {
  const FeatureSchema& schema = nslkdd_schema();
  REQUIRE(schema.size() == 41);

  std::vector<std::string> categorical;
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (!schema.is_numeric(i)) categorical.push_back(schema.feature(i).name);
  CHECK(categorical == std::vector<std::string>{"protocol_type", "service", "flag"});
  CHECK(schema.numeric_count() == 38);

  // group boundaries by position (1-based): 1-9, 10-22, 23-31, 32-41
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const FeatureGroup g = schema.feature(i).group;
    if (i < 9)
      CHECK(g == FeatureGroup::kBasic);
    else if (i < 22)
      CHECK(g == FeatureGroup::kContent);
    else if (i < 31)
      CHECK(g == FeatureGroup::kTimeWindow);
    else
      CHECK(g == FeatureGroup::kHostWindow);
  }
  CHECK(schema.feature(31).name == "dst_host_count");
  CHECK(schema.feature(40).name == "dst_host_srv_rerror_rate");
}

TEST_CASE("attack taxonomy anchors") {
  const AttackTaxonomy tax = AttackTaxonomy::builtin();
  CHECK(tax.category("normal") == ClassLabel::kNormal);
  CHECK(tax.category("smurf") == ClassLabel::kDos);
  CHECK(tax.category("teardrop") == ClassLabel::kDos);
  CHECK(tax.category("apache2") == ClassLabel::kDos);
  CHECK(tax.category("portsweep") == ClassLabel::kProbe);
  CHECK(tax.category("nmap") == ClassLabel::kProbe);
  CHECK(tax.category("guess_password") == ClassLabel::kR2l);
  CHECK(tax.category("guess_passwd") == ClassLabel::kR2l);
  CHECK(tax.category("ftp_write") == ClassLabel::kR2l);
  CHECK(tax.category("phf") == ClassLabel::kR2l);
  CHECK(tax.category("buffer_overflow") == ClassLabel::kU2r);
  CHECK(tax.category("rootkit") == ClassLabel::kU2r);
}

TEST_CASE("taxonomy trims whitespace but stays case-sensitive") {
  const AttackTaxonomy tax = AttackTaxonomy::builtin();
  CHECK(map_attack_category("  smurf \t", tax) == ClassLabel::kDos);
  CHECK_THROWS_AS(tax.category("Smurf"), DataError);
  CHECK_THROWS_WITH_AS(tax.category("not_an_attack"), doctest::Contains("not_an_attack"),
                       DataError);
}

TEST_CASE("taxonomy data asset matches the built-in table") {
  const AttackTaxonomy from_file = AttackTaxonomy::load(std::string(NIDSKIT_DATA_DIR) +
                                                        "/attack_taxonomy.tsv");
  const AttackTaxonomy builtin = AttackTaxonomy::builtin();
  REQUIRE(from_file.size() == builtin.size());
  for (int k = 0; k < kNumClasses; ++k) {
    const auto label = static_cast<ClassLabel>(k);
    CHECK(from_file.names_for(label) == builtin.names_for(label));
  }
}

TEST_CASE("loader accepts 42- and 43-field rows") {
  const std::string path = temp_path("nids_two_rows.txt");
  {
    std::ofstream out(path);
    out << make_row("tcp", "http", "SF", "normal") << "\n";
    out << make_row("udp", "domain_u", "SF", "teardrop", "17") << "\n";
  }
  const LabeledDataset ds = load_nslkdd(path, nslkdd_schema(), AttackTaxonomy::builtin());
  REQUIRE(ds.size() == 2);
  CHECK(!ds.record(0).has_difficulty());
  CHECK(ds.record(1).difficulty == 17);
  CHECK(ds.record(0).label == 0);
  CHECK(ds.record(1).label == 1);
  // row order preserved
  CHECK(ds.attack_name(0) == "normal");
  CHECK(ds.attack_name(1) == "teardrop");
  std::filesystem::remove(path);
}

TEST_CASE("loader errors carry the offending line") {
  const AttackTaxonomy tax = AttackTaxonomy::builtin();
  const std::string path = temp_path("nids_bad_rows.txt");

  SUBCASE("wrong field count") {
    std::ofstream(path) << make_row("tcp", "http", "SF", "normal") << ",9,9\n";
    CHECK_THROWS_WITH_AS(load_nslkdd(path, nslkdd_schema(), tax), doctest::Contains("line 1"),
                         DataError);
  }
  SUBCASE("unparsable numeric cell") {
    std::ofstream(path) << "zero," + make_row("tcp", "http", "SF", "normal").substr(2) << "\n";
    CHECK_THROWS_WITH_AS(load_nslkdd(path, nslkdd_schema(), tax), doctest::Contains("numeric"),
                         DataError);
  }
  SUBCASE("unknown attack name") {
    std::ofstream(path) << make_row("tcp", "http", "SF", "zerg_rush") << "\n";
    CHECK_THROWS_WITH_AS(load_nslkdd(path, nslkdd_schema(), tax), doctest::Contains("zerg_rush"),
                         DataError);
  }
  SUBCASE("binary cell out of domain") {
    // feature 7 (land) is binary; build a row with land=2
    std::string row = "0,tcp,http,SF,0,0,2";
    for (int i = 0; i < 34; ++i) row += ",0";
    row += ",normal";
    std::ofstream(path) << row << "\n";
    CHECK_THROWS_WITH_AS(load_nslkdd(path, nslkdd_schema(), tax), doctest::Contains("land"),
                         DataError);
  }
  std::filesystem::remove(path);
}

TEST_CASE("load then re-serialize yields identical field values") {
  using namespace nids::testing;
  const std::string path_a = temp_path("nids_roundtrip_a.txt");
  const std::string path_b = temp_path("nids_roundtrip_b.txt");
  write_synthetic_file(path_a, {.rows = 120, .seed = 7});

  const AttackTaxonomy tax = AttackTaxonomy::builtin();
  const LabeledDataset first = load_nslkdd(path_a, nslkdd_schema(), tax);
  write_nslkdd(first, path_b);
  const LabeledDataset second = load_nslkdd(path_b, nslkdd_schema(), tax);

  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    const RawRecord a = first.record(i);
    const RawRecord b = second.record(i);
    CHECK(a.numeric == b.numeric);
    CHECK(a.categorical == b.categorical);
    CHECK(a.label == b.label);
    CHECK(a.attack_name == b.attack_name);
    CHECK(a.difficulty == b.difficulty);
  }
  // the serializer is canonical, so a second pass is byte-identical
  const std::string path_c = temp_path("nids_roundtrip_c.txt");
  write_nslkdd(second, path_c);
  CHECK(read_file(path_b) == read_file(path_c));
  std::filesystem::remove(path_a);
  std::filesystem::remove(path_b);
  std::filesystem::remove(path_c);
}

TEST_CASE("class distribution sums and handles empty classes") {
  using namespace nids::testing;
  const FeatureSchema schema = tiny_schema();
  std::vector<RawRecord> records;
  for (int i = 0; i < 6; ++i) records.push_back(tiny_record(0, 0, "tcp", "http", 0));
  for (int i = 0; i < 3; ++i) records.push_back(tiny_record(1, 0, "udp", "ftp", 1));
  records.push_back(tiny_record(2, 0, "tcp", "smtp", 2));
  const LabeledDataset ds = LabeledDataset::from_records(schema, records);

  const ClassDistribution dist = class_distribution(ds);
  CHECK(dist.total == 10);
  CHECK(dist.counts == std::array<std::int64_t, 5>{6, 3, 1, 0, 0});
  CHECK(dist.counts[3] == 0);
  CHECK(dist.fractions[3] == 0.0);
  double fraction_sum = 0;
  for (const double f : dist.fractions) fraction_sum += f;
  CHECK(fraction_sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("synthetic corpus resolves entirely through the taxonomy") {
  using namespace nids::testing;
  const LabeledDataset ds = make_synthetic_dataset({.rows = 400, .seed = 3});
  const AttackTaxonomy tax = AttackTaxonomy::builtin();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(tax.contains(ds.attack_name(i)));
    CHECK(static_cast<int>(tax.category(ds.attack_name(i))) == ds.record(i).label);
  }
}

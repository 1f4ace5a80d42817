#include "taxonomy.hpp"

#include <fstream>
#include <sstream>

namespace nids {

namespace {

struct TaxonomyRow {
  const char* name;
  ClassLabel label;
};

// The standard NSL-KDD consolidation of KDD'99 attack names into four attack
// categories. Names marked only in the test partition are included so Test+
// resolves without errors. "guess_password" is a common alternate spelling of
// the dataset token "guess_passwd"; both are accepted.
constexpr TaxonomyRow kBuiltinTaxonomy[] = {
    {"normal", ClassLabel::kNormal},
    // DoS
    {"back", ClassLabel::kDos},
    {"land", ClassLabel::kDos},
    {"neptune", ClassLabel::kDos},
    {"pod", ClassLabel::kDos},
    {"smurf", ClassLabel::kDos},
    {"teardrop", ClassLabel::kDos},
    {"apache2", ClassLabel::kDos},
    {"mailbomb", ClassLabel::kDos},
    {"processtable", ClassLabel::kDos},
    {"udpstorm", ClassLabel::kDos},
    // Probe
    {"ipsweep", ClassLabel::kProbe},
    {"nmap", ClassLabel::kProbe},
    {"portsweep", ClassLabel::kProbe},
    {"satan", ClassLabel::kProbe},
    {"mscan", ClassLabel::kProbe},
    {"saint", ClassLabel::kProbe},
    // R2L
    {"ftp_write", ClassLabel::kR2l},
    {"guess_passwd", ClassLabel::kR2l},
    {"guess_password", ClassLabel::kR2l},
    {"imap", ClassLabel::kR2l},
    {"multihop", ClassLabel::kR2l},
    {"phf", ClassLabel::kR2l},
    {"spy", ClassLabel::kR2l},
    {"warezclient", ClassLabel::kR2l},
    {"warezmaster", ClassLabel::kR2l},
    {"httptunnel", ClassLabel::kR2l},
    {"named", ClassLabel::kR2l},
    {"sendmail", ClassLabel::kR2l},
    {"snmpgetattack", ClassLabel::kR2l},
    {"snmpguess", ClassLabel::kR2l},
    {"worm", ClassLabel::kR2l},
    {"xlock", ClassLabel::kR2l},
    {"xsnoop", ClassLabel::kR2l},
    // U2R
    {"buffer_overflow", ClassLabel::kU2r},
    {"loadmodule", ClassLabel::kU2r},
    {"perl", ClassLabel::kU2r},
    {"rootkit", ClassLabel::kU2r},
    {"ps", ClassLabel::kU2r},
    {"sqlattack", ClassLabel::kU2r},
    {"xterm", ClassLabel::kU2r},
};

}  // namespace

std::string_view trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && (s[begin] == ' ' || s[begin] == '\t' || s[begin] == '\r' || s[begin] == '\n'))
    ++begin;
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r' || s[end - 1] == '\n'))
    --end;
  return s.substr(begin, end - begin);
}

AttackTaxonomy AttackTaxonomy::builtin() {
  AttackTaxonomy taxonomy;
  for (const auto& row : kBuiltinTaxonomy) {
    taxonomy.map_.emplace(row.name, row.label);
    taxonomy.order_.emplace_back(row.name);
  }
  return taxonomy;
}

AttackTaxonomy AttackTaxonomy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open taxonomy file: " + path);
  AttackTaxonomy taxonomy;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const std::size_t tab = view.find('\t');
    if (tab == std::string_view::npos)
      throw DataError("taxonomy line " + std::to_string(line_no) + ": expected <name>\\t<category>");
    const std::string name(trim(view.substr(0, tab)));
    const std::string category(trim(view.substr(tab + 1)));
    const int label = class_index(category);
    if (name.empty() || label < 0)
      throw DataError("taxonomy line " + std::to_string(line_no) + ": bad entry '" + std::string(view) + "'");
    if (!taxonomy.map_.emplace(name, static_cast<ClassLabel>(label)).second)
      throw DataError("taxonomy line " + std::to_string(line_no) + ": duplicate name '" + name + "'");
    taxonomy.order_.push_back(name);
  }
  if (taxonomy.map_.empty()) throw DataError("taxonomy file is empty: " + path);
  return taxonomy;
}

ClassLabel AttackTaxonomy::category(std::string_view name) const {
  const auto it = map_.find(std::string(trim(name)));
  if (it == map_.end())
    throw DataError("unknown attack name: '" + std::string(trim(name)) + "'");
  return it->second;
}

bool AttackTaxonomy::contains(std::string_view name) const {
  return map_.find(std::string(trim(name))) != map_.end();
}

std::vector<std::string> AttackTaxonomy::names_for(ClassLabel label) const {
  std::vector<std::string> names;
  for (const auto& name : order_)
    if (map_.at(name) == label) names.push_back(name);
  return names;
}

ClassLabel map_attack_category(std::string_view name, const AttackTaxonomy& taxonomy) {
  return taxonomy.category(name);
}

}  // namespace nids

#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "types.hpp"

namespace nids {

// Total map from attack-name tokens to the five-way class taxonomy. Lookup
// failures are hard errors; a record with an unmapped name must never be
// silently folded into a default class.
class AttackTaxonomy {
 public:
  static AttackTaxonomy builtin();
  static AttackTaxonomy load(const std::string& path);

  ClassLabel category(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t size() const { return map_.size(); }

  // names mapping to a given class, in table order (fixture generation)
  std::vector<std::string> names_for(ClassLabel label) const;

 private:
  std::unordered_map<std::string, ClassLabel> map_;
  std::vector<std::string> order_;
};

// Trims surrounding whitespace, then does a case-sensitive exact lookup.
ClassLabel map_attack_category(std::string_view name, const AttackTaxonomy& taxonomy);

std::string_view trim(std::string_view s);

}  // namespace nids

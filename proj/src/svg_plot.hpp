#pragma once

#include <string>
#include <vector>

namespace nids {

// Renders the persisted CSV artifacts as standalone SVG documents. These are
// pure renderings: every number shown is read back from the CSVs, so the
// numeric outputs stay testable without any drawing path.

void plot_confusion_svg(const std::string& confusion_csv, const std::string& out_svg);

// One curve per (csv, name) pair, overlaid with the chance diagonal; the
// legend shows each curve's trapezoidal area.
void plot_roc_svg(const std::vector<std::string>& roc_csvs,
                  const std::vector<std::string>& curve_names, const std::string& out_svg);

}  // namespace nids

#include "svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "io_util.hpp"
#include "metrics.hpp"
#include "report_io.hpp"
#include "types.hpp"

namespace nids {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Figure palette: Normal orange, DoS red, Probe pink, R2L magenta, U2R blue.
const char* kCurveColors[] = {"#ff7f0e", "#d62728", "#e377c2", "#c715b8", "#1f77b4",
                              "#2ca02c", "#8c564b", "#7f7f7f"};

}  // namespace

void plot_confusion_svg(const std::string& confusion_csv, const std::string& out_svg) {
  const auto m = read_confusion_csv(confusion_csv);
  std::int64_t max_count = 1;
  for (const auto& row : m)
    for (const std::int64_t v : row) max_count = std::max(max_count, v);

  const double cell = 88, left = 110, top = 70;
  const double width = left + kNumClasses * cell + 30;
  const double height = top + kNumClasses * cell + 60;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(left + kNumClasses * cell / 2.0) +
         "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
         "Confusion matrix</text>\n";

  for (int i = 0; i < kNumClasses; ++i) {
    for (int j = 0; j < kNumClasses; ++j) {
      const std::int64_t count = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      // white -> dark blue by count
      const double t = static_cast<double>(count) / static_cast<double>(max_count);
      const int r = static_cast<int>(255 - t * (255 - 31));
      const int g = static_cast<int>(255 - t * (255 - 119));
      const int b = static_cast<int>(255 - t * (255 - 180));
      const double x = left + j * cell;
      const double y = top + i * cell;
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", r, g, b);
      svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) +
             "\" height=\"" + num(cell) + "\" fill=\"" + color + "\" stroke=\"#999\"/>\n";
      svg += "<text x=\"" + num(x + cell / 2) + "\" y=\"" + num(y + cell / 2 + 5) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" fill=\"" +
             (t > 0.55 ? "white" : "black") + "\">" + std::to_string(count) + "</text>\n";
    }
  }
  for (int k = 0; k < kNumClasses; ++k) {
    svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(top + k * cell + cell / 2 + 5) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">" + class_name(k) +
           "</text>\n";
    svg += "<text x=\"" + num(left + k * cell + cell / 2) + "\" y=\"" +
           num(top + kNumClasses * cell + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           class_name(k) + "</text>\n";
  }
  svg += "<text x=\"" + num(left + kNumClasses * cell / 2.0) + "\" y=\"" + num(height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">Predicted class"
         "</text>\n";
  svg += "<text x=\"22\" y=\"" + num(top + kNumClasses * cell / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 22 " +
         num(top + kNumClasses * cell / 2.0) + ")\">True class</text>\n";
  svg += "</svg>\n";
  atomic_write_file(out_svg, svg);
}

void plot_roc_svg(const std::vector<std::string>& roc_csvs,
                  const std::vector<std::string>& curve_names, const std::string& out_svg) {
  if (roc_csvs.size() != curve_names.size())
    throw std::invalid_argument("plot_roc_svg: one name per CSV required");

  const double size = 460, left = 70, top = 50;
  const double width = left + size + 190;
  const double height = top + size + 70;
  auto px = [&](double fpr) { return left + fpr * size; };
  auto py = [&](double tpr) { return top + size - tpr * size; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(left + size / 2) +
         "\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
         "One-vs-rest ROC curves</text>\n";
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(size) +
         "\" height=\"" + num(size) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int tick = 0; tick <= 5; ++tick) {
    const double f = tick / 5.0;
    svg += "<text x=\"" + num(px(f)) + "\" y=\"" + num(top + size + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num(f) +
           "</text>\n";
    svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py(f) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(f) +
           "</text>\n";
  }
  svg += "<text x=\"" + num(left + size / 2) + "\" y=\"" + num(top + size + 44) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
         "False positive rate</text>\n";
  svg += "<text x=\"24\" y=\"" + num(top + size / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 24 " +
         num(top + size / 2) + ")\">True positive rate</text>\n";

  // chance diagonal
  svg += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" + num(px(1)) +
         "\" y2=\"" + num(py(1)) + "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";

  for (std::size_t c = 0; c < roc_csvs.size(); ++c) {
    const auto points = read_roc_csv(roc_csvs[c]);
    const char* color = kCurveColors[c % (sizeof(kCurveColors) / sizeof(kCurveColors[0]))];
    std::string label = curve_names[c];
    if (!points.empty()) {
      RocCurve curve;
      curve.points = points;
      label += " (AUC " + num(auc(curve)) + ")";
      std::string poly;
      for (const auto& [fpr, tpr] : points) poly += num(px(fpr)) + "," + num(py(tpr)) + " ";
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"2\" points=\"" + poly + "\"/>\n";
    } else {
      label += " (undefined)";
    }
    const double ly = top + 18 + 22 * static_cast<double>(c);
    svg += "<line x1=\"" + num(left + size + 16) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(left + size + 44) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"3\"/>\n";
    svg += "<text x=\"" + num(left + size + 50) + "\" y=\"" + num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + label + "</text>\n";
  }
  svg += "</svg>\n";
  atomic_write_file(out_svg, svg);
}

}  // namespace nids

#pragma once

// Plain-text SVG line charts of ResultTable series.

#include <string>
#include <vector>

#include "qdrift/experiments.hpp"

namespace qdrift {

struct PlotOptions {
  std::string x = "auto";      // "N", "n", or "auto" (whichever column varies)
  std::string scale = "auto";  // "log", "linear", or "auto" (log-log against N)
  std::string xlabel;
  std::string ylabel;
  std::string title;
  // Metrics to draw; empty means every per-repetition metric. Values sharing
  // an x coordinate are averaged.
  std::vector<std::string> metrics;
  // "sqrt-n" (sqrt(n / n0)) and/or "inv-sqrt-N" (N^{-1/2}), anchored at the
  // first point of the first series.
  std::vector<std::string> references;
  int width = 640;
  int height = 420;
};

// One <path class="series"> per metric and one <path class="reference"> per
// reference curve. Throws ValidationError when there is nothing to draw.
std::string render_svg(const ResultTable& table, const PlotOptions& options);

}  // namespace qdrift

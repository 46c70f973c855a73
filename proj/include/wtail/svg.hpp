#pragma once

#include <string>
#include <vector>

#include "wtail/montecarlo.hpp"

namespace wtail {

struct SvgPanel {
  std::string title;
  std::string y_label;
  std::vector<CurveSeries> series;
};

struct SvgOptions {
  bool log_y = false;
  int width = 720;
  int panel_height = 320;
};

// Static line chart with panels stacked top to bottom. Series labelled V1, V2
// and V3 are drawn solid, dashed and dotted; other labels fall back to solid.
// With log_y, non-positive values break the polyline.
std::string render_svg(const std::string& title, const std::vector<SvgPanel>& panels,
                       const SvgOptions& options = {});

}  // namespace wtail

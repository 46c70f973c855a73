#include "wtail/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "wtail/errors.hpp"

namespace wtail {
namespace {

constexpr double kMarginLeft = 78.0;
constexpr double kMarginRight = 96.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 44.0;
constexpr double kTitleHeight = 28.0;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* dash_for(const std::string& label) {
  if (label == "V2") return "8,4";
  if (label == "V3") return "2,3";
  return nullptr;
}

const char* colour_for(std::size_t index) {
  static constexpr const char* kColours[] = {"#1f3b73", "#a23b2a", "#2a7a3b", "#6b4c9a"};
  return kColours[index % 4];
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

struct Bounds {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -std::numeric_limits<double>::infinity();
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
};

Bounds bounds_of(const SvgPanel& panel, bool log_y) {
  Bounds b;
  for (const auto& s : panel.series) {
    for (const auto& p : s.points) {
      if (!std::isfinite(p.value) || (log_y && p.value <= 0.0)) continue;
      const double y = log_y ? std::log10(p.value) : p.value;
      b.x_lo = std::min(b.x_lo, static_cast<double>(p.k));
      b.x_hi = std::max(b.x_hi, static_cast<double>(p.k));
      b.y_lo = std::min(b.y_lo, y);
      b.y_hi = std::max(b.y_hi, y);
    }
  }
  if (!std::isfinite(b.x_lo)) {
    b = {0.0, 1.0, 0.0, 1.0};
  }
  if (b.x_hi == b.x_lo) b.x_hi = b.x_lo + 1.0;
  if (b.y_hi == b.y_lo) {
    b.y_lo -= 0.5;
    b.y_hi += 0.5;
  }
  if (log_y) {
    b.y_lo = std::floor(b.y_lo);
    b.y_hi = std::ceil(b.y_hi);
  } else {
    const double pad = 0.05 * (b.y_hi - b.y_lo);
    b.y_lo = b.y_lo >= 0.0 ? std::max(0.0, b.y_lo - pad) : b.y_lo - pad;
    b.y_hi += pad;
  }
  return b;
}

void render_panel(std::ostringstream& out, const SvgPanel& panel, double top,
                  const SvgOptions& options) {
  const double left = kMarginLeft;
  const double plot_w = options.width - kMarginLeft - kMarginRight;
  const double plot_h = options.panel_height - kMarginTop - kMarginBottom;
  const double plot_top = top + kMarginTop;
  const Bounds b = bounds_of(panel, options.log_y);

  auto px = [&](double x) { return left + (x - b.x_lo) / (b.x_hi - b.x_lo) * plot_w; };
  auto py = [&](double y) { return plot_top + plot_h - (y - b.y_lo) / (b.y_hi - b.y_lo) * plot_h; };

  out << "  <g>\n";
  out << "    <text x=\"" << fixed(left + plot_w / 2) << "\" y=\"" << fixed(top + 20)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(panel.title) << "</text>\n";
  out << "    <rect x=\"" << fixed(left) << "\" y=\"" << fixed(plot_top) << "\" width=\""
      << fixed(plot_w) << "\" height=\"" << fixed(plot_h)
      << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1\"/>\n";

  for (double t : linear_ticks(b.x_lo, b.x_hi)) {
    const double x = px(t);
    out << "    <line x1=\"" << fixed(x) << "\" y1=\"" << fixed(plot_top + plot_h) << "\" x2=\""
        << fixed(x) << "\" y2=\"" << fixed(plot_top + plot_h + 5)
        << "\" stroke=\"#000\"/>\n";
    out << "    <text x=\"" << fixed(x) << "\" y=\"" << fixed(plot_top + plot_h + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  std::vector<double> y_ticks;
  if (options.log_y) {
    for (double e = b.y_lo; e <= b.y_hi + 1e-9; e += 1.0) y_ticks.push_back(e);
  } else {
    y_ticks = linear_ticks(b.y_lo, b.y_hi);
  }
  for (double t : y_ticks) {
    const double y = py(t);
    out << "    <line x1=\"" << fixed(left - 5) << "\" y1=\"" << fixed(y) << "\" x2=\""
        << fixed(left + plot_w) << "\" y2=\"" << fixed(y)
        << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    const std::string label = options.log_y ? tick_label(std::pow(10.0, t)) : tick_label(t);
    out << "    <text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
  }
  out << "    <text x=\"" << fixed(left + plot_w / 2) << "\" y=\""
      << fixed(plot_top + plot_h + 36) << "\" text-anchor=\"middle\" font-size=\"12\">k</text>\n";
  if (!panel.y_label.empty()) {
    const double cx = 18.0, cy = plot_top + plot_h / 2;
    out << "    <text x=\"" << fixed(cx) << "\" y=\"" << fixed(cy) << "\" transform=\"rotate(-90 "
        << fixed(cx) << " " << fixed(cy) << ")\" text-anchor=\"middle\" font-size=\"12\">"
        << escape(panel.y_label) << (options.log_y ? " (log scale)" : "") << "</text>\n";
  }

  for (std::size_t si = 0; si < panel.series.size(); ++si) {
    const auto& s = panel.series[si];
    const char* dash = dash_for(s.label);
    std::vector<std::string> runs(1);
    for (const auto& p : s.points) {
      if (!std::isfinite(p.value) || (options.log_y && p.value <= 0.0)) {
        if (!runs.back().empty()) runs.emplace_back();
        continue;
      }
      const double y = options.log_y ? std::log10(p.value) : p.value;
      if (!runs.back().empty()) runs.back() += ' ';
      runs.back() += fixed(px(static_cast<double>(p.k))) + "," + fixed(py(y));
    }
    for (const auto& r : runs) {
      if (r.empty()) continue;
      out << "    <polyline fill=\"none\" stroke=\"" << colour_for(si)
          << "\" stroke-width=\"1.6\"";
      if (dash) out << " stroke-dasharray=\"" << dash << "\"";
      out << " points=\"" << r << "\"/>\n";
    }
    const double ly = plot_top + 14 + 18.0 * static_cast<double>(si);
    const double lx = left + plot_w + 10;
    out << "    <line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 30)
        << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << colour_for(si) << "\" stroke-width=\"1.6\"";
    if (dash) out << " stroke-dasharray=\"" << dash << "\"";
    out << "/>\n";
    out << "    <text x=\"" << fixed(lx + 36) << "\" y=\"" << fixed(ly + 4)
        << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  out << "  </g>\n";
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<SvgPanel>& panels,
                       const SvgOptions& options) {
  if (panels.empty()) throw DomainError("render_svg: no panels");
  if (options.width < 300 || options.panel_height < 150) {
    throw DomainError("render_svg: canvas too small");
  }
  const double height = kTitleHeight + options.panel_height * static_cast<double>(panels.size());
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << fixed(height, 0) << "\" viewBox=\"0 0 " << options.width << " " << fixed(height, 0)
      << "\" font-family=\"sans-serif\">\n";
  out << "  <title>" << escape(title) << "</title>\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  out << "  <text x=\"" << options.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-size=\"16\" font-weight=\"bold\">" << escape(title) << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    render_panel(out, panels[i], kTitleHeight + options.panel_height * static_cast<double>(i),
                 options);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace wtail

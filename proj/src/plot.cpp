#include "qdrift/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "qdrift/errors.hpp"

namespace qdrift {

namespace {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string render_svg(const ResultTable& table, const PlotOptions& opt) {
  if (table.size() == 0) throw ValidationError("plot: table has no rows");
  if (opt.width < 100 || opt.height < 100) throw ValidationError("plot: width and height must be >= 100");

  std::string xcol = opt.x;
  if (xcol == "auto") {
    std::set<std::uint64_t> gates;
    for (const auto& r : table.rows()) gates.insert(r.gates);
    xcol = gates.size() > 1 ? "N" : "n";
  }
  if (xcol != "N" && xcol != "n") throw ValidationError("plot: --x must be N, n or auto");
  std::string scale = opt.scale == "auto" ? (xcol == "N" ? "log" : "linear") : opt.scale;
  if (scale != "log" && scale != "linear") throw ValidationError("plot: --scale must be log, linear or auto");
  const bool logscale = scale == "log";

  std::vector<std::string> names = opt.metrics;
  if (names.empty()) {
    std::set<std::string> seen;
    for (const auto& r : table.rows()) {
      if (r.rep >= 0 && seen.insert(r.metric).second) names.push_back(r.metric);
    }
  }

  std::vector<Series> series;
  for (const auto& name : names) {
    std::map<double, std::pair<double, int>> acc;
    for (const auto& r : table.rows()) {
      if (r.metric != name) continue;
      const double x = xcol == "N" ? static_cast<double>(r.gates) : r.n;
      auto& [sum, count] = acc[x];
      sum += r.value;
      ++count;
    }
    Series s{name, {}};
    for (const auto& [x, sc] : acc) {
      const double y = sc.first / sc.second;
      if (logscale && !(x > 0.0 && y > 0.0)) continue;
      s.points.emplace_back(x, y);
    }
    if (!s.points.empty()) series.push_back(std::move(s));
  }
  if (series.empty()) throw ValidationError("plot: no plottable points");

  std::vector<Series> refs;
  const auto [x0, y0] = series.front().points.front();
  for (const auto& ref : opt.references) {
    Series s{ref, {}};
    for (const auto& [x, y] : series.front().points) {
      (void)y;
      if (ref == "sqrt-n") s.points.emplace_back(x, y0 * std::sqrt(x / x0));
      else if (ref == "inv-sqrt-N") s.points.emplace_back(x, y0 * std::sqrt(x0 / x));
      else throw ValidationError("plot: unknown reference '" + ref + "'");
    }
    refs.push_back(std::move(s));
  }

  auto tx = [&](double v) { return logscale ? std::log10(v) : v; };
  double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
  for (const auto* group : {&series, &refs}) {
    for (const auto& s : *group) {
      for (const auto& [x, y] : s.points) {
        xmin = std::min(xmin, tx(x));
        xmax = std::max(xmax, tx(x));
        ymin = std::min(ymin, tx(y));
        ymax = std::max(ymax, tx(y));
      }
    }
  }
  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double left = 70, right = 160, top = 40, bottom = 55;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (tx(y) - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width << "\" height=\""
      << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n"
      << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0, fy = ymin + (ymax - ymin) * k / 4.0;
    const double vx = logscale ? std::pow(10.0, fx) : fx, vy = logscale ? std::pow(10.0, fy) : fy;
    const double sx = left + pw * k / 4.0, sy = top + ph * (1.0 - k / 4.0);
    svg << "<text x=\"" << num(sx) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">" << tick(vx)
        << "</text>\n";
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\">" << tick(vy)
        << "</text>\n";
  }
  if (!opt.title.empty()) {
    svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\">" << escape(opt.title)
        << "</text>\n";
  }
  const std::string xlabel = opt.xlabel.empty() ? xcol : opt.xlabel;
  svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(opt.height - 12.0)
      << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  if (!opt.ylabel.empty()) {
    svg << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num(top + ph / 2) << ")\">" << escape(opt.ylabel) << "</text>\n";
  }

  auto emit = [&](const Series& s, const char* cls, const char* color, int index, bool dashed) {
    svg << "<path class=\"" << cls << "\" data-name=\"" << escape(s.name) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"5,4\"" : "") << " d=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      svg << (i ? " L " : "M ") << num(px(s.points[i].first)) << ' ' << num(py(s.points[i].second));
    }
    svg << "\"/>\n";
    const double ly = top + 14.0 + 18.0 * index;
    svg << "<text x=\"" << num(left + pw + 12) << "\" y=\"" << num(ly) << "\" fill=\"" << color << "\">"
        << escape(s.name) << "</text>\n";
  };
  int index = 0;
  for (std::size_t i = 0; i < series.size(); ++i, ++index) {
    emit(series[i], "series", kPalette[i % std::size(kPalette)], index, false);
  }
  for (const auto& r : refs) emit(r, "reference", "#555555", index++, true);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qdrift

#include "rbal/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbal/errors.hpp"
#include "rbal/experiment.hpp"

namespace rbal {

namespace {

constexpr double kPanelWidth = 520.0;
constexpr double kPanelHeight = 300.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr double kMarginRight = 130.0;

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

std::string tick(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buffer;
}

const char* colour(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kGmm: return "#d95f02";
    case ClassifierKind::kMrvm1: return "#7570b3";
    case ClassifierKind::kMrvm2: return "#1b9e77";
  }
  return "#000000";
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Maps data coordinates to one panel.
struct Panel {
  double x0, y0;          // top-left of plotting area
  double xmin, xmax, ymin, ymax;

  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * kPanelWidth; }
  double py(double y) const { return y0 + kPanelHeight - (y - ymin) / (ymax - ymin) * kPanelHeight; }
};

double nice_step(double span, int target_ticks) {
  const double raw = span / std::max(1, target_ticks);
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * magnitude >= raw) return m * magnitude;
  return 10.0 * magnitude;
}

void axes(std::ostringstream& svg, const Panel& p, const std::string& title, const std::string& xlabel,
          const std::string& ylabel) {
  svg << "<rect x=\"" << num(p.x0) << "\" y=\"" << num(p.y0) << "\" width=\"" << num(kPanelWidth)
      << "\" height=\"" << num(kPanelHeight) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const double xstep = nice_step(p.xmax - p.xmin, 6);
  for (double x = std::ceil(p.xmin / xstep) * xstep; x <= p.xmax + 1e-9; x += xstep) {
    svg << "<line x1=\"" << num(p.px(x)) << "\" y1=\"" << num(p.y0 + kPanelHeight) << "\" x2=\""
        << num(p.px(x)) << "\" y2=\"" << num(p.y0 + kPanelHeight + 5) << "\" stroke=\"#444\"/>"
        << "<text x=\"" << num(p.px(x)) << "\" y=\"" << num(p.y0 + kPanelHeight + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick(x) << "</text>\n";
  }
  const double ystep = nice_step(p.ymax - p.ymin, 5);
  for (double y = std::ceil(p.ymin / ystep) * ystep; y <= p.ymax + 1e-9; y += ystep) {
    svg << "<line x1=\"" << num(p.x0 - 5) << "\" y1=\"" << num(p.py(y)) << "\" x2=\"" << num(p.x0)
        << "\" y2=\"" << num(p.py(y)) << "\" stroke=\"#444\"/>"
        << "<text x=\"" << num(p.x0 - 8) << "\" y=\"" << num(p.py(y) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << tick(y) << "</text>\n";
  }
  svg << "<text x=\"" << num(p.x0 + kPanelWidth / 2) << "\" y=\"" << num(p.y0 - 12)
      << "\" font-size=\"14\" text-anchor=\"middle\">" << escape(title) << "</text>\n"
      << "<text x=\"" << num(p.x0 + kPanelWidth / 2) << "\" y=\"" << num(p.y0 + kPanelHeight + 38)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n"
      << "<text transform=\"translate(" << num(p.x0 - 45) << ',' << num(p.y0 + kPanelHeight / 2)
      << ") rotate(-90)\" font-size=\"12\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
}

void legend(std::ostringstream& svg, const Panel& p, const std::vector<ClassifierAggregate>& data) {
  double y = p.y0 + 10;
  for (const auto& [kind, agg] : data) {
    const double x = p.x0 + kPanelWidth + 15;
    svg << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"14\" height=\"10\" fill=\""
        << colour(kind) << "\"/><text x=\"" << num(x + 20) << "\" y=\"" << num(y + 9)
        << "\" font-size=\"12\">" << to_string(kind) << " (" << agg.runs << " runs)</text>\n";
    y += 18;
  }
}

std::string open_svg(double width, double height) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << num(width) << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << ' '
      << num(height) << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out.str();
}

void band_panel(std::ostringstream& svg, const Panel& p, const std::vector<ClassifierAggregate>& data,
                bool accuracy) {
  for (const auto& [kind, agg] : data) {
    const auto& band = accuracy ? agg.accuracy : agg.f1;
    if (band.empty()) continue;
    // Step-wise: values hold until the next milestone.
    std::vector<std::pair<double, BandPoint>> steps;
    for (std::size_t i = 0; i < band.size(); ++i) {
      steps.push_back({static_cast<double>(band[i].query_count), band[i]});
      const double next = i + 1 < band.size() ? band[i + 1].query_count : p.xmax;
      steps.push_back({next, band[i]});
    }
    if (agg.runs > 1) {
      svg << "<polygon fill=\"" << colour(kind) << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (const auto& [x, b] : steps) svg << num(p.px(x)) << ',' << num(p.py(b.q75)) << ' ';
      for (auto it = steps.rbegin(); it != steps.rend(); ++it)
        svg << num(p.px(it->first)) << ',' << num(p.py(it->second.q25)) << ' ';
      svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << colour(kind) << "\" points=\"";
    for (const auto& [x, b] : steps) svg << num(p.px(x)) << ',' << num(p.py(b.median)) << ' ';
    svg << "\"/>\n";
  }
}

}  // namespace

std::string curves_svg(const std::vector<ClassifierAggregate>& data) {
  if (data.empty()) throw ContractError("curves_svg: no data");
  double xmax = 1.0, xmin = 1e300;
  for (const auto& [kind, agg] : data) {
    for (const auto& b : agg.accuracy) {
      xmax = std::max(xmax, static_cast<double>(b.query_count));
      xmin = std::min(xmin, static_cast<double>(b.query_count));
    }
  }
  if (xmin >= xmax) xmin = 0.0;
  const double width = kMarginLeft + kPanelWidth + kMarginRight;
  const double height = 2 * (kMarginTop + kPanelHeight + kMarginBottom);
  std::ostringstream svg;
  svg << open_svg(width, height);
  const Panel top{kMarginLeft, kMarginTop, xmin, xmax, 0.0, 1.0};
  const Panel bottom{kMarginLeft, kMarginTop * 2 + kPanelHeight + kMarginBottom, xmin, xmax, 0.0, 1.0};
  axes(svg, top, "Decision accuracy (median, IQR band)", "number of label queries", "decision accuracy");
  band_panel(svg, top, data, true);
  legend(svg, top, data);
  axes(svg, bottom, "Macro f1 (median, IQR band)", "number of label queries", "f1");
  band_panel(svg, bottom, data, false);
  svg << "</svg>\n";
  return svg.str();
}

std::string histogram_svg(const std::vector<ClassifierAggregate>& data) {
  if (data.empty()) throw ContractError("histogram_svg: no data");
  const double width = kMarginLeft + kPanelWidth + kMarginRight;
  const double height = static_cast<double>(data.size()) * (kMarginTop + kPanelHeight + kMarginBottom);
  double xmin = 1e300, xmax = -1e300, ymax = 1.0;
  for (const auto& [kind, agg] : data) {
    for (const auto& b : agg.query_histogram) {
      xmin = std::min(xmin, static_cast<double>(b.lower));
      xmax = std::max(xmax, static_cast<double>(b.lower + agg.histogram_bin_width));
      ymax = std::max(ymax, static_cast<double>(b.count));
    }
  }
  std::ostringstream svg;
  svg << open_svg(width, height);
  double y0 = kMarginTop;
  for (const auto& [kind, agg] : data) {
    const Panel p{kMarginLeft, y0, xmin, xmax, 0.0, ymax};
    axes(svg, p, std::string("Total queries per run: ") + to_string(kind), "number of queries", "runs");
    for (const auto& b : agg.query_histogram) {
      if (b.count == 0) continue;
      const double left = p.px(b.lower);
      const double right = p.px(b.lower + agg.histogram_bin_width);
      svg << "<rect x=\"" << num(left) << "\" y=\"" << num(p.py(b.count)) << "\" width=\""
          << num(right - left) << "\" height=\"" << num(p.py(0) - p.py(b.count)) << "\" fill=\""
          << colour(kind) << "\" stroke=\"white\"/>\n";
    }
    y0 += kMarginTop + kPanelHeight + kMarginBottom;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string query_frequency_svg(const std::vector<ClassifierAggregate>& data) {
  if (data.empty()) throw ContractError("query_frequency_svg: no data");
  const double width = kMarginLeft + kPanelWidth + kMarginRight;
  const double height = static_cast<double>(data.size()) * (kMarginTop + kPanelHeight + kMarginBottom);
  double xmax = 1.0;
  for (const auto& [kind, agg] : data) xmax = std::max(xmax, static_cast<double>(agg.query_frequency.size()));
  std::ostringstream svg;
  svg << open_svg(width, height);
  double y0 = kMarginTop;
  for (const auto& [kind, agg] : data) {
    const Panel p{kMarginLeft, y0, 0.0, xmax, 0.0, 1.0};
    axes(svg, p, std::string("Query frequency per observation: ") + to_string(kind), "observation index",
         "fraction of runs querying");
    svg << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << colour(kind) << "\" points=\"";
    for (std::size_t t = 0; t < agg.query_frequency.size(); ++t)
      svg << num(p.px(static_cast<double>(t))) << ','
          << num(p.py(static_cast<double>(agg.query_frequency[t]) / agg.runs)) << ' ';
    svg << "\"/>\n";
    y0 += kMarginTop + kPanelHeight + kMarginBottom;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> write_plots(const std::string& out_dir, int histogram_bin_width) {
  namespace fs = std::filesystem;
  const Manifest manifest = load_manifest(out_dir);
  std::vector<ClassifierAggregate> data;
  for (auto kind : manifest_classifiers(manifest)) {
    const auto summaries = load_summaries(out_dir, manifest, kind);
    if (!summaries.empty()) data.emplace_back(kind, aggregate_runs(summaries, histogram_bin_width));
  }
  if (data.empty()) throw ContractError("plot: manifest has no successful runs");
  const std::vector<std::pair<const char*, std::string>> figures{
      {kCurvesSvg, curves_svg(data)},
      {kHistogramSvg, histogram_svg(data)},
      {kFrequencySvg, query_frequency_svg(data)}};
  std::vector<std::string> written;
  for (const auto& [name, body] : figures) {
    const auto path = (fs::path(out_dir) / name).string();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << body;
    written.push_back(path);
  }
  return written;
}

}  // namespace rbal

#include "cortexkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace cortexkit::viz {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.2f", v); }

std::string header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
}

int channel(double a, double b, double t) { return static_cast<int>(std::lround(a + (b - a) * t)); }

std::string node_label(const BrainGraph& g, std::size_t i) {
  return i < g.labels().size() && !g.labels()[i].empty() ? g.labels()[i] : std::to_string(i);
}

std::string scale_metadata(double max_abs) {
  return "<metadata>color-scale: diverging linear on a_ij/max|a|; -1 = #2166ac, 0 = #ffffff, +1 = #b2182b; max|a| = " +
         fmt("%.17g", max_abs) + "</metadata>\n";
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string rgb_for(double t) {
  t = std::clamp(t, -1.0, 1.0);
  int r, g, b;
  if (t >= 0.0) {
    r = channel(255, 0xb2, t), g = channel(255, 0x18, t), b = channel(255, 0x2b, t);
  } else {
    r = channel(255, 0x21, -t), g = channel(255, 0x66, -t), b = channel(255, 0xac, -t);
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string adjacency_heatmap(const BrainGraph& g) {
  const std::size_t n = g.n_nodes();
  const double cell = 24.0, margin = 40.0;
  const double size = margin + cell * static_cast<double>(n) + 10.0;
  const double max_abs = g.adjacency().max_abs();
  std::string s = header(size, size) + scale_metadata(max_abs);
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(size) + "\" height=\"" + num(size) + "\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = margin + cell * (static_cast<double>(i) + 0.5);
    const std::string label = xml_escape(node_label(g, i));
    s += "<text x=\"" + num(margin - 4) + "\" y=\"" + num(pos + 4) + "\" font-size=\"10\" text-anchor=\"end\">" + label + "</text>\n";
    s += "<text x=\"" + num(pos) + "\" y=\"" + num(margin - 6) + "\" font-size=\"10\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = g.adjacency()(i, j);
      const double t = max_abs > 0.0 ? v / max_abs : 0.0;
      s += "<rect x=\"" + num(margin + cell * static_cast<double>(j)) + "\" y=\"" + num(margin + cell * static_cast<double>(i)) +
           "\" width=\"" + num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" + rgb_for(t) +
           "\" stroke=\"#dddddd\" stroke-width=\"0.5\"><title>" + fmt("%.6g", v) + "</title></rect>\n";
    }
  return s + "</svg>\n";
}

std::string topology(const BrainGraph& g) {
  const std::size_t n = g.n_nodes();
  const double size = 400.0, c = 200.0, radius = 160.0;
  const double max_abs = g.adjacency().max_abs();
  std::vector<std::pair<double, double>> xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n) - std::numbers::pi / 2.0;
    xy[i] = {c + radius * std::cos(angle), c + radius * std::sin(angle)};
  }
  std::string s = header(size, size) + scale_metadata(max_abs);
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(size) + "\" height=\"" + num(size) + "\" fill=\"#ffffff\"/>\n";
  s += "<g id=\"edges\">\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!g.has_edge(i, j)) continue;
      const double t = g.adjacency()(i, j) / max_abs;
      s += "<line x1=\"" + num(xy[i].first) + "\" y1=\"" + num(xy[i].second) + "\" x2=\"" + num(xy[j].first) + "\" y2=\"" +
           num(xy[j].second) + "\" stroke=\"" + rgb_for(t >= 0 ? std::max(t, 0.35) : std::min(t, -0.35)) +
           "\" stroke-width=\"" + num(0.5 + 3.5 * std::abs(t)) + "\"/>\n";
    }
  s += "</g>\n<g id=\"nodes\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    s += "<circle cx=\"" + num(xy[i].first) + "\" cy=\"" + num(xy[i].second) +
         "\" r=\"9\" fill=\"#fdd49e\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + num(xy[i].first) + "\" y=\"" + num(xy[i].second + 3.5) +
         "\" font-size=\"9\" text-anchor=\"middle\">" + xml_escape(node_label(g, i)) + "</text>\n";
  }
  return s + "</g>\n</svg>\n";
}

std::string confusion_matrix(const ml::EvalReport& r) {
  const auto& c = r.confusion;
  const double total = std::max<double>(1.0, static_cast<double>(c.total()));
  const double cell = 100.0, x0 = 90.0, y0 = 50.0;
  std::string s = header(x0 + 2 * cell + 20, y0 + 2 * cell + 50);
  s += "<metadata>rows: actual class (0, 1); columns: predicted class (0, 1); shade = count / total</metadata>\n";
  const std::size_t counts[2][2] = {{c.tn, c.fp}, {c.fn, c.tp}};
  for (int i = 0; i < 2; ++i) {
    s += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(y0 + cell * (i + 0.5)) + "\" font-size=\"12\" text-anchor=\"end\">actual " +
         std::to_string(i) + "</text>\n";
    s += "<text x=\"" + num(x0 + cell * (i + 0.5)) + "\" y=\"" + num(y0 - 10) +
         "\" font-size=\"12\" text-anchor=\"middle\">predicted " + std::to_string(i) + "</text>\n";
    for (int j = 0; j < 2; ++j) {
      const double share = static_cast<double>(counts[i][j]) / total;
      s += "<rect x=\"" + num(x0 + cell * j) + "\" y=\"" + num(y0 + cell * i) + "\" width=\"" + num(cell) + "\" height=\"" +
           num(cell) + "\" fill=\"" + rgb_for(share) + "\" stroke=\"#333333\"/>\n";
      s += "<text x=\"" + num(x0 + cell * (j + 0.5)) + "\" y=\"" + num(y0 + cell * (i + 0.5) + 5) +
           "\" font-size=\"16\" text-anchor=\"middle\">" + std::to_string(counts[i][j]) + "</text>\n";
    }
  }
  s += "<text x=\"" + num(x0 + cell) + "\" y=\"" + num(y0 + 2 * cell + 30) + "\" font-size=\"12\" text-anchor=\"middle\">accuracy " +
       fmt("%.4f", r.accuracy) + "</text>\n";
  return s + "</svg>\n";
}

std::string roc_curve(const ml::EvalReport& r) {
  const double x0 = 50.0, y0 = 20.0, side = 300.0;
  std::string s = header(x0 + side + 20, y0 + side + 50);
  s += "<metadata>x: false positive rate; y: true positive rate</metadata>\n";
  s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(side) + "\" height=\"" + num(side) +
       "\" fill=\"#ffffff\" stroke=\"#333333\"/>\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0 + side) + "\" x2=\"" + num(x0 + side) + "\" y2=\"" + num(y0) +
       "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  std::string pts;
  for (const auto& [fpr, tpr] : r.roc_points) {
    if (!pts.empty()) pts += ' ';
    pts += num(x0 + side * fpr) + "," + num(y0 + side * (1.0 - tpr));
  }
  s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#b2182b\" stroke-width=\"2\"/>\n";
  s += "<text x=\"" + num(x0 + side / 2) + "\" y=\"" + num(y0 + side + 35) + "\" font-size=\"12\" text-anchor=\"middle\">AUC " +
       fmt("%.4f", r.auc) + "</text>\n";
  return s + "</svg>\n";
}

}  // namespace cortexkit::viz

#pragma once

// Deterministic SVG figures (planar only): network, source measure and
// transport chords; log-log scatter of blow-up tables.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "wh1/analysis.hpp"
#include "wh1/measures.hpp"
#include "wh1/transport.hpp"

namespace wh1 {

namespace svg_detail {

inline std::string f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

inline std::string metadata(const std::string& text) {
  if (text.empty()) return "";
  std::string out = "<metadata>\n";
  for (char ch : text) {
    if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '&') out += "&amp;";
    else out += ch;
  }
  if (out.back() != '\n') out += '\n';
  return out + "</metadata>\n";
}

struct Frame {
  double x0, y0, x1, y1;  // data bounding box
  double size = 600.0, margin = 20.0;
  double scale() const { return (size - 2 * margin) / std::max({x1 - x0, y1 - y0, 1e-12}); }
  double px(double x) const { return margin + (x - x0) * scale(); }
  double py(double y) const { return size - margin - (y - y0) * scale(); }
};

}  // namespace svg_detail

/// Network (black edges), source atoms (blue discs, area ∝ mass), density
/// cells (grey, opacity ∝ value) and optional plan chords (red, one group per
/// source atom, opacity ∝ mass). `meta` is embedded verbatim as metadata.
inline std::string network_figure(const Network& net, const SourceMeasure* rho = nullptr,
                                  const TransportPlan* plan = nullptr, const std::string& meta = "") {
  if (net.dim != 2 || (rho && rho->dim != 2)) throw Error("2D figures only");
  using svg_detail::f;
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  auto grow = [&](const Point& p) {
    x0 = std::min(x0, p[0]);
    y0 = std::min(y0, p[1]);
    x1 = std::max(x1, p[0]);
    y1 = std::max(y1, p[1]);
  };
  for (const auto& v : net.vertices) grow(v);
  if (rho) {
    for (const auto& a : rho->atoms) grow(a.x);
    if (rho->density) {
      const auto& g = *rho->density;
      grow(g.origin);
      grow(g.origin + Point(g.dims[0] * g.cell, g.dims[1] * g.cell, 0.0));
    }
  }
  if (x0 > x1) x0 = y0 = 0.0, x1 = y1 = 1.0;
  svg_detail::Frame fr{x0, y0, x1, y1};
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  s += svg_detail::metadata(meta);
  s += "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\"/>\n";
  if (rho && rho->density) {
    const auto& g = *rho->density;
    const double vmax = g.max_value();
    s += "<g class=\"density\">\n";
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      if (g.values[c] <= 0.0) continue;
      const Point corner = g.cell_corner(c);
      const double w = g.cell * fr.scale();
      s += "<rect x=\"" + f(fr.px(corner[0])) + "\" y=\"" + f(fr.py(corner[1] + g.cell)) + "\" width=\"" + f(w) +
           "\" height=\"" + f(w) + "\" fill=\"#888888\" fill-opacity=\"" + f(0.6 * g.values[c] / vmax) + "\"/>\n";
    }
    s += "</g>\n";
  }
  if (plan && !plan->entries.empty()) {
    double mmax = 0.0;
    for (const auto& e : plan->entries) mmax = std::max(mmax, e.mass);
    s += "<g class=\"plan\">\n";
    int current = -1;
    for (const auto& e : plan->entries) {
      if (e.i != current) {
        if (current >= 0) s += "</g>\n";
        current = e.i;
        s += "<g class=\"chords\" data-source=\"" + std::to_string(e.i) + "\">\n";
      }
      const Point& a = plan->source[e.i].x;
      const Point& b = plan->target[e.j].x;
      s += "<line x1=\"" + f(fr.px(a[0])) + "\" y1=\"" + f(fr.py(a[1])) + "\" x2=\"" + f(fr.px(b[0])) + "\" y2=\"" +
           f(fr.py(b[1])) + "\" stroke=\"#cc2222\" stroke-width=\"1\" stroke-opacity=\"" + f(e.mass / mmax) + "\"/>\n";
    }
    s += "</g>\n</g>\n";
  }
  s += "<g class=\"network\" stroke=\"black\" stroke-width=\"2\">\n";
  for (const auto& e : net.edges) {
    const Point& a = net.vertices[e.a];
    const Point& b = net.vertices[e.b];
    s += "<line x1=\"" + f(fr.px(a[0])) + "\" y1=\"" + f(fr.py(a[1])) + "\" x2=\"" + f(fr.px(b[0])) + "\" y2=\"" +
         f(fr.py(b[1])) + "\"/>\n";
  }
  s += "</g>\n";
  if (rho && !rho->atoms.empty()) {
    s += "<g class=\"atoms\" fill=\"#2255cc\">\n";
    for (const auto& a : rho->atoms)
      s += "<circle cx=\"" + f(fr.px(a.x[0])) + "\" cy=\"" + f(fr.py(a.x[1])) + "\" r=\"" + f(3.0 + 12.0 * std::sqrt(a.w)) +
           "\"/>\n";
    s += "</g>\n";
  }
  s += "</svg>\n";
  return s;
}

/// Log-log scatter of (r, d_H); rows with d_H = 0 are drawn on the bottom axis.
inline std::string blowup_figure(const BlowupTable& tab, const std::string& meta = "") {
  using svg_detail::f;
  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  for (const auto& r : tab.rows) {
    lx0 = std::min(lx0, std::log10(r.r));
    lx1 = std::max(lx1, std::log10(r.r));
    if (r.distance > 0.0) {
      ly0 = std::min(ly0, std::log10(r.distance));
      ly1 = std::max(ly1, std::log10(r.distance));
    }
  }
  if (ly0 > ly1) ly0 = -1.0, ly1 = 0.0;
  lx0 = std::floor(lx0), lx1 = std::ceil(lx1), ly0 = std::floor(ly0), ly1 = std::ceil(ly1);
  if (lx1 <= lx0) lx1 = lx0 + 1;
  if (ly1 <= ly0) ly1 = ly0 + 1;
  const double W = 600, H = 400, m = 50;
  auto px = [&](double lx) { return m + (lx - lx0) / (lx1 - lx0) * (W - 2 * m); };
  auto py = [&](double ly) { return H - m - (ly - ly0) / (ly1 - ly0) * (H - 2 * m); };
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"400\" viewBox=\"0 0 600 400\">\n";
  s += svg_detail::metadata(meta);
  s += "<rect x=\"0\" y=\"0\" width=\"600\" height=\"400\" fill=\"white\"/>\n";
  s += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  s += "<rect x=\"" + f(m) + "\" y=\"" + f(m) + "\" width=\"" + f(W - 2 * m) + "\" height=\"" + f(H - 2 * m) + "\"/>\n";
  s += "</g>\n<g class=\"labels\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double k = lx0; k <= lx1 + 1e-9; k += 1.0)
    s += "<text x=\"" + f(px(k)) + "\" y=\"" + f(H - m + 16) + "\" text-anchor=\"middle\">1e" +
         std::to_string(static_cast<int>(k)) + "</text>\n";
  for (double k = ly0; k <= ly1 + 1e-9; k += 1.0)
    s += "<text x=\"" + f(m - 6) + "\" y=\"" + f(py(k) + 4) + "\" text-anchor=\"end\">1e" +
         std::to_string(static_cast<int>(k)) + "</text>\n";
  s += "<text x=\"" + f(W / 2) + "\" y=\"" + f(H - 10) + "\" text-anchor=\"middle\">r</text>\n";
  s += "<text x=\"14\" y=\"" + f(H / 2) + "\" text-anchor=\"middle\">d_H</text>\n";
  s += "</g>\n<g class=\"points\" fill=\"#cc2222\">\n";
  for (const auto& r : tab.rows) {
    const double y = r.distance > 0.0 ? py(std::log10(r.distance)) : H - m;
    s += "<circle cx=\"" + f(px(std::log10(r.r))) + "\" cy=\"" + f(y) + "\" r=\"4\"/>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace wh1

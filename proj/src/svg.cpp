#include "qpg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qpg::svg {

namespace {

struct Range {
  double lo = 0.0, hi = 1.0;
  void expand(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

Range make_range(bool any, double lo, double hi) {
  if (!any) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_line_chart(const std::string& path, const ChartSpec& spec,
                      const std::vector<Series>& series, const std::vector<Band>& bands) {
  const double ml = 62, mr = spec.y2_label.empty() ? 24 : 62, mt = 40, mb = 48;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;

  bool any_x = false, any_y0 = false, any_y1 = false;
  double x_lo = 0, x_hi = 0, y0_lo = 0, y0_hi = 0, y1_lo = 0, y1_hi = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("svg: series x/y size mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!any_x) { x_lo = x_hi = s.x[i]; any_x = true; }
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      auto& lo = s.axis == 0 ? y0_lo : y1_lo;
      auto& hi = s.axis == 0 ? y0_hi : y1_hi;
      auto& any = s.axis == 0 ? any_y0 : any_y1;
      if (!any) { lo = hi = s.y[i]; any = true; }
      lo = std::min(lo, s.y[i]);
      hi = std::max(hi, s.y[i]);
    }
  }
  const Range xr = make_range(any_x, x_lo, x_hi);
  const Range y0r = make_range(any_y0, y0_lo, y0_hi);
  const Range y1r = make_range(any_y1, y1_lo, y1_hi);

  auto sx = [&](double v) { return ml + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double v, int axis) {
    const Range& r = axis == 0 ? y0r : y1r;
    return mt + ph - (v - r.lo) / (r.hi - r.lo) * ph;
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot open " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
  out << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"white\"/>\n";

  for (const auto& band : bands) {
    const double a = std::clamp(sx(band.x0), ml, ml + pw);
    const double b = std::clamp(sx(band.x1), ml, ml + pw);
    if (b <= a) continue;
    out << "<rect x=\"" << fmt(a) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(b - a)
        << "\" height=\"" << fmt(ph) << "\" fill=\"" << band.color << "\" opacity=\"0.55\"/>\n";
  }

  out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(ml + pw)
      << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml)
      << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";
  if (!spec.y2_label.empty())
    out << "<line x1=\"" << fmt(ml + pw) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml + pw)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";

  // axis ticks: min and max on each scale
  auto tick_text = [&](double px, double py, const std::string& text, const char* anchor) {
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(py)
        << "\" font-size=\"11\" text-anchor=\"" << anchor << "\">" << escape(text) << "</text>\n";
  };
  tick_text(ml, mt + ph + 16, fmt(xr.lo), "middle");
  tick_text(ml + pw, mt + ph + 16, fmt(xr.hi), "middle");
  tick_text(ml - 6, mt + ph, fmt(y0r.lo), "end");
  tick_text(ml - 6, mt + 10, fmt(y0r.hi), "end");
  if (!spec.y2_label.empty()) {
    tick_text(ml + pw + 6, mt + ph, fmt(y1r.lo), "start");
    tick_text(ml + pw + 6, mt + 10, fmt(y1r.hi), "start");
  }

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << ' ';
      out << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i], s.axis));
    }
    out << "\"/>\n";
  }

  double ly = mt + 4;
  for (const auto& s : series) {
    out << "<rect x=\"" << fmt(ml + pw - 150) << "\" y=\"" << fmt(ly) << "\" width=\"12\""
        << " height=\"3\" fill=\"" << s.color << "\"/>\n";
    tick_text(ml + pw - 134, ly + 5, s.name, "start");
    ly += 14;
  }

  tick_text(spec.width / 2.0, 20, spec.title, "middle");
  tick_text(spec.width / 2.0, spec.height - 8, spec.x_label, "middle");
  tick_text(14, mt - 10, spec.y_label, "start");
  if (!spec.y2_label.empty()) tick_text(ml + pw - 10, mt - 10, spec.y2_label, "start");
  out << "</svg>\n";
  if (!out) throw std::runtime_error("svg: write failed for " + path);
}

}  // namespace qpg::svg

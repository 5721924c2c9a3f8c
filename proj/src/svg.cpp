#include "ddlab/svg.hpp"

#include "ddlab/error.hpp"
#include "ddlab/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace ddlab {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

// Linear ramp from dark blue to yellow.
std::string ramp(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(30 + u * (250 - 30)));
  const int g = static_cast<int>(std::lround(40 + u * (230 - 40)));
  const int b = static_cast<int>(std::lround(120 + u * (60 - 120)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  double span() const { return hi > lo ? hi - lo : 1.0; }
};

std::string header(const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) +
                  "\" height=\"" + px(kHeight) + "\" viewBox=\"0 0 " + px(kWidth) + " " +
                  px(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<polygon points=\"0,0 " + px(kWidth) + ",0 " + px(kWidth) + "," + px(kHeight) + " 0," +
       px(kHeight) + "\" fill=\"white\"/>\n";
  if (!title.empty())
    s += "<text x=\"" + px(kLeft) + "\" y=\"24\" font-size=\"14\">" + escape(title) + "</text>\n";
  return s;
}

std::string axes(const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "<polyline fill=\"none\" stroke=\"black\" points=\"" + px(kLeft) + "," + px(kTop) + " " +
       px(kLeft) + "," + px(kTop + kPlotH) + " " + px(kLeft + kPlotW) + "," + px(kTop + kPlotH) +
       "\"/>\n";
  s += "<text x=\"" + px(kLeft + kPlotW / 2) + "\" y=\"" + px(kHeight - 15) +
       "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
  s += "<text x=\"18\" y=\"" + px(kTop + kPlotH / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       px(kTop + kPlotH / 2) + ")\">" + escape(ylabel) + "</text>\n";
  return s;
}

std::string tick_x(double pos, const std::string& label) {
  return "<line x1=\"" + px(pos) + "\" y1=\"" + px(kTop + kPlotH) + "\" x2=\"" + px(pos) +
         "\" y2=\"" + px(kTop + kPlotH + 5) + "\" stroke=\"black\"/>\n<text x=\"" + px(pos) +
         "\" y=\"" + px(kTop + kPlotH + 18) + "\" text-anchor=\"middle\">" + label + "</text>\n";
}

std::string tick_y(double pos, const std::string& label) {
  return "<line x1=\"" + px(kLeft - 5) + "\" y1=\"" + px(pos) + "\" x2=\"" + px(kLeft) +
         "\" y2=\"" + px(pos) + "\" stroke=\"black\"/>\n<text x=\"" + px(kLeft - 8) + "\" y=\"" +
         px(pos + 4) + "\" text-anchor=\"end\">" + label + "</text>\n";
}

std::string legend_ramp(double lo, double hi, const std::string& label) {
  const double x = kLeft + kPlotW + 30, w = 18;
  std::string s;
  const int steps = 32;
  for (int i = 0; i < steps; ++i) {
    const double y0 = kTop + kPlotH * (1.0 - double(i + 1) / steps);
    const double y1 = kTop + kPlotH * (1.0 - double(i) / steps);
    s += "<polygon points=\"" + px(x) + "," + px(y0) + " " + px(x + w) + "," + px(y0) + " " +
         px(x + w) + "," + px(y1) + " " + px(x) + "," + px(y1) + "\" fill=\"" +
         ramp((i + 0.5) / steps) + "\"/>\n";
  }
  s += "<text x=\"" + px(x + w + 6) + "\" y=\"" + px(kTop + 10) + "\">" + num(hi) + "</text>\n";
  s += "<text x=\"" + px(x + w + 6) + "\" y=\"" + px(kTop + kPlotH) + "\">" + num(lo) + "</text>\n";
  s += "<text x=\"" + px(x) + "\" y=\"" + px(kTop - 8) + "\">" + escape(label) + " [" + num(lo) +
       ", " + num(hi) + "]</text>\n";
  return s;
}

void require_rows(const DataTable& table) {
  if (table.rows.empty()) throw InvalidArgument("svg: table has no rows");
}

std::string render_lines(const DataTable& table, const SvgOptions& o) {
  const std::size_t xc = table.column(o.x);
  std::vector<std::size_t> ycs;
  for (const auto& y : o.y) ycs.push_back(table.column(y));
  if (ycs.empty()) throw InvalidArgument("svg: no y columns");
  const bool grouped = std::find(table.columns.begin(), table.columns.end(), o.group) != table.columns.end();
  const std::size_t gc = grouped ? table.column(o.group) : 0;

  auto xmap = [&](double x) { return o.log_x ? std::log10(x) : x; };
  Range xr, yr;
  for (const auto& row : table.rows) {
    if (o.log_x && !(row[xc] > 0.0)) continue;
    xr.add(xmap(row[xc]));
    for (const auto yc : ycs) yr.add(row[yc]);
  }
  if (!xr.valid() || !yr.valid()) throw InvalidArgument("svg: no plottable points");
  auto sx = [&](double x) { return kLeft + (xmap(x) - xr.lo) / xr.span() * kPlotW; };
  auto sy = [&](double y) { return kTop + kPlotH - (y - yr.lo) / yr.span() * kPlotH; };

  std::string s = header(o.title) + axes(o.log_x ? o.x + " (log)" : o.x, o.y.size() == 1 ? o.y[0] : "");
  if (o.log_x) {
    for (double e = std::ceil(xr.lo); e <= xr.hi + 1e-9; e += 1.0)
      s += tick_x(kLeft + (e - xr.lo) / xr.span() * kPlotW, "1e" + num(e));
  } else {
    for (int i = 0; i <= 4; ++i) s += tick_x(kLeft + i * kPlotW / 4, num(xr.lo + i * xr.span() / 4));
  }
  for (int i = 0; i <= 4; ++i) s += tick_y(kTop + kPlotH - i * kPlotH / 4, num(yr.lo + i * yr.span() / 4));

  // Curves in order of first appearance of each group.
  std::vector<double> groups;
  for (const auto& row : table.rows) {
    const double g = grouped ? row[gc] : 0.0;
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  int curve = 0;
  for (const double g : groups) {
    for (std::size_t k = 0; k < ycs.size(); ++k, ++curve) {
      std::string points;
      for (const auto& row : table.rows) {
        if (grouped && row[gc] != g) continue;
        if (o.log_x && !(row[xc] > 0.0)) continue;
        if (!std::isfinite(row[ycs[k]])) continue;
        points += px(sx(row[xc])) + "," + px(sy(row[ycs[k]])) + " ";
      }
      const char* colour = kPalette[curve % 8];
      s += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" +
           points + "\"/>\n";
      std::string label = o.y[k];
      if (grouped) label = o.group + "=" + num(g) + (ycs.size() > 1 ? " " + o.y[k] : "");
      const double ly = kTop + 14.0 * curve;
      s += "<text x=\"" + px(kLeft + kPlotW + 12) + "\" y=\"" + px(ly + 10) + "\" fill=\"" + colour +
           "\">" + escape(label) + "</text>\n";
    }
  }
  return s + "</svg>\n";
}

std::string render_heatmap(const DataTable& table, const SvgOptions& o) {
  const std::size_t xc = table.column(o.x), yc = table.column(o.heat_y), vc = table.column(o.value);
  std::vector<double> xs, ys;
  Range vr;
  for (const auto& row : table.rows) {
    xs.push_back(row[xc]);
    ys.push_back(row[yc]);
    vr.add(row[vc]);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  if (!vr.valid()) throw InvalidArgument("svg: no finite values");
  const double cw = kPlotW / xs.size(), ch = kPlotH / ys.size();
  auto index = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };

  std::string s = header(o.title) + axes(o.x + " (grid index, log-spaced)", o.heat_y);
  for (const auto& row : table.rows) {
    const double u = (row[vc] - vr.lo) / vr.span();
    s += "<rect x=\"" + px(kLeft + index(xs, row[xc]) * cw) + "\" y=\"" +
         px(kTop + kPlotH - (index(ys, row[yc]) + 1) * ch) + "\" width=\"" + px(cw) + "\" height=\"" +
         px(ch) + "\" fill=\"" + (std::isfinite(row[vc]) ? ramp(u) : std::string("#888888")) + "\"/>\n";
  }
  const std::size_t xstep = std::max<std::size_t>(1, xs.size() / 6);
  for (std::size_t i = 0; i < xs.size(); i += xstep) s += tick_x(kLeft + (i + 0.5) * cw, num(xs[i]));
  const std::size_t ystep = std::max<std::size_t>(1, ys.size() / 6);
  for (std::size_t i = 0; i < ys.size(); i += ystep)
    s += tick_y(kTop + kPlotH - (i + 0.5) * ch, num(ys[i]));
  s += legend_ramp(vr.lo, vr.hi, o.value);
  return s + "</svg>\n";
}

std::string render_phase(const DataTable& table, const SvgOptions& o) {
  if (o.background == nullptr) throw InvalidArgument("svg: phase plot needs the background grid");
  const DataTable& bg = *o.background;
  require_rows(bg);
  const std::size_t br = bg.column("R"), bq = bg.column("Q"), bv = bg.column(o.value);
  const std::size_t tr = table.column("R"), tq = table.column("Q");
  const bool grouped = std::find(table.columns.begin(), table.columns.end(), o.group) != table.columns.end();
  const std::size_t gc = grouped ? table.column(o.group) : 0;

  std::vector<double> rs, qs;
  Range vr, rr, qr;
  for (const auto& row : bg.rows) {
    rs.push_back(row[br]);
    qs.push_back(row[bq]);
    vr.add(row[bv]);
    rr.add(row[br]);
    qr.add(row[bq]);
  }
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  const double cw = kPlotW / rs.size(), ch = kPlotH / qs.size();
  // Cell centres sit on the grid values, so the axes extend half a cell past them.
  const double r0 = rr.lo - 0.5 * rr.span() / std::max<std::size_t>(1, rs.size() - 1);
  const double rspan = rr.span() * rs.size() / std::max<std::size_t>(1, rs.size() - 1);
  const double q0 = qr.lo - 0.5 * qr.span() / std::max<std::size_t>(1, qs.size() - 1);
  const double qspan = qr.span() * qs.size() / std::max<std::size_t>(1, qs.size() - 1);
  auto sx = [&](double r) { return kLeft + (r - r0) / rspan * kPlotW; };
  auto sy = [&](double q) { return kTop + kPlotH - (q - q0) / qspan * kPlotH; };

  std::string s = header(o.title) + axes("R", "Q");
  s += "<clipPath id=\"plot\"><polygon points=\"" + px(kLeft) + "," + px(kTop) + " " + px(kLeft + kPlotW) +
       "," + px(kTop) + " " + px(kLeft + kPlotW) + "," + px(kTop + kPlotH) + " " + px(kLeft) + "," +
       px(kTop + kPlotH) + "\"/></clipPath>\n";
  for (const auto& row : bg.rows)
    s += "<rect x=\"" + px(sx(row[br]) - cw / 2) + "\" y=\"" + px(sy(row[bq]) - ch / 2) + "\" width=\"" +
         px(cw) + "\" height=\"" + px(ch) + "\" fill=\"" + ramp((row[bv] - vr.lo) / vr.span()) + "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double r = rr.lo + i * rr.span() / 4, q = qr.lo + i * qr.span() / 4;
    s += tick_x(sx(r), num(r));
    s += tick_y(sy(q), num(q));
  }

  std::vector<double> groups;
  for (const auto& row : table.rows) {
    const double g = grouped ? row[gc] : 0.0;
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  for (std::size_t k = 0; k < groups.size(); ++k) {
    std::string points;
    for (const auto& row : table.rows) {
      if (grouped && row[gc] != groups[k]) continue;
      if (!std::isfinite(row[tr]) || !std::isfinite(row[tq])) continue;
      points += px(sx(row[tr])) + "," + px(sy(row[tq])) + " ";
    }
    const char* colour = k % 2 ? "#ffffff" : "#000000";
    const std::string dash = k < 2 ? "" : " stroke-dasharray=\"" + std::to_string(2 * k) + ",3\"";
    s += "<polyline fill=\"none\" clip-path=\"url(#plot)\" stroke=\"" + std::string(colour) +
         "\" stroke-width=\"2\"" + dash + " points=\"" + points + "\"/>\n";
    s += "<text x=\"" + px(kLeft + kPlotW + 30) + "\" y=\"" + px(kTop + kPlotH + 20 + 14.0 * k) +
         "\">" + escape((grouped ? o.group + "=" + num(groups[k]) : std::string("trajectory"))) +
         (k % 2 ? " (white)" : " (black)") + "</text>\n";
  }
  s += legend_ramp(vr.lo, vr.hi, o.value);
  return s + "</svg>\n";
}

}  // namespace

std::string render_svg(const DataTable& table, SvgKind kind, const SvgOptions& options) {
  require_rows(table);
  switch (kind) {
    case SvgKind::lines: return render_lines(table, options);
    case SvgKind::heatmap: return render_heatmap(table, options);
    case SvgKind::phase: return render_phase(table, options);
  }
  throw InvalidArgument("svg: unknown kind");
}

}  // namespace ddlab

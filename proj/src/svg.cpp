#include "enorm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "enorm/errors.hpp"

namespace enorm {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string esc(const std::string& s) {
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

std::string text(double x, double y, const std::string& s,
                 const std::string& anchor = "middle",
                 const std::string& extra = "") {
  return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" +
         anchor + "\" font-family=\"sans-serif\" font-size=\"12\"" + extra +
         ">" + esc(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2,
                 const std::string& stroke, const std::string& extra = "") {
  return "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
         "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke + "\"" + extra + "/>\n";
}

// Decade ticks covering [lo, hi] on a log axis.
std::vector<double> decade_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const int e0 = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
  const int e1 = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
  for (int e = e0; e <= e1; ++e) ticks.push_back(std::pow(10.0, e));
  return ticks;
}

// 1-2-5 ladder step so a linear axis lands on round numbers.
double nice_step(double range, int target) {
  const double raw = range / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) return mag * mult;
  }
  return mag * 10.0;
}

struct BarLayout {
  double width = 0.0;
  double height = 0.0;
  std::string body;
};

BarLayout render_bars(const std::string& title,
                      const std::vector<std::string>& series_labels,
                      const std::vector<BarGroup>& groups, bool log_scale,
                      double y_offset) {
  if (groups.empty()) throw ValidationError("no bar groups to plot");
  const std::size_t n_series = series_labels.size();
  for (const auto& g : groups) {
    if (g.values.size() != n_series) {
      throw ValidationError("bar group '" + g.label +
                            "' does not match the series count");
    }
  }

  const double bar_w = 16.0, gap = 26.0;
  const double left = 70.0, right = 150.0, top = 46.0, bottom = 50.0;
  const double group_w = bar_w * static_cast<double>(n_series) + gap;
  const double plot_w = group_w * static_cast<double>(groups.size());
  const double plot_h = 240.0;

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (const auto& g : groups) {
    for (double v : g.values) {
      if (log_scale && !(v > 0.0)) continue;
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (!std::isfinite(vmin)) {
    vmin = log_scale ? 0.1 : 0.0;
    vmax = log_scale ? 1.0 : 1.0;
  }

  double lo, hi;
  if (log_scale) {
    lo = std::pow(10.0, std::floor(std::log10(vmin)));
    hi = std::pow(10.0, std::ceil(std::log10(vmax)));
    if (lo == hi) hi *= 10.0;
  } else {
    lo = std::min(0.0, vmin);
    hi = std::max(0.0, vmax);
    if (lo == hi) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    if (vmin < 0.0) lo -= pad;
    hi += pad;
  }

  auto ty = [&](double v) {
    const double f = log_scale
                         ? (std::log10(v) - std::log10(lo)) /
                               (std::log10(hi) - std::log10(lo))
                         : (v - lo) / (hi - lo);
    return y_offset + top + plot_h * (1.0 - f);
  };

  std::string b;
  b += text(left + plot_w / 2.0, y_offset + 22.0, title, "middle",
            " font-weight=\"bold\"");
  b += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(y_offset + top) +
       "\" width=\"" + fmt(plot_w) + "\" height=\"" + fmt(plot_h) +
       "\" fill=\"none\" stroke=\"#333\"/>\n";

  if (log_scale) {
    for (double v : decade_ticks(lo, hi)) {
      const double y = ty(v);
      b += line(left, y, left + plot_w, y, "#ddd");
      b += text(left - 6.0, y + 4.0, fmt(v), "end");
    }
  } else {
    const double step = nice_step(hi - lo, 5);
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * step;
         v += step) {
      const double y = ty(v);
      b += line(left, y, left + plot_w, y, v == 0.0 ? "#999" : "#ddd");
      b += text(left - 6.0, y + 4.0, fmt(v), "end");
    }
  }

  const double base = log_scale ? ty(lo) : ty(std::max(lo, std::min(hi, 0.0)));
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double gx = left + group_w * static_cast<double>(gi) + gap / 2.0;
    for (std::size_t si = 0; si < n_series; ++si) {
      const double v = groups[gi].values[si];
      if (log_scale && !(v > 0.0)) continue;
      const double x = gx + bar_w * static_cast<double>(si);
      const double yv = ty(log_scale ? v : v);
      const double y0 = std::min(yv, base);
      const double h = std::abs(base - yv);
      b += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y0) + "\" width=\"" +
           fmt(bar_w - 2.0) + "\" height=\"" + fmt(h) + "\" fill=\"" +
           kPalette[si % 8] + "\"/>\n";
    }
    b += text(gx + bar_w * static_cast<double>(n_series) / 2.0,
              y_offset + top + plot_h + 18.0, groups[gi].label);
  }

  for (std::size_t si = 0; si < n_series; ++si) {
    const double ly = y_offset + top + 16.0 * static_cast<double>(si);
    b += "<rect x=\"" + fmt(left + plot_w + 12.0) + "\" y=\"" + fmt(ly) +
         "\" width=\"10\" height=\"10\" fill=\"" + kPalette[si % 8] + "\"/>\n";
    b += text(left + plot_w + 27.0, ly + 9.0, series_labels[si], "start");
  }

  BarLayout out;
  out.width = left + plot_w + right;
  out.height = top + plot_h + bottom;
  out.body = std::move(b);
  return out;
}

std::string document(double w, double h, const std::string& body) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) +
         "\" height=\"" + fmt(h) + "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body +
         "</svg>\n";
}

}  // namespace

std::string svg_scatter_loglog(const std::string& title,
                               const std::string& x_label,
                               const std::string& y_label,
                               const std::vector<ScatterSeries>& series,
                               bool identity_line) {
  const double left = 70.0, right = 160.0, top = 40.0, bottom = 55.0;
  const double plot_w = 460.0, plot_h = 400.0;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw ValidationError("scatter series '" + s.label +
                            "' has mismatched x/y lengths");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) {
        throw ValidationError("log-log scatter needs positive values");
      }
      lo = std::min({lo, s.x[i], s.y[i]});
      hi = std::max({hi, s.x[i], s.y[i]});
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.1;
    hi = 1.0;
  }
  if (lo == hi) {
    lo /= 2.0;
    hi *= 2.0;
  }
  const double llo = std::log10(lo) - 0.05 * (std::log10(hi) - std::log10(lo));
  const double lhi = std::log10(hi) + 0.05 * (std::log10(hi) - std::log10(lo));

  auto tx = [&](double v) {
    return left + plot_w * (std::log10(v) - llo) / (lhi - llo);
  };
  auto ty = [&](double v) {
    return top + plot_h * (1.0 - (std::log10(v) - llo) / (lhi - llo));
  };

  std::string b;
  b += text(left + plot_w / 2.0, 22.0, title, "middle", " font-weight=\"bold\"");
  b += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" +
       fmt(plot_w) + "\" height=\"" + fmt(plot_h) +
       "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (double v : decade_ticks(std::pow(10.0, llo), std::pow(10.0, lhi))) {
    b += line(tx(v), top, tx(v), top + plot_h, "#eee");
    b += text(tx(v), top + plot_h + 16.0, fmt(v));
    b += line(left, ty(v), left + plot_w, ty(v), "#eee");
    b += text(left - 6.0, ty(v) + 4.0, fmt(v), "end");
  }
  b += text(left + plot_w / 2.0, top + plot_h + 38.0, x_label);
  b += "<text x=\"" + fmt(16.0) + "\" y=\"" + fmt(top + plot_h / 2.0) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\"" +
       " transform=\"rotate(-90 16 " + fmt(top + plot_h / 2.0) + ")\">" +
       esc(y_label) + "</text>\n";

  if (identity_line) {
    b += line(tx(lo), ty(lo), tx(hi), ty(hi), "#888",
              " stroke-dasharray=\"6 4\"");
    b += text(tx(hi) - 4.0, ty(hi) + 14.0, "y = x", "end",
              " fill=\"#888\"");
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color = s.color.empty() ? kPalette[si % 8] : s.color;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      b += "<circle cx=\"" + fmt(tx(s.x[i])) + "\" cy=\"" + fmt(ty(s.y[i])) +
           "\" r=\"4\" fill=\"" + color + "\" fill-opacity=\"0.75\"/>\n";
    }
    const double ly = top + 8.0 + 16.0 * static_cast<double>(si);
    b += "<rect x=\"" + fmt(left + plot_w + 12.0) + "\" y=\"" + fmt(ly) +
         "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    b += text(left + plot_w + 27.0, ly + 9.0, s.label, "start");
  }

  return document(left + plot_w + right, top + plot_h + bottom, b);
}

std::string svg_grouped_bars(const std::string& title,
                             const std::vector<std::string>& series_labels,
                             const std::vector<BarGroup>& groups,
                             bool log_scale) {
  const BarLayout layout =
      render_bars(title, series_labels, groups, log_scale, 0.0);
  return document(layout.width, layout.height, layout.body);
}

std::string svg_metric_panels(const std::string& title,
                              const std::vector<std::string>& series_labels,
                              const std::vector<BarGroup>& r2_groups,
                              const std::vector<BarGroup>& mse_groups) {
  const BarLayout r2 =
      render_bars(title + " (R2, test)", series_labels, r2_groups, false, 0.0);
  const BarLayout ms = render_bars(title + " (MSE, test, log scale)",
                                   series_labels, mse_groups, true, r2.height);
  return document(std::max(r2.width, ms.width), r2.height + ms.height,
                  r2.body + ms.body);
}

}  // namespace enorm

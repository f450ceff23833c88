#pragma once

#include <string>
#include <vector>

namespace enorm {

// Self-contained static SVG emitters for the two figure styles the CLI
// produces: log-log scatter with the identity "optimum" line, and grouped
// bars for per-cell metrics. Output is deterministic for equal input.

struct ScatterSeries {
  std::string label;
  std::vector<double> x;  // must be positive (log axes)
  std::vector<double> y;
  std::string color = "#1f77b4";
};

std::string svg_scatter_loglog(const std::string& title,
                               const std::string& x_label,
                               const std::string& y_label,
                               const std::vector<ScatterSeries>& series,
                               bool identity_line = true);

struct BarGroup {
  std::string label;            // one group per experiment cell
  std::vector<double> values;   // one value per series
};

std::string svg_grouped_bars(const std::string& title,
                             const std::vector<std::string>& series_labels,
                             const std::vector<BarGroup>& groups,
                             bool log_scale = false);

// Two stacked charts (R^2 linear scale, MSE log scale) in one document.
std::string svg_metric_panels(const std::string& title,
                              const std::vector<std::string>& series_labels,
                              const std::vector<BarGroup>& r2_groups,
                              const std::vector<BarGroup>& mse_groups);

}  // namespace enorm

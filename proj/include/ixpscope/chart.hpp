// Minimal self-contained SVG line charts of one metric over time.
//
// Each run of consecutive days is one <polyline class="segment">, so a gap
// in the data shows as a break between segments. Every point is also drawn
// as a <circle class="point">, and each event as a
// <rect class="event" data-start=... data-end=...> spanning its days.
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ixpscope/metrics.hpp"
#include "ixpscope/outage.hpp"

namespace ixpscope {

struct ChartOptions {
  std::string title;
  int width = 960;
  int height = 400;
};

/// Horizontal geometry shared by points and event shading: day d occupies
/// [x_of(d), x_of(d + 1)).
struct ChartAxis {
  Date first{};
  Date last{};
  double left = 0;
  double day_width = 0;

  double x_of(Date d) const { return left + static_cast<double>((d - first).count()) * day_width; }
};

/// Points must belong to one track and be sorted by date. Events of other
/// metrics are ignored.
void render_svg(std::ostream& out, std::span<const DailyMetrics> points, Metric metric,
                std::span<const OutageEvent> events, const ChartOptions& options = {});

/// Plain `date,<metric>` table of the same points.
void write_table(std::ostream& out, std::span<const DailyMetrics> points, Metric metric);

/// Splits sorted points into runs of consecutive calendar days.
std::vector<std::span<const DailyMetrics>> contiguous_runs(std::span<const DailyMetrics> points);

}  // namespace ixpscope

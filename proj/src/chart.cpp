#include "ixpscope/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ixpscope {

namespace {

constexpr double kLeft = 64;
constexpr double kRight = 16;
constexpr double kTop = 36;
constexpr double kBottom = 40;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
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

// 1, 2 or 5 times a power of ten, so that about `target` ticks cover max.
double tick_step(double max, int target) {
  const double raw = max / target;
  const double base = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * base >= raw) return m * base;
  }
  return 10 * base;
}

}  // namespace

std::vector<std::span<const DailyMetrics>> contiguous_runs(std::span<const DailyMetrics> points) {
  std::vector<std::span<const DailyMetrics>> runs;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= points.size(); ++i) {
    if (i == points.size() || points[i].date - points[i - 1].date != std::chrono::days{1}) {
      if (i > begin) runs.push_back(points.subspan(begin, i - begin));
      begin = i;
    }
  }
  return runs;
}

void render_svg(std::ostream& out, std::span<const DailyMetrics> points, Metric metric,
                std::span<const OutageEvent> events, const ChartOptions& options) {
  const double w = options.width;
  const double h = options.height;
  const double plot_w = w - kLeft - kRight;
  const double plot_h = h - kTop - kBottom;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
  out << "<style>.segment{fill:none;stroke:#1f5fa8;stroke-width:1.5}.point{fill:#1f5fa8}"
         ".event{fill:#d62728;fill-opacity:0.18}.axis{stroke:#333}.grid{stroke:#ddd}"
         "text{font-family:sans-serif;font-size:11px}</style>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string title = options.title.empty() ? std::string(metric_name(metric)) : options.title;
  out << "<text x=\"" << num(w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
      << "</text>\n";

  if (points.empty()) {
    out << "<text x=\"" << num(w / 2) << "\" y=\"" << num(h / 2) << "\" text-anchor=\"middle\">no data</text>\n";
    out << "</svg>\n";
    return;
  }

  ChartAxis axis;
  axis.first = points.front().date;
  axis.last = points.back().date;
  axis.left = kLeft;
  axis.day_width = plot_w / static_cast<double>((axis.last - axis.first).count() + 1);

  std::uint64_t max = 0;
  for (const auto& p : points) max = std::max(max, p.value(metric));
  const double step = tick_step(std::max<double>(static_cast<double>(max), 1.0), 5);
  const double ymax = step * std::ceil(std::max<double>(static_cast<double>(max), 1.0) / step);
  auto y_of = [&](double v) { return kTop + plot_h - v / ymax * plot_h; };
  auto cx = [&](Date d) { return axis.x_of(d) + axis.day_width / 2; };

  // Grid and y labels.
  for (double v = 0; v <= ymax + step / 2; v += step) {
    out << "<line class=\"grid\" x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + plot_w) << "\" y1=\""
        << num(y_of(v)) << "\" y2=\"" << num(y_of(v)) << "\"/>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y_of(v) + 4) << "\" text-anchor=\"end\">"
        << static_cast<long long>(v) << "</text>\n";
  }

  for (const auto& e : events) {
    if (e.metric != metric || e.end < axis.first || e.start > axis.last) continue;
    const Date s = std::max(e.start, axis.first);
    const Date t = std::min(e.end, axis.last);
    const double x0 = axis.x_of(s);
    const double x1 = axis.x_of(t + std::chrono::days{1});
    out << "<rect class=\"event\" data-start=\"" << format_date(e.start) << "\" data-end=\"" << format_date(e.end)
        << "\" x=\"" << num(x0) << "\" y=\"" << num(kTop) << "\" width=\"" << num(x1 - x0) << "\" height=\""
        << num(plot_h) << "\"><title>" << xml_escape(e.annotation.empty() ? "event" : e.annotation)
        << "</title></rect>\n";
  }

  out << "<line class=\"axis\" x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + plot_w) << "\" y1=\""
      << num(kTop + plot_h) << "\" y2=\"" << num(kTop + plot_h) << "\"/>\n";
  out << "<line class=\"axis\" x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft) << "\" y1=\"" << num(kTop)
      << "\" y2=\"" << num(kTop + plot_h) << "\"/>\n";

  // Date labels: first, last and the first of each month between.
  std::vector<Date> labels{axis.first};
  for (Date d = axis.first + std::chrono::days{1}; d < axis.last; d += std::chrono::days{1}) {
    if (std::chrono::year_month_day(d).day() == std::chrono::day{1}) labels.push_back(d);
  }
  if (axis.last != axis.first) labels.push_back(axis.last);
  for (Date d : labels) {
    out << "<text x=\"" << num(cx(d)) << "\" y=\"" << num(kTop + plot_h + 16) << "\" text-anchor=\"middle\">"
        << format_date(d) << "</text>\n";
  }

  for (auto run : contiguous_runs(points)) {
    out << "<polyline class=\"segment\" points=\"";
    for (std::size_t i = 0; i < run.size(); ++i) {
      out << (i ? " " : "") << num(cx(run[i].date)) << ',' << num(y_of(static_cast<double>(run[i].value(metric))));
    }
    out << "\"/>\n";
  }
  for (const auto& p : points) {
    out << "<circle class=\"point\" data-date=\"" << format_date(p.date) << "\" cx=\"" << num(cx(p.date))
        << "\" cy=\"" << num(y_of(static_cast<double>(p.value(metric)))) << "\" r=\"2\"/>\n";
  }
  out << "</svg>\n";
}

void write_table(std::ostream& out, std::span<const DailyMetrics> points, Metric metric) {
  out << "date," << metric_name(metric) << '\n';
  for (const auto& p : points) out << format_date(p.date) << ',' << p.value(metric) << '\n';
}

}  // namespace ixpscope

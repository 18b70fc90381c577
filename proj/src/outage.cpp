#include "ixpscope/outage.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "ixpscope/csv.hpp"

namespace ixpscope {

void DetectorParams::validate() const {
  if (trailing_window < 1) throw std::invalid_argument("trailing window must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must be in (0, 1)");
  if (min_reference < 0.0) throw std::invalid_argument("min_reference must be >= 0");
}

namespace {

double median(std::vector<double> v) {
  const auto n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::vector<OutageEvent> detect_dips(const MetricSeries& series, Metric metric, const DetectorParams& params) {
  params.validate();
  const auto& pts = series.points;
  const auto window = static_cast<std::size_t>(params.trailing_window);
  if (pts.size() < window + 1) {
    throw std::invalid_argument("detect_dips: series " + series.ixp + "/" + series.country.str() + " has " +
                                std::to_string(pts.size()) + " points, need at least " +
                                std::to_string(window + 1));
  }

  std::vector<OutageEvent> events;
  std::optional<OutageEvent> open;
  std::vector<double> trailing;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = static_cast<double>(pts[i].value(metric));
    bool dip = false;
    double ref = 0;
    if (i > 0) {
      trailing.clear();
      for (std::size_t j = i - std::min(i, window); j < i; ++j) trailing.push_back(static_cast<double>(pts[j].value(metric)));
      ref = median(trailing);
      dip = ref >= params.min_reference && v < (1.0 - params.threshold) * ref;
    }
    if (dip) {
      if (!open) {
        open = OutageEvent{series.ixp, series.country, metric, pts[i].date, pts[i].date, ref, v, 0.0, {}};
      } else {
        open->end = pts[i].date;
        open->min_value = std::min(open->min_value, v);
      }
    } else if (open) {
      open->relative_drop = (open->reference_level - open->min_value) / open->reference_level;
      events.push_back(std::move(*open));
      open.reset();
    }
  }
  if (open) {
    open->relative_drop = (open->reference_level - open->min_value) / open->reference_level;
    events.push_back(std::move(*open));
  }
  return events;
}

std::vector<CatalogEvent> read_catalog(std::istream& in) {
  std::vector<CatalogEvent> out;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw DataError("catalog line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto f = split(line, '|');
    if (f.size() != 5) fail("expected id|start|end|label|source");
    CatalogEvent e;
    e.id = std::string(trim(f[0]));
    auto start = trim(f[1]);
    auto end = trim(f[2]);
    e.label = std::string(trim(f[3]));
    e.source = std::string(trim(f[4]));
    if (e.id.empty()) fail("empty id");
    if (e.label.empty()) fail("empty label");
    if (start.empty() != end.empty()) fail("give both dates or neither");
    if (!start.empty()) {
      auto s = parse_date(start);
      auto t = parse_date(end);
      if (!s || !t) fail("bad date");
      if (*t < *s) fail("end date before start date");
      e.dates = DateRange{*s, *t};
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CatalogEvent> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open catalog '" + path.string() + "'");
  return read_catalog(in);
}

std::vector<OutageEvent> annotate(std::vector<OutageEvent> events, std::span<const CatalogEvent> catalog,
                                  int slack_days) {
  if (slack_days < 0) throw std::invalid_argument("annotate: slack must be >= 0");
  const std::chrono::days slack{slack_days};
  for (auto& ev : events) {
    const CatalogEvent* best = nullptr;
    long best_overlap = 0;
    for (const auto& c : catalog) {
      if (!c.dates) continue;
      const Date lo = std::max(ev.start, c.dates->first - slack);
      const Date hi = std::min(ev.end, c.dates->last + slack);
      if (hi < lo) continue;
      const long overlap = (hi - lo).count() + 1;
      if (!best || overlap > best_overlap ||
          (overlap == best_overlap &&
           std::tie(c.dates->first, c.id) < std::tie(best->dates->first, best->id))) {
        best = &c;
        best_overlap = overlap;
      }
    }
    if (best) ev.annotation = best->id;
  }
  return events;
}

void write_events_csv(std::ostream& out, std::span<const OutageEvent> events) {
  out << "ixp,country,metric,start,end,reference,min,drop,annotation\n";
  char drop[32];
  for (const auto& e : events) {
    std::snprintf(drop, sizeof(drop), "%.6f", e.relative_drop);
    out << csv::escape(e.ixp) << ',' << e.country.str() << ',' << metric_name(e.metric) << ','
        << format_date(e.start) << ',' << format_date(e.end) << ',' << format_number(e.reference_level) << ','
        << format_number(e.min_value) << ',' << drop << ',' << csv::escape(e.annotation) << '\n';
  }
}

std::vector<OutageEvent> read_events_csv(std::istream& in) {
  std::vector<OutageEvent> out;
  std::string raw;
  std::vector<std::string> f;
  std::size_t line_no = 0;
  bool header = false;
  auto fail = [&](const std::string& why) {
    throw DataError("events CSV line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    if (!header) {
      if (trim(raw) != "ixp,country,metric,start,end,reference,min,drop,annotation") fail("unexpected header");
      header = true;
      continue;
    }
    if (!csv::split_line(raw, f) || f.size() != 9) fail("expected 9 fields");
    OutageEvent e;
    e.ixp = f[0];
    auto cc = CountryCode::parse(f[1]);
    auto m = parse_metric(f[2]);
    auto s = parse_date(f[3]);
    auto t = parse_date(f[4]);
    if (!cc || !m || !s || !t) fail("bad country, metric or date");
    e.country = *cc;
    e.metric = *m;
    e.start = *s;
    e.end = *t;
    try {
      e.reference_level = std::stod(f[5]);
      e.min_value = std::stod(f[6]);
      e.relative_drop = std::stod(f[7]);
    } catch (const std::logic_error&) {
      fail("bad number");
    }
    e.annotation = f[8];
    out.push_back(std::move(e));
  }
  if (!header) throw DataError("events CSV is empty");
  return out;
}

}  // namespace ixpscope

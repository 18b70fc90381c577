#include "ixpscope/cli.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ixpscope/chart.hpp"
#include "ixpscope/pipeline.hpp"
#include "ixpscope/synth.hpp"

namespace ixpscope {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  for (auto item : split(text, ',')) {
    item = trim(item);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

std::vector<CountryCode> parse_countries(std::string_view text) {
  std::vector<CountryCode> out;
  for (const auto& item : split_list(text)) out.push_back(country(item));
  return out;
}

int parse_int(std::string_view key, std::string_view text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(std::string(text), &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(std::string(key) + ": not an integer: '" + std::string(text) + "'");
}

double parse_double(std::string_view key, std::string_view text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(std::string(key) + ": not a number: '" + std::string(text) + "'");
}

Date parse_date_arg(std::string_view key, std::string_view text) {
  auto d = parse_date(text);
  if (!d) throw std::invalid_argument(std::string(key) + ": not a YYYY-MM-DD date: '" + std::string(text) + "'");
  return *d;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw DataError("failed writing '" + path.string() + "'");
}

void set_key(RunConfig& c, std::string_view key, std::string_view value) {
  if (key == "asndb") {
    c.asndb_path = fs::path(std::string(value));
  } else if (key == "snapshots") {
    c.snapshot_root = fs::path(std::string(value));
  } else if (key == "ixps") {
    c.ixps = split_list(value);
  } else if (key == "countries") {
    c.countries = parse_countries(value);
  } else if (key == "baseline") {
    c.baseline = parse_date_arg(key, value);
  } else if (key == "final") {
    c.final_date = parse_date_arg(key, value);
  } else if (key == "confirmation_window") {
    c.confirmation_window = parse_int(key, value);
  } else if (key == "trailing_window") {
    c.detector.trailing_window = parse_int(key, value);
  } else if (key == "threshold") {
    c.detector.threshold = parse_double(key, value);
  } else if (key == "min_reference") {
    c.detector.min_reference = parse_double(key, value);
  } else if (key == "catalog") {
    c.catalog_path = fs::path(std::string(value));
  } else if (key == "catalog_slack") {
    c.catalog_slack = parse_int(key, value);
  } else if (key == "schema") {
    c.schema_path = fs::path(std::string(value));
  } else if (key == "out") {
    c.out_dir = fs::path(std::string(value));
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (asndb_path.empty()) throw std::invalid_argument("asndb path is not set");
  if (snapshot_root.empty()) throw std::invalid_argument("snapshot root is not set");
  if (ixps.empty()) throw std::invalid_argument("no IXPs configured");
  if (countries.empty()) throw std::invalid_argument("no countries configured");
  for (auto cc : countries) {
    if (cc.is_placeholder()) throw std::invalid_argument("ZZ is not a country");
  }
  if (!(baseline < final_date)) throw std::invalid_argument("baseline must be before the final date");
  if (confirmation_window < 0) throw std::invalid_argument("confirmation_window must be >= 0");
  if (catalog_slack < 0) throw std::invalid_argument("catalog_slack must be >= 0");
  detector.validate();
}

void apply_config(RunConfig& config, std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------

int cmd_build_asndb(const std::vector<std::pair<Registry, fs::path>>& inputs, const fs::path& out_path,
                    std::ostream& out, std::ostream& err) {
  std::vector<DelegatedParse> parsed;
  std::size_t skipped = 0;
  for (const auto& [registry, path] : inputs) {
    try {
      parsed.push_back(parse_delegated_file(path, registry));
    } catch (const DataError& e) {
      err << "error: " << registry_name(registry) << ": " << e.what() << '\n';
      return kExitData;
    }
    for (const auto& s : parsed.back().skipped) {
      err << "warning: " << registry_name(registry) << " line " << s.line << ": " << s.reason << '\n';
    }
    skipped += parsed.back().skipped.size();
  }
  const AsnDb db = merge(std::span<const DelegatedParse>(parsed));
  std::ostringstream text;
  write_asndb(text, db);
  try {
    write_file(out_path, text.str());
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  out << "records=" << db.size() << " conflicts=" << db.conflicts() << " skipped=" << skipped << '\n';
  return kExitOk;
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const AsnDb db = load_asndb(config.asndb_path);
    const CsvSchema schema = config.schema_path ? load_schema(*config.schema_path) : CsvSchema{};
    AnalysisParams params;
    params.baseline = config.baseline;
    params.final_date = config.final_date;
    params.confirmation_window = config.confirmation_window;
    params.detector = config.detector;
    params.catalog_slack = config.catalog_slack;
    if (config.catalog_path) params.catalog = load_catalog(*config.catalog_path);

    std::error_code ec;
    if (!fs::is_directory(config.snapshot_root, ec)) {
      throw DataError("snapshot root '" + config.snapshot_root.string() + "' is not a directory");
    }
    const DateRange window{config.baseline, config.final_date};
    std::vector<SnapshotSeries> loaded;
    std::size_t snapshots = 0;
    for (const auto& ixp : config.ixps) {
      loaded.push_back(load_series(config.snapshot_root, ixp, window, schema));
      snapshots += loaded.back().snapshots.size();
      for (const auto& w : loaded.back().warnings) err << "warning: " << w << '\n';
    }
    if (snapshots == 0) throw DataError("no snapshots under '" + config.snapshot_root.string() + "' in the window");

    std::map<TrackKey, TrackOutputs> results;
    for (const auto& series : loaded) {
      std::size_t skipped = 0;
      for (const auto& s : series.snapshots) skipped += s.skipped;
      if (skipped > 0) err << "warning: " << series.ixp << ": " << skipped << " malformed rows skipped\n";
      for (auto cc : config.countries) {
        if (!series.at(config.baseline)) {
          throw DataError(series.ixp + ": no snapshot for baseline date " + format_date(config.baseline));
        }
        if (!series.at(config.final_date)) {
          throw DataError(series.ixp + ": no snapshot for final date " + format_date(config.final_date));
        }
        auto r = analyze_track(series, db, cc, params);
        for (const auto& w : r.warnings) err << "warning: " << w << '\n';
        results.emplace(TrackKey{series.ixp, cc}, std::move(r));
      }
    }

    fs::create_directories(config.out_dir, ec);
    if (ec) throw DataError("cannot create '" + config.out_dir.string() + "': " + ec.message());
    for (const auto& [key, r] : results) {
      const fs::path dir = config.out_dir / key.ixp / key.country.str();
      fs::create_directories(dir, ec);
      if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());

      std::ostringstream metrics;
      write_metrics_csv(metrics, std::span<const MetricSeries>(&r.series, 1));
      write_file(dir / "metrics.csv", metrics.str());

      std::ostringstream events;
      write_events_csv(events, r.events);
      write_file(dir / "events.csv", events.str());

      std::ostringstream report;
      write_report_kv(report, r.report);
      write_file(dir / "report.kv", report.str());

      std::ostringstream offline;
      offline << "asn,offline_days\n";
      for (const auto& [asn, _] : r.origins.presence) offline << asn << ',' << offline_days(r.origins, asn, window) << '\n';
      write_file(dir / "offline.csv", offline.str());

      std::ostringstream neighbors;
      neighbors << "neighbor,date\n";
      for (const auto& [asn, dates] : r.neighbors.presence) {
        for (Date d : dates) neighbors << asn << ',' << format_date(d) << '\n';
      }
      write_file(dir / "neighbors.csv", neighbors.str());
    }

    std::ostringstream summary, table;
    summary << "# ixpscope summary\n";
    summary << "# track|country|ixp|total_baseline|lost|pct_lost\n";
    summary << "# average|country|average_pct\n";
    for (auto cc : config.countries) {
      std::vector<ReachabilityReport> reports;
      std::vector<Percent1> pcts;
      for (const auto& ixp : config.ixps) {
        const auto& rep = results.at(TrackKey{ixp, cc}).report;
        reports.push_back(rep);
        summary << "track|" << cc.str() << '|' << ixp << '|' << rep.total_baseline << '|' << rep.lost << '|'
                << (rep.pct_lost ? rep.pct_lost->str() : "n/a") << '\n';
        if (rep.pct_lost) pcts.push_back(*rep.pct_lost);
      }
      summary << "average|" << cc.str() << '|' << (pcts.empty() ? "n/a" : average_pct(pcts).str()) << '\n';
      table << cc.str() << '\n';
      write_report_table(table, reports);
      if (!pcts.empty()) table << "average % lost: " << average_pct(pcts).str() << '\n';
      table << '\n';
    }
    write_file(config.out_dir / "summary.txt", summary.str());
    write_file(config.out_dir / "report.txt", table.str());
    out << table.str();
    return kExitOk;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err) {
  const auto metric = parse_metric(options.metric);
  if (!metric) {
    err << "error: unknown metric '" << options.metric << "'; valid metrics:";
    for (auto m : kAllMetrics) err << ' ' << metric_name(m);
    err << '\n';
    return kExitUsage;
  }
  try {
    std::ifstream in(options.metrics_path);
    if (!in) throw DataError("cannot open '" + options.metrics_path.string() + "'");
    auto rows = read_metrics_csv(in);

    std::optional<CountryCode> cc;
    if (options.country) {
      cc = CountryCode::parse(*options.country);
      if (!cc) {
        err << "error: bad country code '" << *options.country << "'\n";
        return kExitUsage;
      }
    }
    std::vector<DailyMetrics> points;
    for (auto& r : rows) {
      if (options.ixp && r.ixp != *options.ixp) continue;
      if (cc && r.country != *cc) continue;
      points.push_back(std::move(r));
    }
    std::set<std::pair<std::string, CountryCode>> tracks;
    for (const auto& p : points) tracks.emplace(p.ixp, p.country);
    if (tracks.size() > 1) {
      err << "error: metrics file holds " << tracks.size() << " tracks; choose one with --ixp and --country\n";
      return kExitUsage;
    }
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.date < b.date; });

    std::vector<OutageEvent> events;
    if (options.events_path) {
      std::ifstream ev(*options.events_path);
      if (!ev) throw DataError("cannot open '" + options.events_path->string() + "'");
      for (auto& e : read_events_csv(ev)) {
        if (!tracks.empty() && (e.ixp != tracks.begin()->first || e.country != tracks.begin()->second)) continue;
        events.push_back(std::move(e));
      }
    }

    ChartOptions chart;
    chart.title = options.title;
    if (chart.title.empty() && !tracks.empty()) {
      chart.title = tracks.begin()->first + " " + tracks.begin()->second.str() + " " + std::string(metric_name(*metric));
    }
    if (options.table_path) {
      std::ostringstream t;
      write_table(t, points, *metric);
      write_file(*options.table_path, t.str());
    }
    if (options.svg_path) {
      std::ostringstream s;
      render_svg(s, points, *metric, events, chart);
      write_file(*options.svg_path, s.str());
    } else if (!options.table_path) {
      render_svg(out, points, *metric, events, chart);
    }
    return kExitOk;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int cmd_synth(const fs::path& spec_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  try {
    const auto spec = load_scenario(spec_path);
    generate(spec, out_dir);
    out << (out_dir / "ground_truth.txt").string() << '\n';
    return kExitOk;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Country-level reachability analysis of IXP route-server snapshots", "ixpscope"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build-asndb", "Merge RIR delegated files into an ASN-to-country database");
  std::vector<std::string> rir_args;
  std::string asndb_out;
  build->add_option("--rir", rir_args, "registry=path (afrinic, apnic, arin, lacnic, ripencc); repeatable")
      ->required();
  build->add_option("--out", asndb_out, "Output database path")->required();

  auto* analyze = app.add_subcommand("analyze", "Compute metrics, reachability reports and outage events");
  std::string config_path, a_asndb, a_snapshots, a_ixps, a_countries, a_baseline, a_final, a_catalog, a_schema,
      a_out;
  int a_window = 0, a_trailing = 0, a_slack = 0;
  double a_threshold = 0, a_min_ref = 0;
  analyze->add_option("--config", config_path, "key = value configuration file");
  auto* o_asndb = analyze->add_option("--asndb", a_asndb, "ASN database from build-asndb");
  auto* o_snapshots = analyze->add_option("--snapshots", a_snapshots, "Snapshot root (<root>/<ixp>/<date>.csv)");
  auto* o_ixps = analyze->add_option("--ixps", a_ixps, "Comma separated IXP ids");
  auto* o_countries = analyze->add_option("--countries", a_countries, "Comma separated country codes");
  auto* o_baseline = analyze->add_option("--baseline", a_baseline, "Baseline date");
  auto* o_final = analyze->add_option("--final", a_final, "Final date");
  auto* o_window = analyze->add_option("--confirmation-window", a_window, "Days an origin must stay absent");
  auto* o_trailing = analyze->add_option("--trailing-window", a_trailing, "Detector reference window (points)");
  auto* o_threshold = analyze->add_option("--threshold", a_threshold, "Detector relative drop threshold");
  auto* o_min_ref = analyze->add_option("--min-reference", a_min_ref, "Smallest reference level considered");
  auto* o_catalog = analyze->add_option("--catalog", a_catalog, "Event catalog for annotation");
  auto* o_slack = analyze->add_option("--catalog-slack", a_slack, "Days of slack when matching the catalog");
  auto* o_schema = analyze->add_option("--schema", a_schema, "CSV column mapping file");
  auto* o_out = analyze->add_option("--out", a_out, "Output directory");

  auto* plot = app.add_subcommand("plot", "Render a metric series as SVG or a plain table");
  PlotOptions plot_opts;
  std::string p_ixp, p_country, p_events, p_svg, p_table;
  plot->add_option("--metrics", plot_opts.metrics_path, "metrics.csv from analyze")->required();
  plot->add_option("--metric", plot_opts.metric, "announcements, distinct_origins, distinct_prefixes or distinct_neighbors");
  auto* o_pixp = plot->add_option("--ixp", p_ixp, "IXP to plot");
  auto* o_pcountry = plot->add_option("--country", p_country, "Country to plot");
  auto* o_pevents = plot->add_option("--events", p_events, "events.csv to shade");
  auto* o_psvg = plot->add_option("--out", p_svg, "SVG output path (default: standard output)");
  auto* o_ptable = plot->add_option("--table", p_table, "Also write a date,value table");
  plot->add_option("--title", plot_opts.title, "Chart title");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic snapshot tree with ground truth");
  std::string spec_path, synth_out;
  synth->add_option("--spec", spec_path, "Scenario JSON file")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::vector<const char*> argv{"ixpscope"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*build) {
    std::vector<std::pair<Registry, fs::path>> inputs;
    for (const auto& a : rir_args) {
      const auto eq = a.find('=');
      const auto reg = eq == std::string::npos ? std::nullopt : parse_registry(a.substr(0, eq));
      if (!reg) {
        err << "error: --rir expects registry=path with registry one of afrinic, apnic, arin, lacnic, ripencc; got '"
            << a << "'\n";
        return kExitUsage;
      }
      inputs.emplace_back(*reg, fs::path(a.substr(eq + 1)));
    }
    return cmd_build_asndb(inputs, asndb_out, out, err);
  }

  if (*analyze) {
    RunConfig config;
    try {
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
          err << "error: cannot open config '" << config_path << "'\n";
          return kExitUsage;
        }
        apply_config(config, in);
      }
      auto override = [&](CLI::Option* opt, std::string_view key, const std::string& value) {
        if (opt->count() > 0) set_key(config, key, value);
      };
      override(o_asndb, "asndb", a_asndb);
      override(o_snapshots, "snapshots", a_snapshots);
      override(o_ixps, "ixps", a_ixps);
      override(o_countries, "countries", a_countries);
      override(o_baseline, "baseline", a_baseline);
      override(o_final, "final", a_final);
      override(o_catalog, "catalog", a_catalog);
      override(o_schema, "schema", a_schema);
      override(o_out, "out", a_out);
      if (o_window->count()) config.confirmation_window = a_window;
      if (o_trailing->count()) config.detector.trailing_window = a_trailing;
      if (o_threshold->count()) config.detector.threshold = a_threshold;
      if (o_min_ref->count()) config.detector.min_reference = a_min_ref;
      if (o_slack->count()) config.catalog_slack = a_slack;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    return cmd_analyze(config, out, err);
  }

  if (*plot) {
    if (o_pixp->count()) plot_opts.ixp = p_ixp;
    if (o_pcountry->count()) plot_opts.country = p_country;
    if (o_pevents->count()) plot_opts.events_path = fs::path(p_events);
    if (o_psvg->count()) plot_opts.svg_path = fs::path(p_svg);
    if (o_ptable->count()) plot_opts.table_path = fs::path(p_table);
    return cmd_plot(plot_opts, out, err);
  }

  if (*synth) return cmd_synth(spec_path, synth_out, out, err);
  return kExitUsage;
}

}  // namespace ixpscope

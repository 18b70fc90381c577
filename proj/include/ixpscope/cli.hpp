// The ixpscope command line: build-asndb, analyze, plot and synth.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ixpscope/asndb.hpp"
#include "ixpscope/outage.hpp"

namespace ixpscope {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Settings of `analyze`. Defaults describe the 2022 study: five IXPs,
/// Ukraine and Russia, 19 Feb to 29 Apr.
struct RunConfig {
  std::filesystem::path asndb_path;
  std::filesystem::path snapshot_root;
  std::vector<std::string> ixps{"amsix", "linx", "six", "auix", "spoixbr"};
  std::vector<CountryCode> countries{country("UA"), country("RU")};
  Date baseline = date_from_string("2022-02-19");
  Date final_date = date_from_string("2022-04-29");
  int confirmation_window = 3;
  DetectorParams detector;
  std::optional<std::filesystem::path> catalog_path;
  int catalog_slack = 1;
  std::optional<std::filesystem::path> schema_path;
  std::filesystem::path out_dir = "ixpscope-out";

  /// Throws std::invalid_argument naming the offending setting.
  void validate() const;
};

/// `key = value` lines, `#` comments. Keys: asndb, snapshots, ixps,
/// countries, baseline, final, confirmation_window, trailing_window,
/// threshold, min_reference, catalog, catalog_slack, schema, out. Lists are
/// comma separated. Throws std::invalid_argument on unknown keys or bad
/// values.
void apply_config(RunConfig& config, std::istream& in);

int cmd_build_asndb(const std::vector<std::pair<Registry, std::filesystem::path>>& inputs,
                    const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

/// Writes, under out_dir, `<ixp>/<CC>/{metrics.csv,events.csv,report.kv,
/// offline.csv,neighbors.csv}` for every track, plus `summary.txt` and
/// `report.txt`.
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);

struct PlotOptions {
  std::filesystem::path metrics_path;
  std::string metric = "announcements";
  std::optional<std::string> ixp;
  std::optional<std::string> country;
  std::optional<std::filesystem::path> events_path;
  std::optional<std::filesystem::path> svg_path;
  std::optional<std::filesystem::path> table_path;
  std::string title;
};

/// With neither svg_path nor table_path set, the SVG goes to `out`.
int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err);

int cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream& err);

/// Parses `args` (without the program name) and runs the subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ixpscope

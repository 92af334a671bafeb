#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace pxg::cli {

/// Flags shared by all subcommands. Output directory precedence: --out-dir,
/// then [output].dir, then PXG_OUT_DIR (passed in as env_out_dir), then ".".
struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::filesystem::path> env_out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

enum class PointFormat { Csv, Binary };
enum class PlotKind { LogLog, Survival };

/// Each command writes result files, prints one JSON object on `out` and
/// returns an ExitCode. Failures are reported on `err` with the offending
/// config key when there is one.
int cmd_sample(const GlobalOptions& opts, PointFormat format, std::ostream& out, std::ostream& err);
int cmd_build(const GlobalOptions& opts, const std::optional<std::filesystem::path>& points, std::ostream& out,
              std::ostream& err);
/// `kind`, when given, must agree with [experiment].kind.
int cmd_experiment(const GlobalOptions& opts, const std::optional<std::string>& kind, std::ostream& out,
                   std::ostream& err);
int cmd_plot(const GlobalOptions& opts, const std::filesystem::path& summary, PlotKind kind,
             const std::optional<std::filesystem::path>& svg, std::ostream& out, std::ostream& err);

/// Reads points from CSV, or from the binary format when the file starts
/// with the binary magic. A zero-byte file holds no points.
std::vector<Point> read_points_file(const std::filesystem::path& path);

}  // namespace pxg::cli

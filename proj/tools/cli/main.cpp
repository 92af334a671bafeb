#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace pxg::cli;
  CLI::App app{"pxg: forbidden-region graphs and stabilization experiments"};
  app.require_subcommand(1);

  GlobalOptions opts;
  std::string config, out_dir;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  auto* o_config = app.add_option("--config", config, "TOML run configuration");
  auto* o_out = app.add_option("--out-dir", out_dir, "directory for result files (default: PXG_OUT_DIR or .)");
  auto* o_seed = app.add_option("--seed", seed, "overrides the configured seed");
  auto* o_threads = app.add_option("--threads", threads, "worker threads, 0 = all hardware threads");

  auto* sample = app.add_subcommand("sample", "sample a point cloud from [window] and [process]");
  std::string format = "csv";
  sample->add_option("--format", format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));

  auto* build = app.add_subcommand("build", "build the graph, write edges CSV, print n, edges and L");
  std::string points;
  auto* o_points = build->add_option("--points", points, "points file (CSV or binary); default samples from [process]");

  auto* experiment = app.add_subcommand("experiment", "run the configured experiment");
  std::string kind;
  auto* o_kind = experiment->add_option("kind", kind, "variance, clt, tails or stabilize")
                     ->check(CLI::IsMember({"variance", "clt", "tails", "stabilize"}));

  auto* plot = app.add_subcommand("plot", "render an SVG from a summary JSON");
  std::string summary, plot_kind, svg;
  plot->add_option("--summary", summary, "summary JSON")->required();
  plot->add_option("--kind", plot_kind, "loglog or survival")->required()->check(CLI::IsMember({"loglog", "survival"}));
  auto* o_svg = plot->add_option("--out", svg, "SVG path");

  for (auto* sub : {sample, build, experiment, plot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*o_config) opts.config = config;
  if (*o_out) opts.out_dir = out_dir;
  if (*o_seed) opts.seed = seed;
  if (*o_threads) opts.threads = threads;
  if (const char* env = std::getenv("PXG_OUT_DIR"); env && *env) opts.env_out_dir = env;

  if (*sample) return cmd_sample(opts, format == "binary" ? PointFormat::Binary : PointFormat::Csv, std::cout, std::cerr);
  if (*build) {
    std::optional<std::filesystem::path> p;
    if (*o_points) p = points;
    return cmd_build(opts, p, std::cout, std::cerr);
  }
  if (*experiment) {
    std::optional<std::string> k;
    if (*o_kind) k = kind;
    return cmd_experiment(opts, k, std::cout, std::cerr);
  }
  std::optional<std::filesystem::path> out_svg;
  if (*o_svg) out_svg = svg;
  return cmd_plot(opts, summary, plot_kind == "loglog" ? PlotKind::LogLog : PlotKind::Survival, out_svg, std::cout,
                  std::cerr);
}

#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "pxg/format.hpp"
#include "pxg/graph.hpp"
#include "pxg/harness.hpp"
#include "pxg/stabilize.hpp"
#include "svg.hpp"

namespace pxg::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "pxg/1";

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariantError;
  }
}

RunConfig load(const GlobalOptions& opts) {
  if (!opts.config) throw ConfigError("config", "no --config file given");
  return load_config(*opts.config);
}

std::filesystem::path out_dir(const GlobalOptions& opts, const RunConfig& cfg) {
  std::filesystem::path dir = ".";
  if (opts.out_dir) {
    dir = *opts.out_dir;
  } else if (!cfg.output.dir.empty()) {
    dir = cfg.output.dir;
    if (dir.is_relative() && opts.config) dir = opts.config->parent_path() / dir;
  } else if (opts.env_out_dir) {
    dir = *opts.env_out_dir;
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

/// Writes the whole buffer, raising IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("failed writing " + path.string());
}

Json point_json(const Point& p) {
  Json a = Json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

Json window_json(const Window& w) {
  return Json{{"shape", w.shape() == Window::Shape::Ball ? "ball" : "cube"},
              {"anchor", point_json(w.anchor())},
              {"size", w.size()}};
}

Json fit_json(const LinearFit& f) {
  return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"corr", f.corr}, {"n", f.n}};
}

Json per_t_json(const PerTStats& s) {
  return Json{{"t", s.t},
              {"replications", s.replications},
              {"mean", s.mean},
              {"variance", s.variance},
              {"d_kolmogorov", s.d_kolmogorov},
              {"d_wasserstein1", s.d_wasserstein1},
              {"d_kolmogorov_var", s.d_kolmogorov_var},
              {"d_wasserstein1_var", s.d_wasserstein1_var}};
}

Json weight_json(const WeightSummary& w) {
  Json per_t = Json::array();
  for (const auto& s : w.per_t) per_t.push_back(per_t_json(s));
  return Json{{"weight", w.weight},
              {"alpha", w.alpha},
              {"variance_exponent", w.variance_exponent},
              {"expected_exponent", w.expected_exponent},
              {"v_alpha_hat", w.v_alpha_hat},
              {"variance_fit", fit_json(w.variance_fit)},
              {"kolmogorov_fit", fit_json(w.kolmogorov_fit)},
              {"wasserstein_fit", fit_json(w.wasserstein_fit)},
              {"kolmogorov_decreasing", w.kolmogorov_decreasing},
              {"fits_valid", w.fits_valid},
              {"per_t", per_t}};
}

std::string process_name(const ProcessConfig& p) { return std::string(to_string(p.kind)); }

std::size_t threads_for(const GlobalOptions& opts, const ExperimentConfig& e) {
  return opts.threads ? *opts.threads : e.threads;
}

int run_harness(const GlobalOptions& opts, const RunConfig& cfg, const ExperimentConfig& e, std::ostream& out) {
  const ProcessConfig& proc = require_process(cfg);
  if (cfg.weights.empty()) throw ConfigError("weight", "missing table [weight]");
  ExperimentPlan plan;
  plan.family = require_family(cfg);
  plan.window = require_window(cfg);
  plan.weights = cfg.weights;
  plan.process = proc.kind;
  plan.parameterization = proc.parameterization;
  plan.t_values = e.t_values;
  plan.replications = e.replications;
  plan.master_seed = opts.seed ? *opts.seed : e.seed;
  plan.threads = threads_for(opts, e);
  plan.max_points = e.max_points;
  plan.record_timing = e.record_timing;
  if (plan.parameterization == Parameterization::GrowingWindow && !plan.window.star_shaped_about_origin()) {
    throw ConfigError("window", "growing-window experiments need a window containing the origin");
  }

  const SummaryStats stats = run_plan(plan);
  const auto dir = out_dir(opts, cfg);
  std::ostringstream csv;
  write_replications_csv(csv, stats, plan.weights);
  write_file(dir / cfg.output.replications, csv.str());

  Json j;
  j["schema"] = kSchema;
  j["experiment"] = to_string(e.kind);
  j["family"] = plan.family.name();
  j["dim"] = plan.family.dim();
  j["window"] = window_json(plan.window);
  j["process"] = process_name(proc);
  j["parameterization"] = proc.parameterization == Parameterization::GrowingWindow ? "growing" : "fixed";
  j["master_seed"] = plan.master_seed;
  j["replications"] = plan.replications;
  j["t_values"] = plan.t_values;
  j["partial"] = stats.partial;
  j["partial_reason"] = stats.partial_reason;
  // Top-level copies describe the first weight.
  const WeightSummary& first = stats.weights.front();
  const Json first_json = weight_json(first);
  for (const char* key : {"variance_exponent", "expected_exponent", "v_alpha_hat", "kolmogorov_decreasing",
                          "fits_valid", "per_t"}) {
    j[key] = first_json[key];
  }
  j["kolmogorov_slope"] = first.kolmogorov_fit.slope;
  j["wasserstein_slope"] = first.wasserstein_fit.slope;
  Json weights = Json::array();
  for (const auto& w : stats.weights) weights.push_back(weight_json(w));
  j["weights"] = weights;
  write_file(dir / cfg.output.summary, j.dump(2) + "\n");

  out << Json{{"schema", kSchema},
              {"experiment", to_string(e.kind)},
              {"replications_csv", (dir / cfg.output.replications).string()},
              {"summary", (dir / cfg.output.summary).string()},
              {"partial", stats.partial}}
             .dump()
      << "\n";
  return kOk;
}

int run_tails(const GlobalOptions& opts, const RunConfig& cfg, const ExperimentConfig& e, std::ostream& out) {
  const ForbiddenRegionFamily& family = require_family(cfg);
  const Window& window = require_window(cfg);
  TailOptions to;
  to.t_values = e.t_values;
  to.replications = e.replications;
  to.r_grid = e.r_grid;
  to.seed = opts.seed ? *opts.seed : e.seed;
  to.threads = threads_for(opts, e);
  to.per_axis = e.per_axis;
  to.epsilon = e.epsilon;
  to.delta = e.delta;
  const TailResult res = tail_survival(family, window, to);
  const auto dir = out_dir(opts, cfg);

  std::string csv = "t,r,survivors,total,survival\n";
  for (const auto& row : res.rows) {
    csv += format_double(row.t) + "," + format_double(row.r) + "," + std::to_string(row.survivors) + "," +
           std::to_string(row.total) + "," + format_double(row.survival) + "\n";
  }
  write_file(dir / cfg.output.survival, csv);

  Json j;
  j["schema"] = kSchema;
  j["experiment"] = "tails";
  j["family"] = family.name();
  j["dim"] = family.dim();
  j["window"] = window_json(window);
  j["seed"] = to.seed;
  j["replications"] = to.replications;
  j["t_values"] = to.t_values;
  j["per_axis"] = to.per_axis;
  j["epsilon"] = to.epsilon;
  j["kappa"] = res.kappa;
  j["c_lambda"] = res.c_lambda;
  Json fits = Json::array();
  for (const auto& f : res.fits) {
    fits.push_back(Json{{"t", f.t},
                        {"slope", f.slope},
                        {"intercept", f.intercept},
                        {"corr", f.corr},
                        {"points_used", f.points_used},
                        {"flagged", f.flagged},
                        {"kappa_reference", res.kappa},
                        {"reference_slope", f.reference_slope}});
  }
  j["fits"] = fits;
  Json survival = Json::array();
  for (double t : to.t_values) {
    Json rs = Json::array(), ss = Json::array();
    for (const auto& row : res.rows) {
      if (row.t != t) continue;
      rs.push_back(row.r);
      ss.push_back(row.survival);
    }
    survival.push_back(Json{{"t", t}, {"r", rs}, {"survival", ss}});
  }
  j["survival"] = survival;
  write_file(dir / cfg.output.summary, j.dump(2) + "\n");

  out << Json{{"schema", kSchema},
              {"experiment", "tails"},
              {"survival_csv", (dir / cfg.output.survival).string()},
              {"summary", (dir / cfg.output.summary).string()}}
             .dump()
      << "\n";
  return kOk;
}

Json violation_json(const ContractViolation& v) {
  return Json{{"trial", v.trial},
              {"x", point_json(v.x)},
              {"y", point_json(v.y)},
              {"radius", v.radius},
              {"refined_radius", v.refined_radius},
              {"second_difference", v.second_difference},
              {"resolved", v.resolved}};
}

int run_stabilize(const GlobalOptions& opts, const RunConfig& cfg, const ExperimentConfig& e, std::ostream& out) {
  const ForbiddenRegionFamily& family = require_family(cfg);
  const Window& window = require_window(cfg);
  if (cfg.weights.size() != 1) throw ConfigError("weight", "the stabilize experiment takes a single weight");
  ContractOptions co;
  co.trials = e.trials;
  co.margin = e.margin;
  co.n_min = e.n_min;
  co.n_max = e.n_max;
  co.per_axis = e.per_axis;
  co.extra_points = e.extra_points;
  co.seed = opts.seed ? *opts.seed : e.seed;
  co.threads = threads_for(opts, e);
  const ContractReport rep = check_stabilization_contract(family, window, cfg.weights.front(), co);
  const auto dir = out_dir(opts, cfg);

  Json j;
  j["schema"] = kSchema;
  j["experiment"] = "stabilize";
  j["family"] = family.name();
  j["dim"] = family.dim();
  j["window"] = window_json(window);
  j["seed"] = co.seed;
  j["margin"] = co.margin;
  j["trials"] = rep.trials;
  j["draws"] = rep.draws;
  j["zero"] = rep.zero;
  j["zero_fraction"] = rep.zero_fraction();
  j["add_many_trials"] = rep.add_many_trials;
  j["add_many_unchanged"] = rep.add_many_unchanged;
  j["add_many_fraction"] = rep.add_many_fraction();
  j["all_resolved"] = rep.all_resolved();
  Json vs = Json::array(), avs = Json::array();
  for (const auto& v : rep.violations) vs.push_back(violation_json(v));
  for (const auto& v : rep.add_many_violations) avs.push_back(violation_json(v));
  j["violations"] = vs;
  j["add_many_violations"] = avs;
  j["log"] = rep.log;
  write_file(dir / cfg.output.summary, j.dump(2) + "\n");

  out << Json{{"schema", kSchema},
              {"experiment", "stabilize"},
              {"summary", (dir / cfg.output.summary).string()},
              {"zero_fraction", rep.zero_fraction()},
              {"all_resolved", rep.all_resolved()}}
             .dump()
      << "\n";
  return kOk;
}

PointCloud sample_from_config(const GlobalOptions& opts, const RunConfig& cfg) {
  const Window& window = require_window(cfg);
  const ProcessConfig& p = require_process(cfg);
  const std::uint64_t seed = opts.seed ? *opts.seed : p.seed;
  const bool growing = p.parameterization == Parameterization::GrowingWindow;
  if (growing && !window.star_shaped_about_origin()) {
    throw ConfigError("window", "growing-window sampling needs a window containing the origin");
  }
  if (p.kind == ProcessKind::Poisson) {
    return growing ? sample_poisson_growing(window, p.t, seed) : sample_poisson(window, p.t, seed);
  }
  if (growing) return sample_binomial_growing(window, p.t, seed);
  PointCloud c = sample_binomial(window, static_cast<std::size_t>(std::ceil(p.t)), seed);
  c.t = p.t;
  return c;
}

}  // namespace

std::vector<Point> read_points_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read points file " + path.string());
  std::string head(4, '\0');
  in.read(head.data(), 4);
  const auto got = in.gcount();
  if (got == 0) return {};
  in.clear();
  in.seekg(0);
  try {
    if (got == 4 && head == "PXG1") return read_points_binary(in);
    return read_points_csv(in);
  } catch (const std::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

int cmd_sample(const GlobalOptions& opts, PointFormat format, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(opts);
    const PointCloud cloud = sample_from_config(opts, cfg);
    const auto dir = out_dir(opts, cfg);
    std::filesystem::path path = dir / cfg.output.points;
    std::ostringstream buf;
    if (format == PointFormat::Binary) {
      if (path.extension() == ".csv") path.replace_extension(".bin");
      write_points_binary(buf, cloud.points, cloud.dim());
    } else {
      write_points_csv(buf, cloud.points, cloud.dim());
    }
    write_file(path, buf.str());
    out << Json{{"schema", kSchema},
                {"n", cloud.size()},
                {"t", cloud.t},
                {"process", std::string(to_string(cloud.kind))},
                {"seed", cloud.seed},
                {"points", path.string()}}
               .dump()
        << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_build(const GlobalOptions& opts, const std::optional<std::filesystem::path>& points, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(opts);
    const ForbiddenRegionFamily& family = require_family(cfg);
    if (cfg.weights.empty()) throw ConfigError("weight", "missing table [weight]");
    if (cfg.weights.size() != 1) throw ConfigError("weight.alphas", "build takes a single weight");
    const WeightSpec& weight = cfg.weights.front();
    const auto dir = out_dir(opts, cfg);

    std::vector<Point> pts;
    if (points) {
      pts = read_points_file(*points);
    } else {
      const PointCloud cloud = sample_from_config(opts, cfg);
      pts = cloud.points;
      std::ostringstream buf;
      write_points_csv(buf, pts, cloud.dim());
      write_file(dir / cfg.output.points, buf.str());
    }
    for (const auto& p : pts) {
      if (p.dim() != family.dim()) throw ConfigError("family.dim", "differs from the points' dimension");
    }

    const ProximityGraph g = build_accelerated(pts, family);
    std::string csv = "i,j,weight\n";
    for (const auto& e : g.edges) {
      csv += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_double(weight(pts[e.i], pts[e.j])) + "\n";
    }
    write_file(dir / cfg.output.edges, csv);
    out << Json{{"schema", kSchema},
                {"n", g.n},
                {"edges", g.edges.size()},
                {"L", eval_L(g, pts, weight)},
                {"edges_csv", (dir / cfg.output.edges).string()}}
               .dump()
        << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_experiment(const GlobalOptions& opts, const std::optional<std::string>& kind, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(opts);
    const ExperimentConfig& e = require_experiment(cfg);
    if (kind && *kind != to_string(e.kind)) {
      throw ConfigError("experiment.kind", "is '" + to_string(e.kind) + "' but the command asked for '" + *kind + "'");
    }
    switch (e.kind) {
      case ExperimentKind::Variance:
      case ExperimentKind::Clt:
        return run_harness(opts, cfg, e, out);
      case ExperimentKind::Tails:
        return run_tails(opts, cfg, e, out);
      case ExperimentKind::Stabilize:
        return run_stabilize(opts, cfg, e, out);
    }
    return static_cast<int>(kInvariantError);
  });
}

int cmd_plot(const GlobalOptions& opts, const std::filesystem::path& summary, PlotKind kind,
             const std::optional<std::filesystem::path>& svg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(summary, std::ios::binary);
    if (!in) throw IoError("cannot read summary " + summary.string());
    Json j;
    try {
      j = Json::parse(in);
    } catch (const std::exception& e) {
      throw IoError(summary.string() + ": not valid JSON");
    }
    std::vector<Series> series;
    std::string title, xlabel, ylabel;
    bool log_x = true;
    if (kind == PlotKind::LogLog) {
      if (!j.contains("weights") || !j["weights"].is_array()) throw ConfigError("weights", "summary has no weight series");
      const bool clt = j.value("experiment", "") == "clt";
      const char* field = clt ? "d_kolmogorov" : "variance";
      title = clt ? "Kolmogorov distance" : "Variance";
      xlabel = "t";
      ylabel = field;
      for (const auto& w : j["weights"]) {
        Series s;
        s.label = w.value("weight", "L");
        if (!w.contains("per_t")) continue;
        for (const auto& row : w["per_t"]) {
          const double x = row.value("t", 0.0);
          const double y = row.value(field, 0.0);
          if (x > 0.0 && y > 0.0) s.points.emplace_back(x, y);
        }
        if (!s.points.empty()) series.push_back(std::move(s));
      }
    } else {
      if (!j.contains("survival") || !j["survival"].is_array()) throw ConfigError("survival", "summary has no survival series");
      title = "Survival of the radius";
      xlabel = "r";
      ylabel = "P(R >= r)";
      log_x = false;
      for (const auto& block : j["survival"]) {
        Series s;
        s.label = "t = " + format_double(block.value("t", 0.0));
        const auto& rs = block["r"];
        const auto& ss = block["survival"];
        for (std::size_t k = 0; k < rs.size() && k < ss.size(); ++k) {
          const double y = ss[k].get<double>();
          if (y > 0.0) s.points.emplace_back(rs[k].get<double>(), y);
        }
        if (!s.points.empty()) series.push_back(std::move(s));
      }
    }
    if (series.empty()) throw ConfigError(kind == PlotKind::LogLog ? "weights" : "survival", "no plottable series");

    std::filesystem::path path;
    if (svg) {
      path = *svg;
    } else {
      std::filesystem::path dir = opts.out_dir ? *opts.out_dir : (opts.env_out_dir ? *opts.env_out_dir : ".");
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      path = dir / (kind == PlotKind::LogLog ? "loglog.svg" : "survival.svg");
    }
    write_file(path, render_svg(series, {title, xlabel, ylabel, log_x, true}));
    out << Json{{"schema", kSchema}, {"plot", path.string()}, {"series", series.size()}}.dump() << "\n";
    return static_cast<int>(kOk);
  });
}

}  // namespace pxg::cli

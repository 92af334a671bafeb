#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace pxg::cli {

namespace {

/// Typed access to one TOML table with key-path error messages. Keys that
/// are never requested are reported by finish().
class TableReader {
 public:
  TableReader(const toml::table& table, std::string path) : table_(table), path_(std::move(path)) {}

  std::string key(std::string_view k) const { return path_ + "." + std::string(k); }
  const std::string& path() const { return path_; }

  bool has(std::string_view k) {
    seen_.insert(std::string(k));
    return table_.contains(k);
  }

  double number(std::string_view k) {
    const toml::node* n = node(k, true);
    if (auto v = n->as_floating_point()) return v->get();
    if (auto v = n->as_integer()) return static_cast<double>(v->get());
    throw ConfigError(key(k), "expected a number");
  }
  double number(std::string_view k, double fallback) { return has(k) ? number(k) : fallback; }

  double positive(std::string_view k) {
    const double v = number(k);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key(k), "must be positive and finite");
    return v;
  }
  double positive(std::string_view k, double fallback) { return has(k) ? positive(k) : fallback; }

  std::int64_t integer(std::string_view k) {
    const toml::node* n = node(k, true);
    if (auto v = n->as_integer()) return v->get();
    throw ConfigError(key(k), "expected an integer");
  }
  std::size_t count(std::string_view k) {
    const std::int64_t v = integer(k);
    if (v < 0) throw ConfigError(key(k), "must be >= 0");
    return static_cast<std::size_t>(v);
  }
  std::size_t count(std::string_view k, std::size_t fallback) { return has(k) ? count(k) : fallback; }

  std::uint64_t seed(std::string_view k, std::uint64_t fallback) {
    if (!has(k)) return fallback;
    const std::int64_t v = integer(k);
    if (v < 0) throw ConfigError(key(k), "seed must be >= 0");
    return static_cast<std::uint64_t>(v);
  }

  bool boolean(std::string_view k, bool fallback) {
    if (!has(k)) return fallback;
    if (auto v = node(k, true)->as_boolean()) return v->get();
    throw ConfigError(key(k), "expected true or false");
  }

  std::string string(std::string_view k) {
    if (auto v = node(k, true)->as_string()) return v->get();
    throw ConfigError(key(k), "expected a string");
  }
  std::string string(std::string_view k, const std::string& fallback) { return has(k) ? string(k) : fallback; }

  std::vector<double> numbers(std::string_view k) {
    const toml::array* arr = node(k, true)->as_array();
    if (!arr) throw ConfigError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& el : *arr) {
      if (auto v = el.as_floating_point()) {
        out.push_back(v->get());
      } else if (auto i = el.as_integer()) {
        out.push_back(static_cast<double>(i->get()));
      } else {
        throw ConfigError(key(k), "expected an array of numbers");
      }
    }
    return out;
  }

  Point point(std::string_view k, std::size_t dim) {
    const auto v = numbers(k);
    if (v.size() != dim) throw ConfigError(key(k), "expected " + std::to_string(dim) + " coordinates");
    for (double c : v) {
      if (!std::isfinite(c)) throw ConfigError(key(k), "coordinates must be finite");
    }
    return Point::from_span(v);
  }

  /// Rejects keys that were never looked at.
  void finish() const {
    for (const auto& [k, v] : table_) {
      if (!seen_.contains(std::string(k.str()))) throw ConfigError(key(k.str()), "unknown key");
    }
  }

 private:
  const toml::node* node(std::string_view k, bool required) {
    seen_.insert(std::string(k));
    const toml::node* n = table_.get(k);
    if (!n && required) throw ConfigError(key(k), "missing required key");
    return n;
  }

  const toml::table& table_;
  std::string path_;
  std::set<std::string> seen_;
};

std::size_t read_dim(TableReader& r) {
  const std::int64_t d = r.integer("dim");
  if (d < 1 || d > static_cast<std::int64_t>(kMaxDim)) throw ConfigError(r.key("dim"), "must be in [1, 6]");
  return static_cast<std::size_t>(d);
}

IsotropicConstants read_constants(TableReader& r, std::size_t dim) {
  IsotropicConstants c;
  c.normalized_diameter = r.number("normalized_diameter");
  c.scaled_ball_delta = r.positive("delta");
  c.inscribed.center = r.point("inscribed_center", dim);
  c.inscribed.radius = r.positive("inscribed_radius");
  return c;
}

ForbiddenRegionFamily read_family(const toml::table& t, const std::filesystem::path& base_dir) {
  TableReader r(t, "family");
  const std::string kind = r.string("kind");
  const std::size_t dim = read_dim(r);
  std::optional<ForbiddenRegionFamily> fam;
  try {
    if (kind == "gabriel") {
      fam = ForbiddenRegionFamily::gabriel(dim);
    } else if (kind == "rng" || kind == "relative_neighborhood") {
      fam = ForbiddenRegionFamily::relative_neighborhood(dim);
    } else if (kind == "template") {
      const std::string shape = r.string("template");
      const Point axis = r.has("axis") ? r.point("axis", dim) : Point::unit(dim, 0);
      const bool has_constants = r.has("normalized_diameter") || r.has("delta") || r.has("inscribed_center") ||
                                 r.has("inscribed_radius");
      if (shape == "annulus_sector") {
        const double inner = r.number("inner_radius", 0.1);
        const double half_angle = r.positive("half_angle", 0.7853981633974483);
        if (!(inner >= 0.0 && inner < 0.5)) throw ConfigError(r.key("inner_radius"), "must be in [0, 0.5)");
        if (has_constants || r.has("axis")) {
          fam = ForbiddenRegionFamily::isotropic(make_annulus_sector_template(axis, inner, half_angle), axis,
                                                 read_constants(r, dim));
        } else {
          fam = ForbiddenRegionFamily::annulus_sector(dim, inner, half_angle);
        }
      } else if (shape == "ball") {
        const double radius = r.positive("radius", 0.5);
        fam = ForbiddenRegionFamily::isotropic(make_ball_template(dim, radius), axis, read_constants(r, dim));
      } else if (shape == "lens") {
        fam = ForbiddenRegionFamily::isotropic(make_lens_template(axis), axis, read_constants(r, dim));
      } else if (shape == "sdf") {
        std::filesystem::path p = r.string("path");
        if (p.is_relative()) p = base_dir / p;
        std::shared_ptr<const TemplateShape> sdf;
        try {
          sdf = load_sdf_template(p.string());
        } catch (const std::exception& e) {
          throw IoError("family.path: " + std::string(e.what()));
        }
        fam = ForbiddenRegionFamily::isotropic(std::move(sdf), axis, read_constants(r, dim));
      } else {
        throw ConfigError(r.key("template"), "expected one of ball, lens, annulus_sector, sdf");
      }
    } else {
      throw ConfigError(r.key("kind"), "expected one of gabriel, rng, template");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("family", e.what());
  }
  r.finish();
  return *fam;
}

Window read_window(const toml::table& t) {
  TableReader r(t, "window");
  const std::string shape = r.string("shape");
  const std::size_t dim = read_dim(r);
  Window w = Window::ball(Point(dim), 1.0);
  if (shape == "ball") {
    w = Window::ball(r.has("center") ? r.point("center", dim) : Point(dim), r.positive("radius"));
  } else if (shape == "cube") {
    w = Window::cube(r.has("corner") ? r.point("corner", dim) : Point(dim), r.positive("side"));
  } else {
    throw ConfigError(r.key("shape"), "expected ball or cube");
  }
  r.finish();
  return w;
}

std::vector<WeightSpec> read_weights(const toml::table& t) {
  TableReader r(t, "weight");
  const std::string kind = r.string("kind", "power");
  std::vector<WeightSpec> out;
  if (kind == "power") {
    if (r.has("alpha") == r.has("alphas")) throw ConfigError(r.key("alpha"), "give exactly one of alpha, alphas");
    const std::vector<double> alphas = r.has("alpha") ? std::vector<double>{r.number("alpha")} : r.numbers("alphas");
    if (alphas.empty()) throw ConfigError(r.key("alphas"), "must not be empty");
    for (double a : alphas) {
      if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError(r.key(r.has("alpha") ? "alpha" : "alphas"), "must be >= 0");
      out.push_back(WeightSpec::power(a));
    }
  } else if (kind == "custom") {
    const std::string name = r.string("name");
    try {
      out.push_back(WeightSpec::builtin(name));
    } catch (const std::invalid_argument&) {
      throw ConfigError(r.key("name"), "unknown custom weight '" + name + "' (expected log1p or saturating)");
    }
  } else {
    throw ConfigError(r.key("kind"), "expected power or custom");
  }
  r.finish();
  return out;
}

ProcessConfig read_process(const toml::table& t) {
  TableReader r(t, "process");
  ProcessConfig p;
  const std::string kind = r.string("kind");
  if (kind == "poisson") {
    p.kind = ProcessKind::Poisson;
  } else if (kind == "binomial") {
    p.kind = ProcessKind::Binomial;
  } else {
    throw ConfigError(r.key("kind"), "expected poisson or binomial");
  }
  const std::string param = r.string("parameterization", "fixed");
  if (param == "fixed") {
    p.parameterization = Parameterization::FixedWindow;
  } else if (param == "growing") {
    p.parameterization = Parameterization::GrowingWindow;
  } else {
    throw ConfigError(r.key("parameterization"), "expected fixed or growing");
  }
  if (r.has("t")) {
    p.t = r.number("t");
    if (!(p.t >= 0.0) || !std::isfinite(p.t)) throw ConfigError(r.key("t"), "must be >= 0 and finite");
  }
  p.seed = r.seed("seed", 0);
  r.finish();
  return p;
}

ExperimentConfig read_experiment(const toml::table& t) {
  TableReader r(t, "experiment");
  ExperimentConfig e;
  const std::string kind = r.string("kind");
  if (kind == "variance") {
    e.kind = ExperimentKind::Variance;
  } else if (kind == "clt") {
    e.kind = ExperimentKind::Clt;
  } else if (kind == "tails") {
    e.kind = ExperimentKind::Tails;
  } else if (kind == "stabilize") {
    e.kind = ExperimentKind::Stabilize;
  } else {
    throw ConfigError(r.key("kind"), "expected variance, clt, tails or stabilize");
  }
  e.seed = r.seed("seed", 0);
  e.threads = r.count("threads", 1);
  if (e.kind == ExperimentKind::Stabilize) {
    e.trials = r.count("trials", e.trials);
    e.margin = r.positive("margin", e.margin);
    e.n_min = r.count("n_min", e.n_min);
    e.n_max = r.count("n_max", e.n_max);
    e.extra_points = r.count("extra_points", e.extra_points);
    e.per_axis = r.count("per_axis", e.per_axis);
    if (e.trials == 0) throw ConfigError(r.key("trials"), "must be >= 1");
    if (e.n_min > e.n_max) throw ConfigError(r.key("n_min"), "must not exceed n_max");
  } else {
    e.t_values = r.numbers("t_values");
    e.replications = r.count("replications");
    for (std::size_t i = 0; i < e.t_values.size(); ++i) {
      if (!(e.t_values[i] > 0.0) || !std::isfinite(e.t_values[i])) {
        throw ConfigError(r.key("t_values"), "values must be positive and finite");
      }
      if (i > 0 && !(e.t_values[i] > e.t_values[i - 1])) {
        throw ConfigError(r.key("t_values"), "values must be strictly increasing");
      }
    }
    if (e.t_values.empty()) throw ConfigError(r.key("t_values"), "must not be empty");
  }
  if (e.kind == ExperimentKind::Tails) {
    e.per_axis = r.count("per_axis", e.per_axis);
    e.epsilon = r.number("epsilon", 0.0);
    e.delta = r.number("delta", 0.0);
    if (r.has("r_grid")) e.r_grid = r.numbers("r_grid");
    if (e.replications < 100) throw ConfigError(r.key("replications"), "tails needs at least 100 replications");
    if (!(e.epsilon >= 0.0 && e.epsilon < 0.5)) throw ConfigError(r.key("epsilon"), "must be in [0, 0.5)");
  }
  if (e.kind == ExperimentKind::Variance || e.kind == ExperimentKind::Clt) {
    e.max_points = r.count("max_points", 0);
    e.record_timing = r.boolean("record_timing", false);
    if (e.replications < 2) throw ConfigError(r.key("replications"), "must be >= 2");
  }
  if (e.per_axis < 2) throw ConfigError(r.key("per_axis"), "must be >= 2");
  r.finish();
  return e;
}

OutputConfig read_output(const toml::table& t) {
  TableReader r(t, "output");
  OutputConfig o;
  if (r.has("dir")) o.dir = r.string("dir");
  o.points = r.string("points", o.points);
  o.edges = r.string("edges", o.edges);
  o.replications = r.string("replications", o.replications);
  o.survival = r.string("survival", o.survival);
  o.summary = r.string("summary", o.summary);
  r.finish();
  return o;
}

const toml::table& sub_table(const toml::table& root, std::string_view name) {
  const toml::table* t = root.get_as<toml::table>(name);
  if (!t) throw ConfigError(std::string(name), "expected a table");
  return *t;
}

RunConfig parse_impl(const std::string& text, const std::string& source, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError("config", msg.str());
  }
  static const std::set<std::string> kTables{"family", "window", "weight", "process", "experiment", "output"};
  for (const auto& [k, v] : root) {
    if (!kTables.contains(std::string(k.str()))) throw ConfigError(std::string(k.str()), "unknown table");
  }
  RunConfig cfg;
  if (root.contains("family")) cfg.family = read_family(sub_table(root, "family"), base_dir);
  if (root.contains("window")) cfg.window = read_window(sub_table(root, "window"));
  if (root.contains("weight")) cfg.weights = read_weights(sub_table(root, "weight"));
  if (root.contains("process")) cfg.process = read_process(sub_table(root, "process"));
  if (root.contains("experiment")) cfg.experiment = read_experiment(sub_table(root, "experiment"));
  if (root.contains("output")) cfg.output = read_output(sub_table(root, "output"));
  if (cfg.family && cfg.window && cfg.family->dim() != cfg.window->dim()) {
    throw ConfigError("window.dim", "differs from family.dim");
  }
  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  return parse_impl(text, source, std::filesystem::current_path());
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_impl(buf.str(), path.string(), path.parent_path());
}

const ForbiddenRegionFamily& require_family(const RunConfig& cfg) {
  if (!cfg.family) throw ConfigError("family", "missing table [family]");
  return *cfg.family;
}

const Window& require_window(const RunConfig& cfg) {
  if (!cfg.window) throw ConfigError("window", "missing table [window]");
  return *cfg.window;
}

const ProcessConfig& require_process(const RunConfig& cfg) {
  if (!cfg.process) throw ConfigError("process", "missing table [process]");
  return *cfg.process;
}

const ExperimentConfig& require_experiment(const RunConfig& cfg) {
  if (!cfg.experiment) throw ConfigError("experiment", "missing table [experiment]");
  return *cfg.experiment;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Variance:
      return "variance";
    case ExperimentKind::Clt:
      return "clt";
    case ExperimentKind::Tails:
      return "tails";
    case ExperimentKind::Stabilize:
      return "stabilize";
  }
  return "unknown";
}

}  // namespace pxg::cli

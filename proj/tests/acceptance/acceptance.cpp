// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "pxg/functional.hpp"
#include "pxg/graph.hpp"
#include "pxg/harness.hpp"
#include "pxg/random.hpp"
#include "pxg/regions.hpp"
#include "pxg/stabilize.hpp"
#include "pxg/stats.hpp"

namespace {

using namespace pxg;
using Clock = std::chrono::steady_clock;

struct Options {
  std::size_t threads = 0;
  std::uint64_t seed = 20240601;
  std::filesystem::path log_dir = ".";
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

bool rel_close(double a, double b, double rel = 1e-9) {
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

std::vector<ForbiddenRegionFamily> families_for(std::size_t d) {
  return {ForbiddenRegionFamily::gabriel(d), ForbiddenRegionFamily::relative_neighborhood(d),
          ForbiddenRegionFamily::annulus_sector(d)};
}

/// Point sets shared by criteria 1 and 2: 200 per dimension, n in [1, 128].
std::vector<std::vector<Point>> instances(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 eng(derive_seed({seed, 1, d}));
  std::vector<std::vector<Point>> out;
  for (int i = 0; i < 200; ++i) out.push_back(testing::uniform_points(eng, 1 + eng() % 128, d));
  return out;
}

Outcome oracle_equivalence(const Options& o) {
  const auto start = Clock::now();
  std::size_t checked = 0, mismatches = 0;
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto sets = instances(d, o.seed);
    for (const auto& f : families_for(d)) {
      for (const auto& pts : sets) {
        ++checked;
        if (build_accelerated(pts, f) != build_naive(pts, f)) ++mismatches;
      }
    }
  }
  const double secs = seconds_since(start);
  return {mismatches == 0 && secs <= 120.0,
          fmt("%zu instances, %zu mismatches, %.1f s (limit 120 s)", checked, mismatches, secs)};
}

Outcome structural_properties(const Options& o) {
  std::size_t subset_failures = 0, link_failures = 0, instances_seen = 0;
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto sets = instances(d, o.seed);
    const auto gab = ForbiddenRegionFamily::gabriel(d);
    const auto rng = ForbiddenRegionFamily::relative_neighborhood(d);
    std::mt19937_64 eng(derive_seed({o.seed, 2, d}));
    for (const auto& pts : sets) {
      ++instances_seen;
      const auto g = build_accelerated(pts, gab);
      for (const auto& e : build_accelerated(pts, rng).edges) subset_failures += !g.has_edge(e.i, e.j);
      for (const auto& f : families_for(d)) {
        const auto before = build_accelerated(pts, f);
        auto more = pts;
        more.push_back(testing::uniform_point(eng, d));
        const auto after = build_naive(more, f);
        for (const auto& e : after.edges) {
          if (e.j < pts.size() && !before.has_edge(e.i, e.j)) ++link_failures;
        }
      }
    }
  }
  std::size_t invariant_failures = 0;
  std::string first_message;
  for (std::size_t d = 1; d <= 3; ++d) {
    for (const auto& f : families_for(d)) {
      const auto rep = certify_constants(f, 10000, derive_seed({o.seed, 3, d}));
      const std::size_t bad = rep.symmetry_violations + rep.translation_violations + rep.scale_violations +
                              rep.endpoint_violations;
      invariant_failures += bad;
      if (bad && first_message.empty() && !rep.messages.empty()) first_message = rep.messages.front();
    }
  }
  return {subset_failures + link_failures + invariant_failures == 0,
          fmt("%zu instances; RNG not in Gabriel: %zu; old vertices newly linked: %zu; region invariant "
              "violations over 9 families x 10000 triples: %zu %s",
              instances_seen, subset_failures, link_failures, invariant_failures, first_message.c_str())};
}

Outcome difference_operators(const Options& o) {
  std::mt19937_64 eng(derive_seed({o.seed, 4}));
  const auto fams = families_for(2);
  std::size_t add_one_bad = 0, d2_bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto& f = fams[trial % 3];
    const auto pts = testing::uniform_points(eng, 5 + eng() % 100, 2);
    const Point x = testing::uniform_point(eng, 2);
    const auto w = WeightSpec::power(static_cast<double>(trial % 3));
    const auto g = build_accelerated(pts, f);
    const double fast = add_one_cost(InsertionProbe(pts, g, f), w, x);
    auto more = pts;
    more.push_back(x);
    const double full = eval_L(build_naive(more, f), more, w) - eval_L(build_naive(pts, f), pts, w);
    add_one_bad += !rel_close(fast, full);
  }
  for (int trial = 0; trial < 500; ++trial) {
    const auto& f = fams[trial % 3];
    const auto pts = testing::uniform_points(eng, 5 + eng() % 60, 2);
    const Point x = testing::uniform_point(eng, 2), y = testing::uniform_point(eng, 2);
    const auto w = WeightSpec::power(static_cast<double>(trial % 3));
    d2_bad += !rel_close(second_difference_iterated(pts, f, w, x, y), second_difference(pts, f, w, x, y));
  }
  std::map<int, std::size_t> bound_bad;
  std::string worst;
  double worst_ratio = 0.0;
  for (int alpha = 0; alpha <= 2; ++alpha) {
    const auto w = WeightSpec::power(alpha);
    bound_bad[alpha] = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const auto& f = fams[trial % 2];  // canonical families
      const auto pts = testing::uniform_points(eng, 5 + eng() % 100, 2);
      const Point x = testing::uniform_point(eng, 2);
      const auto r = derivative_bound_check(pts, build_accelerated(pts, f), f, w, x);
      if (!r.ok) {
        ++bound_bad[alpha];
        const double ratio = r.lhs / r.rhs;
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          worst = fmt("worst |D_x L|/bound %.4f (alpha %d, %s, n %zu)", ratio, alpha, f.name().c_str(), pts.size());
        }
      }
    }
  }
  const std::size_t bound_total = bound_bad[0] + bound_bad[1] + bound_bad[2];
  return {add_one_bad + d2_bad + bound_total == 0,
          fmt("add-one mismatches %zu/500; D2 mismatches %zu/500; derivative bound failures alpha0 %zu/500, "
              "alpha1 %zu/500, alpha2 %zu/500 %s",
              add_one_bad, d2_bad, bound_bad[0], bound_bad[1], bound_bad[2], worst.c_str())};
}

Outcome stabilization(const Options& o) {
  const Window window = Window::cube({0, 0}, 1.0);
  ContractOptions co;
  co.trials = 1000;
  co.margin = 1.1;
  co.n_min = 20;
  co.n_max = 100;
  co.threads = o.threads;
  bool pass = true;
  std::string detail;
  std::ofstream log(o.log_dir / "acceptance_contract.log");
  for (const auto& f : {ForbiddenRegionFamily::gabriel(2), ForbiddenRegionFamily::relative_neighborhood(2)}) {
    co.seed = derive_seed({o.seed, 5, static_cast<std::uint64_t>(f.kind())});
    const auto rep = check_stabilization_contract(f, window, WeightSpec::power(1.0), co);
    log << "# " << f.name() << ": " << rep.zero << "/" << rep.trials << " zero, " << rep.violations.size()
        << " violations\n";
    for (const auto& line : rep.log) log << line << "\n";
    const bool ok = rep.zero_fraction() >= 0.99 && rep.all_resolved();
    pass = pass && ok;
    detail += fmt("%s zero %zu/%zu, violations %zu resolved %s; ", f.name().c_str(), rep.zero, rep.trials,
                  rep.violations.size(), rep.all_resolved() ? "all" : "NOT all");
  }

  std::mt19937_64 eng(derive_seed({o.seed, 6}));
  const double h = default_resolution(window);
  std::size_t mono_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = trial % 2 ? ForbiddenRegionFamily::relative_neighborhood(2) : ForbiddenRegionFamily::gabriel(2);
    const auto mu = testing::uniform_points(eng, 20 + eng() % 81, 2);
    auto nu = mu;
    for (auto& p : testing::uniform_points(eng, 1 + eng() % 5, 2)) nu.push_back(p);
    const BaseSet u = BaseSet::point(testing::uniform_point(eng, 2, 0.25, 0.75));
    mono_ok += check_monotonicity(mu, nu, window, f, u, h).ok();
  }
  pass = pass && mono_ok == 200;
  detail += fmt("monotonicity %zu/200", mono_ok);
  return {pass, detail};
}

Outcome tail_decay(const Options& o) {
  const auto start = Clock::now();
  TailOptions t;
  t.t_values = {500};
  t.replications = 2000;
  t.seed = derive_seed({o.seed, 7});
  t.threads = o.threads;
  const auto res = tail_survival(ForbiddenRegionFamily::gabriel(2), Window::ball({0, 0}, 1.0), t);
  const auto& fit = res.fits.at(0);
  const double secs = seconds_since(start);
  return {!fit.flagged && std::fabs(fit.corr) >= 0.95 && fit.slope < 0.0 && secs <= 600.0,
          fmt("corr %.4f slope %.4f over %zu r values, %.1f s (limit 600 s)", fit.corr, fit.slope, fit.points_used,
              secs)};
}

Outcome variance_scaling(const Options& o) {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;
  for (const auto& f : {ForbiddenRegionFamily::gabriel(2), ForbiddenRegionFamily::relative_neighborhood(2)}) {
    for (ProcessKind proc : {ProcessKind::Poisson, ProcessKind::Binomial}) {
      ExperimentPlan p;
      p.family = f;
      p.weights = {WeightSpec::power(0.0), WeightSpec::power(1.0)};
      p.window = Window::ball({0, 0}, 1.0);
      p.process = proc;
      p.t_values = {125, 250, 500, 1000};
      p.replications = 2000;
      p.master_seed = derive_seed({o.seed, 8, static_cast<std::uint64_t>(f.kind()), static_cast<std::uint64_t>(proc)});
      p.threads = o.threads;
      const auto s = run_plan(p);
      const double e0 = s.weights[0].variance_exponent, e1 = s.weights[1].variance_exponent;
      const bool ok = s.weights[0].fits_valid && s.weights[1].fits_valid && std::fabs(e0 - 1.0) <= 0.15 &&
                      std::fabs(e1) <= 0.15;
      pass = pass && ok;
      detail += fmt("%s/%s a0 %.3f a1 %.3f; ", f.name().c_str(), std::string(to_string(proc)).c_str(), e0, e1);
    }
  }
  const double secs = seconds_since(start);
  pass = pass && secs <= 1800.0;
  return {pass, detail + fmt("%.1f s (limit 1800 s)", secs)};
}

Outcome clt_rate(const Options& o) {
  ExperimentPlan p;
  p.family = ForbiddenRegionFamily::gabriel(2);
  p.weights = {WeightSpec::power(0.0), WeightSpec::power(1.0)};
  p.window = Window::ball({0, 0}, 1.0);
  p.t_values = {64, 128, 256, 512};
  p.replications = 5000;
  p.master_seed = derive_seed({o.seed, 9});
  p.threads = o.threads;
  const auto s = run_plan(p);
  bool pass = true;
  std::string detail;
  for (const auto& w : s.weights) {
    const double slope = w.kolmogorov_fit.slope;
    const bool ok = w.fits_valid && w.kolmogorov_decreasing && slope >= -0.8 && slope <= -0.25;
    pass = pass && ok;
    detail += fmt("alpha %.0f d_K", w.alpha);
    for (const auto& t : w.per_t) detail += fmt(" %.4f", t.d_kolmogorov);
    detail += fmt(" slope %.3f%s; ", slope, w.kolmogorov_decreasing ? "" : " (not decreasing)");
  }
  return {pass, detail};
}

Outcome statistics_self_tests(const Options&) {
  std::vector<double> grid;
  for (int i = 1; i <= 1000; ++i) grid.push_back(normal_quantile((i - 0.5) / 1000.0));
  const double k0 = empirical_kolmogorov(std::vector<double>{0.0});
  const double kg = empirical_kolmogorov(grid);
  const double w0 = empirical_wasserstein1(std::vector<double>{0.0});
  double worst = 0.0;
  for (int i = 1; i < 10000; ++i) {
    const double p = i / 10000.0;
    worst = std::max(worst, std::fabs(normal_cdf(normal_quantile(p)) - p));
  }
  for (double p : {1e-12, 1e-8, 1e-4, 1.0 - 1e-4, 1.0 - 1e-8}) {
    worst = std::max(worst, std::fabs(normal_cdf(normal_quantile(p)) - p));
  }
  return {k0 == 0.5 && kg <= 0.0006 && std::fabs(w0 - 0.7979) <= 1e-3 && worst <= 1e-9,
          fmt("d_K({0}) %.17g; d_K(grid) %.6f; W1({0}) %.6f; round trip error %.2e", k0, kg, w0, worst)};
}

Outcome determinism(const Options& o) {
  std::vector<ExperimentPlan> plans(2);
  plans[0].family = ForbiddenRegionFamily::gabriel(2);
  plans[0].weights = {WeightSpec::power(0.0), WeightSpec::power(1.0)};
  plans[0].t_values = {50, 100, 200};
  plans[0].replications = 100;
  plans[0].master_seed = derive_seed({o.seed, 10});
  plans[1].family = ForbiddenRegionFamily::relative_neighborhood(2);
  plans[1].weights = {WeightSpec::power(1.0)};
  plans[1].process = ProcessKind::Binomial;
  plans[1].parameterization = Parameterization::GrowingWindow;
  plans[1].t_values = {30, 60};
  plans[1].replications = 100;
  plans[1].master_seed = derive_seed({o.seed, 11});
  std::size_t identical = 0;
  for (auto& p : plans) {
    std::string csv[2];
    const std::size_t widths[2] = {1, 8};
    for (int k = 0; k < 2; ++k) {
      p.threads = widths[k];
      std::ostringstream out;
      write_replications_csv(out, run_plan(p), p.weights);
      csv[k] = out.str();
    }
    identical += csv[0] == csv[1] && !csv[0].empty();
  }
  return {identical == plans.size(), fmt("%zu/%zu plans byte-identical across 1 and 8 threads", identical, plans.size())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pxg acceptance run"};
  Options o;
  std::vector<int> only;
  app.add_option("--threads", o.threads, "worker threads, 0 = hardware");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--log-dir", o.log_dir, "where the stabilization log is written");
  app.add_option("--only", only, "criteria to run")->delimiter(',')->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome(const Options&)>> criteria{
      oracle_equivalence, structural_properties, difference_operators, stabilization, tail_decay,
      variance_scaling,   clt_rate,              statistics_self_tests, determinism};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = Clock::now();
    Outcome r;
    try {
      r = criteria[i](o);
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", id, r.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
    failures += !r.pass;
  }
  return failures ? 1 : 0;
}

// SPDX-License-Identifier: Apache-2.0
#include "reclab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "reclab/dimension.hpp"
#include "reclab/error.hpp"
#include "reclab/parallel.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/rng.hpp"
#include "reclab/subshift.hpp"

namespace reclab {
namespace {

template <typename T>
T param(const ExperimentConfig& cfg, const char* key, T fallback) {
  return cfg.params.contains(key) ? cfg.params[key].get<T>() : fallback;
}

std::vector<double> param_numbers(const ExperimentConfig& cfg, const char* key,
                                  std::vector<double> fallback) {
  if (!cfg.params.contains(key)) return fallback;
  const Json& j = cfg.params[key];
  if (j.is_number()) return {j.get<double>()};
  return j.get<std::vector<double>>();
}

Target param_box(const ExperimentConfig& cfg, const char* key) {
  const Json& j = cfg.params[key];
  auto as_vec = [](const Json& v) {
    return v.is_number() ? std::vector<double>{v.get<double>()} : v.get<std::vector<double>>();
  };
  return Target::rect(as_vec(j["center"]), as_vec(j["radii"]));
}

std::string index_list(const std::vector<unsigned>& ks) {
  std::string s;
  for (unsigned k : ks) s += (s.empty() ? "" : " ") + std::to_string(k + 1);
  return s;
}

std::vector<unsigned> one_based(const std::vector<unsigned>& ks) {
  std::vector<unsigned> out;
  for (unsigned k : ks) out.push_back(k + 1);
  return out;
}

ExperimentOutput dichotomy(const ExperimentConfig& cfg) {
  DichotomyOptions opt;
  opt.samples = param<std::size_t>(cfg, "samples", 10000);
  opt.horizon = param<std::size_t>(cfg, "horizon", 10000);
  opt.exact_max_order = param<unsigned>(cfg, "exact_max_order", 16);
  opt.seed = cfg.seed;
  opt.target = cfg.target;
  const auto density = build_density(cfg);
  const auto rep = run_dichotomy(*cfg.map, *cfg.schedule, density, opt);

  ExperimentOutput out;
  CsvTable series({"n", "exact_measure", "mc_estimate", "mc_stderr", "partial_sum"});
  for (const auto& r : rep.rows) {
    series.add_row({r.n, r.exact, r.mc_estimate, r.mc_stderr, r.partial_sum});
  }
  CsvTable windows({"begin", "end", "complete", "hit_fraction"});
  Json wj = Json::array();
  for (const auto& w : rep.windows) {
    windows.add_row({w.begin, w.end, w.complete ? "true" : "false", w.hit_fraction});
    wj.push_back({{"begin", w.begin}, {"end", w.end}, {"complete", w.complete},
                  {"hit_fraction", w.hit_fraction}});
  }
  CsvTable hits({"point", "hits"});
  for (std::size_t k = 0; k < rep.hits_per_point.size(); ++k) {
    hits.add_row({k, static_cast<std::size_t>(rep.hits_per_point[k])});
  }
  out.report = {{"classification", to_string(rep.classification.verdict)},
                {"classification_rule", rep.classification.rule},
                {"governing_partial_sum", rep.governing_partial_sum},
                {"mean_total_hits", rep.mean_total_hits},
                {"mean_total_hits_stderr", rep.mean_total_hits_stderr},
                {"half_window_fraction", rep.half_window_fraction},
                {"tail_windows", wj},
                {"samples", opt.samples},
                {"horizon", opt.horizon}};
  out.tables.push_back({"series", std::move(series)});
  out.tables.push_back({"windows", std::move(windows)});
  out.tables.push_back({"hits", std::move(hits)});
  return out;
}

ExperimentOutput mixing(const ExperimentConfig& cfg) {
  const auto F = param_box(cfg, "F");
  const auto G = param_box(cfg, "G");
  const auto rep = mixing_decay_estimate(*cfg.map, F, G, param<std::size_t>(cfg, "n_min", 1),
                                         param<std::size_t>(cfg, "n_max", 20),
                                         param<std::size_t>(cfg, "samples", 1000000), cfg.seed,
                                         build_density(cfg));
  ExperimentOutput out;
  CsvTable table({"n", "covariance", "correlation", "stderr", "above_floor"});
  std::size_t above = 0;
  for (const auto& r : rep.rows) {
    table.add_row({r.n, r.covariance, r.correlation, r.stderr_, r.above_floor ? "true" : "false"});
    above += r.above_floor;
  }
  out.report = {{"mu_F", rep.mu_F},
                {"mu_G", rep.mu_G},
                {"noise_sigmas", rep.noise_sigmas},
                {"rows_above_floor", above},
                {"fit",
                 {{"available", rep.fit.available},
                  {"c", rep.fit.c},
                  {"tau", rep.fit.tau},
                  {"points", rep.fit.points},
                  {"note", rep.fit.note}}}};
  out.tables.push_back({"correlations", std::move(table)});
  return out;
}

ExperimentOutput dimension(const ExperimentConfig& cfg) {
  const auto& betas = cfg.map->betas();
  std::vector<std::vector<double>> set;
  Json acc = Json::object();
  if (cfg.params.contains("t")) {
    set.push_back(param_numbers(cfg, "t", {}));
  } else {
    const unsigned stride = param<unsigned>(cfg, "stride", 1);
    const auto n_min = param<std::size_t>(cfg, "n_min", 1);
    const auto n_max = param<std::size_t>(cfg, "n_max", cfg.schedule->length().value_or(1000));
    set = accumulation_set(*cfg.schedule, 1, n_min, n_max);
    acc = {{"stride", stride},
           {"invariant_under_stride", accumulation_invariant(*cfg.schedule, stride, n_min, n_max)},
           {"stride_set", accumulation_set(*cfg.schedule, stride, n_min, n_max)}};
  }
  const auto dim = recurrence_dimension(betas, set);
  ExperimentOutput out;
  CsvTable table({"point", "i", "theta", "K1", "K2", "K3"});
  Json points = Json::array();
  for (std::size_t p = 0; p < set.size(); ++p) {
    Json per = Json::array();
    for (unsigned i = 0; i < betas.size(); ++i) {
      const auto th = theta(betas, set[p], i);
      table.add_row({p, i + 1, th.theta, index_list(th.K1), index_list(th.K2), index_list(th.K3)});
      per.push_back({{"i", i + 1}, {"theta", th.theta}, {"K1", one_based(th.K1)},
                     {"K2", one_based(th.K2)}, {"K3", one_based(th.K3)}});
    }
    points.push_back({{"t", set[p]}, {"min_theta", dim.min_theta[p]}, {"coordinates", per}});
  }
  out.report = {{"betas", betas},
                {"dimension", dim.dimension},
                {"argsup", dim.argsup},
                {"accumulation_set", points},
                {"index_base", 1}};
  if (!acc.empty()) out.report["accumulation"] = acc;
  if (cfg.params.contains("epsilon")) {
    const double eps = cfg.params["epsilon"].get<double>();
    const auto b = mtp_lower_bound(betas, std::vector<double>(betas.size(), 1.0), dim.argsup, eps);
    out.report["transference_bound"] = {{"epsilon", eps},
                                         {"bound", b.bound},
                                         {"theta", b.theta_limit},
                                         {"gap", b.gap},
                                         {"per_coordinate", b.per_coordinate}};
  }
  out.tables.push_back({"theta", std::move(table)});
  return out;
}

ExperimentOutput boxdim(const ExperimentConfig& cfg) {
  const auto& betas = cfg.map->betas();
  const auto d = static_cast<unsigned>(betas.size());
  const double s_min = param<double>(cfg, "s_min", 0.005);
  const double s_max = param<double>(cfg, "s_max", d + 0.5);
  const double s_step = param<double>(cfg, "s_step", 0.005);
  require(s_step > 0 && s_max > s_min, ErrorCode::Precondition, "invalid s grid");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double s = s_min + s_step * static_cast<double>(k);
    if (s > s_max + 1e-12) break;
    grid.push_back(s);
  }
  const auto n0 = param<std::size_t>(cfg, "n0", 10);
  const auto n1 = param<std::size_t>(cfg, "n1", 18);
  const auto ce = cover_critical_exponent(betas, *cfg.schedule, n0, n1, grid);
  ExperimentOutput out;
  CsvTable table({"s", "window_cost", "growth_rate"});
  for (std::size_t j = 0; j < grid.size(); ++j) {
    table.add_row({grid[j], ce.window_cost[j], ce.growth_rate[j]});
  }
  out.report = {{"s_star", ce.s_star},
                {"per_coordinate", ce.per_coordinate},
                {"argmin", ce.argmin + 1},
                {"window", {n0, n1}}};
  out.report["threshold_s"] = ce.threshold_s ? Json(*ce.threshold_s) : Json(nullptr);
  if (auto t = cfg.schedule->accumulation_exponents()) {
    out.report["formula_dimension"] = recurrence_dimension(betas, {*t}).dimension;
  }
  out.tables.push_back({"cost", std::move(table)});
  return out;
}

ExperimentOutput subshift(const ExperimentConfig& cfg) {
  const double eps = cfg.params["epsilon"].get<double>();
  const auto sub = build_full_subshift(*cfg.map, eps);
  const auto radii = param_numbers(cfg, "radii", {1e-4, 1e-3, 1e-2});
  const auto ah = ahlfors_check(sub, radii, param<std::size_t>(cfg, "samples", 200), cfg.seed);
  ExperimentOutput out;
  Json rows = Json::array();
  CsvTable ahlfors({"r", "min_ratio", "max_ratio"});
  for (const auto& r : ah.rows) {
    ahlfors.add_row({r.r, r.min_ratio, r.max_ratio});
    rows.push_back({{"r", r.r}, {"min_ratio", r.min_ratio}, {"max_ratio", r.max_ratio}});
  }
  out.report = {{"beta", sub.beta},
                {"epsilon", eps},
                {"m0", initial_block_length(sub.beta, eps)},
                {"m", sub.m},
                {"branch_count", sub.branch_count},
                {"delta", sub.delta},
                {"reference_bound", reference_subsystem_bound(sub.beta)},
                {"ahlfors", {{"a", ah.a}, {"b", ah.b}, {"ratio", ah.ratio}, {"pass", ah.pass}, {"rows", rows}}}};
  constexpr double export_limit = 1 << 20;
  if (sub.branch_count <= export_limit) {
    CsvTable branches({"index", "left", "right"});
    const auto list = sub.branches();
    for (std::size_t k = 0; k < list.size(); ++k) branches.add_row({k, list[k].left, list[k].right});
    out.tables.push_back({"branches", std::move(branches)});
  } else {
    out.report["branches_exported"] = false;
  }
  out.tables.push_back({"ahlfors", std::move(ahlfors)});
  return out;
}

ExperimentOutput volume(const ExperimentConfig& cfg) {
  const auto d = param<unsigned>(cfg, "d", 2);
  const double r = cfg.params["r"].get<double>();
  const auto samples = param<std::size_t>(cfg, "samples", 1000000);
  ExperimentOutput out;
  CsvTable table({"delta", "formula", "mc_estimate", "mc_stderr", "upper", "lower", "lower_applies"});
  Json rows = Json::array();
  for (double delta : param_numbers(cfg, "deltas", {})) {
    const double exact = hyperboloid_ball_volume(r, delta, d);
    const auto mc = hyperboloid_volume_mc(r, delta, d, samples, cfg.seed);
    const auto bounds = hyperboloid_volume_bounds(delta, d, r);
    const bool applies = bounds.lower_applies.value_or(false);
    table.add_row({delta, exact, mc.estimate, mc.stderr_, bounds.upper, bounds.lower,
                   applies ? "true" : "false"});
    rows.push_back({{"delta", delta},
                    {"formula", exact},
                    {"mc_estimate", mc.estimate},
                    {"mc_stderr", mc.stderr_},
                    {"within_3_sigma", std::fabs(mc.estimate - exact) <= 3 * mc.stderr_}});
  }
  out.report = {{"d", d}, {"r", r}, {"samples", samples}, {"rows", rows}};
  out.tables.push_back({"volume", std::move(table)});
  return out;
}

SandwichMode sandwich_mode(const std::string& name) {
  if (name == "scaled") return SandwichMode::Scaled;
  if (name == "hyperboloid") return SandwichMode::Hyperboloid;
  return SandwichMode::Rect;
}

ExperimentOutput sandwich(const ExperimentConfig& cfg) {
  const SandwichMode mode = sandwich_mode(param<std::string>(cfg, "mode", "rect"));
  const auto configs = param<std::size_t>(cfg, "configurations", 20);
  const auto probes = param<std::size_t>(cfg, "probes", 10000);
  const auto n_max = param<std::size_t>(cfg, "n_max", 4);
  const unsigned d = cfg.map->dimension();
  const auto density = build_density(cfg);
  ExperimentOutput out;
  CsvTable table({"configuration", "mode", "n", "probes", "inner", "event", "outer", "pass"});
  std::size_t failures = 0;
  Json witnesses = Json::array();
  for (std::size_t k = 0; k < configs; ++k) {
    PointStream rng(cfg.seed, StreamPurpose::Auxiliary, k);
    SandwichOptions opt;
    opt.mode = mode;
    opt.probes = probes;
    opt.seed = cfg.seed + k;
    opt.n = 1 + rng.next_below(std::max<std::size_t>(n_max, 1));
    for (unsigned i = 0; i < d; ++i) opt.x0.push_back(0.1 + 0.8 * rng.next_unit());
    if (mode == SandwichMode::Hyperboloid) {
      const double delta = std::pow(10.0, -3.0 + 2.0 * rng.next_unit());
      opt.r_n = {delta};
      for (unsigned i = 0; i < d; ++i) opt.rho.push_back(delta * (0.05 + 0.9 * rng.next_unit()));
    } else {
      for (unsigned i = 0; i < d; ++i) {
        const double r = 0.02 + 0.18 * rng.next_unit();
        opt.r_n.push_back(r);
        opt.rho.push_back(r * (0.05 + 0.9 * rng.next_unit()));
      }
    }
    const auto res = sandwich_check(*cfg.map, density, opt);
    failures += !res.pass;
    table.add_row({k, to_string(mode), opt.n, res.probes, res.inner, res.event, res.outer,
                   res.pass ? "true" : "false"});
    if (res.witness) witnesses.push_back({{"configuration", k}, {"point", *res.witness}, {"violated", res.violated}});
  }
  out.report = {{"mode", to_string(mode)},
                {"configurations", configs},
                {"probes", probes},
                {"counterexamples", failures},
                {"witnesses", witnesses}};
  out.tables.push_back({"sandwich", std::move(table)});
  return out;
}

ExperimentOutput scaled_measure(const ExperimentConfig& cfg) {
  const auto ball = param_box(cfg, "ball");
  const auto rep = scaled_set_measure_check(*cfg.map, build_density(cfg), *cfg.schedule, ball,
                                            param<std::size_t>(cfg, "n_min", 1),
                                            param<std::size_t>(cfg, "n_max", 8),
                                            param<std::size_t>(cfg, "samples", 100000), cfg.seed);
  ExperimentOutput out;
  CsvTable table({"n", "estimate", "stderr", "lower", "upper", "pass"});
  for (const auto& r : rep.rows) {
    table.add_row({r.n, r.estimate, r.stderr_, r.lower, r.upper, r.pass ? "true" : "false"});
  }
  out.report = {{"mu_B", rep.mu_B}, {"pass_rate", rep.pass_rate}};
  out.tables.push_back({"scaled", std::move(table)});
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  if (cfg.threads) set_default_threads(cfg.threads);
  const auto start = std::chrono::steady_clock::now();
  ExperimentOutput out;
  switch (cfg.kind) {
    case ExperimentKind::Dichotomy: out = dichotomy(cfg); break;
    case ExperimentKind::Mixing: out = mixing(cfg); break;
    case ExperimentKind::Dimension: out = dimension(cfg); break;
    case ExperimentKind::BoxDim: out = boxdim(cfg); break;
    case ExperimentKind::Subshift: out = subshift(cfg); break;
    case ExperimentKind::Volume: out = volume(cfg); break;
    case ExperimentKind::Sandwich: out = sandwich(cfg); break;
    case ExperimentKind::ScaledMeasure: out = scaled_measure(cfg); break;
  }
  if (cfg.density.value("kind", "") == "ulam" && cfg.map && cfg.map->dimension() == 1) {
    const auto density = build_density(cfg);
    CsvTable weights({"bin_left", "bin_right", "weight"});
    const double n = density.bins();
    for (unsigned k = 0; k < density.bins(); ++k) {
      weights.add_row({k / n, (k + 1) / n, density.weights()[k]});
    }
    out.tables.push_back({"density", std::move(weights)});
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  Json report = {{"experiment", to_string(cfg.kind)},
                 {"seed", cfg.seed},
                 {"config", cfg.source},
                 {"results", out.report},
                 {"runtime_seconds", elapsed.count()}};
  out.report = std::move(report);
  return out;
}

std::vector<std::string> write_outputs(const ExperimentOutput& output,
                                       const std::string& report_path) {
  namespace fs = std::filesystem;
  const fs::path path(report_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write " + report_path);
    out << output.report.dump(2) << "\n";
  }
  std::vector<std::string> written;
  for (const auto& t : output.tables) {
    fs::path csv = path.parent_path() / (path.stem().string() + "_" + t.name + ".csv");
    t.table.save(csv.string());
    written.push_back(csv.string());
  }
  return written;
}

}  // namespace reclab

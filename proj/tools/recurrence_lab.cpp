// SPDX-License-Identifier: Apache-2.0
// recurrence-lab: command-line front end for the reclab experiments.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reclab/config.hpp"
#include "reclab/dimension.hpp"
#include "reclab/error.hpp"
#include "reclab/experiments.hpp"
#include "reclab/parallel.hpp"
#include "reclab/subshift.hpp"

using namespace reclab;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--out", c.out, "report path; CSV tables are written beside it");
  cmd->add_option("--seed", c.seed, "override the config seed");
  cmd->add_option("--threads", c.threads, "worker threads (default: RECLAB_THREADS or hardware)");
}

int emit(const ExperimentOutput& output, const std::string& out) {
  if (out.empty()) {
    std::cout << output.report.dump(2) << "\n";
    return 0;
  }
  for (const auto& path : write_outputs(output, out)) std::cerr << "wrote " << path << "\n";
  std::cerr << "wrote " << out << "\n";
  return 0;
}

int run_config(const Common& c, std::optional<ExperimentKind> kind) {
  Json j = load_json_file(c.config);
  if (kind && j.is_object()) j["experiment"] = to_string(*kind);
  if (c.seed && j.is_object()) j["seed"] = *c.seed;
  ExperimentConfig cfg = parse_config(j);
  if (c.threads) cfg.threads = c.threads;
  set_default_threads(resolve_threads(cfg.threads));
  return emit(run_experiment(cfg), c.out);
}

int validate(const std::string& path) {
  const Json j = load_json_file(path);
  const auto violations = validate_config(j);
  std::cout << Json{{"valid", violations.empty()}, {"violations", violations}}.dump(2) << "\n";
  return violations.empty() ? 0 : kExitValidation;
}

std::string one_based(const std::vector<unsigned>& ks) {
  std::string s = "{";
  for (std::size_t k = 0; k < ks.size(); ++k) s += (k ? "," : "") + std::to_string(ks[k] + 1);
  return s + "}";
}

int dimension_direct(const std::vector<double>& betas, const std::vector<double>& t) {
  const auto dim = recurrence_dimension(betas, {t});
  for (unsigned i = 0; i < betas.size(); ++i) {
    const auto th = theta(betas, t, i);
    std::cout << "theta_" << i + 1 << " = " << format_real(th.theta) << "  K1=" << one_based(th.K1)
              << " K2=" << one_based(th.K2) << " K3=" << one_based(th.K3) << "\n";
  }
  std::cout << "dimension = " << format_real(dim.dimension) << "\n";
  return 0;
}

int subshift_direct(double beta, double epsilon, const std::string& csv, std::uint64_t seed) {
  const auto sub = build_full_subshift(ExpandingMap::beta(beta), epsilon);
  std::cout << "m0 = " << initial_block_length(beta, epsilon) << "\n"
            << "m = " << sub.m << "\n"
            << "branches = " << format_real(sub.branch_count) << "\n"
            << "delta = " << format_real(sub.delta) << "\n"
            << "reference_bound = " << format_real(reference_subsystem_bound(beta)) << "\n";
  const auto ah = ahlfors_check(sub, {1e-4, 1e-3, 1e-2}, 200, seed);
  std::cout << "ahlfors a = " << format_real(ah.a) << " b = " << format_real(ah.b)
            << " b/a = " << format_real(ah.ratio) << "\n";
  if (!csv.empty()) {
    CsvTable table({"index", "left", "right"});
    const auto list = sub.branches();
    for (std::size_t k = 0; k < list.size(); ++k) table.add_row({k, list[k].left, list[k].right});
    table.save(csv);
  }
  return 0;
}

void print_error(std::string_view code, const std::string& message) {
  std::cerr << Json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrence experiments for piecewise expanding maps"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "run the experiment named in the config");
  add_common(run, run_opts, true);

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "check a config and list every violation");
  val->add_option("--config", validate_path, "experiment config (JSON)")->required();

  struct Wrapper {
    ExperimentKind kind;
    const char* help;
    Common opts;
    CLI::App* cmd = nullptr;
  };
  std::vector<Wrapper> wrappers = {
      {ExperimentKind::Dichotomy, "zero-one dichotomy experiment", {}},
      {ExperimentKind::Mixing, "correlation decay estimate", {}},
      {ExperimentKind::BoxDim, "cover critical exponent and cost curve", {}},
      {ExperimentKind::Volume, "hyperboloid volume formula against Monte Carlo", {}},
  };
  for (auto& w : wrappers) {
    w.cmd = app.add_subcommand(to_string(w.kind), w.help);
    add_common(w.cmd, w.opts, true);
  }

  Common dim_opts;
  std::vector<double> betas, t;
  auto* dim = app.add_subcommand("dimension", "dimension formula from a config or --betas/--t");
  add_common(dim, dim_opts, false);
  dim->add_option("--betas", betas, "comma-separated slopes")->delimiter(',');
  dim->add_option("--t", t, "comma-separated accumulation exponents")->delimiter(',');

  Common sub_opts;
  double beta = 0.0, epsilon = 0.0;
  std::string branches_csv;
  auto* sub = app.add_subcommand("subshift", "full-cylinder subshift from a config or --beta/--epsilon");
  add_common(sub, sub_opts, false);
  sub->add_option("--beta", beta, "slope > 1");
  sub->add_option("--epsilon", epsilon, "target dimension deficit in (0,1)");
  sub->add_option("--csv", branches_csv, "export branch intervals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage_error", e.what());
    return kExitValidation;
  }

  try {
    if (*run) return run_config(run_opts, std::nullopt);
    if (*val) return validate(validate_path);
    for (const auto& w : wrappers) {
      if (*w.cmd) return run_config(w.opts, w.kind);
    }
    if (*dim) {
      if (!dim_opts.config.empty()) return run_config(dim_opts, ExperimentKind::Dimension);
      require(!betas.empty() && betas.size() == t.size(), ErrorCode::Validation,
              "give --config, or --betas and --t of equal length");
      return dimension_direct(betas, t);
    }
    if (*sub) {
      if (!sub_opts.config.empty()) return run_config(sub_opts, ExperimentKind::Subshift);
      require(beta != 0.0 && epsilon != 0.0, ErrorCode::Validation,
              "give --config, or --beta and --epsilon");
      set_default_threads(resolve_threads(sub_opts.threads));
      return subshift_direct(beta, epsilon, branches_csv, sub_opts.seed.value_or(0));
    }
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return e.code() == ErrorCode::Validation ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    print_error("internal_error", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}

// SPDX-License-Identifier: Apache-2.0
// Acceptance runner: `acceptance <criterion>` prints one PASS/FAIL line per
// criterion and exits non-zero on FAIL. `acceptance all` runs 1..12.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "reclab/dimension.hpp"
#include "reclab/geometry.hpp"
#include "reclab/maps.hpp"
#include "reclab/measures.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/rng.hpp"
#include "reclab/schedule.hpp"
#include "reclab/subshift.hpp"

using namespace reclab;
namespace fs = std::filesystem;

namespace {

const double kPhi = std::numbers::phi;
const double kLn2 = std::numbers::ln2;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome c1() {
  Outcome o;
  const auto map = ExpandingMap::beta(2.0);
  double worst = 0;
  unsigned first_bad = 0;
  for (unsigned n = 1; n <= 20; ++n) {
    const double dev = std::fabs(exact_En_measure(map, n, {0.1}) - 0.2);
    worst = std::max(worst, dev);
    if (dev > 1e-12 && !first_bad) first_bad = n;
  }
  o.pass = first_bad == 0;
  o.detail = fmt("max |m_n - 0.2| = %.3g", worst);
  if (first_bad) o.detail += fmt(", first deviation at n=%.0f (m_4 = %.12g)", first_bad,
                                 exact_En_measure(map, 4, {0.1}));
  return o;
}

Outcome c2() {
  Outcome o;
  double worst = 0;
  for (double beta : {2.0, kPhi, 2.5, -2.0}) {
    DichotomyOptions opt;
    opt.samples = 1000000;
    opt.horizon = 12;
    opt.seed = 20;
    opt.allow_small = true;
    const auto map = ExpandingMap::beta(beta);
    const auto rep = run_dichotomy(map, RadiiSchedule::exponential({0.05}, {0.0}),
                                   DensityModel::lebesgue(1), opt);
    for (unsigned n : {3u, 8u, 12u}) {
      const auto& row = rep.rows.at(n - 1);
      const double exact = exact_En_measure(map, n, {0.05});
      const double z = std::fabs(row.mc_estimate - exact) / row.mc_stderr;
      worst = std::max(worst, z);
      if (row.n != n || !(z <= 3.0)) {
        o.pass = false;
        o.detail += fmt("beta=%g n=%.0f mc=%.6f exact=%.6f; ", beta, n, row.mc_estimate, exact);
      }
    }
  }
  o.detail += fmt("max |MC-exact|/stderr = %.2f over 12 cases", worst);
  return o;
}

Outcome c3() {
  Outcome o;
  const double formula = hyperboloid_ball_volume(0.5, 0.0625, 2);
  const auto big = hyperboloid_volume_mc(0.5, 0.0625, 2, 10000000, 31);
  const double rel = std::fabs(formula - big.estimate) / big.estimate;
  o.pass = std::fabs(formula - 0.59657) < 5e-6 && rel <= 0.01;
  o.detail = fmt("formula %.6f, MC %.6f (rel %.2e)", formula, big.estimate, rel);
  PointStream rng(32, StreamPurpose::Auxiliary, 0);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const unsigned d = 1 + static_cast<unsigned>(rng.next_below(3));
    const double r = 0.1 + 0.9 * rng.next_unit();
    const double delta = std::pow(r, d) * (0.01 + 0.98 * rng.next_unit());
    const double f = hyperboloid_ball_volume(r, delta, d);
    const auto mc = hyperboloid_volume_mc(r, delta, d, 1000000, 100 + k);
    const double z = std::fabs(f - mc.estimate) / mc.stderr_;
    worst = std::max(worst, z);
    if (!(z <= 3.0)) {
      o.pass = false;
      o.detail += fmt("; tuple d=%.0f r=%g delta=%g off by %.2f sigma", d, r, delta, z);
    }
  }
  o.detail += fmt("; 20 random tuples, max %.2f sigma", worst);
  return o;
}

Outcome c4() {
  Outcome o;
  const auto map = ExpandingMap::beta(2.0);
  DichotomyOptions opt;
  opt.samples = 10000;
  opt.horizon = 10000;
  opt.seed = 40;
  const auto div = run_dichotomy(map, RadiiSchedule::power_law({0.1}, {1.0}),
                                 DensityModel::lebesgue(1), opt);
  double min_fraction = 1;
  std::size_t checked = 0;
  for (const auto& w : div.windows) {
    if (!w.complete || w.begin < 64) continue;
    ++checked;
    min_fraction = std::min(min_fraction, w.hit_fraction);
  }
  const bool div_ok = checked > 0 && min_fraction >= 0.05;
  o.detail = fmt("divergent: %.0f complete windows, min hit fraction %.4f", checked, min_fraction);

  opt.seed = 41;
  const auto conv = run_dichotomy(map, RadiiSchedule::power_law({1.0}, {1.5}),
                                  DensityModel::lebesgue(1), opt);
  double window_sum = 0;
  for (std::size_t n = opt.horizon / 2; n < opt.horizon; ++n) window_sum += 2.0 * std::pow(double(n), -1.5);
  const double markov = 2.0 * window_sum;
  // Infinite tail by the integral comparison, accurate to O(N^-2.5).
  const double tail_inf = 4.0 / std::sqrt(double(opt.horizon / 2) - 0.5);
  const double frac = conv.half_window_fraction;
  const bool conv_ok = frac <= 0.023 && frac <= 2.0 * tail_inf;
  o.detail += fmt("; convergent: half-window fraction %.4f (stated bound 0.023, 2*sum_{n>=N/2} = %.4f, "
                  "window sum x2 = %.4f)",
                  frac, 2.0 * tail_inf, markov);
  o.pass = div_ok && conv_ok;
  return o;
}

Outcome c5() {
  Outcome o;
  double worst = 0;
  auto check = [&](double got, double want) { worst = std::max(worst, std::fabs(got - want)); };
  for (unsigned d = 1; d <= 4; ++d) {
    std::vector<double> betas(d), t(d, 0.0);
    for (unsigned i = 0; i < d; ++i) betas[i] = 2.0 + i;
    for (unsigned i = 0; i < d; ++i) check(theta(betas, t, i).theta, d);
  }
  check(theta({2.0}, {kLn2}, 0).theta, 0.5);
  const double m = std::min(theta({2.0, 4.0}, {kLn2, kLn2}, 0).theta, theta({2.0, 4.0}, {kLn2, kLn2}, 1).theta);
  check(m, 4.0 / 3.0);
  const double hand = worst;

  PointStream rng(50, StreamPurpose::Auxiliary, 0);
  double consistency = 0;
  for (int k = 0; k < 100; ++k) {
    const unsigned d = 1 + static_cast<unsigned>(rng.next_below(4));
    std::vector<double> betas(d), t(d), ones(d, 1.0), u(d), v(d);
    for (unsigned i = 0; i < d; ++i) {
      betas[i] = (rng.next_below(2) ? 1.0 : -1.0) * (1.05 + 6.0 * rng.next_unit());
      t[i] = 3.0 * rng.next_unit();
      u[i] = std::log(std::fabs(betas[i]));
      v[i] = u[i] + t[i];
    }
    for (unsigned i = 0; i < d; ++i) {
      consistency = std::max(consistency, std::fabs(mtp_exponent(ones, u, v, i).theta - theta(betas, t, i).theta));
    }
  }
  o.pass = hand <= 1e-12 && consistency <= 1e-12;
  o.detail = fmt("hand cases max error %.3g; mtp/theta identity max error %.3g over 100 inputs", hand, consistency);
  return o;
}

Outcome c6() {
  Outcome o;
  const auto grid = default_s_grid(1);
  const auto a = cover_critical_exponent({2.0}, RadiiSchedule::exponential({1.0}, {kLn2}), 10, 18, grid);
  const auto b = cover_critical_exponent({2.0}, RadiiSchedule::power_law({1.0}, {2.0}), 10, 18, grid);
  o.pass = std::fabs(a.s_star - 0.5) <= 0.05 && std::fabs(b.s_star - 1.0) <= 0.1;
  o.detail = fmt("psi=2^-n: s*=%.4f; psi=n^-2: s*=%.4f", a.s_star, b.s_star);
  return o;
}

Outcome c7() {
  Outcome o;
  const auto map = ExpandingMap::beta(kPhi);
  const unsigned bins = 10000;
  const auto ulam = DensityModel::ulam(map, bins);
  const auto parry = DensityModel::parry(kPhi);
  double sup = 0;
  for (unsigned k = 0; k < bins; ++k) {
    const double a = double(k) / bins, b = double(k + 1) / bins;
    const double parry_avg = (parry.cdf(b) - parry.cdf(a)) * bins;
    sup = std::max(sup, std::fabs(parry_avg - ulam.weights()[k] * bins));
  }
  PointStream rng(70, StreamPurpose::Auxiliary, 0);
  double resid = 0;
  for (int k = 0; k < 50; ++k) {
    double a = rng.next_unit(), b = rng.next_unit();
    if (a > b) std::swap(a, b);
    resid = std::max(resid, invariance_residual(map, ulam, {a, b}));
  }
  o.pass = sup < 0.01 && resid < 0.02;
  o.detail = fmt("sup |Parry - Ulam| over bin averages %.3g; max invariance residual %.3g", sup, resid);
  return o;
}

Outcome c8() {
  Outcome o;
  const auto F = Target::rect({0.25}, {0.25});
  const auto dyadic = mixing_decay_estimate(ExpandingMap::beta(2.0), F, F, 1, 20, 1000000, 80,
                                            DensityModel::lebesgue(1));
  std::size_t above = 0;
  for (const auto& r : dyadic.rows) above += r.above_floor;
  const auto golden = ExpandingMap::beta(kPhi);
  const auto parry = DensityModel::parry(kPhi);
  const auto g1 = mixing_decay_estimate(golden, F, F, 1, 20, 1000000, 81, parry);
  const auto g2 = mixing_decay_estimate(golden, F, F, 1, 20, 1000000, 82, parry);
  const bool fits = g1.fit.available && g2.fit.available && g1.fit.tau > 0 && g2.fit.tau > 0;
  const double rel = fits ? std::fabs(g1.fit.tau - g2.fit.tau) / std::max(g1.fit.tau, g2.fit.tau) : 1.0;
  o.pass = above == 0 && dyadic.rows.size() == 20 && fits && rel <= 0.5;
  o.detail = fmt("beta=2: %.0f of 20 above floor; beta=phi: tau %.4f / %.4f (rel diff %.3f)", above,
                 g1.fit.tau, g2.fit.tau, rel);
  return o;
}

Outcome c9() {
  Outcome o;
  const auto three = build_full_subshift(ExpandingMap::beta(3.0), 0.2);
  const unsigned m0 = initial_block_length(3.0, 0.2);
  const auto golden = build_full_subshift(ExpandingMap::beta(kPhi), 0.3);
  o.pass = m0 == 15 && three.delta == 1.0 && golden.delta >= 0.7;
  o.detail = fmt("beta=3: m0=%.0f delta=%.6f; beta=phi: delta=%.4f", m0, three.delta, golden.delta);
  const std::vector<double> radii = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
  for (const auto& [beta, eps] : std::vector<std::pair<double, double>>{{2.0, 0.5}, {3.0, 0.2}, {5.0, 0.3}}) {
    const auto sub = beta == 3.0 ? three : build_full_subshift(ExpandingMap::beta(beta), eps);
    const auto ah = ahlfors_check(sub, radii, 2000, 90 + static_cast<std::uint64_t>(beta));
    o.pass = o.pass && ah.a > 0 && ah.ratio <= 4.0;
    o.detail += fmt("; ahlfors beta=%.0f b/a=%.3f", beta, ah.ratio);
  }
  return o;
}

Outcome c10() {
  Outcome o;
  PointStream rng(100, StreamPurpose::Auxiliary, 0);
  std::size_t failures = 0, runs = 0;
  for (int k = 0; k < 20; ++k) {
    const unsigned d = 1 + static_cast<unsigned>(rng.next_below(2));
    std::vector<double> betas;
    for (unsigned i = 0; i < d; ++i) {
      const double choices[] = {2.0, kPhi, 2.5, -2.0, 3.0};
      betas.push_back(choices[rng.next_below(5)]);
    }
    const auto map = d == 1 ? ExpandingMap::beta(betas[0]) : ExpandingMap::diagonal(betas);
    for (SandwichMode mode : {SandwichMode::Rect, SandwichMode::Scaled, SandwichMode::Hyperboloid}) {
      SandwichOptions opt;
      opt.mode = mode;
      opt.probes = 10000;
      opt.seed = 1000 + k;
      opt.n = 1 + rng.next_below(4);
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
      const auto res = sandwich_check(map, DensityModel::lebesgue(d), opt);
      ++runs;
      if (!res.pass) {
        ++failures;
        o.detail += "violated " + res.violated + " in configuration " + std::to_string(k) + "; ";
      }
    }
  }
  o.pass = failures == 0;
  o.detail += fmt("%.0f counterexamples in %.0f runs of 10^4 probes", failures, runs);
  return o;
}

Outcome c11() {
  Outcome o;
  const unsigned d = 2;
  PointStream rng(110, StreamPurpose::Auxiliary, 0);
  double worst = 0;
  const double eps = 1e-3;
  for (int k = 0; k < 20; ++k) {
    const unsigned n = 1 + static_cast<unsigned>(rng.next_below(4));
    const double side = std::ldexp(1.0, -static_cast<int>(n));
    const double scale = std::ldexp(1.0, static_cast<int>(n));
    Point jlo(d), r1lo(d), r1hi(d), r2lo(d), r2hi(d);
    for (unsigned i = 0; i < d; ++i) {
      jlo[i] = side * double(rng.next_below(std::uint64_t{1} << n));
      double a = rng.next_unit(), b = rng.next_unit();
      r1lo[i] = std::min(a, b);
      r1hi[i] = std::max(a, b);
      a = rng.next_unit();
      b = rng.next_unit();
      r2lo[i] = std::min(a, b);
      r2hi[i] = std::max(a, b);
    }
    // J_n ∩ R1 ∩ T^-n R2 for T = diag(2, 2).
    const Indicator in_set = [=](std::span<const double> y) {
      for (unsigned i = 0; i < d; ++i) {
        if (y[i] < jlo[i] || y[i] >= jlo[i] + side) return false;
        if (y[i] < r1lo[i] || y[i] >= r1hi[i]) return false;
        const double img = (y[i] - jlo[i]) * scale;
        if (img < r2lo[i] || img >= r2hi[i]) return false;
      }
      return true;
    };
    Box box;
    for (unsigned i = 0; i < d; ++i) {
      box.lo.push_back(jlo[i] - 2 * eps);
      box.hi.push_back(jlo[i] + side + 2 * eps);
    }
    const auto est = minkowski_content_estimate(in_set, box, {eps}, 200000, 1100 + k).front();
    worst = std::max(worst, est.estimate + 3 * est.stderr_);
  }
  const double bound = 4.0 * d + 8.0 / (1.0 - 1.0 / 2.0);
  o.pass = worst < bound;
  o.detail = fmt("max content (+3 stderr) %.4f against bound %.0f over 20 pairs", worst, bound);
  return o;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("RECLAB_CLI");
  if (!cli) return -1;
  const int raw = std::system((std::string(cli) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome c12() {
  Outcome o;
  if (!std::getenv("RECLAB_CLI")) return {false, "RECLAB_CLI not set"};
  const fs::path dir = fs::current_path() / "acceptance_determinism";
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"dichotomy", R"({"experiment": "dichotomy", "seed": 12,
        "map": {"kind": "beta", "beta": 2.5},
        "schedule": {"kind": "power_law", "c": [0.1], "a": [1.0]},
        "params": {"samples": 5000, "horizon": 1000}})"},
      {"mixing", R"({"experiment": "mixing", "seed": 13,
        "map": {"kind": "beta", "beta": 1.618033988749895}, "density": {"kind": "parry"},
        "params": {"F": {"center": [0.25], "radii": [0.25]}, "G": {"center": [0.25], "radii": [0.25]},
                   "n_min": 1, "n_max": 12, "samples": 50000}})"},
      {"volume", R"({"experiment": "volume", "seed": 14,
        "params": {"d": 3, "r": 0.7, "deltas": [0.01, 0.05], "samples": 200000}})"},
      {"sandwich", R"({"experiment": "sandwich", "seed": 15,
        "map": {"kind": "diagonal", "betas": [2.0, 3.0]},
        "params": {"mode": "rect", "configurations": 5, "probes": 2000}})"},
  };
  std::size_t tables = 0;
  for (const auto& [name, body] : configs) {
    const fs::path cfg = dir / (name + ".json");
    std::ofstream(cfg) << body;
    for (int threads : {1, 4}) {
      const fs::path out = dir / (name + "_t" + std::to_string(threads) + ".json");
      const int rc = run_cli("run --config " + cfg.string() + " --threads " + std::to_string(threads) +
                             " --out " + out.string());
      if (rc != 0) {
        o.pass = false;
        o.detail += name + " exited " + std::to_string(rc) + "; ";
      }
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string file = entry.path().filename().string();
      const std::string prefix = name + "_t1_";
      if (file.rfind(prefix, 0) != 0 || entry.path().extension() != ".csv") continue;
      const fs::path other = dir / (name + "_t4_" + file.substr(prefix.size()));
      const auto a = slurp(entry.path());
      ++tables;
      if (a.empty() || a != slurp(other)) {
        o.pass = false;
        o.detail += file + " differs across thread counts; ";
      }
    }
  }
  o.pass = o.pass && tables >= configs.size();
  o.detail += fmt("%.0f CSV tables compared across 1 and 4 threads", tables);
  return o;
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"exact recurrence measure identity", 5, c1},
      {"Monte Carlo vs exact recurrence measure", 60, c2},
      {"hyperboloid volume", 120, c3},
      {"dichotomy contrast", 600, c4},
      {"dimension formula", 1, c5},
      {"cover critical exponent", 30, c6},
      {"Parry-Ulam agreement", 60, c7},
      {"mixing estimator", 120, c8},
      {"full subshift construction", 60, c9},
      {"sandwich inclusions", 60, c10},
      {"Minkowski boundary bound", 120, c11},
      {"determinism across thread counts", 600, c12},
  };
  return list;
}

bool run_one(std::size_t k) {
  const auto& c = criteria().at(k - 1);
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < c.budget_seconds;
  const bool pass = o.pass && in_time;
  std::printf("%s criterion %zu (%s): %s [%.2fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", k, c.name,
              o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  bool ok = true;
  if (which == "all") {
    for (std::size_t k = 1; k <= criteria().size(); ++k) ok = run_one(k) && ok;
  } else {
    const long k = std::strtol(which.c_str(), nullptr, 10);
    if (k < 1 || k > static_cast<long>(criteria().size())) {
      std::fprintf(stderr, "usage: acceptance [1-%zu|all]\n", criteria().size());
      return 2;
    }
    ok = run_one(static_cast<std::size_t>(k));
  }
  return ok ? 0 : 1;
}

// SPDX-License-Identifier: Apache-2.0
#include "reclab/dimension.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "reclab/error.hpp"
#include "reclab/parallel.hpp"
#include "reclab/recurrence.hpp"

namespace reclab {
namespace {

void check_theta_inputs(const std::vector<double>& betas, const std::vector<double>& t, unsigned i) {
  require(!betas.empty() && betas.size() == t.size(), ErrorCode::Domain,
          "betas and t must be non-empty and of equal length");
  require(i < betas.size(), ErrorCode::Range, "coordinate index out of range");
  for (double b : betas) require(std::isfinite(b) && std::fabs(b) > 1, ErrorCode::Domain,
                                 "expansion requires |beta|>1");
  for (double v : t) require(std::isfinite(v) && v >= 0, ErrorCode::Domain,
                             "accumulation exponents must be finite and >= 0");
}

// log sum_j count_j exp(s * loglen_j), stable.
double log_cost(const std::vector<std::pair<double, double>>& groups, double s) {
  double peak = -INFINITY;
  for (const auto& [loglen, count] : groups) peak = std::max(peak, s * loglen + std::log(count));
  double acc = 0.0;
  for (const auto& [loglen, count] : groups) acc += std::exp(s * loglen + std::log(count) - peak);
  return peak + std::log(acc);
}

// Coefficient of n in the least-squares fit y ~ a + g n + c log n.
double growth_coefficient(const std::vector<double>& ns, const std::vector<double>& ys) {
  Eigen::MatrixXd X(ns.size(), 3);
  Eigen::VectorXd y(ns.size());
  for (std::size_t k = 0; k < ns.size(); ++k) {
    X(k, 0) = 1.0;
    X(k, 1) = ns[k];
    X(k, 2) = std::log(ns[k]);
    y(k) = ys[k];
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  return beta(1);
}

double root_on_grid(const std::vector<double>& s, const std::vector<double>& g) {
  for (std::size_t j = 1; j < s.size(); ++j) {
    if (g[j - 1] > 0 && g[j] <= 0) {
      return s[j - 1] + (s[j] - s[j - 1]) * g[j - 1] / (g[j - 1] - g[j]);
    }
  }
  fail(ErrorCode::Range, "s grid does not bracket the cover-cost transition; widen the grid");
}

}  // namespace

ThetaResult theta(const std::vector<double>& betas, const std::vector<double>& t, unsigned i) {
  check_theta_inputs(betas, t, i);
  ThetaResult out;
  const double base = std::log(std::fabs(betas[i])) + t[i];
  for (unsigned k = 0; k < betas.size(); ++k) {
    const double lb = std::log(std::fabs(betas[k]));
    if (lb > base) {
      out.K1.push_back(k);
      out.theta += 1.0;
    } else if (lb + t[k] <= base) {
      out.K2.push_back(k);
      out.theta += 1.0 - t[k] / base;
    } else {
      out.K3.push_back(k);
      out.theta += lb / base;
    }
  }
  return out;
}

ThetaResult mtp_exponent(const std::vector<double>& deltas, const std::vector<double>& u,
                         const std::vector<double>& v, unsigned i) {
  require(!deltas.empty() && deltas.size() == u.size() && u.size() == v.size(), ErrorCode::Domain,
          "deltas, u and v must be non-empty and of equal length");
  require(i < v.size(), ErrorCode::Range, "coordinate index out of range");
  for (std::size_t k = 0; k < u.size(); ++k) {
    require(deltas[k] > 0 && deltas[k] <= 1, ErrorCode::Domain, "delta_k must lie in (0,1]");
    require(u[k] >= 0 && u[k] <= v[k], ErrorCode::Domain, "need 0 <= u_k <= v_k");
  }
  require(v[i] > 0, ErrorCode::Domain, "need v_i > 0");
  ThetaResult out;
  for (unsigned k = 0; k < u.size(); ++k) {
    if (u[k] >= v[i]) {
      out.K1.push_back(k);
      out.theta += deltas[k];
    } else if (v[k] <= v[i]) {
      out.K2.push_back(k);
      out.theta += deltas[k] * (1.0 - (v[k] - u[k]) / v[i]);
    } else {
      out.K3.push_back(k);
      out.theta += deltas[k] * u[k] / v[i];
    }
  }
  return out;
}

DimensionResult recurrence_dimension(const std::vector<double>& betas,
                                     const std::vector<std::vector<double>>& accumulation) {
  require(!accumulation.empty(), ErrorCode::Precondition, "accumulation set is empty");
  DimensionResult out;
  out.dimension = -INFINITY;
  for (const auto& t : accumulation) {
    double m = INFINITY;
    for (unsigned i = 0; i < betas.size(); ++i) m = std::min(m, theta(betas, t, i).theta);
    out.min_theta.push_back(m);
    if (m > out.dimension) {
      out.dimension = m;
      out.argsup = t;
    }
  }
  return out;
}

std::vector<std::vector<double>> accumulation_set(const RadiiSchedule& schedule, unsigned stride,
                                                  std::size_t n_min, std::size_t n_max,
                                                  double tolerance) {
  if (auto t = schedule.accumulation_exponents()) return {*t};
  require(stride >= 1 && n_min >= 1 && n_max >= n_min, ErrorCode::Precondition, "invalid n range");
  const unsigned d = schedule.dimension();
  const std::size_t from = n_min + (n_max - n_min) / 2;
  struct Cluster {
    std::vector<double> sum;
    std::size_t count = 0;
    std::vector<double> mean() const {
      std::vector<double> m(sum);
      for (double& v : m) v /= static_cast<double>(count);
      return m;
    }
  };
  std::vector<Cluster> clusters;
  const std::size_t first = ((from + stride - 1) / stride) * stride;
  for (std::size_t n = first; n <= n_max; n += stride) {
    std::vector<double> p(d);
    for (unsigned i = 0; i < d; ++i) {
      const double psi = schedule.radius(n, i);
      require(psi > 0, ErrorCode::Precondition, "psi must be positive on the range");
      p[i] = -std::log(psi) / static_cast<double>(n);
    }
    bool placed = false;
    for (auto& c : clusters) {
      const auto m = c.mean();
      double dist = 0;
      for (unsigned i = 0; i < d; ++i) dist = std::max(dist, std::fabs(m[i] - p[i]));
      if (dist <= tolerance) {
        for (unsigned i = 0; i < d; ++i) c.sum[i] += p[i];
        ++c.count;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({p, 1});
  }
  std::vector<std::vector<double>> out;
  for (const auto& c : clusters) out.push_back(c.mean());
  std::sort(out.begin(), out.end());
  return out;
}

bool accumulation_invariant(const RadiiSchedule& schedule, unsigned stride, std::size_t n_min,
                            std::size_t n_max, double tolerance) {
  const auto a = accumulation_set(schedule, stride, n_min, n_max, tolerance);
  const auto b = accumulation_set(schedule, 1, n_min, n_max, tolerance);
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::size_t i = 0; i < a[j].size(); ++i) {
      if (std::fabs(a[j][i] - b[j][i]) > tolerance) return false;
    }
  }
  return true;
}

RecurrenceCover recurrence_cover(const ExpandingMap& map, unsigned n, double r) {
  RecurrenceCover out;
  out.bound_length = 6.0 * r * std::pow(std::fabs(map.beta()), -static_cast<double>(n));
  NeumaierSum total;
  for_each_recurrence_interval(map, n, r, [&](const CylinderView& c, Interval in) {
    out.intervals.push_back({{c.left, c.right}, in});
    total.add(in.length());
  });
  out.total_exact_length = total.value();
  return out;
}

std::vector<double> default_s_grid(unsigned d) {
  std::vector<double> grid;
  for (int k = 1; k <= static_cast<int>(200 * d + 100); ++k) grid.push_back(0.005 * k);
  return grid;
}

CriticalExponent cover_critical_exponent(const std::vector<double>& betas,
                                         const RadiiSchedule& schedule, std::size_t n0,
                                         std::size_t n1, const std::vector<double>& s_grid) {
  const unsigned d = static_cast<unsigned>(betas.size());
  require(d >= 1 && schedule.dimension() == d, ErrorCode::Domain,
          "schedule dimension must match the number of betas");
  require(n0 >= 10 && n1 >= n0 + 3, ErrorCode::Precondition,
          "window must start at n0 >= 10 and span at least 4 orders");
  require(s_grid.size() >= 2 && std::is_sorted(s_grid.begin(), s_grid.end()),
          ErrorCode::Precondition, "s grid must be increasing");
  for (double b : betas) require(std::fabs(b) > 1, ErrorCode::Domain, "expansion requires |beta|>1");

  CriticalExponent out;
  out.s_grid = s_grid;
  std::vector<double> ns;
  for (std::size_t n = n0; n <= n1; ++n) ns.push_back(static_cast<double>(n));

  // log_costs[i][n - n0][s]
  std::vector<std::vector<std::vector<double>>> log_costs(d);

  if (d == 1) {
    const ExpandingMap map = ExpandingMap::beta(betas[0]);
    log_costs[0].resize(ns.size());
    for (std::size_t n = n0; n <= n1; ++n) {
      const double r = schedule.radius(n, 0);
      require(r > 0, ErrorCode::Precondition, "psi must be positive on the window");
      std::map<double, double> groups;
      for_each_recurrence_interval(map, static_cast<unsigned>(n), r,
                                   [&groups](const CylinderView&, Interval in) {
                                     if (in.length() > 0) groups[std::log(in.length())] += 1.0;
                                   });
      const std::vector<std::pair<double, double>> flat(groups.begin(), groups.end());
      auto& row = log_costs[0][n - n0];
      for (double s : s_grid) row.push_back(log_cost(flat, s));
    }
  } else {
    std::vector<std::vector<double>> log_count(d, std::vector<double>(ns.size()));
    for (unsigned k = 0; k < d; ++k) {
      const double b = std::fabs(betas[k]);
      for (std::size_t n = n0; n <= n1; ++n) {
        log_count[k][n - n0] =
            b == std::nearbyint(b)
                ? static_cast<double>(n) * std::log(b)
                : std::log(static_cast<double>(cylinder_count(ExpandingMap::beta(betas[k]),
                                                              static_cast<unsigned>(n))));
      }
    }
    for (unsigned i = 0; i < d; ++i) {
      log_costs[i].resize(ns.size());
      for (std::size_t n = n0; n <= n1; ++n) {
        const double nn = static_cast<double>(n);
        // log of psi_k(n) |beta_k|^-n
        std::vector<double> side(d);
        for (unsigned k = 0; k < d; ++k) {
          const double psi = schedule.radius(n, k);
          require(psi > 0, ErrorCode::Precondition, "psi must be positive on the window");
          side[k] = std::log(psi) - nn * std::log(std::fabs(betas[k]));
        }
        const double log_diam = std::log(6.0) + side[i];
        double log_balls = 0.0;
        for (unsigned k = 0; k < d; ++k) {
          const bool in_k1 = -nn * std::log(std::fabs(betas[k])) < log_diam;
          const bool in_k2 = side[k] >= side[i];
          log_balls += in_k1 ? -log_diam : log_count[k][n - n0];
          if (in_k2) log_balls += side[k] - side[i];
        }
        auto& row = log_costs[i][n - n0];
        for (double s : s_grid) row.push_back(log_balls + s * log_diam);
      }
    }
  }

  std::vector<std::vector<double>> growth(d, std::vector<double>(s_grid.size()));
  out.per_coordinate.resize(d);
  for (unsigned i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < s_grid.size(); ++j) {
      std::vector<double> ys(ns.size());
      for (std::size_t k = 0; k < ns.size(); ++k) ys[k] = log_costs[i][k][j];
      growth[i][j] = growth_coefficient(ns, ys);
    }
    out.per_coordinate[i] = root_on_grid(s_grid, growth[i]);
  }
  out.argmin = static_cast<unsigned>(
      std::min_element(out.per_coordinate.begin(), out.per_coordinate.end()) -
      out.per_coordinate.begin());
  out.s_star = out.per_coordinate[out.argmin];
  out.growth_rate = growth[out.argmin];
  for (std::size_t j = 0; j < s_grid.size(); ++j) {
    NeumaierSum cost;
    for (std::size_t k = 0; k < ns.size(); ++k) cost.add(std::exp(log_costs[out.argmin][k][j]));
    out.window_cost.push_back(cost.value());
    if (!out.threshold_s && cost.value() < 1.0) out.threshold_s = s_grid[j];
  }
  return out;
}

MtpBound mtp_lower_bound(const std::vector<double>& betas, const std::vector<double>& deltas,
                         const std::vector<double>& t, double epsilon) {
  require(epsilon >= 0 && epsilon < 1, ErrorCode::Domain, "epsilon must lie in [0,1)");
  require(betas.size() == deltas.size() && betas.size() == t.size(), ErrorCode::Domain,
          "betas, deltas and t must have equal length");
  const std::size_t d = betas.size();
  std::vector<double> u(d), v(d);
  for (std::size_t k = 0; k < d; ++k) {
    u[k] = (1.0 - epsilon) * std::log(std::fabs(betas[k]));
    v[k] = u[k] + t[k];
  }
  MtpBound out;
  out.bound = INFINITY;
  out.theta_limit = INFINITY;
  for (unsigned i = 0; i < d; ++i) {
    const double s = mtp_exponent(deltas, u, v, i).theta;
    out.per_coordinate.push_back(s);
    out.bound = std::min(out.bound, s);
    out.theta_limit = std::min(out.theta_limit, theta(betas, t, i).theta);
  }
  out.gap = out.theta_limit - out.bound;
  return out;
}

}  // namespace reclab

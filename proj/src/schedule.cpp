// SPDX-License-Identifier: Apache-2.0
#include "reclab/schedule.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>

#include "reclab/error.hpp"
#include "reclab/parallel.hpp"

namespace reclab {
namespace {

void check_params(const std::vector<double>& c, const std::vector<double>& p, bool positive_p) {
  require(!c.empty() && c.size() == p.size(), ErrorCode::Domain,
          "schedule parameters must be non-empty and of equal length");
  for (double v : c) require(v >= 0 && std::isfinite(v), ErrorCode::Domain, "amplitude must be >= 0");
  for (double v : p) {
    require(std::isfinite(v) && (positive_p ? v > 0 : v >= 0), ErrorCode::Domain,
            positive_p ? "schedule exponent must be > 0" : "schedule rate must be >= 0");
  }
}

}  // namespace

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::PowerLaw: return "power_law";
    case ScheduleKind::Exponential: return "exponential";
    case ScheduleKind::BetaPower: return "beta_power";
    case ScheduleKind::Table: return "table";
  }
  return "?";
}

const char* to_string(SeriesClass c) {
  switch (c) {
    case SeriesClass::Convergent: return "convergent";
    case SeriesClass::Divergent: return "divergent";
    case SeriesClass::Undetermined: return "undetermined";
  }
  return "?";
}

RadiiSchedule RadiiSchedule::power_law(std::vector<double> c, std::vector<double> a) {
  check_params(c, a, true);
  RadiiSchedule s;
  s.kind_ = ScheduleKind::PowerLaw;
  s.c_ = std::move(c);
  s.p_ = std::move(a);
  return s;
}

RadiiSchedule RadiiSchedule::exponential(std::vector<double> c, std::vector<double> t) {
  check_params(c, t, false);
  RadiiSchedule s;
  s.kind_ = ScheduleKind::Exponential;
  s.c_ = std::move(c);
  s.p_ = std::move(t);
  return s;
}

RadiiSchedule RadiiSchedule::beta_power(std::vector<double> betas, std::vector<double> alpha,
                                        std::vector<double> c) {
  if (c.empty()) c.assign(betas.size(), 1.0);
  check_params(c, alpha, true);
  require(betas.size() == alpha.size(), ErrorCode::Domain, "betas and alpha must match");
  for (double b : betas) require(std::fabs(b) > 1, ErrorCode::Domain, "expansion requires |beta|>1");
  RadiiSchedule s;
  s.kind_ = ScheduleKind::BetaPower;
  s.c_ = std::move(c);
  s.p_ = std::move(alpha);
  s.betas_ = std::move(betas);
  return s;
}

RadiiSchedule RadiiSchedule::table(std::vector<std::vector<double>> rows) {
  require(!rows.empty() && !rows.front().empty(), ErrorCode::Domain, "table schedule is empty");
  for (const auto& row : rows) {
    require(row.size() == rows.front().size(), ErrorCode::Domain, "table rows differ in width");
    for (double v : row) require(v >= 0 && std::isfinite(v), ErrorCode::Domain, "radii must be >= 0");
  }
  RadiiSchedule s;
  s.kind_ = ScheduleKind::Table;
  s.rows_ = std::move(rows);
  return s;
}

std::optional<std::size_t> RadiiSchedule::length() const {
  if (kind_ == ScheduleKind::Table) return rows_.size();
  return std::nullopt;
}

double RadiiSchedule::radius(std::size_t n, unsigned i) const {
  require(n >= 1, ErrorCode::Range, "schedule index starts at 1");
  const double x = static_cast<double>(n);
  switch (kind_) {
    case ScheduleKind::PowerLaw: return c_[i] * std::pow(x, -p_[i]);
    case ScheduleKind::Exponential: return c_[i] * std::exp(-p_[i] * x);
    case ScheduleKind::BetaPower: return c_[i] * std::pow(std::fabs(betas_[i]), -p_[i] * x);
    case ScheduleKind::Table:
      require(n <= rows_.size(), ErrorCode::Range, "table schedule shorter than requested horizon");
      return rows_[n - 1][i];
  }
  return 0.0;
}

std::vector<double> RadiiSchedule::radii(std::size_t n) const {
  std::vector<double> out(dimension());
  radii(n, out);
  return out;
}

void RadiiSchedule::radii(std::size_t n, std::span<double> out) const {
  for (unsigned i = 0; i < out.size(); ++i) out[i] = radius(n, i);
}

std::optional<std::vector<double>> RadiiSchedule::accumulation_exponents() const {
  std::vector<double> t(dimension());
  switch (kind_) {
    case ScheduleKind::PowerLaw: return std::vector<double>(dimension(), 0.0);
    case ScheduleKind::Exponential: return p_;
    case ScheduleKind::BetaPower:
      for (unsigned i = 0; i < t.size(); ++i) t[i] = p_[i] * std::log(std::fabs(betas_[i]));
      return t;
    case ScheduleKind::Table: return std::nullopt;
  }
  return std::nullopt;
}

double series_term(const RadiiSchedule& schedule, TargetKind target, unsigned d, std::size_t n) {
  if (target == TargetKind::Rect) {
    double term = 1.0;
    for (unsigned i = 0; i < schedule.dimension(); ++i) term *= schedule.radius(n, i);
    return term;
  }
  const double delta = schedule.radius(n, 0);
  if (delta <= 0) return 0.0;
  return delta * std::pow(-std::log(delta), static_cast<double>(d - 1));
}

SeriesClassification classify_series(const RadiiSchedule& schedule, TargetKind target, unsigned d,
                                      std::size_t horizon) {
  SeriesClassification out;
  if (schedule.kind() == ScheduleKind::Table && horizon == 0) horizon = *schedule.length();
  if (horizon > 0) {
    NeumaierSum acc;
    out.partial_sums.reserve(horizon);
    for (std::size_t n = 1; n <= horizon; ++n) {
      acc.add(series_term(schedule, target, d, n));
      out.partial_sums.push_back(acc.value());
    }
  }

  const auto& c = schedule.amplitude();
  const auto& p = schedule.exponent();
  const bool zero = std::any_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
  if (target == TargetKind::Hyperboloid) {
    require(schedule.dimension() == 1, ErrorCode::Domain,
            "hyperboloid schedules are scalar (one delta per step)");
  }
  switch (schedule.kind()) {
    case ScheduleKind::Table:
      out.verdict = SeriesClass::Undetermined;
      out.rule = "tabulated schedule: partial sums only";
      return out;
    case ScheduleKind::PowerLaw: {
      const double a = std::accumulate(p.begin(), p.end(), 0.0);
      if (zero) {
        out.verdict = SeriesClass::Convergent;
        out.rule = "identically zero terms";
      } else {
        out.verdict = a > 1 ? SeriesClass::Convergent : SeriesClass::Divergent;
        out.rule = target == TargetKind::Rect ? "sum n^-(a_1+...+a_d): converges iff sum a_i > 1"
                                              : "sum n^-a (log n)^(d-1): converges iff a > 1";
      }
      return out;
    }
    case ScheduleKind::Exponential: {
      const double t = std::accumulate(p.begin(), p.end(), 0.0);
      if (zero) {
        out.verdict = SeriesClass::Convergent;
        out.rule = "identically zero terms";
      } else {
        out.verdict = t > 0 ? SeriesClass::Convergent : SeriesClass::Divergent;
        out.rule = "geometric series: converges iff sum t_i > 0";
      }
      return out;
    }
    case ScheduleKind::BetaPower: {
      double rate = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) rate += p[i] * std::log(std::fabs(schedule.betas()[i]));
      out.verdict = (zero || rate > 0) ? SeriesClass::Convergent : SeriesClass::Divergent;
      out.rule = "geometric series: converges iff sum alpha_i log|beta_i| > 0";
      return out;
    }
  }
  return out;
}

}  // namespace reclab

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reclab/geometry.hpp"

namespace reclab {

enum class ScheduleKind { PowerLaw, Exponential, BetaPower, Table };

const char* to_string(ScheduleKind kind);

/// Radii sequence r_n in (R>=0)^d, or a scalar delta_n (d = 1) for
/// hyperboloid targets. Indices n start at 1.
class RadiiSchedule {
 public:
  /// r_{n,i} = c_i n^{-a_i}
  static RadiiSchedule power_law(std::vector<double> c, std::vector<double> a);
  /// r_{n,i} = c_i e^{-t_i n}
  static RadiiSchedule exponential(std::vector<double> c, std::vector<double> t);
  /// r_{n,i} = c_i |beta_i|^{-alpha_i n}
  static RadiiSchedule beta_power(std::vector<double> betas, std::vector<double> alpha,
                                  std::vector<double> c = {});
  /// rows[n-1] holds the radii at step n.
  static RadiiSchedule table(std::vector<std::vector<double>> rows);

  ScheduleKind kind() const { return kind_; }
  unsigned dimension() const { return static_cast<unsigned>(c_.empty() ? rows_.front().size() : c_.size()); }
  std::optional<std::size_t> length() const;

  double radius(std::size_t n, unsigned i) const;
  std::vector<double> radii(std::size_t n) const;
  void radii(std::size_t n, std::span<double> out) const;

  /// Closed-form t_i = lim -log psi_i(n)/n for parametric kinds.
  std::optional<std::vector<double>> accumulation_exponents() const;

  /// Parameters, for reports.
  const std::vector<double>& amplitude() const { return c_; }
  const std::vector<double>& exponent() const { return p_; }
  const std::vector<double>& betas() const { return betas_; }

 private:
  RadiiSchedule() = default;

  ScheduleKind kind_ = ScheduleKind::PowerLaw;
  std::vector<double> c_;
  std::vector<double> p_;
  std::vector<double> betas_;
  std::vector<std::vector<double>> rows_;
};

enum class SeriesClass { Convergent, Divergent, Undetermined };

const char* to_string(SeriesClass c);

struct SeriesClassification {
  SeriesClass verdict = SeriesClass::Undetermined;
  std::string rule;
  /// Partial sums of the governing series over n = 1..horizon.
  std::vector<double> partial_sums;
};

/// Term n of the governing series: prod_i r_{n,i} (rect) or
/// delta_n (-log delta_n)^{d-1} (hyperboloid, scalar schedule).
double series_term(const RadiiSchedule& schedule, TargetKind target, unsigned d, std::size_t n);

SeriesClassification classify_series(const RadiiSchedule& schedule, TargetKind target, unsigned d,
                                     std::size_t horizon = 0);

}  // namespace reclab

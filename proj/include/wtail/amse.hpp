#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wtail/distributions.hpp"
#include "wtail/estimators.hpp"

namespace wtail {

// Inclusive range of k values.
struct KRange {
  std::int64_t first = 2;
  std::int64_t last = 150;

  std::size_t size() const noexcept {
    return last >= first ? static_cast<std::size_t>(last - first + 1) : 0;
  }
  // Throws DomainError unless 2 <= first <= last <= n - 1.
  void validate(std::int64_t n) const;
};

struct AmsePoint {
  std::int64_t k = 0;
  EstimatorVariant variant = EstimatorVariant::V1;
  double bias_sq = 0.0;   // (theta a_n + b(log(n/k)))^2
  double variance = 0.0;  // theta^2 / k
  double total = 0.0;     // bias_sq + variance
};

using AmseCurve = std::vector<AmsePoint>;

AmsePoint amse(const WeibullTailModel& model, std::int64_t n, std::int64_t k,
               EstimatorVariant variant);

AmseCurve amse_curve(const WeibullTailModel& model, std::int64_t n, KRange k_range,
                     EstimatorVariant variant);

enum class OrderingCase {
  NegBiasAlphaGtTheta,
  NegBiasAlphaLtTheta,
  PosBiasBetaGtTheta,
  PosBiasBetaLtTheta,
  ZeroBias,
};

std::string_view to_string(OrderingCase c) noexcept;

// Either a strict chain first < second < third, or first < min(second, third).
struct PredictedOrder {
  std::array<EstimatorVariant, 3> variants{};
  bool strict_chain = false;

  std::string to_string() const;
  // True when three AMSE (or MSE) values indexed by V1..V3 satisfy the order.
  bool holds(const std::array<double, 3>& by_variant) const;
};

struct OrderingVerdict {
  OrderingCase ordering_case = OrderingCase::ZeroBias;
  PredictedOrder predicted;
  // Finite-n surrogate of alpha (negative bias) or beta (positive bias); 0 for zero bias.
  double alpha_or_beta = 0.0;
  double theta = 0.0;
  std::int64_t n = 0;
  // k used by the alpha surrogate; absent when the case does not depend on k.
  std::optional<std::int64_t> k;
  double bias_at_log_n = 0.0;
};

using KRule = std::function<std::int64_t(std::int64_t)>;

// Probes the sign of b on [log n, 10 log n], then applies the AMSE ordering result:
//   b <= 0: alpha_n = -4 b(log n) k / log k, using k = k_rule(n)
//   b >= 0: beta_n = 2 log(n) b(log n)
// Throws IndeterminateSignError when b takes both signs on the probe range.
OrderingVerdict classify_ordering(const WeibullTailModel& model, std::int64_t n,
                                  const KRule& k_rule);

struct ConditionReport {
  std::string name;              // "C.1", "C.2", "C.3"
  std::vector<double> ratios;    // defining ratio along the n grid
  double final_value = 0.0;
  bool monotone = false;         // non-increasing along the whole grid
  bool satisfied = false;        // decay verdict
};

// (C.1) k/n -> 0, (C.2) log k / log n -> 0, (C.3) (C.1) and sqrt(k)/log(n/k) -> 0.
// A ratio is judged decaying when its maximum over the second half of the grid
// is at most 0.9 times its maximum over the first half.
std::array<ConditionReport, 3> check_sequence_conditions(const std::vector<std::int64_t>& n_grid,
                                                         const KRule& k_rule);

// CSV with header k,variant,bias_sq,variance,total.
void write_amse_csv(std::ostream& out, const std::vector<AmseCurve>& curves);

}  // namespace wtail

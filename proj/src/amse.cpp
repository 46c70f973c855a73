#include "wtail/amse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "wtail/csv.hpp"
#include "wtail/errors.hpp"
#include "wtail/format.hpp"

namespace wtail {
namespace {

constexpr int kSignProbePoints = 200;
constexpr double kSignProbeSpan = 10.0;
constexpr double kDecayFactor = 0.9;

bool decays(const std::vector<double>& ratios) {
  const std::size_t half = ratios.size() / 2;
  const auto head = std::max_element(ratios.begin(), ratios.begin() + static_cast<long>(half));
  const auto tail = std::max_element(ratios.begin() + static_cast<long>(half), ratios.end());
  return std::isfinite(*tail) && *tail <= kDecayFactor * *head;
}

ConditionReport make_report(std::string name, std::vector<double> ratios) {
  ConditionReport report;
  report.name = std::move(name);
  report.final_value = ratios.back();
  report.monotone = std::is_sorted(ratios.rbegin(), ratios.rend());
  report.satisfied = decays(ratios);
  report.ratios = std::move(ratios);
  return report;
}

}  // namespace

void KRange::validate(std::int64_t n) const {
  if (first < kMinK || last < first || last >= n) {
    throw DomainError("k range [" + std::to_string(first) + ", " + std::to_string(last) +
                      "] must satisfy 2 <= k_min <= k_max <= n-1 with n=" + std::to_string(n));
  }
}

AmsePoint amse(const WeibullTailModel& model, std::int64_t n, std::int64_t k,
               EstimatorVariant variant) {
  require_k_in_range(n, k);
  const double theta = model.theta();
  const double log_nk = std::log(static_cast<double>(n) / static_cast<double>(k));
  const double bias = theta * a_n_exact(variant, n, k) + bias_b(model, log_nk);
  AmsePoint point;
  point.k = k;
  point.variant = variant;
  point.bias_sq = bias * bias;
  point.variance = theta * theta / static_cast<double>(k);
  point.total = point.bias_sq + point.variance;
  return point;
}

AmseCurve amse_curve(const WeibullTailModel& model, std::int64_t n, KRange k_range,
                     EstimatorVariant variant) {
  k_range.validate(n);
  AmseCurve curve;
  curve.reserve(k_range.size());
  for (std::int64_t k = k_range.first; k <= k_range.last; ++k) {
    curve.push_back(amse(model, n, k, variant));
  }
  return curve;
}

std::string_view to_string(OrderingCase c) noexcept {
  switch (c) {
    case OrderingCase::NegBiasAlphaGtTheta: return "neg_bias_alpha_gt_theta";
    case OrderingCase::NegBiasAlphaLtTheta: return "neg_bias_alpha_lt_theta";
    case OrderingCase::PosBiasBetaGtTheta: return "pos_bias_beta_gt_theta";
    case OrderingCase::PosBiasBetaLtTheta: return "pos_bias_beta_lt_theta";
    case OrderingCase::ZeroBias: return "zero_bias";
  }
  return "?";
}

std::string PredictedOrder::to_string() const {
  const auto name = [](EstimatorVariant v) { return std::string(wtail::to_string(v)); };
  if (strict_chain) {
    return name(variants[0]) + " < " + name(variants[1]) + " < " + name(variants[2]);
  }
  return name(variants[0]) + " < min(" + name(variants[1]) + ", " + name(variants[2]) + ")";
}

bool PredictedOrder::holds(const std::array<double, 3>& by_variant) const {
  const auto at = [&](std::size_t i) { return by_variant[static_cast<std::size_t>(variants[i])]; };
  if (strict_chain) return at(0) < at(1) && at(1) < at(2);
  return at(0) < std::min(at(1), at(2));
}

OrderingVerdict classify_ordering(const WeibullTailModel& model, std::int64_t n,
                                  const KRule& k_rule) {
  if (n < 3) throw DomainError("classify_ordering: n must be >= 3");
  const double log_n = std::log(static_cast<double>(n));
  bool any_pos = false;
  bool any_neg = false;
  for (int i = 0; i < kSignProbePoints; ++i) {
    const double x = log_n * std::pow(kSignProbeSpan, static_cast<double>(i) / (kSignProbePoints - 1));
    const double b = bias_b(model, x);
    any_pos = any_pos || b > 0.0;
    any_neg = any_neg || b < 0.0;
  }
  if (any_pos && any_neg) {
    throw IndeterminateSignError("bias function changes sign on [log n, 10 log n] for " +
                                 model.spec() + " at n=" + std::to_string(n) +
                                 "; the ordering needs an ultimately signed bias");
  }

  using V = EstimatorVariant;
  OrderingVerdict verdict;
  verdict.theta = model.theta();
  verdict.n = n;
  verdict.bias_at_log_n = bias_b(model, log_n);
  if (any_neg) {
    const std::int64_t k = k_rule(n);
    if (k < kMinK) throw DomainError("classify_ordering: k_rule produced k < 2");
    verdict.k = k;
    const auto kd = static_cast<double>(k);
    verdict.alpha_or_beta = -4.0 * verdict.bias_at_log_n * kd / std::log(kd);
    // alpha = theta is not covered by the ordering result; grouped with alpha < theta.
    if (verdict.alpha_or_beta > verdict.theta) {
      verdict.ordering_case = OrderingCase::NegBiasAlphaGtTheta;
      verdict.predicted = {{V::V2, V::V1, V::V3}, true};
    } else {
      verdict.ordering_case = OrderingCase::NegBiasAlphaLtTheta;
      verdict.predicted = {{V::V1, V::V2, V::V3}, false};
    }
  } else if (any_pos) {
    verdict.alpha_or_beta = 2.0 * log_n * verdict.bias_at_log_n;
    if (verdict.alpha_or_beta > verdict.theta) {
      verdict.ordering_case = OrderingCase::PosBiasBetaGtTheta;
      verdict.predicted = {{V::V3, V::V1, V::V2}, true};
    } else {
      verdict.ordering_case = OrderingCase::PosBiasBetaLtTheta;
      verdict.predicted = {{V::V1, V::V2, V::V3}, false};
    }
  } else {
    verdict.ordering_case = OrderingCase::ZeroBias;
    verdict.predicted = {{V::V1, V::V2, V::V3}, false};
  }
  return verdict;
}

std::array<ConditionReport, 3> check_sequence_conditions(const std::vector<std::int64_t>& n_grid,
                                                         const KRule& k_rule) {
  if (n_grid.size() < 2) throw DomainError("check_sequence_conditions: need at least two n values");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw DomainError("check_sequence_conditions: n grid must be strictly increasing");
  }
  std::vector<double> c1, c2, c3;
  for (const std::int64_t n : n_grid) {
    const std::int64_t k = k_rule(n);
    if (k < 1) throw DomainError("check_sequence_conditions: k_rule produced k < 1");
    const auto nd = static_cast<double>(n);
    const auto kd = static_cast<double>(k);
    c1.push_back(kd / nd);
    c2.push_back(std::log(kd) / std::log(nd));
    c3.push_back(k < n ? std::sqrt(kd) / std::log(nd / kd)
                       : std::numeric_limits<double>::infinity());
  }
  std::array<ConditionReport, 3> reports = {make_report("C.1", std::move(c1)),
                                            make_report("C.2", std::move(c2)),
                                            make_report("C.3", std::move(c3))};
  reports[2].satisfied = reports[2].satisfied && reports[0].satisfied;
  return reports;
}

void write_amse_csv(std::ostream& out, const std::vector<AmseCurve>& curves) {
  csv::write_row(out, {"k", "variant", "bias_sq", "variance", "total"});
  for (const auto& curve : curves) {
    for (const auto& p : curve) {
      csv::write_row(out, {std::to_string(p.k), std::string(to_string(p.variant)),
                           format_double(p.bias_sq), format_double(p.variance),
                           format_double(p.total)});
    }
  }
}

}  // namespace wtail

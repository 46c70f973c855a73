#include "wtail/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "wtail/distributions.hpp"
#include "wtail/errors.hpp"
#include "wtail/specfun.hpp"

namespace wtail {

std::string_view to_string(EstimatorVariant v) noexcept {
  switch (v) {
    case EstimatorVariant::V1: return "V1";
    case EstimatorVariant::V2: return "V2";
    case EstimatorVariant::V3: return "V3";
  }
  return "?";
}

std::optional<EstimatorVariant> parse_variant(std::string_view text) noexcept {
  if (text.size() == 2 && (text[0] == 'V' || text[0] == 'v')) text.remove_prefix(1);
  if (text == "1") return EstimatorVariant::V1;
  if (text == "2") return EstimatorVariant::V2;
  if (text == "3") return EstimatorVariant::V3;
  return std::nullopt;
}

void require_k_in_range(std::int64_t n, std::int64_t k) {
  if (k < kMinK || k >= n) {
    throw DomainError("k must satisfy 2 <= k < n, got k=" + std::to_string(k) +
                      ", n=" + std::to_string(n));
  }
}

double t_n(EstimatorVariant variant, std::int64_t n, std::int64_t k) {
  require_k_in_range(n, k);
  const double log_nk = std::log(static_cast<double>(n) / static_cast<double>(k));
  switch (variant) {
    case EstimatorVariant::V1:
      return scaled_exp_integral_e1(log_nk);
    case EstimatorVariant::V2: {
      // i = k contributes log(1) = 0 and is kept implicit.
      const auto kd = static_cast<double>(k);
      double sum = 0.0;
      for (std::int64_t i = 1; i < k; ++i) {
        sum += std::log1p(std::log(kd / static_cast<double>(i)) / log_nk);
      }
      return sum / kd;
    }
    case EstimatorVariant::V3:
      return 1.0 / log_nk;
  }
  throw DomainError("t_n: unknown estimator variant");
}

double a_n_exact(EstimatorVariant variant, std::int64_t n, std::int64_t k) {
  require_k_in_range(n, k);
  if (variant == EstimatorVariant::V1) return 0.0;
  const double log_nk = std::log(static_cast<double>(n) / static_cast<double>(k));
  return scaled_exp_integral_e1(log_nk) / t_n(variant, n, k) - 1.0;
}

double mean_log_excess(const SortedSample& sample, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(sample.size());
  require_k_in_range(n, k);
  const auto values = sample.values();
  const double anchor = std::log(values[static_cast<std::size_t>(n - k)]);
  double sum = 0.0;
  for (std::int64_t i = n - k + 1; i < n; ++i) {
    sum += std::log(values[static_cast<std::size_t>(i)]) - anchor;
  }
  return sum / static_cast<double>(k);
}

EstimatePoint theta_hat(const SortedSample& sample, std::int64_t k, EstimatorVariant variant) {
  const auto n = static_cast<std::int64_t>(sample.size());
  EstimatePoint point;
  point.k = k;
  point.t_n = t_n(variant, n, k);
  point.a_n = a_n_exact(variant, n, k);
  point.theta_hat = mean_log_excess(sample, k) / point.t_n;
  return point;
}

double quantile_hat_unchecked(const SortedSample& sample, std::int64_t k, double p,
                              EstimatorVariant variant) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("quantile_hat: p must lie in (0, 1), got " + std::to_string(p));
  }
  const auto n = static_cast<std::int64_t>(sample.size());
  const double theta = theta_hat(sample, k, variant).theta_hat;
  const double tau = std::log(1.0 / p) / std::log(static_cast<double>(n) / static_cast<double>(k));
  return sample.top(static_cast<std::size_t>(k)) * std::pow(tau, theta);
}

double quantile_hat(const SortedSample& sample, std::int64_t k, double p,
                    EstimatorVariant variant) {
  const auto n = static_cast<double>(sample.size());
  if (!(p > 0.0)) {
    throw DomainError("quantile_hat: p must be > 0, got " + std::to_string(p));
  }
  if (!(p < 1.0 / n)) {
    throw DomainError("quantile_hat: extreme quantile requires p < 1/n, got p=" +
                      std::to_string(p) + " with n=" + std::to_string(sample.size()));
  }
  return quantile_hat_unchecked(sample, k, p, variant);
}

std::int64_t optimal_k(std::int64_t n, double lambda, const BiasFunction& bias) {
  if (n < 3) throw DomainError("optimal_k: n must be >= 3");
  if (lambda == 0.0 || !std::isfinite(lambda)) {
    throw DomainError("optimal_k: lambda must be finite and non-zero");
  }
  const double b = bias(std::log(static_cast<double>(n)));
  if (b == 0.0) {
    throw UndefinedRateError(
        "optimal_k: b(log n) = 0, every intermediate sequence attains the rate");
  }
  const double ratio = lambda / b;
  const double k = std::round(ratio * ratio);
  const auto upper = static_cast<double>(n - 1);
  return static_cast<std::int64_t>(std::clamp(k, static_cast<double>(kMinK), upper));
}

std::int64_t optimal_k(std::int64_t n, double lambda, const WeibullTailModel& model) {
  return optimal_k(n, lambda, [&model](double x) { return bias_b(model, x); });
}

}  // namespace wtail

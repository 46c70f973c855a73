#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "wtail/sample.hpp"

namespace wtail {

class WeibullTailModel;

// Choice of the normalizing sequence T_n:
//   V1: mu_0(log(n/k)),
//   V2: (1/k) sum_{i=1}^k log(1 - log(i/k)/log(n/k)),
//   V3: 1/log(n/k).
enum class EstimatorVariant { V1, V2, V3 };

inline constexpr std::array<EstimatorVariant, 3> kAllVariants = {
    EstimatorVariant::V1, EstimatorVariant::V2, EstimatorVariant::V3};

std::string_view to_string(EstimatorVariant v) noexcept;
// Accepts "V1".."V3" (case-insensitive) or "1".."3".
std::optional<EstimatorVariant> parse_variant(std::string_view text) noexcept;

struct EstimatePoint {
  std::int64_t k = 0;
  double t_n = 0.0;        // normalization used
  double a_n = 0.0;        // mu_0(log(n/k))/t_n - 1
  double theta_hat = 0.0;  // Weibull tail-coefficient estimate
};

// Smallest admissible k; k = 1 leaves a single zero log-spacing.
inline constexpr std::int64_t kMinK = 2;

// Throws DomainError unless 2 <= k < n.
void require_k_in_range(std::int64_t n, std::int64_t k);

double t_n(EstimatorVariant variant, std::int64_t n, std::int64_t k);

// mu_0(log(n/k)) / t_n - 1; exactly 0 for V1.
double a_n_exact(EstimatorVariant variant, std::int64_t n, std::int64_t k);

// (1/k) sum_{i=1}^k (log X_{n-i+1,n} - log X_{n-k+1,n}), the numerator shared by every variant.
double mean_log_excess(const SortedSample& sample, std::int64_t k);

EstimatePoint theta_hat(const SortedSample& sample, std::int64_t k, EstimatorVariant variant);

// Extreme quantile X_{n-k+1,n} * tau^theta_hat with tau = log(1/p)/log(n/k).
// Requires 0 < p < 1/n.
double quantile_hat(const SortedSample& sample, std::int64_t k, double p,
                    EstimatorVariant variant);

// As quantile_hat but only requires 0 < p < 1, so tau < 1 is reachable.
// Outside the extrapolation regime; meant for boundary checks.
double quantile_hat_unchecked(const SortedSample& sample, std::int64_t k, double p,
                              EstimatorVariant variant);

using BiasFunction = std::function<double(double)>;

// round((lambda / b(log n))^2) clamped to [2, n-1].
// Throws UndefinedRateError when b(log n) = 0.
std::int64_t optimal_k(std::int64_t n, double lambda, const BiasFunction& bias);
std::int64_t optimal_k(std::int64_t n, double lambda, const WeibullTailModel& model);

}  // namespace wtail

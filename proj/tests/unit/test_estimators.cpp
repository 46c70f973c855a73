#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "wtail/distributions.hpp"
#include "wtail/errors.hpp"
#include "wtail/estimators.hpp"
#include "wtail/sample.hpp"
#include "wtail/specfun.hpp"

using namespace wtail;

namespace {

double mu0_oracle(double t) { return -std::exp(t) * boost::math::expint(-t); }

SortedSample five_point() {
  return SortedSample({1.0, std::exp(1.0), std::exp(2.0), std::exp(3.0), std::exp(4.0)});
}

std::vector<double> random_positive(std::mt19937_64& gen, std::size_t n) {
  std::lognormal_distribution<double> d(0.0, 1.5);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

}  // namespace

TEST_CASE("SortedSample validates its invariants") {
  CHECK_NOTHROW(SortedSample({1.0, 1.0, 2.0}));
  CHECK_THROWS_WITH_AS(SortedSample({}), "need at least 3 observations, got 0", DomainError);
  CHECK_THROWS_AS(SortedSample({1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(SortedSample({0.0, 1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(SortedSample({-1.0, 1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(SortedSample({1.0, 3.0, 2.0}), DomainError);
  CHECK_THROWS_AS(SortedSample({1.0, 2.0, INFINITY}), DomainError);
  const auto s = SortedSample::from_unsorted({3.0, 1.0, 2.0, 5.0});
  CHECK(s.order_stat(1) == 1.0);
  CHECK(s.top(1) == 5.0);
  CHECK(s.top(2) == 3.0);
}

TEST_CASE("variant names round-trip") {
  for (auto v : kAllVariants) CHECK(parse_variant(to_string(v)) == v);
  CHECK(parse_variant("v2") == EstimatorVariant::V2);
  CHECK(parse_variant("3") == EstimatorVariant::V3);
  CHECK_FALSE(parse_variant("V4").has_value());
  CHECK_FALSE(parse_variant("").has_value());
}

TEST_CASE("t_n examples") {
  CHECK(t_n(EstimatorVariant::V3, 500, 50) == doctest::Approx(0.434294).epsilon(1e-6));
  CHECK(t_n(EstimatorVariant::V3, 500, 50) == doctest::Approx(1.0 / std::log(10.0)).epsilon(1e-15));
  CHECK(std::abs(t_n(EstimatorVariant::V1, 500, 50) - mu0_oracle(std::log(10.0))) < 1e-8);
  CHECK(std::abs(t_n(EstimatorVariant::V1, 500, 50) - k_rho_moment(std::log(10.0), 0.0, 1)) < 1e-8);
}

TEST_CASE("t_n V2 matches the literal sum") {
  for (auto [n, k] : {std::pair<std::int64_t, std::int64_t>{500, 2}, {500, 150}, {10000, 37}}) {
    const double l = std::log(static_cast<double>(n) / static_cast<double>(k));
    double sum = 0.0;
    for (std::int64_t i = 1; i <= k; ++i) {
      sum += std::log(1.0 - std::log(static_cast<double>(i) / static_cast<double>(k)) / l);
    }
    CHECK(t_n(EstimatorVariant::V2, n, k) == doctest::Approx(sum / static_cast<double>(k)).epsilon(1e-13));
  }
}

TEST_CASE("t_n is positive and rejects k out of range") {
  for (auto v : kAllVariants) {
    for (std::int64_t k : {2, 10, 499}) CHECK(t_n(v, 500, k) > 0.0);
    CHECK_THROWS_AS(t_n(v, 500, 1), DomainError);
    CHECK_THROWS_AS(t_n(v, 500, 500), DomainError);
    CHECK_THROWS_AS(t_n(v, 500, 0), DomainError);
  }
}

TEST_CASE("T_n log(n/k) approaches 1 along k = floor(log n)") {
  auto ratio = [](EstimatorVariant v, double n_real) {
    const auto n = static_cast<std::int64_t>(n_real);
    const auto k = static_cast<std::int64_t>(std::floor(std::log(n_real)));
    return t_n(v, n, k) * std::log(static_cast<double>(n) / static_cast<double>(k));
  };
  CHECK(ratio(EstimatorVariant::V3, 1e8) == doctest::Approx(1.0).epsilon(1e-14));
  for (auto v : {EstimatorVariant::V1, EstimatorVariant::V2}) {
    double prev = INFINITY;
    for (double n = 1e2; n <= 1e18; n *= 100.0) {
      const double gap = std::abs(ratio(v, n) - 1.0);
      CHECK(gap < prev);
      prev = gap;
    }
  }
  CHECK(std::abs(ratio(EstimatorVariant::V1, 1e12) - 1.0) < 0.05);
}

TEST_CASE("theta_hat on the explicit five-point sample") {
  const auto s = five_point();
  CHECK(mean_log_excess(s, 2) == doctest::Approx(0.5).epsilon(1e-15));
  const double l = std::log(2.5);
  CHECK(std::abs(theta_hat(s, 2, EstimatorVariant::V3).theta_hat - 0.5 * l) < 1e-12);
  CHECK(theta_hat(s, 2, EstimatorVariant::V3).theta_hat == doctest::Approx(0.458145).epsilon(1e-6));
  const double t2 = 0.5 * std::log(1.0 + std::log(2.0) / l);
  CHECK(std::abs(theta_hat(s, 2, EstimatorVariant::V2).theta_hat - 0.5 / t2) < 1e-12);
  CHECK(std::abs(theta_hat(s, 2, EstimatorVariant::V1).theta_hat - 0.5 / mu0_oracle(l)) < 1e-12);
  // k = 4: log-excesses over log X_{2,5} = 1 are 3, 2, 1, 0.
  CHECK(mean_log_excess(s, 4) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("identical values give theta_hat = 0") {
  const SortedSample s(std::vector<double>(50, 3.7));
  for (auto v : kAllVariants) {
    for (std::int64_t k : {2, 10, 49}) CHECK(theta_hat(s, k, v).theta_hat == 0.0);
  }
}

TEST_CASE("EstimatePoint carries t_n and a_n") {
  const auto s = sample(WeibullTailModel::weibull(2.0, 1.0), 300, 7);
  for (auto v : kAllVariants) {
    const auto e = theta_hat(s, 40, v);
    CHECK(e.k == 40);
    CHECK(e.t_n == t_n(v, 300, 40));
    CHECK(e.a_n == a_n_exact(v, 300, 40));
    CHECK(e.theta_hat * e.t_n == doctest::Approx(mean_log_excess(s, 40)).epsilon(1e-14));
  }
  CHECK(theta_hat(s, 40, EstimatorVariant::V1).a_n == 0.0);
  CHECK_THROWS_AS(theta_hat(s, 1, EstimatorVariant::V1), DomainError);
  CHECK_THROWS_AS(theta_hat(s, 300, EstimatorVariant::V1), DomainError);
}

TEST_CASE("V1 and V2 differ by at most theta_hat(V1) |a_n(V2)|") {
  const auto s = sample(WeibullTailModel::gamma(1.5, 1.0), 500, 11);
  const double th1 = theta_hat(s, 25, EstimatorVariant::V1).theta_hat;
  const double th2 = theta_hat(s, 25, EstimatorVariant::V2).theta_hat;
  const double a2 = a_n_exact(EstimatorVariant::V2, 500, 25);
  CHECK(std::abs(th1 - th2) <= th1 * std::abs(a2) * (1.0 + 1e-12));
}

TEST_CASE("a_n_exact examples") {
  for (std::int64_t n : {10, 500, 1000000}) {
    for (std::int64_t k : {2, 5, 9}) CHECK(a_n_exact(EstimatorVariant::V1, n, k) == 0.0);
  }
  const double a2 = a_n_exact(EstimatorVariant::V2, 1000000, 100);
  CHECK(std::abs(a2 / (std::log(100.0) / 200.0) - 1.0) <= 0.25);
}

TEST_CASE("scale equivariance of theta_hat is exact") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto v = random_positive(gen, 60);
    const auto s = SortedSample::from_unsorted(v);
    for (auto& x : v) x *= 8.0;  // power of two keeps the scaling exact in floating point
    const auto scaled = SortedSample::from_unsorted(v);
    for (auto var : kAllVariants) {
      for (std::int64_t k : {2, 17, 59}) {
        CHECK(theta_hat(s, k, var).theta_hat == doctest::Approx(theta_hat(scaled, k, var).theta_hat).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("scale equivariance for a generic factor") {
  std::mt19937_64 gen(4);
  auto v = random_positive(gen, 80);
  const auto s = SortedSample::from_unsorted(v);
  for (auto& x : v) x *= 3.14159;
  const auto scaled = SortedSample::from_unsorted(v);
  for (auto var : kAllVariants) {
    CHECK(theta_hat(s, 30, var).theta_hat == doctest::Approx(theta_hat(scaled, 30, var).theta_hat).epsilon(1e-12));
  }
}

TEST_CASE("common numerator across variants") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = SortedSample::from_unsorted(random_positive(gen, 100));
    for (std::int64_t k = 2; k < 100; k += 7) {
      const double m = mean_log_excess(s, k);
      for (auto var : kAllVariants) {
        const auto e = theta_hat(s, k, var);
        CHECK(e.theta_hat * e.t_n == doctest::Approx(m).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("theta_hat is non-negative and monotone in the sample maximum") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 30; ++trial) {
    auto v = random_positive(gen, 40);
    std::sort(v.begin(), v.end());
    const SortedSample s(v);
    auto bigger = v;
    bigger.back() *= 1.0 + std::uniform_real_distribution<double>(0.0, 5.0)(gen);
    const SortedSample t(bigger);
    for (auto var : kAllVariants) {
      for (std::int64_t k = 2; k < 40; ++k) {
        const double a = theta_hat(s, k, var).theta_hat;
        CHECK(a >= 0.0);
        CHECK(theta_hat(t, k, var).theta_hat >= a);
      }
    }
  }
}

TEST_CASE("ties are allowed in the sample") {
  const SortedSample s({1.0, 2.0, 2.0, 2.0, 5.0});
  CHECK(mean_log_excess(s, 3) == doctest::Approx(std::log(2.5) / 3.0).epsilon(1e-15));
}

TEST_CASE("quantile_hat regime checks") {
  const auto s = five_point();
  CHECK_THROWS_AS(quantile_hat(s, 2, 0.2, EstimatorVariant::V1), DomainError);
  CHECK_THROWS_AS(quantile_hat(s, 2, 0.5, EstimatorVariant::V1), DomainError);
  CHECK_THROWS_AS(quantile_hat(s, 2, 0.0, EstimatorVariant::V1), DomainError);
  CHECK_THROWS_AS(quantile_hat(s, 2, -1e-3, EstimatorVariant::V1), DomainError);
  CHECK_NOTHROW(quantile_hat(s, 2, 0.199, EstimatorVariant::V1));
  const double x = quantile_hat(s, 2, 1e-3, EstimatorVariant::V3);
  const double tau = std::log(1e3) / std::log(2.5);
  CHECK(x == doctest::Approx(s.top(2) * std::pow(tau, 0.5 * std::log(2.5))).epsilon(1e-13));
  CHECK(x >= s.top(2));
}

TEST_CASE("quantile_hat at tau = 1 returns the anchor order statistic") {
  const auto s = sample(WeibullTailModel::gamma(0.5, 1.0), 200, 9);
  for (auto var : kAllVariants) {
    for (std::int64_t k : {5, 20, 100}) {
      const double p = static_cast<double>(k) / 200.0;
      CHECK(quantile_hat_unchecked(s, k, p, var) == doctest::Approx(s.top(static_cast<std::size_t>(k))).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(quantile_hat_unchecked(s, 5, 1.0, EstimatorVariant::V1), DomainError);
}

TEST_CASE("quantile_hat with theta_hat = 0 returns the anchor") {
  const SortedSample s(std::vector<double>(20, 2.0));
  CHECK(quantile_hat(s, 5, 1e-6, EstimatorVariant::V2) == 2.0);
}

TEST_CASE("quantile_hat on W(1,1) is within 25% of log(1e4) in median") {
  const auto model = WeibullTailModel::weibull(1.0, 1.0);
  std::vector<double> est;
  for (std::uint64_t r = 0; r < 200; ++r) {
    CounterRng rng = CounterRng::substream(42, r);
    const auto s = sample(model, 500, rng);
    est.push_back(quantile_hat(s, 50, 1e-4, EstimatorVariant::V1));
  }
  std::nth_element(est.begin(), est.begin() + 100, est.end());
  CHECK(std::abs(est[100] / std::log(1e4) - 1.0) < 0.25);
}

TEST_CASE("optimal_k examples") {
  const auto n = static_cast<std::int64_t>(std::round(std::exp(10.0)));
  CHECK(optimal_k(n, 1.0, [](double x) { return 1.0 / x; }) == 100);

  const double ln = std::log(500.0);
  const double expected = std::round(std::pow(ln / (0.5 * std::log(ln)), 2));
  CHECK(optimal_k(500, 1.0, [](double x) { return -std::log(x) / (2.0 * x); }) ==
        static_cast<std::int64_t>(expected));

  CHECK_THROWS_AS(optimal_k(500, 1.0, WeibullTailModel::weibull(2.5, 2.5)), UndefinedRateError);
  CHECK_THROWS_AS(optimal_k(500, 0.0, [](double x) { return 1.0 / x; }), DomainError);
  CHECK(optimal_k(500, 1e6, [](double x) { return 1.0 / x; }) == 499);
  CHECK(optimal_k(500, 1e-6, [](double x) { return 1.0 / x; }) == 2);
  const std::int64_t k_exact = optimal_k(500, 1.0, WeibullTailModel::gamma(1.5, 1.0));
  const double b = bias_b(WeibullTailModel::gamma(1.5, 1.0), ln);
  CHECK(k_exact == static_cast<std::int64_t>(std::round(1.0 / (b * b))));
}

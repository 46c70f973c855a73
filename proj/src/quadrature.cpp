#include "wtail/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "wtail/errors.hpp"

namespace wtail {
namespace {

constexpr int kMaxNewtonIterations = 100;
constexpr double kNodeTolerance = 1e-14;
// The three-term recurrence leaves ~1e-13 relative noise in the Laguerre nodes.
constexpr double kLaguerreNodeTolerance = 1e-12;

// Newton iteration on L_n with the classical asymptotic initial guesses.
GaussRule build_laguerre(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const auto nd = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * nd);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * nd);
    } else {
      const double ai = static_cast<double>(i - 1);
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
    }
    double p1 = 0.0, p2 = 0.0, pp = 0.0;
    int it = 0;
    for (; it < kMaxNewtonIterations; ++it) {
      p1 = 1.0;
      p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const auto jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0 - z) * p2 - (jd - 1.0) * p3) / jd;
      }
      pp = (nd * p1 - nd * p2) / z;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kLaguerreNodeTolerance * std::abs(z)) break;
    }
    if (it == kMaxNewtonIterations || !std::isfinite(z)) {
      throw NumericalError("Gauss-Laguerre node " + std::to_string(i) +
                           " did not converge for n=" + std::to_string(n));
    }
    rule.nodes[i] = z;
    rule.weights[i] = -1.0 / (pp * nd * p2);
  }
  return rule;
}

GaussRule build_legendre(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const auto nd = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double pp = 0.0;
    int it = 0;
    for (; it < kMaxNewtonIterations; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const auto jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
      }
      pp = nd * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kNodeTolerance) break;
    }
    if (it == kMaxNewtonIterations) {
      throw NumericalError("Gauss-Legendre node did not converge for n=" + std::to_string(n));
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

class RuleCache {
 public:
  explicit RuleCache(GaussRule (*build)(std::size_t)) : build_(build) {}

  const GaussRule& get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = rules_.find(n);
    if (it == rules_.end()) {
      it = rules_.emplace(n, std::make_unique<const GaussRule>(build_(n))).first;
    }
    return *it->second;
  }

 private:
  GaussRule (*build_)(std::size_t);
  std::mutex mutex_;
  std::map<std::size_t, std::unique_ptr<const GaussRule>> rules_;
};

}  // namespace

const GaussRule& gauss_laguerre(std::size_t n) {
  if (n < 1) throw DomainError("gauss_laguerre: need at least one node");
  static RuleCache cache(build_laguerre);
  return cache.get(n);
}

const GaussRule& gauss_legendre(std::size_t n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  static RuleCache cache(build_legendre);
  return cache.get(n);
}

}  // namespace wtail

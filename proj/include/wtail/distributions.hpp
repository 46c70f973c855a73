#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wtail/rng.hpp"
#include "wtail/sample.hpp"

namespace wtail {

enum class BiasSign { UltimatelyNonneg, UltimatelyNonpos, Zero };

std::string_view to_string(BiasSign sign) noexcept;

// Second-order parameter sentinel for distributions whose bias vanishes.
inline constexpr double kRhoMinusInfinity = -std::numeric_limits<double>::infinity();

// Distribution on (0, inf) described through log-scale functions so that tail
// probabilities far below DBL_MIN remain usable.
class TailFamily {
 public:
  virtual ~TailFamily() = default;

  virtual double log_pdf(double y) const = 0;
  virtual double log_cdf(double y) const = 0;
  virtual double log_sf(double y) const = 0;
  // Starting point for numerical inversion.
  virtual double typical_scale() const = 0;

  // F^{-1}(u); defaults to numerical inversion of log_cdf / log_sf.
  virtual double quantile(double u) const;
  // F^{-1}(1 - e^{log_q}) for log_q < 0; defaults to inversion of log_sf.
  virtual double upper_quantile(double log_q) const;
  // Exact bias value when known analytically (the b = 0 Weibull case).
  virtual std::optional<double> closed_form_bias(double /*x*/) const { return std::nullopt; }
};

// A Weibull tail-distribution together with its tail coefficient theta,
// second-order parameter rho and the ultimate sign of its bias function.
class WeibullTailModel {
 public:
  WeibullTailModel(std::string name, std::vector<double> params, double theta, double rho,
                   BiasSign bias_sign, std::shared_ptr<const TailFamily> family);

  // |N(mu, sigma^2)|.
  static WeibullTailModel absolute_normal(double mu, double sigma);
  // Gamma with density rate^a / Gamma(a) x^{a-1} exp(-rate x).
  static WeibullTailModel gamma(double shape, double rate);
  // Weibull with survival exp(-(x/scale)^shape).
  static WeibullTailModel weibull(double shape, double scale);

  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& params() const noexcept { return params_; }
  double theta() const noexcept { return theta_; }
  double rho() const noexcept { return rho_; }
  BiasSign bias_sign() const noexcept { return bias_sign_; }
  const TailFamily& family() const noexcept { return *family_; }

  // "gamma:1.5,1": round-trips through parse_model_spec.
  std::string spec() const;
  // File-name friendly form, e.g. "gamma_1.5_1".
  std::string stem() const;

 private:
  std::string name_;
  std::vector<double> params_;
  double theta_;
  double rho_;
  BiasSign bias_sign_;
  std::shared_ptr<const TailFamily> family_;
};

// Parses "absnormal:mu,sigma", "gamma:shape,rate" or "weibull:shape,scale".
WeibullTailModel parse_model_spec(std::string_view spec);

// F^{-1}(u) for u in (0, 1).
double quantile(const WeibullTailModel& model, double u);
// F^{-1}(1 - e^{log_q}) computed without forming 1 - e^{log_q}.
double upper_quantile(const WeibullTailModel& model, double log_q);
double density(const WeibullTailModel& model, double y);
double cdf(const WeibullTailModel& model, double y);

// n inverse-transform draws from CounterRng(seed), sorted ascending.
SortedSample sample(const WeibullTailModel& model, std::size_t n, std::uint64_t seed);
SortedSample sample(const WeibullTailModel& model, std::size_t n, CounterRng& rng);

// b(x) = x e^{-x} / (F^{-1}(1-e^{-x}) f(F^{-1}(1-e^{-x}))) - theta.
// Evaluated as x / (y h(y)) - theta with y the upper quantile and h the hazard.
double bias_b(const WeibullTailModel& model, double x);

// Gamma(0.5,1), Gamma(1.5,1), |N(0,1)|, W(2.5,2.5), W(0.4,0.4).
std::vector<WeibullTailModel> catalog();

}  // namespace wtail

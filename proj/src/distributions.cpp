#include "wtail/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wtail/errors.hpp"
#include "wtail/format.hpp"

namespace wtail {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 500;
// Newton on s = log y stops once steps fall below this, i.e. ~1e-13 relative in y.
constexpr double kLogTolerance = 1e-13;
// Beyond this x, x e^{-x} has no significant digits left relative to its parts.
constexpr double kBiasSaturation = 0x1.0p52;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log P(Z > z), Z standard normal; asymptotic series once erfc would underflow.
double log_normal_sf(double z) {
  if (z < 35.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  const double z2 = z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m <= 8; ++m) {
    term *= -(2.0 * m - 1.0) / z2;
    sum += term;
  }
  return -0.5 * z2 - std::log(z) - kLogSqrt2Pi + std::log(sum);
}

// log of the regularized lower incomplete gamma P(a, z) by its series; z < a + 1.
double log_gamma_p_series(double a, double z, double lgamma_a) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    del *= z / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) {
      return std::log(sum) - z + a * std::log(z) - lgamma_a;
    }
  }
  throw NumericalError("incomplete gamma series did not converge at z=" + std::to_string(z));
}

// log of the regularized upper incomplete gamma Q(a, z) by Lentz's continued
// fraction; z >= a + 1. Never underflows.
double log_gamma_q_fraction(double a, double z, double lgamma_a) {
  double b = z + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return -z + a * std::log(z) - lgamma_a + std::log(h);
  }
  throw NumericalError("incomplete gamma fraction did not converge at z=" + std::to_string(z));
}

// Solves log F(y) = target (upper = false) or log S(y) = target (upper = true)
// by Newton on s = log y inside an expanding bracket, bisecting whenever a
// Newton step leaves the bracket.
double invert(const TailFamily& family, double target, bool upper) {
  // Increasing in s; root at the requested quantile.
  const auto residual = [&](double s) {
    const double y = std::exp(s);
    return upper ? target - family.log_sf(y) : family.log_cdf(y) - target;
  };
  constexpr double s_min = -740.0;
  constexpr double s_max = 709.0;

  double s = std::log(family.typical_scale());
  double lo = s, hi = s;
  double step = 1.0;
  if (residual(s) < 0.0) {
    do {
      lo = hi;
      hi = std::min(s + step, s_max);
      step *= 2.0;
      if (lo >= s_max) throw NumericalError("quantile inversion: upper bracket overflow");
    } while (residual(hi) < 0.0);
  } else {
    do {
      hi = lo;
      lo = std::max(s - step, s_min);
      step *= 2.0;
      if (hi <= s_min) throw NumericalError("quantile inversion: lower bracket underflow");
    } while (residual(lo) > 0.0);
  }

  s = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double r = residual(s);
    if (r == 0.0) return std::exp(s);
    if (r < 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    const double y = std::exp(s);
    const double log_mass = upper ? family.log_sf(y) : family.log_cdf(y);
    const double slope = std::exp(s + family.log_pdf(y) - log_mass);
    double next = s - r / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= kLogTolerance || hi - lo <= kLogTolerance) return std::exp(next);
    s = next;
  }
  throw NumericalError("quantile inversion did not converge for target " + std::to_string(target));
}

class AbsoluteNormalFamily final : public TailFamily {
 public:
  AbsoluteNormalFamily(double mu, double sigma) : mu_(mu), sigma_(sigma) {}

  double log_pdf(double y) const override {
    const double z1 = (y - mu_) / sigma_;
    const double z2 = (y + mu_) / sigma_;
    return log_add_exp(-0.5 * z1 * z1, -0.5 * z2 * z2) - kLogSqrt2Pi - std::log(sigma_);
  }

  double log_sf(double y) const override {
    if (y <= 0.0) return 0.0;
    return log_add_exp(log_normal_sf((y - mu_) / sigma_), log_normal_sf((y + mu_) / sigma_));
  }

  double log_cdf(double y) const override {
    if (y <= 0.0) return -std::numeric_limits<double>::infinity();
    const double sf = std::exp(log_sf(y));
    if (sf < 0.5) return std::log1p(-sf);
    // P(-y < X < y) without the 1 - S cancellation near the origin.
    const double direct = 0.5 * (std::erf((y - mu_) / (sigma_ * std::numbers::sqrt2)) +
                                 std::erf((y + mu_) / (sigma_ * std::numbers::sqrt2)));
    return std::log(direct);
  }

  double typical_scale() const override { return sigma_ + std::abs(mu_); }

 private:
  double mu_;
  double sigma_;
};

class GammaFamily final : public TailFamily {
 public:
  GammaFamily(double shape, double rate)
      : shape_(shape), rate_(rate), lgamma_shape_(std::lgamma(shape)) {}

  double log_pdf(double y) const override {
    return shape_ * std::log(rate_) - lgamma_shape_ + (shape_ - 1.0) * std::log(y) - rate_ * y;
  }

  double log_cdf(double y) const override {
    if (y <= 0.0) return -std::numeric_limits<double>::infinity();
    const double z = rate_ * y;
    if (z < shape_ + 1.0) return log_gamma_p_series(shape_, z, lgamma_shape_);
    return std::log1p(-std::exp(log_gamma_q_fraction(shape_, z, lgamma_shape_)));
  }

  double log_sf(double y) const override {
    if (y <= 0.0) return 0.0;
    const double z = rate_ * y;
    if (z >= shape_ + 1.0) return log_gamma_q_fraction(shape_, z, lgamma_shape_);
    return std::log1p(-std::exp(log_gamma_p_series(shape_, z, lgamma_shape_)));
  }

  double typical_scale() const override { return shape_ / rate_; }

  // Gamma(1, rate) is exponential, a Weibull law with b = 0.
  std::optional<double> closed_form_bias(double) const override {
    if (shape_ == 1.0) return 0.0;
    return std::nullopt;
  }

 private:
  double shape_;
  double rate_;
  double lgamma_shape_;
};

class WeibullFamily final : public TailFamily {
 public:
  WeibullFamily(double shape, double scale) : shape_(shape), scale_(scale) {}

  double log_pdf(double y) const override {
    const double r = y / scale_;
    return std::log(shape_ / scale_) + (shape_ - 1.0) * std::log(r) - std::pow(r, shape_);
  }
  double log_cdf(double y) const override {
    if (y <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(-std::expm1(-std::pow(y / scale_, shape_)));
  }
  double log_sf(double y) const override {
    if (y <= 0.0) return 0.0;
    return -std::pow(y / scale_, shape_);
  }
  double typical_scale() const override { return scale_; }

  double quantile(double u) const override {
    return scale_ * std::pow(-std::log1p(-u), 1.0 / shape_);
  }
  double upper_quantile(double log_q) const override {
    return scale_ * std::pow(-log_q, 1.0 / shape_);
  }
  // x / (y h(y)) = x / (shape (y/scale)^shape) = 1/shape = theta exactly.
  std::optional<double> closed_form_bias(double) const override { return 0.0; }

 private:
  double shape_;
  double scale_;
};

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be finite and > 0, got " + format_double(value));
  }
}

}  // namespace

std::string_view to_string(BiasSign sign) noexcept {
  switch (sign) {
    case BiasSign::UltimatelyNonneg: return "ultimately_nonneg";
    case BiasSign::UltimatelyNonpos: return "ultimately_nonpos";
    case BiasSign::Zero: return "zero";
  }
  return "?";
}

double TailFamily::quantile(double u) const {
  if (u < 0.5) return invert(*this, std::log(u), false);
  return invert(*this, std::log1p(-u), true);
}

double TailFamily::upper_quantile(double log_q) const { return invert(*this, log_q, true); }

WeibullTailModel::WeibullTailModel(std::string name, std::vector<double> params, double theta,
                                   double rho, BiasSign bias_sign,
                                   std::shared_ptr<const TailFamily> family)
    : name_(std::move(name)),
      params_(std::move(params)),
      theta_(theta),
      rho_(rho),
      bias_sign_(bias_sign),
      family_(std::move(family)) {
  require_positive(theta_, "theta");
  if (!(rho_ <= 0.0)) throw DomainError("rho must be <= 0");
  if (!family_) throw DomainError("model needs a distribution family");
}

WeibullTailModel WeibullTailModel::absolute_normal(double mu, double sigma) {
  require_positive(sigma, "absnormal sigma");
  if (!std::isfinite(mu)) throw DomainError("absnormal mu must be finite");
  return {"absnormal", {mu, sigma}, 0.5, -1.0, BiasSign::UltimatelyNonneg,
          std::make_shared<AbsoluteNormalFamily>(mu, sigma)};
}

WeibullTailModel WeibullTailModel::gamma(double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  // b(x) = (1 - a) log(x)/x + O(1/x).
  BiasSign sign = BiasSign::Zero;
  double rho = kRhoMinusInfinity;
  if (shape != 1.0) {
    sign = shape < 1.0 ? BiasSign::UltimatelyNonneg : BiasSign::UltimatelyNonpos;
    rho = -1.0;
  }
  return {"gamma", {shape, rate}, 1.0, rho, sign, std::make_shared<GammaFamily>(shape, rate)};
}

WeibullTailModel WeibullTailModel::weibull(double shape, double scale) {
  require_positive(shape, "weibull shape");
  require_positive(scale, "weibull scale");
  return {"weibull", {shape, scale}, 1.0 / shape, kRhoMinusInfinity, BiasSign::Zero,
          std::make_shared<WeibullFamily>(shape, scale)};
}

std::string WeibullTailModel::spec() const {
  std::string out = name_ + ":";
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(params_[i]);
  }
  return out;
}

std::string WeibullTailModel::stem() const {
  std::string out = spec();
  std::replace(out.begin(), out.end(), ':', '_');
  std::replace(out.begin(), out.end(), ',', '_');
  return out;
}

WeibullTailModel parse_model_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw DomainError("model spec must look like name:param,param, got '" + std::string(spec) + "'");
  }
  const std::string_view name = spec.substr(0, colon);
  std::vector<double> params;
  std::string_view rest = spec.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    const auto value = parse_double(rest.substr(0, comma));
    if (!value) throw DomainError("bad numeric parameter in model spec '" + std::string(spec) + "'");
    params.push_back(*value);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (params.size() != 2) {
    throw DomainError("model '" + std::string(name) + "' takes exactly 2 parameters");
  }
  if (name == "absnormal") return WeibullTailModel::absolute_normal(params[0], params[1]);
  if (name == "gamma") return WeibullTailModel::gamma(params[0], params[1]);
  if (name == "weibull") return WeibullTailModel::weibull(params[0], params[1]);
  throw DomainError("unknown model '" + std::string(name) + "' (expected absnormal, gamma, weibull)");
}

double quantile(const WeibullTailModel& model, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("quantile: u must lie in (0, 1), got " + format_double(u));
  }
  return model.family().quantile(u);
}

double upper_quantile(const WeibullTailModel& model, double log_q) {
  if (!(log_q < 0.0) || std::isnan(log_q)) {
    throw DomainError("upper_quantile: log tail probability must be < 0, got " +
                      format_double(log_q));
  }
  if (!std::isfinite(log_q)) throw SaturationError("upper_quantile: tail probability is zero");
  return model.family().upper_quantile(log_q);
}

double density(const WeibullTailModel& model, double y) {
  if (!(y > 0.0)) return 0.0;
  return std::exp(model.family().log_pdf(y));
}

double cdf(const WeibullTailModel& model, double y) {
  if (!(y > 0.0)) return 0.0;
  return std::exp(model.family().log_cdf(y));
}

SortedSample sample(const WeibullTailModel& model, std::size_t n, CounterRng& rng) {
  if (n < SortedSample::kMinSize) throw DomainError("need at least 3 observations");
  std::vector<double> draws(n);
  for (auto& d : draws) d = model.family().quantile(rng.uniform_open());
  std::sort(draws.begin(), draws.end());
  return SortedSample(std::move(draws));
}

SortedSample sample(const WeibullTailModel& model, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  return sample(model, n, rng);
}

double bias_b(const WeibullTailModel& model, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("bias_b: x must be finite and > 0, got " + format_double(x));
  }
  if (x >= kBiasSaturation) {
    throw SaturationError("bias_b: F^{-1}(1 - e^{-x}) is saturated at x=" + format_double(x));
  }
  const TailFamily& family = model.family();
  if (auto exact = family.closed_form_bias(x)) return *exact;
  const double y = family.upper_quantile(-x);
  const double log_hazard = family.log_pdf(y) - family.log_sf(y);
  if (!(y > 0.0) || !std::isfinite(y) || !std::isfinite(log_hazard)) {
    throw SaturationError("bias_b: tail quantile not resolvable at x=" + format_double(x));
  }
  return x * std::exp(-std::log(y) - log_hazard) - model.theta();
}

std::vector<WeibullTailModel> catalog() {
  return {WeibullTailModel::gamma(0.5, 1.0), WeibullTailModel::gamma(1.5, 1.0),
          WeibullTailModel::absolute_normal(0.0, 1.0), WeibullTailModel::weibull(2.5, 2.5),
          WeibullTailModel::weibull(0.4, 0.4)};
}

}  // namespace wtail

#include "wtail/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wtail/errors.hpp"
#include "wtail/quadrature.hpp"

namespace wtail {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSeriesTerms = 200;
// Largest node count reached by error-driven refinement.
constexpr std::size_t kMaxRefinedNodes = 256;
// Below this t the e^{-x} integrand is split so its log singularity at x = -t
// stays away from the Laguerre nodes.
constexpr double kSplitThreshold = 1.0;
constexpr double kSplitPoint = 1.0;

void require_positive_t(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError(std::string(who) + ": t must be finite and > 0, got " + std::to_string(t));
  }
}

void require_rho(double rho, const char* who) {
  if (!(rho <= 0.0)) {
    throw DomainError(std::string(who) + ": rho must be <= 0, got " + std::to_string(rho));
  }
}

// K_rho(e^s), used when the argument is naturally available in log form.
double k_rho_log(double s, double rho) {
  if (std::abs(rho) < kRhoZeroThreshold) return s;
  return std::expm1(rho * s) / rho;
}

// E_1 by its power series; accurate for 0 < t <= 1.
double e1_series(double t) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    term *= -t / k;
    const double contrib = -term / k;
    sum += contrib;
    if (std::abs(contrib) < kEps * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(t) + sum;
}

// e^t E_1(t) by the Lentz continued fraction; accurate for t > 1.
double scaled_e1_fraction(double t) {
  constexpr double tiny = 1e-300;
  double b = t + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxSeriesTerms; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("exp_integral_e1: continued fraction did not converge at t=" +
                       std::to_string(t));
}

// \int_0^\infty K_rho^q(1 + x/t) e^{-x} dx with a fixed node count.
double moment_rule(double t, double rho, int q, std::size_t nodes) {
  const auto integrand = [&](double x) { return std::pow(k_rho_log(std::log1p(x / t), rho), q); };
  const GaussRule& laguerre = gauss_laguerre(nodes);
  if (t >= kSplitThreshold) {
    double sum = 0.0;
    for (std::size_t i = 0; i < laguerre.size(); ++i) {
      sum += laguerre.weights[i] * integrand(laguerre.nodes[i]);
    }
    return sum;
  }
  // Head [0, c] in s = log(1 + x/t): the integrand K_rho(e^s)^q e^{-x} t e^s is entire.
  const double s_max = std::log1p(kSplitPoint / t);
  const GaussRule& legendre = gauss_legendre(nodes);
  double head = 0.0;
  for (std::size_t i = 0; i < legendre.size(); ++i) {
    const double s = 0.5 * s_max * (legendre.nodes[i] + 1.0);
    const double x = t * std::expm1(s);
    head += legendre.weights[i] * std::pow(k_rho_log(s, rho), q) * std::exp(s - x);
  }
  head *= 0.5 * s_max * t;
  double tail = 0.0;
  for (std::size_t i = 0; i < laguerre.size(); ++i) {
    tail += laguerre.weights[i] * integrand(kSplitPoint + laguerre.nodes[i]);
  }
  return head + std::exp(-kSplitPoint) * tail;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (node_count < 2) throw DomainError("QuadratureConfig: node_count must be >= 2");
  if (!(abs_tol > 0.0)) throw DomainError("QuadratureConfig: abs_tol must be > 0");
}

double k_rho(double lambda, double rho) {
  if (!(lambda >= 1.0)) {
    throw DomainError("k_rho: lambda must be >= 1, got " + std::to_string(lambda));
  }
  require_rho(rho, "k_rho");
  return k_rho_log(std::log(lambda), rho);
}

double exp_integral_e1(double t) {
  require_positive_t(t, "exp_integral_e1");
  if (t <= 1.0) return e1_series(t);
  return scaled_e1_fraction(t) * std::exp(-t);
}

double scaled_exp_integral_e1(double t) {
  require_positive_t(t, "scaled_exp_integral_e1");
  if (t <= 1.0) return std::exp(t) * e1_series(t);
  return scaled_e1_fraction(t);
}

double k_rho_moment(double t, double rho, int q, const QuadratureConfig& cfg) {
  require_positive_t(t, "k_rho_moment");
  require_rho(rho, "k_rho_moment");
  if (q < 1) throw DomainError("k_rho_moment: q must be >= 1");
  cfg.validate();
  std::size_t nodes = cfg.node_count;
  double coarse = moment_rule(t, rho, q, std::max<std::size_t>(nodes / 2, 1));
  const std::size_t limit = std::max(nodes, kMaxRefinedNodes);
  for (;;) {
    const double fine = moment_rule(t, rho, q, nodes);
    if (std::abs(fine - coarse) <= cfg.abs_tol) return fine;
    if (nodes * 2 > limit) {
      throw NumericalError("k_rho_moment: no convergence to abs_tol=" + std::to_string(cfg.abs_tol) +
                           " at t=" + std::to_string(t) + ", rho=" + std::to_string(rho));
    }
    coarse = fine;
    nodes *= 2;
  }
}

double mu_rho(double t, double rho, const QuadratureConfig& cfg) {
  require_positive_t(t, "mu_rho");
  require_rho(rho, "mu_rho");
  if (std::abs(rho) < kRhoZeroThreshold) return scaled_exp_integral_e1(t);
  return k_rho_moment(t, rho, 1, cfg);
}

double sigma_rho_sq(double t, double rho, const QuadratureConfig& cfg) {
  const double mu = mu_rho(t, rho, cfg);
  const double second = k_rho_moment(t, rho, 2, cfg);
  const double var = second - mu * mu;
  if (!(var > 0.0)) {
    throw NumericalError("sigma_rho_sq: non-positive variance " + std::to_string(var) +
                         " at t=" + std::to_string(t) + ", rho=" + std::to_string(rho));
  }
  return var;
}

}  // namespace wtail

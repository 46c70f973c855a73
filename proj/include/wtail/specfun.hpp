#pragma once

#include <cstddef>

namespace wtail {

// Controls the e^{-x}-weighted integrals behind mu_rho and sigma_rho_sq.
struct QuadratureConfig {
  std::size_t node_count = 64;
  double abs_tol = 1e-10;

  // Throws DomainError unless node_count >= 2 and abs_tol > 0.
  void validate() const;
};

// |rho| below this is treated as rho = 0.
inline constexpr double kRhoZeroThreshold = 1e-12;

// K_rho(lambda) = \int_1^lambda u^{rho-1} du for lambda >= 1, rho <= 0.
double k_rho(double lambda, double rho);

// Exponential integral E_1(t) = \int_1^\infty e^{-tu}/u du, t > 0.
// Underflows to 0 for t beyond ~745.
double exp_integral_e1(double t);

// e^t E_1(t), evaluated without forming e^t separately. Finite for every t > 0.
double scaled_exp_integral_e1(double t);

// \int_0^\infty K_rho^q(1 + x/t) e^{-x} dx by quadrature, q >= 1.
double k_rho_moment(double t, double rho, int q, const QuadratureConfig& cfg = {});

// mu_rho(t) = \int_0^\infty K_rho(1 + x/t) e^{-x} dx.
// Uses the closed form e^t E_1(t) at rho = 0 and quadrature otherwise.
double mu_rho(double t, double rho, const QuadratureConfig& cfg = {});

// sigma_rho^2(t): second moment of K_rho(1 + F/t), F ~ Exp(1), minus mu_rho(t)^2.
double sigma_rho_sq(double t, double rho, const QuadratureConfig& cfg = {});

}  // namespace wtail

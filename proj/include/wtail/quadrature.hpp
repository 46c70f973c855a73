#pragma once

#include <cstddef>
#include <vector>

namespace wtail {

// Nodes and weights of an n-point Gauss rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

// Gauss–Laguerre rule for \int_0^\infty f(x) e^{-x} dx (generalized index 0).
// Rules are computed once per node count and cached; the returned reference
// stays valid for the lifetime of the program. Thread-safe.
const GaussRule& gauss_laguerre(std::size_t n);

// Gauss–Legendre rule on [-1, 1]. Cached like gauss_laguerre.
const GaussRule& gauss_legendre(std::size_t n);

}  // namespace wtail

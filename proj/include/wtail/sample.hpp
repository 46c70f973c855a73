#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wtail {

// Strictly positive observations in ascending order, n >= 3. Immutable.
class SortedSample {
 public:
  static constexpr std::size_t kMinSize = 3;

  // Validates order, positivity, finiteness and size; throws DomainError.
  explicit SortedSample(std::vector<double> ascending);

  static SortedSample from_unsorted(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  // X_{i,n}, 1-based.
  double order_stat(std::size_t i) const { return values_.at(i - 1); }
  // X_{n-i+1,n}: the i-th largest observation, 1-based.
  double top(std::size_t i) const { return values_.at(values_.size() - i); }

 private:
  std::vector<double> values_;
};

}  // namespace wtail

#include "wtail/sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wtail/errors.hpp"

namespace wtail {

SortedSample::SortedSample(std::vector<double> ascending) : values_(std::move(ascending)) {
  if (values_.size() < kMinSize) {
    throw DomainError("need at least 3 observations, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("observation " + std::to_string(i + 1) +
                        " must be finite and > 0, got " + std::to_string(v));
    }
    if (i > 0 && v < values_[i - 1]) {
      throw DomainError("observations are not in ascending order at index " +
                        std::to_string(i + 1));
    }
  }
}

SortedSample SortedSample::from_unsorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return SortedSample(std::move(values));
}

}  // namespace wtail

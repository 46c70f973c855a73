#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wtail/amse.hpp"
#include "wtail/distributions.hpp"
#include "wtail/estimators.hpp"

namespace wtail {

// Seed used whenever none is given; all documented reproductions use it.
inline constexpr std::uint64_t kDefaultSeed = 42;

struct ExperimentPlan {
  WeibullTailModel model;
  std::int64_t n = 500;
  std::int64_t replications = 200;
  KRange k_range{2, 150};
  std::vector<EstimatorVariant> variants{kAllVariants.begin(), kAllVariants.end()};
  std::uint64_t seed = kDefaultSeed;

  explicit ExperimentPlan(WeibullTailModel m) : model(std::move(m)) {}

  // Throws DomainError unless N >= 2, the k range fits inside [2, n-1] and
  // at least one variant is requested without duplicates.
  void validate() const;
};

// Execution knobs that must not change results.
struct RunOptions {
  // 0 picks std::thread::hardware_concurrency().
  unsigned workers = 1;
};

struct CurvePoint {
  std::int64_t k = 0;
  double value = 0.0;
};

struct CurveSeries {
  std::string label;
  std::vector<CurvePoint> points;
};

// Per-replication estimates laid out as [replication][variant][k].
class ReplicationTable {
 public:
  ReplicationTable(std::size_t replications, std::vector<EstimatorVariant> variants,
                   KRange k_range);

  std::size_t replications() const noexcept { return replications_; }
  const std::vector<EstimatorVariant>& variants() const noexcept { return variants_; }
  KRange k_range() const noexcept { return k_range_; }

  double& at(std::size_t rep, std::size_t variant_index, std::int64_t k);
  double at(std::size_t rep, std::size_t variant_index, std::int64_t k) const;

 private:
  std::size_t index(std::size_t rep, std::size_t variant_index, std::int64_t k) const;

  std::size_t replications_;
  std::vector<EstimatorVariant> variants_;
  KRange k_range_;
  std::vector<double> values_;
};

// theta_hat for every replication, variant and k; replication i draws its
// sample from CounterRng::substream(seed, i) and the sample is shared across
// all k and variants. Aborts with NumericalError on a non-finite estimate.
ReplicationTable simulate_theta(const ExperimentPlan& plan, const RunOptions& options = {});

struct MsePoint {
  std::int64_t k = 0;
  double mean = 0.0;
  double bias_sq = 0.0;   // (mean - theta)^2
  double variance = 0.0;  // (1/N) sum (theta_hat - mean)^2
  double mse = 0.0;       // (1/N) sum (theta_hat - theta)^2
};

struct MseCurve {
  EstimatorVariant variant = EstimatorVariant::V1;
  std::vector<MsePoint> points;
};

std::vector<MseCurve> mse_table(const ReplicationTable& table, double theta);

// One CurveSeries per requested variant, labelled "V1".."V3", value = MSE.
std::vector<CurveSeries> mse_curves(const ExperimentPlan& plan, const RunOptions& options = {});

struct NormalityDiagnostic {
  double ks_distance = 0.0;
  double z_mean = 0.0;
  double z_variance = 0.0;  // unbiased sample variance
  std::vector<double> z;    // standardized residuals in replication order
};

// z_i = sqrt(k) (theta_hat_i - theta - b(log(n/k)) - theta a_n) / theta over N replications.
NormalityDiagnostic normality_diagnostic(const WeibullTailModel& model, std::int64_t n,
                                         std::int64_t replications, std::int64_t k,
                                         EstimatorVariant variant, std::uint64_t seed,
                                         const RunOptions& options = {});

// Kolmogorov–Smirnov distance between the empirical law of `values` and N(0, 1).
double ks_distance_normal(std::span<const double> values);

// Tail probability per k for quantile experiments.
struct QuantileTarget {
  std::function<double(std::int64_t k)> p_of_k;
  // When false quantile_hat_unchecked is used, so p >= 1/n is accepted.
  bool enforce_regime = true;
};

// x_hat_p for every replication, variant and k.
ReplicationTable simulate_quantiles(const ExperimentPlan& plan, const QuantileTarget& target,
                                    const RunOptions& options = {});

// Per-variant (1/N) sum log(x_hat_p / x_p)^2, with x_p from the model's upper quantile.
std::vector<CurveSeries> quantile_mse_curves(const ExperimentPlan& plan, double p,
                                             const RunOptions& options = {});

// Per-variant median over replications of |x_hat_p / x_p - 1|.
std::vector<CurveSeries> quantile_median_relative_error(const ExperimentPlan& plan, double p,
                                                        const RunOptions& options = {});

// CSV with header k,variant,bias_sq,variance,total,estimator.
void write_mse_csv(std::ostream& out, const std::vector<MseCurve>& curves);
void write_amse_estimator_csv(std::ostream& out, const std::vector<AmseCurve>& curves);

// Plan echo, seed and artifact version as JSON.
std::string experiment_manifest(const ExperimentPlan& plan, const std::string& command);

// Runs fn(i) for i in [0, count) on `workers` threads. Exceptions are
// collected and the one from the lowest index is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace wtail

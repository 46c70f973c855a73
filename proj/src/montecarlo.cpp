#include "wtail/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "wtail/csv.hpp"
#include "wtail/errors.hpp"
#include "wtail/format.hpp"
#include "wtail/version.hpp"

namespace wtail {
namespace {

std::vector<std::vector<double>> normalization_table(const ExperimentPlan& plan) {
  std::vector<std::vector<double>> table;
  for (const auto v : plan.variants) {
    std::vector<double> row;
    for (std::int64_t k = plan.k_range.first; k <= plan.k_range.last; ++k) {
      row.push_back(t_n(v, plan.n, k));
    }
    table.push_back(std::move(row));
  }
  return table;
}

[[noreturn]] void non_finite(const ExperimentPlan& plan, std::size_t rep, std::int64_t k,
                             EstimatorVariant v, const char* what) {
  throw NumericalError(std::string("non-finite ") + what + " for model " + plan.model.spec() +
                       ", seed " + std::to_string(plan.seed) + ", replication " +
                       std::to_string(rep) + ", k " + std::to_string(k) + ", variant " +
                       std::string(to_string(v)));
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

// Reduces a ReplicationTable per (variant, k) in replication order.
template <typename Reduce>
std::vector<CurveSeries> reduce_table(const ReplicationTable& table, Reduce reduce) {
  std::vector<CurveSeries> curves;
  const KRange range = table.k_range();
  std::vector<double> column(table.replications());
  for (std::size_t vi = 0; vi < table.variants().size(); ++vi) {
    CurveSeries series;
    series.label = std::string(to_string(table.variants()[vi]));
    for (std::int64_t k = range.first; k <= range.last; ++k) {
      for (std::size_t r = 0; r < table.replications(); ++r) column[r] = table.at(r, vi, k);
      series.points.push_back({k, reduce(column)});
    }
    curves.push_back(std::move(series));
  }
  return curves;
}

void write_estimator_row(std::ostream& out, std::int64_t k, EstimatorVariant v, double bias_sq,
                         double variance, double total, const char* estimator) {
  csv::write_row(out, {std::to_string(k), std::string(to_string(v)), format_double(bias_sq),
                       format_double(variance), format_double(total), estimator});
}

const csv::Row kEstimatorHeader = {"k", "variant", "bias_sq", "variance", "total", "estimator"};

}  // namespace

void ExperimentPlan::validate() const {
  if (n < static_cast<std::int64_t>(SortedSample::kMinSize)) {
    throw DomainError("experiment: n must be >= 3");
  }
  if (replications < 2) throw DomainError("experiment: need at least 2 replications");
  k_range.validate(n);
  if (variants.empty()) throw DomainError("experiment: no estimator variant requested");
  const std::set<EstimatorVariant> unique(variants.begin(), variants.end());
  if (unique.size() != variants.size()) throw DomainError("experiment: duplicate variant");
}

ReplicationTable::ReplicationTable(std::size_t replications, std::vector<EstimatorVariant> variants,
                                   KRange k_range)
    : replications_(replications),
      variants_(std::move(variants)),
      k_range_(k_range),
      values_(replications * variants_.size() * k_range.size(), 0.0) {}

std::size_t ReplicationTable::index(std::size_t rep, std::size_t variant_index,
                                    std::int64_t k) const {
  if (rep >= replications_ || variant_index >= variants_.size() || k < k_range_.first ||
      k > k_range_.last) {
    throw DomainError("ReplicationTable: index out of range");
  }
  const auto ki = static_cast<std::size_t>(k - k_range_.first);
  return (rep * variants_.size() + variant_index) * k_range_.size() + ki;
}

double& ReplicationTable::at(std::size_t rep, std::size_t variant_index, std::int64_t k) {
  return values_[index(rep, variant_index, k)];
}

double ReplicationTable::at(std::size_t rep, std::size_t variant_index, std::int64_t k) const {
  return values_[index(rep, variant_index, k)];
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (i < error_index) {
              error_index = i;
              error = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

ReplicationTable simulate_theta(const ExperimentPlan& plan, const RunOptions& options) {
  plan.validate();
  const auto norms = normalization_table(plan);
  ReplicationTable table(static_cast<std::size_t>(plan.replications), plan.variants, plan.k_range);
  parallel_for(table.replications(), options.workers, [&](std::size_t rep) {
    CounterRng rng = CounterRng::substream(plan.seed, rep);
    const SortedSample s = sample(plan.model, static_cast<std::size_t>(plan.n), rng);
    for (std::int64_t k = plan.k_range.first; k <= plan.k_range.last; ++k) {
      const double numerator = mean_log_excess(s, k);
      const auto ki = static_cast<std::size_t>(k - plan.k_range.first);
      for (std::size_t vi = 0; vi < plan.variants.size(); ++vi) {
        const double theta = numerator / norms[vi][ki];
        if (!std::isfinite(theta)) non_finite(plan, rep, k, plan.variants[vi], "theta_hat");
        table.at(rep, vi, k) = theta;
      }
    }
  });
  return table;
}

std::vector<MseCurve> mse_table(const ReplicationTable& table, double theta) {
  std::vector<MseCurve> curves;
  const auto n_rep = static_cast<double>(table.replications());
  for (std::size_t vi = 0; vi < table.variants().size(); ++vi) {
    MseCurve curve;
    curve.variant = table.variants()[vi];
    for (std::int64_t k = table.k_range().first; k <= table.k_range().last; ++k) {
      double sum = 0.0, sq_err = 0.0;
      for (std::size_t r = 0; r < table.replications(); ++r) {
        const double v = table.at(r, vi, k);
        sum += v;
        sq_err += (v - theta) * (v - theta);
      }
      MsePoint p;
      p.k = k;
      p.mean = sum / n_rep;
      double sq_dev = 0.0;
      for (std::size_t r = 0; r < table.replications(); ++r) {
        const double d = table.at(r, vi, k) - p.mean;
        sq_dev += d * d;
      }
      p.bias_sq = (p.mean - theta) * (p.mean - theta);
      p.variance = sq_dev / n_rep;
      p.mse = sq_err / n_rep;
      curve.points.push_back(p);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<CurveSeries> mse_curves(const ExperimentPlan& plan, const RunOptions& options) {
  std::vector<CurveSeries> out;
  for (const auto& curve : mse_table(simulate_theta(plan, options), plan.model.theta())) {
    CurveSeries series{std::string(to_string(curve.variant)), {}};
    for (const auto& p : curve.points) series.points.push_back({p.k, p.mse});
    out.push_back(std::move(series));
  }
  return out;
}

double ks_distance_normal(std::span<const double> values) {
  if (values.empty()) throw DomainError("ks_distance_normal: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double phi = 0.5 * std::erfc(-sorted[i] / std::numbers::sqrt2);
    d = std::max({d, static_cast<double>(i + 1) / n - phi, phi - static_cast<double>(i) / n});
  }
  return d;
}

NormalityDiagnostic normality_diagnostic(const WeibullTailModel& model, std::int64_t n,
                                         std::int64_t replications, std::int64_t k,
                                         EstimatorVariant variant, std::uint64_t seed,
                                         const RunOptions& options) {
  ExperimentPlan plan(model);
  plan.n = n;
  plan.replications = replications;
  plan.k_range = {k, k};
  plan.variants = {variant};
  plan.seed = seed;
  const ReplicationTable table = simulate_theta(plan, options);

  const double theta = model.theta();
  const double log_nk = std::log(static_cast<double>(n) / static_cast<double>(k));
  const double center = theta + bias_b(model, log_nk) + theta * a_n_exact(variant, n, k);
  const double scale = std::sqrt(static_cast<double>(k)) / theta;

  NormalityDiagnostic diag;
  diag.z.reserve(table.replications());
  for (std::size_t r = 0; r < table.replications(); ++r) {
    diag.z.push_back(scale * (table.at(r, 0, k) - center));
  }
  const auto count = static_cast<double>(diag.z.size());
  double sum = 0.0;
  for (double z : diag.z) sum += z;
  diag.z_mean = sum / count;
  double sq = 0.0;
  for (double z : diag.z) sq += (z - diag.z_mean) * (z - diag.z_mean);
  diag.z_variance = sq / (count - 1.0);
  diag.ks_distance = ks_distance_normal(diag.z);
  return diag;
}

ReplicationTable simulate_quantiles(const ExperimentPlan& plan, const QuantileTarget& target,
                                    const RunOptions& options) {
  plan.validate();
  if (!target.p_of_k) throw DomainError("simulate_quantiles: missing tail probability");
  ReplicationTable table(static_cast<std::size_t>(plan.replications), plan.variants, plan.k_range);
  parallel_for(table.replications(), options.workers, [&](std::size_t rep) {
    CounterRng rng = CounterRng::substream(plan.seed, rep);
    const SortedSample s = sample(plan.model, static_cast<std::size_t>(plan.n), rng);
    for (std::int64_t k = plan.k_range.first; k <= plan.k_range.last; ++k) {
      const double p = target.p_of_k(k);
      for (std::size_t vi = 0; vi < plan.variants.size(); ++vi) {
        const auto v = plan.variants[vi];
        const double x = target.enforce_regime ? quantile_hat(s, k, p, v)
                                               : quantile_hat_unchecked(s, k, p, v);
        if (!std::isfinite(x)) non_finite(plan, rep, k, v, "quantile_hat");
        table.at(rep, vi, k) = x;
      }
    }
  });
  return table;
}

std::vector<CurveSeries> quantile_mse_curves(const ExperimentPlan& plan, double p,
                                             const RunOptions& options) {
  const double x_p = upper_quantile(plan.model, std::log(p));
  const auto table = simulate_quantiles(plan, {[p](std::int64_t) { return p; }, true}, options);
  return reduce_table(table, [x_p](const std::vector<double>& column) {
    double sum = 0.0;
    for (double x : column) {
      const double e = std::log(x / x_p);
      sum += e * e;
    }
    return sum / static_cast<double>(column.size());
  });
}

std::vector<CurveSeries> quantile_median_relative_error(const ExperimentPlan& plan, double p,
                                                        const RunOptions& options) {
  const double x_p = upper_quantile(plan.model, std::log(p));
  const auto table = simulate_quantiles(plan, {[p](std::int64_t) { return p; }, true}, options);
  return reduce_table(table, [x_p](const std::vector<double>& column) {
    std::vector<double> err;
    err.reserve(column.size());
    for (double x : column) err.push_back(std::abs(x / x_p - 1.0));
    return median_of(std::move(err));
  });
}

void write_mse_csv(std::ostream& out, const std::vector<MseCurve>& curves) {
  csv::write_row(out, kEstimatorHeader);
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      write_estimator_row(out, p.k, curve.variant, p.bias_sq, p.variance, p.mse, "mse");
    }
  }
}

void write_amse_estimator_csv(std::ostream& out, const std::vector<AmseCurve>& curves) {
  csv::write_row(out, kEstimatorHeader);
  for (const auto& curve : curves) {
    for (const auto& p : curve) {
      write_estimator_row(out, p.k, p.variant, p.bias_sq, p.variance, p.total, "amse");
    }
  }
}

std::string experiment_manifest(const ExperimentPlan& plan, const std::string& command) {
  nlohmann::json variants = nlohmann::json::array();
  for (const auto v : plan.variants) variants.push_back(std::string(to_string(v)));
  nlohmann::json manifest = {
      {"artifact", kArtifactName},
      {"version", kVersion},
      {"command", command},
      {"seed", plan.seed},
      {"rng", "counter-based SplitMix64; replication i uses seed xor i"},
      {"sample_reuse", "one sample per replication shared by every k and variant"},
      {"plan",
       {{"model", plan.model.spec()},
        {"theta", plan.model.theta()},
        {"n", plan.n},
        {"replications", plan.replications},
        {"k_min", plan.k_range.first},
        {"k_max", plan.k_range.last},
        {"variants", variants}}},
  };
  return manifest.dump(2) + "\n";
}

}  // namespace wtail

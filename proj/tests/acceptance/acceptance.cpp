// Acceptance suite: one PASS/FAIL line per criterion.
//   wtail_acceptance            run all criteria
//   wtail_acceptance --only 7   run a single criterion

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "wtail/amse.hpp"
#include "wtail/cli.hpp"
#include "wtail/distributions.hpp"
#include "wtail/estimators.hpp"
#include "wtail/format.hpp"
#include "wtail/montecarlo.hpp"
#include "wtail/specfun.hpp"

using namespace wtail;
using V = EstimatorVariant;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::array<double, 3> amse_triple(const WeibullTailModel& m, std::int64_t n, std::int64_t k) {
  return {amse(m, n, k, V::V1).total, amse(m, n, k, V::V2).total, amse(m, n, k, V::V3).total};
}

ExperimentPlan default_plan(const WeibullTailModel& m) {
  ExperimentPlan plan(m);  // n = 500, N = 200, k = 2..150, seed = kDefaultSeed
  return plan;
}

std::int64_t argmin_k(const std::vector<std::pair<std::int64_t, double>>& curve) {
  return std::min_element(curve.begin(), curve.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->first;
}

Outcome special_functions() {
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double t = 0.1 * std::pow(500.0, i / 400.0);
    worst = std::max(worst, std::abs(k_rho_moment(t, 0.0, 1) - scaled_exp_integral_e1(t)));
  }
  const double t = 1000.0;
  const double first = t * mu_rho(t, 0.0);
  const double second = t * t * sigma_rho_sq(t, 0.0);
  const bool pass = worst <= 1e-8 && std::abs(first - 1.0) <= 0.02 && std::abs(second - 1.0) <= 0.02;
  return {pass, "max |quad - e^t E1| on [0.1,50] = " + fmt(worst, 3) + " (tol 1e-8); t mu0(1000) = " +
                    fmt(first, 6) + ", t^2 sigma0^2(1000) = " + fmt(second, 6) + " (tol 2%)"};
}

Outcome a_n_asymptotics() {
  const std::int64_t n = 1000000, k = 100;
  const double a2 = a_n_exact(V::V2, n, k);
  const double a3 = a_n_exact(V::V3, n, k);
  const double ref2 = std::log(100.0) / 200.0;
  const double ref3 = -1.0 / std::log(1e4);
  const double rel2 = std::abs(a2 / ref2 - 1.0);
  const double rel3 = std::abs(a3 / ref3 - 1.0);
  return {rel2 <= 0.25 && rel3 <= 0.15,
          "a2 = " + fmt(a2, 6) + " vs " + fmt(ref2, 6) + " (rel " + fmt(rel2, 3) + ", tol 0.25); a3 = " +
              fmt(a3, 6) + " vs " + fmt(ref3, 6) + " (rel " + fmt(rel3, 3) + ", tol 0.15)"};
}

Outcome ordering_positive_bias() {
  std::string detail;
  bool pass = true;
  for (const auto& m : {WeibullTailModel::absolute_normal(0.0, 1.0), WeibullTailModel::gamma(0.5, 1.0)}) {
    int hits = 0, total = 0;
    for (std::int64_t k = 10; k <= 150; ++k, ++total) {
      const auto a = amse_triple(m, 500, k);
      if (a[2] < a[0] && a[0] < a[1]) ++hits;
    }
    const double share = static_cast<double>(hits) / total;
    pass = pass && share >= 0.9;
    detail += m.spec() + ": V3<V1<V2 on " + fmt(100 * share, 4) + "% of k in [10,150]; ";
  }
  return {pass, detail + "(need >= 90%)"};
}

Outcome ordering_zero_bias() {
  std::string detail;
  bool pass = true;
  for (const auto& m : {WeibullTailModel::weibull(2.5, 2.5), WeibullTailModel::weibull(0.4, 0.4)}) {
    int violations = 0;
    for (std::int64_t k = 2; k <= 150; ++k) {
      const auto a = amse_triple(m, 500, k);
      if (!(a[0] <= std::min(a[1], a[2]))) ++violations;
    }
    pass = pass && violations == 0;
    detail += m.spec() + ": " + std::to_string(violations) + " violations of V1 <= min(V2,V3); ";
  }
  return {pass, detail + "grid k = 2..150"};
}

Outcome gamma_mse_ordering() {
  const auto plan = default_plan(WeibullTailModel::gamma(1.5, 1.0));
  const auto curves = mse_table(simulate_theta(plan), 1.0);
  int largest = 0, total = 0;
  for (std::int64_t k = 20; k <= 150; ++k, ++total) {
    const auto i = static_cast<std::size_t>(k - 2);
    const double m3 = curves[2].points[i].mse;
    if (m3 > curves[0].points[i].mse && m3 > curves[1].points[i].mse) ++largest;
  }
  int changes = 0;
  std::int64_t first_change = 0;
  double prev = curves[0].points[0].mse - curves[1].points[0].mse;
  for (std::size_t i = 1; i < curves[0].points.size(); ++i) {
    const double d = curves[0].points[i].mse - curves[1].points[i].mse;
    if ((d > 0) != (prev > 0) && d != 0.0 && prev != 0.0) {
      if (changes++ == 0) first_change = curves[0].points[i].k;
    }
    prev = d;
  }
  const double share = static_cast<double>(largest) / total;
  return {share >= 0.6 && changes > 0,
          "seed " + std::to_string(plan.seed) + ": MSE(V3) largest on " + fmt(100 * share, 4) +
              "% of k in [20,150] (need >= 60%); MSE(V1)-MSE(V2) changes sign " +
              std::to_string(changes) + " time(s), first at k = " + std::to_string(first_change)};
}

Outcome mse_amse_agreement() {
  bool pass = true;
  std::string detail = "seed " + std::to_string(kDefaultSeed) + ":";
  for (const auto& m : catalog()) {
    const auto plan = default_plan(m);
    const auto mse = mse_table(simulate_theta(plan), m.theta());
    for (std::size_t vi = 0; vi < 3; ++vi) {
      std::vector<std::pair<std::int64_t, double>> mc, am;
      for (const auto& p : mse[vi].points) mc.emplace_back(p.k, p.mse);
      for (const auto& p : amse_curve(m, plan.n, plan.k_range, kAllVariants[vi])) am.emplace_back(p.k, p.total);
      const auto k_mse = static_cast<double>(argmin_k(mc));
      const auto k_amse = static_cast<double>(argmin_k(am));
      const double ratio = std::max(k_mse, k_amse) / std::min(k_mse, k_amse);
      const bool ok = ratio <= 3.0;
      pass = pass && ok;
      detail += " " + m.stem() + "/" + std::string(to_string(kAllVariants[vi])) + " " +
                std::to_string(static_cast<int>(k_mse)) + ":" + std::to_string(static_cast<int>(k_amse)) +
                (ok ? "" : "(!)");
    }
  }
  return {pass, detail + " (argmin k MSE:AMSE, need ratio <= 3)"};
}

Outcome normality() {
  const std::int64_t N = 500;
  const auto d = normality_diagnostic(WeibullTailModel::weibull(1.0, 1.0), 10000, N, 100, V::V1, kDefaultSeed);
  const double critical = 1.63 / std::sqrt(static_cast<double>(N));
  return {d.ks_distance < critical,
          "seed " + std::to_string(kDefaultSeed) + ": KS = " + fmt(d.ks_distance) + " (need < " +
              fmt(critical) + "); z mean " + fmt(d.z_mean) + ", z variance " + fmt(d.z_variance)};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Outcome quantile_sanity() {
  ExperimentPlan plan(WeibullTailModel::weibull(1.0, 1.0));
  plan.k_range = {20, 100};
  const double p = 1e-4;
  const auto curves = quantile_median_relative_error(plan, p);
  bool pass = true;
  std::string detail =
      "seed " + std::to_string(plan.seed) + ", median over k in [20,100] of per-k median |x/x_p - 1|:";
  for (const auto& c : curves) {
    std::vector<double> v;
    for (const auto& pt : c.points) v.push_back(pt.value);
    const double worst = *std::max_element(v.begin(), v.end());
    const double med = median_of(v);
    pass = pass && med <= 0.25;
    detail += " " + c.label + " " + fmt(med, 3) + (med <= 0.25 ? "" : "(!)") + " (worst k " + fmt(worst, 3) + ")";
  }
  detail += "; need <= 0.25 for every variant";

  // Diagnostic only: error against the limit centering tau^{theta a_n}.
  const auto table = simulate_quantiles(plan, {[p](std::int64_t) { return p; }, true});
  const double theta = plan.model.theta();
  const double x_p = upper_quantile(plan.model, std::log(p));
  detail += "; against x_p tau^(theta a_n):";
  for (std::size_t vi = 0; vi < table.variants().size(); ++vi) {
    std::vector<double> per_k;
    for (std::int64_t k = plan.k_range.first; k <= plan.k_range.last; ++k) {
      const double tau = std::log(1.0 / p) / std::log(static_cast<double>(plan.n) / static_cast<double>(k));
      const double centre = x_p * std::pow(tau, theta * a_n_exact(table.variants()[vi], plan.n, k));
      std::vector<double> err;
      for (std::size_t r = 0; r < table.replications(); ++r) err.push_back(std::abs(table.at(r, vi, k) / centre - 1.0));
      per_k.push_back(median_of(err));
    }
    detail += " " + std::string(to_string(table.variants()[vi])) + " " + fmt(median_of(per_k), 3);
  }
  return {pass, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto base = std::filesystem::temp_directory_path() /
                    ("wtail_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(base);
  const std::array<std::string, 3> workers = {"1", "4", "0"};
  std::vector<std::filesystem::path> dirs;
  for (const auto& w : workers) {
    dirs.push_back(base / ("w" + w));
    std::ostringstream out, err;
    const int code = cli::run({"figures", "--out", dirs.back().string(), "--workers", w}, out, err);
    if (code != 0) {
      std::filesystem::remove_all(base);
      return {false, "figures failed with exit code " + std::to_string(code) + ": " + err.str()};
    }
  }
  int files = 0, mismatches = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const std::string ref = slurp(entry.path());
    for (std::size_t i = 1; i < dirs.size(); ++i) {
      if (slurp(dirs[i] / entry.path().filename()) != ref) ++mismatches;
    }
  }
  std::filesystem::remove_all(base);
  return {files == 10 && mismatches == 0,
          std::to_string(files) + " CSV files compared across workers 1, 4 and all cores; " +
              std::to_string(mismatches) + " mismatches"};
}

Outcome five_point_oracle() {
  const SortedSample s({1.0, std::exp(1.0), std::exp(2.0), std::exp(3.0), std::exp(4.0)});
  const double l = std::log(2.5);
  const double numerator = 0.5;  // ((4 - 3) + (3 - 3)) / 2
  const double mu0 = -std::exp(l) * boost::math::expint(-l);
  const std::array<double, 3> expected = {numerator / mu0,
                                          numerator / (0.5 * std::log(1.0 + std::log(2.0) / l)),
                                          numerator * l};
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(theta_hat(s, 2, kAllVariants[i]).theta_hat - expected[i]));
  }
  return {worst <= 1e-12, "max |theta_hat - hand value| = " + fmt(worst, 3) + " over V1..V3 (tol 1e-12)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wtail acceptance suite"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "special-function fidelity", 1.0, special_functions},
      {2, "a_n asymptotics", 1.0, a_n_asymptotics},
      {3, "AMSE ordering, positive bias", 5.0, ordering_positive_bias},
      {4, "AMSE ordering, zero bias", 5.0, ordering_zero_bias},
      {5, "Gamma(1.5,1) MSE ordering and crossover", 60.0, gamma_mse_ordering},
      {6, "MSE vs AMSE argmin agreement", 300.0, mse_amse_agreement},
      {7, "normality diagnostic", 60.0, normality},
      {8, "extreme quantile sanity", 30.0, quantile_sanity},
      {9, "figures determinism", 600.0, determinism},
      {10, "five-point estimator oracle", 1.0, five_point_oracle},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << "  " << c.title << ": " << o.detail
              << "  [" << fmt(secs, 3) << " s, limit " << fmt(c.time_limit_s, 3) << " s"
              << (in_time ? "" : ", TOO SLOW") << "]\n";
  }
  return failures == 0 ? 0 : 1;
}

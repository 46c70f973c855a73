#include "wtail/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wtail/csv.hpp"
#include "wtail/errors.hpp"
#include "wtail/format.hpp"
#include "wtail/montecarlo.hpp"
#include "wtail/svg.hpp"
#include "wtail/version.hpp"

namespace wtail::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string model;
  std::int64_t n = 500;
  std::int64_t replications = 200;
  std::optional<std::int64_t> k_min;
  std::optional<std::int64_t> k_max;
  std::optional<std::int64_t> k;
  std::optional<double> p;
  std::uint64_t seed = kDefaultSeed;
  std::string variants = "V1,V2,V3";
  std::string out;
  std::string input;
  std::string k_rule = "sqrt-b";
  bool emit_svg = true;
  bool log_y = false;
  bool json = false;
  bool simulate = false;
  unsigned workers = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::int64_t clamp_k(double k, std::int64_t n) {
  if (!std::isfinite(k)) return n - 1;
  const double hi = static_cast<double>(n - 1);
  return static_cast<std::int64_t>(std::clamp(std::floor(k), 2.0, std::max(2.0, hi)));
}

KRange k_range_for(const RunConfig& cfg, std::int64_t n) {
  KRange range;
  if (cfg.k) range = {*cfg.k, *cfg.k};
  range.last = std::min<std::int64_t>(range.last, n - 1);
  if (cfg.k_min) range.first = *cfg.k_min;
  if (cfg.k_max) range.last = *cfg.k_max;
  range.validate(n);
  return range;
}

ExperimentPlan plan_for(const RunConfig& cfg, WeibullTailModel model) {
  ExperimentPlan plan(std::move(model));
  plan.n = cfg.n;
  plan.replications = cfg.replications;
  plan.k_range = k_range_for(cfg, cfg.n);
  plan.variants = parse_variant_list(cfg.variants);
  plan.seed = cfg.seed;
  plan.validate();
  return plan;
}

std::string command_line(const std::vector<std::string>& args) {
  std::string line = std::string(kArtifactName);
  for (const auto& a : args) line += " " + a;
  return line;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir + "'");
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

// Writes to --out when set, otherwise to `out`.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& content) {
  if (cfg.out.empty() || cfg.out == "-") {
    out << content;
  } else {
    write_file(cfg.out, content);
  }
}

std::vector<AmseCurve> amse_curves(const WeibullTailModel& model, std::int64_t n, KRange range,
                                   const std::vector<EstimatorVariant>& variants) {
  std::vector<AmseCurve> curves;
  for (const auto v : variants) curves.push_back(amse_curve(model, n, range, v));
  return curves;
}

std::vector<CurveSeries> as_series(const std::vector<MseCurve>& curves) {
  std::vector<CurveSeries> out;
  for (const auto& c : curves) {
    CurveSeries s{std::string(to_string(c.variant)), {}};
    for (const auto& p : c.points) s.points.push_back({p.k, p.mse});
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CurveSeries> as_series(const std::vector<AmseCurve>& curves) {
  std::vector<CurveSeries> out;
  for (const auto& c : curves) {
    CurveSeries s{c.empty() ? std::string() : std::string(to_string(c.front().variant)), {}};
    for (const auto& p : c) s.points.push_back({p.k, p.total});
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  std::ifstream in(cfg.input);
  if (!in) throw IoError("cannot open input file '" + cfg.input + "'");
  const SortedSample s = SortedSample::from_unsorted(read_observations(in));
  const auto n = static_cast<std::int64_t>(s.size());
  const KRange range = k_range_for(cfg, n);
  const auto variants = parse_variant_list(cfg.variants);

  std::ostringstream csv_out;
  csv::Row header = {"k", "variant", "t_n", "a_n", "theta_hat"};
  if (cfg.p) {
    header.push_back("p");
    header.push_back("quantile_hat");
  }
  csv::write_row(csv_out, header);
  for (const auto v : variants) {
    for (std::int64_t k = range.first; k <= range.last; ++k) {
      const EstimatePoint e = theta_hat(s, k, v);
      csv::Row row = {std::to_string(k), std::string(to_string(v)), format_double(e.t_n),
                      format_double(e.a_n), format_double(e.theta_hat)};
      if (cfg.p) {
        row.push_back(format_double(*cfg.p));
        row.push_back(format_double(quantile_hat(s, k, *cfg.p, v)));
      }
      csv::write_row(csv_out, row);
    }
  }
  emit(cfg, out, csv_out.str());
  return kExitOk;
}

int cmd_amse(const RunConfig& cfg, std::ostream& out) {
  const WeibullTailModel model = parse_model_spec(cfg.model);
  const KRange range = k_range_for(cfg, cfg.n);
  std::ostringstream csv_out;
  write_amse_csv(csv_out, amse_curves(model, cfg.n, range, parse_variant_list(cfg.variants)));
  emit(cfg, out, csv_out.str());
  return kExitOk;
}

std::string render_model_svg(const WeibullTailModel& model, const ExperimentPlan& plan,
                             const std::vector<MseCurve>& mse,
                             const std::vector<AmseCurve>* amse, bool log_y) {
  std::vector<SvgPanel> panels;
  panels.push_back({"MSE, N = " + std::to_string(plan.replications) + ", seed " +
                        std::to_string(plan.seed),
                    "MSE", as_series(mse)});
  if (amse) panels.push_back({"AMSE", "AMSE", as_series(*amse)});
  const std::string title = model.spec() + ", n = " + std::to_string(plan.n) +
                            " (V1 solid, V2 dashed, V3 dotted)";
  return render_svg(title, panels, {log_y});
}

int cmd_simulate(const RunConfig& cfg, const std::vector<std::string>& args, std::ostream& out) {
  const ExperimentPlan plan = plan_for(cfg, parse_model_spec(cfg.model));
  const RunOptions opts{cfg.workers};
  const std::string dir = cfg.out.empty() ? "." : cfg.out;
  ensure_directory(dir);
  const std::string stem = plan.model.stem();

  const auto mse = mse_table(simulate_theta(plan, opts), plan.model.theta());
  std::ostringstream mse_csv;
  write_mse_csv(mse_csv, mse);
  write_file(fs::path(dir) / (stem + "_mse.csv"), mse_csv.str());
  out << "wrote " << (fs::path(dir) / (stem + "_mse.csv")).string() << "\n";

  if (cfg.p) {
    const auto log_mse = quantile_mse_curves(plan, *cfg.p, opts);
    const auto med = quantile_median_relative_error(plan, *cfg.p, opts);
    std::ostringstream q_csv;
    csv::write_row(q_csv, {"k", "variant", "p", "log_sq_error", "median_relative_error"});
    for (std::size_t vi = 0; vi < log_mse.size(); ++vi) {
      for (std::size_t i = 0; i < log_mse[vi].points.size(); ++i) {
        csv::write_row(q_csv, {std::to_string(log_mse[vi].points[i].k), log_mse[vi].label,
                               format_double(*cfg.p), format_double(log_mse[vi].points[i].value),
                               format_double(med[vi].points[i].value)});
      }
    }
    write_file(fs::path(dir) / (stem + "_quantile.csv"), q_csv.str());
    out << "wrote " << (fs::path(dir) / (stem + "_quantile.csv")).string() << "\n";
  }
  if (cfg.emit_svg) {
    write_file(fs::path(dir) / (stem + "_mse.svg"),
               render_model_svg(plan.model, plan, mse, nullptr, cfg.log_y));
    out << "wrote " << (fs::path(dir) / (stem + "_mse.svg")).string() << "\n";
  }
  write_file(fs::path(dir) / "manifest.json", experiment_manifest(plan, command_line(args)));
  return kExitOk;
}

int cmd_figures(const RunConfig& cfg, const std::vector<std::string>& args, std::ostream& out) {
  std::vector<WeibullTailModel> models;
  if (cfg.model.empty()) {
    models = catalog();
  } else {
    models.push_back(parse_model_spec(cfg.model));
  }
  const std::string dir = cfg.out.empty() ? "figures" : cfg.out;
  ensure_directory(dir);
  const RunOptions opts{cfg.workers};

  nlohmann::json runs = nlohmann::json::array();
  for (const auto& model : models) {
    const ExperimentPlan plan = plan_for(cfg, model);
    const std::string stem = model.stem();
    const auto mse = mse_table(simulate_theta(plan, opts), model.theta());
    const auto amse = amse_curves(model, plan.n, plan.k_range, plan.variants);

    std::ostringstream mse_csv, amse_csv;
    write_mse_csv(mse_csv, mse);
    write_amse_estimator_csv(amse_csv, amse);
    write_file(fs::path(dir) / (stem + "_mse.csv"), mse_csv.str());
    write_file(fs::path(dir) / (stem + "_amse.csv"), amse_csv.str());
    if (cfg.emit_svg) {
      write_file(fs::path(dir) / (stem + ".svg"),
                 render_model_svg(model, plan, mse, &amse, cfg.log_y));
    }
    runs.push_back(nlohmann::json::parse(experiment_manifest(plan, command_line(args))));
    out << stem << ": wrote " << stem << "_mse.csv, " << stem << "_amse.csv"
        << (cfg.emit_svg ? ", " + stem + ".svg" : std::string()) << "\n";
  }
  const nlohmann::json manifest = {{"artifact", kArtifactName},
                                   {"version", kVersion},
                                   {"command", command_line(args)},
                                   {"seed", cfg.seed},
                                   {"runs", runs}};
  write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

// Share of k in range where `order` holds for the three per-variant values.
double order_share(const PredictedOrder& order, KRange range,
                   const std::function<std::array<double, 3>(std::int64_t)>& values) {
  std::size_t hits = 0;
  for (std::int64_t k = range.first; k <= range.last; ++k) {
    if (order.holds(values(k))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(range.size());
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const WeibullTailModel model = parse_model_spec(cfg.model);
  const KRule rule = parse_k_rule(cfg.k_rule, model);
  const OrderingVerdict verdict = classify_ordering(model, cfg.n, rule);
  const KRange range = k_range_for(cfg, cfg.n);

  std::vector<AmseCurve> amse;
  for (const auto v : kAllVariants) amse.push_back(amse_curve(model, cfg.n, range, v));
  const double amse_share = order_share(verdict.predicted, range, [&](std::int64_t k) {
    const auto i = static_cast<std::size_t>(k - range.first);
    return std::array<double, 3>{amse[0][i].total, amse[1][i].total, amse[2][i].total};
  });

  std::optional<double> mse_share;
  if (cfg.simulate) {
    RunConfig sim_cfg = cfg;
    sim_cfg.variants = "V1,V2,V3";
    const ExperimentPlan plan = plan_for(sim_cfg, model);
    const auto mse = mse_table(simulate_theta(plan, {cfg.workers}), model.theta());
    mse_share = order_share(verdict.predicted, range, [&](std::int64_t k) {
      const auto i = static_cast<std::size_t>(k - range.first);
      return std::array<double, 3>{mse[0].points[i].mse, mse[1].points[i].mse,
                                   mse[2].points[i].mse};
    });
  }

  const bool is_alpha = verdict.ordering_case == OrderingCase::NegBiasAlphaGtTheta ||
                        verdict.ordering_case == OrderingCase::NegBiasAlphaLtTheta;
  const bool is_beta = verdict.ordering_case == OrderingCase::PosBiasBetaGtTheta ||
                       verdict.ordering_case == OrderingCase::PosBiasBetaLtTheta;
  if (cfg.json) {
    nlohmann::json j = {
        {"model", model.spec()},
        {"theta", verdict.theta},
        {"rho", std::isfinite(model.rho()) ? nlohmann::json(model.rho()) : nlohmann::json("-inf")},
        {"bias_sign", std::string(to_string(model.bias_sign()))},
        {"n", verdict.n},
        {"b_log_n", verdict.bias_at_log_n},
        {"case", std::string(to_string(verdict.ordering_case))},
        {"predicted", verdict.predicted.to_string()},
        {"k_range", {range.first, range.last}},
        {"amse_order_share", amse_share},
    };
    if (is_alpha) j["alpha_surrogate"] = verdict.alpha_or_beta;
    if (is_beta) j["beta_surrogate"] = verdict.alpha_or_beta;
    if (verdict.k) {
      j["k"] = *verdict.k;
      j["k_rule"] = cfg.k_rule;
    }
    if (mse_share) {
      j["mse_order_share"] = *mse_share;
      j["replications"] = cfg.replications;
      j["seed"] = cfg.seed;
    }
    out << j.dump(2) << "\n";
    return kExitOk;
  }

  out << "model:      " << model.spec() << " (theta = " << format_double(verdict.theta)
      << ", bias " << to_string(model.bias_sign()) << ")\n";
  out << "n:          " << verdict.n << "\n";
  out << "b(log n):   " << format_double(verdict.bias_at_log_n) << "\n";
  out << "case:       " << to_string(verdict.ordering_case) << "\n";
  if (is_alpha) {
    out << "alpha_n:    " << format_double(verdict.alpha_or_beta) << " at k = " << *verdict.k
        << " (" << cfg.k_rule << " rule)\n";
  } else if (is_beta) {
    out << "beta_n:     " << format_double(verdict.alpha_or_beta) << "\n";
  }
  out << "predicted:  " << verdict.predicted.to_string() << "\n";
  out << "AMSE share: " << format_double(amse_share) << " of k in [" << range.first << ","
      << range.last << "]\n";
  if (mse_share) {
    out << "MSE share:  " << format_double(*mse_share) << " (N = " << cfg.replications
        << ", seed " << cfg.seed << ")\n";
  }
  out << "surrogates are evaluated at the finite n above; no limit is claimed\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const DomainError*>(&e)) return kExitDomain;
  if (dynamic_cast<const IoError*>(&e)) return kExitDomain;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  return kExitInternal;
}

std::vector<double> read_observations(std::istream& in) {
  std::vector<double> values;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;
    const auto v = parse_double(body);
    if (!v) {
      throw ParseError("line " + std::to_string(number) + ": not a number: '" +
                           std::string(body) + "'",
                       number);
    }
    if (!std::isfinite(*v) || *v <= 0.0) {
      throw DomainError("line " + std::to_string(number) +
                        ": observations must be positive and finite, got " + std::string(body));
    }
    values.push_back(*v);
  }
  return values;
}

KRule parse_k_rule(std::string_view text, const WeibullTailModel& model) {
  if (text == "log") {
    return [](std::int64_t n) { return clamp_k(std::log(static_cast<double>(n)), n); };
  }
  if (text == "sqrt") {
    return [](std::int64_t n) { return clamp_k(std::sqrt(static_cast<double>(n)), n); };
  }
  if (text == "sqrt-b" || text == "inv-b") {
    const bool squared = text == "sqrt-b";
    return [model, squared](std::int64_t n) {
      const double b = bias_b(model, std::log(static_cast<double>(n)));
      if (b == 0.0) throw UndefinedRateError("k rule needs b(log n) != 0 for " + model.spec());
      const double inv = 1.0 / std::abs(b);
      return clamp_k(squared ? inv * inv : inv, n);
    };
  }
  if (text.starts_with("fixed:")) {
    const auto v = parse_double(text.substr(6));
    if (!v || *v != std::floor(*v) || *v < 2.0) {
      throw UsageError("fixed k rule needs an integer >= 2, got '" + std::string(text) + "'");
    }
    const auto k = static_cast<std::int64_t>(*v);
    return [k](std::int64_t n) {
      require_k_in_range(n, k);
      return k;
    };
  }
  throw UsageError("unknown k rule '" + std::string(text) +
                   "' (expected log, sqrt, sqrt-b, inv-b or fixed:K)");
}

std::vector<EstimatorVariant> parse_variant_list(std::string_view text) {
  std::vector<EstimatorVariant> out;
  std::set<EstimatorVariant> seen;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? text.npos
                                                                               : comma - start));
    const auto v = parse_variant(item);
    if (!v) throw UsageError("unknown estimator variant '" + std::string(item) + "'");
    if (!seen.insert(*v).second) {
      throw UsageError("variant listed twice: '" + std::string(item) + "'");
    }
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weibull tail-coefficient estimation and simulation", std::string(kArtifactName)};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_model = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--model", cfg.model,
                                "Model spec name:param,param (absnormal, gamma, weibull)");
    if (required) opt->required();
  };
  auto add_k = [&](CLI::App* sub) {
    sub->add_option("--k-min", cfg.k_min, "Smallest k (default 2)");
    sub->add_option("--k-max", cfg.k_max, "Largest k (default min(150, n-1))");
  };
  auto add_n = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "Sample size")->capture_default_str()->check(CLI::Range(3, 1 << 30));
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--replications", cfg.replications, "Monte Carlo replications N")
        ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    sub->add_option("--workers", cfg.workers, "Worker threads (0 = all cores)")
        ->capture_default_str();
  };
  auto add_variants = [&](CLI::App* sub) {
    sub->add_option("--variants", cfg.variants, "Comma-separated subset of V1,V2,V3")
        ->capture_default_str();
  };
  auto add_svg = [&](CLI::App* sub) {
    sub->add_flag("--svg,!--no-svg", cfg.emit_svg, "Write SVG plots (default on)");
    sub->add_flag("--log-y", cfg.log_y, "Log-scaled y axis in SVG plots");
  };

  auto* estimate = app.add_subcommand("estimate", "Estimate theta (and x_p) from a data file");
  estimate->add_option("--input", cfg.input, "File with one positive value per line")
      ->required();
  estimate->add_option("--k", cfg.k, "Single k (shorthand for --k-min K --k-max K)");
  add_k(estimate);
  add_variants(estimate);
  estimate->add_option("--p", cfg.p, "Tail probability for x_p, must be < 1/n");
  estimate->add_option("--out", cfg.out, "Output CSV file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo MSE curves for one model");
  add_model(simulate, true);
  add_n(simulate);
  add_sim(simulate);
  add_k(simulate);
  add_variants(simulate);
  simulate->add_option("--p", cfg.p, "Also simulate x_p for this tail probability");
  simulate->add_option("--out", cfg.out, "Output directory (default .)");
  add_svg(simulate);

  auto* amse_cmd = app.add_subcommand("amse", "AMSE curves for one model");
  add_model(amse_cmd, true);
  add_n(amse_cmd);
  add_k(amse_cmd);
  add_variants(amse_cmd);
  amse_cmd->add_option("--out", cfg.out, "Output CSV file (default stdout)");

  auto* compare = app.add_subcommand("compare", "Predicted AMSE ordering of V1, V2, V3");
  add_model(compare, true);
  add_n(compare);
  add_k(compare);
  add_sim(compare);
  compare->add_option("--k-rule", cfg.k_rule, "log, sqrt, sqrt-b, inv-b or fixed:K")
      ->capture_default_str();
  compare->add_flag("--json", cfg.json, "Print the verdict as JSON");
  compare->add_flag("--simulate", cfg.simulate, "Add the empirical MSE ordering share");

  auto* figures = app.add_subcommand("figures", "MSE and AMSE figures for the catalog models");
  add_model(figures, false);
  add_n(figures);
  add_sim(figures);
  add_k(figures);
  add_variants(figures);
  figures->add_option("--out", cfg.out, "Output directory (default figures)");
  add_svg(figures);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(cfg, out);
    if (simulate->parsed()) return cmd_simulate(cfg, args, out);
    if (amse_cmd->parsed()) return cmd_amse(cfg, out);
    if (compare->parsed()) return cmd_compare(cfg, out);
    if (figures->parsed()) return cmd_figures(cfg, args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace wtail::cli

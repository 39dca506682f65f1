#pragma once

// Command dispatch for the dcovsel tool. Kept in a header so the test
// suite can drive the exact code path the binary runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcovsel/dcovsel.hpp"
#include "json.hpp"

namespace dcovsel::cli {

using Json = nlohmann::ordered_json;

/// Doubles are written with 12 significant digits so reports are byte-stable.
inline Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline Json numbers(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

inline Json names_of(const DataMatrix& data, const ColumnSet& set) { return data.names_of(set); }

inline Json stage_json(const StageReport& stage, const DataMatrix& features) {
  Json j;
  j["name"] = stage.name;
  j["selected"] = stage.selected_names;
  if (!stage.scores.empty()) j["scores"] = numbers(stage.scores);
  if (!stage.clusters.empty()) {
    Json clusters = Json::array();
    for (const auto& c : stage.clusters) clusters.push_back(names_of(features, c));
    j["clusters"] = clusters;
  }
  if (stage.objective) j["objective"] = number(*stage.objective);
  if (!stage.trace.empty()) j["trace"] = numbers(stage.trace);
  return j;
}

struct Options {
  std::string input;
  std::string response;
  double exponent = 1.0;
  bool standardize = true;
  double eps = 1e-12;
  unsigned threads = 0;
  std::string format = "json";
  bool timing = false;

  std::string x_columns;
  std::string y_columns;
  std::string mode = "kww_then_diverse";
  std::optional<double> alpha;
  std::optional<std::size_t> top_k;
  std::string experiment = "maximizers";

  DCovConfig dcov() const {
    DCovConfig cfg;
    cfg.exponent = exponent;
    cfg.standardize = standardize;
    cfg.eps = eps;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  }
};

/// Collects timed stages and renders the final document.
class Report {
 public:
  Report(std::string command, Json config) : command_(std::move(command)), config_(std::move(config)) {}

  void add_stage(Json stage, double elapsed_ms) {
    timing_.emplace_back(stage.value("name", std::string{}), elapsed_ms);
    stages_.push_back(std::move(stage));
  }

  Json render(bool with_timing) const {
    Json doc;
    doc["command"] = command_;
    doc["config"] = config_;
    doc["stages"] = stages_;
    Json timing = Json::object();
    if (with_timing) {
      for (const auto& [name, ms] : timing_) timing[name] = number(ms);
    }
    doc["timing"] = timing;
    return doc;
  }

 private:
  std::string command_;
  Json config_;
  Json stages_ = Json::array();
  std::vector<std::pair<std::string, double>> timing_;
};

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

namespace detail {

inline Json config_json(const Options& o, const std::string& command) {
  Json c;
  c["input"] = o.input;
  c["response"] = o.response;
  c["exponent"] = number(o.exponent);
  c["standardize"] = o.standardize;
  c["eps"] = number(o.eps);
  if (command == "dcov") {
    c["x"] = o.x_columns;
    c["y"] = o.y_columns;
  }
  if (command == "select") {
    c["mode"] = o.mode;
    c["alpha"] = o.alpha ? number(*o.alpha) : Json(nullptr);
  }
  if (command == "order") c["top_k"] = o.top_k ? Json(*o.top_k) : Json(nullptr);
  if (command == "enumerate") c["experiment"] = o.experiment;
  return c;
}

inline LoadedData load(const Options& o, bool need_response) {
  if (need_response && o.response.empty()) throw InvalidArgument("this command requires --response");
  auto data = load_csv(o.input, o.response);
  if (o.standardize) data.features = standardize(data.features);
  return data;
}

inline void require_json(const Options& o, const std::string& command) {
  if (o.format != "json") throw InvalidArgument("--format csv is not available for '" + command + "'");
}

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline int run_dcov(const Options& o, std::ostream& out) {
  // Groups are resolved against the full header, before the response split.
  const auto raw = load_csv(o.input);
  const auto y_spec = o.y_columns.empty() ? o.response : o.y_columns;
  if (o.x_columns.empty() || y_spec.empty()) throw InvalidArgument("dcov requires --x and one of --y / --response");
  const auto x_idx = dcovsel::detail::resolve_columns(o.x_columns, raw.features.names());
  const auto y_idx = dcovsel::detail::resolve_columns(y_spec, raw.features.names());
  const auto data = o.standardize ? standardize(raw.features) : raw.features;
  const auto cfg = o.dcov();

  Stopwatch watch;
  const ColumnSet x(x_idx), y(y_idx);
  const CenteredDistances cx(data, x, cfg.exponent), cy(data, y, cfg.exponent);
  const double cov = dcov2(cx, cy);
  const double cor = dcor2(cx, cy, cfg.eps);

  if (o.format == "csv") {
    out << "x,y,dcov2,dcor2\n";
    std::string xs, ys;
    for (auto j : x) xs += (xs.empty() ? "" : ";") + data.name(j);
    for (auto j : y) ys += (ys.empty() ? "" : ";") + data.name(j);
    out << xs << ',' << ys << ',' << csv_number(cov) << ',' << csv_number(cor) << '\n';
    return 0;
  }
  Report report("dcov", config_json(o, "dcov"));
  Json stage;
  stage["name"] = "dcov";
  stage["x"] = names_of(data, x);
  stage["y"] = names_of(data, y);
  stage["dcov2"] = number(cov);
  stage["dcor2"] = number(cor);
  report.add_stage(stage, watch.ms());
  out << report.render(o.timing).dump(2) << '\n';
  return 0;
}

inline int run_diverse(const Options& o, std::ostream& out) {
  require_json(o, "diverse");
  const auto data = load(o, false);
  const auto cfg = o.dcov();
  Stopwatch watch;
  const auto stage = dcovsel::detail::diverse_stage(data.features, ColumnSet::range(data.features.cols()), cfg);
  Report report("diverse", config_json(o, "diverse"));
  report.add_stage(stage_json(stage, data.features), watch.ms());
  out << report.render(o.timing).dump(2) << '\n';
  return 0;
}

inline int run_relevant(const Options& o, std::ostream& out) {
  const auto data = load(o, true);
  const auto cfg = o.dcov();
  Stopwatch watch;
  const auto chosen = kww_select(data.features, *data.response, cfg);
  const double elapsed = watch.ms();

  if (o.format == "csv") {
    out << "rank,feature,dcor2,selected\n";
    for (std::size_t r = 0; r < chosen.ranking.ranked.size(); ++r) {
      const auto& f = chosen.ranking.ranked[r];
      out << r + 1 << ',' << data.features.name(f.index) << ',' << csv_number(f.dcor2) << ','
          << (chosen.selected.contains(f.index) ? 1 : 0) << '\n';
    }
    return 0;
  }
  Report report("relevant", config_json(o, "relevant"));
  Json ranking;
  ranking["name"] = "ranking";
  Json rows = Json::array();
  for (const auto& f : chosen.ranking.ranked) {
    Json row;
    row["feature"] = data.features.name(f.index);
    row["dcor2"] = number(f.dcor2);
    rows.push_back(row);
  }
  ranking["ranked"] = rows;
  report.add_stage(ranking, 0.0);

  Json relevant;
  relevant["name"] = "relevant";
  relevant["selected"] = names_of(data.features, chosen.selected);
  relevant["trace"] = numbers(chosen.dcov_trace);
  report.add_stage(relevant, elapsed);
  out << report.render(o.timing).dump(2) << '\n';
  return 0;
}

inline int run_select(const Options& o, std::ostream& out) {
  require_json(o, "select");
  PipelineConfig cfg;
  cfg.mode = parse_pipeline_mode(o.mode);
  cfg.alpha = o.alpha;
  cfg.base = o.dcov();
  cfg.validate();
  const auto data = load(o, true);
  const auto result = run_pipeline(data.features, *data.response, cfg);

  Report report("select", config_json(o, "select"));
  for (const auto& stage : result.stages) report.add_stage(stage_json(stage, data.features), stage.elapsed_ms);
  auto doc = report.render(o.timing);
  doc["final"] = names_of(data.features, result.final_selection);
  out << doc.dump(2) << '\n';
  return 0;
}

inline int run_order(const Options& o, std::ostream& out) {
  const auto data = load(o, false);
  const auto cfg = o.dcov();
  Stopwatch watch;
  auto tiers = diversity_ordering(data.features, cfg);
  const double elapsed = watch.ms();
  if (o.top_k && *o.top_k < tiers.size()) tiers.resize(*o.top_k);

  if (o.format == "csv") {
    out << "tier,feature,objective\n";
    for (std::size_t t = 0; t < tiers.size(); ++t) {
      for (auto j : tiers[t].features) {
        out << t + 1 << ',' << data.features.name(j) << ','
            << (tiers[t].objective ? csv_number(*tiers[t].objective) : "") << '\n';
      }
    }
    return 0;
  }
  Report report("order", config_json(o, "order"));
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    Json stage;
    stage["name"] = "tier_" + std::to_string(t + 1);
    stage["selected"] = names_of(data.features, tiers[t].features);
    Json clusters = Json::array();
    for (const auto& c : tiers[t].clusters) clusters.push_back(names_of(data.features, c));
    stage["clusters"] = clusters;
    stage["objective"] = tiers[t].objective ? number(*tiers[t].objective) : Json(nullptr);
    report.add_stage(stage, t == 0 ? elapsed : 0.0);
  }
  out << report.render(o.timing).dump(2) << '\n';
  return 0;
}

inline int run_enumerate(const Options& o, std::ostream& out) {
  require_json(o, "enumerate");
  const auto cfg = o.dcov();
  Report report("enumerate", config_json(o, "enumerate"));

  if (o.experiment == "scaling") {
    if (o.response.empty()) throw InvalidArgument("the scaling experiment requires --response");
    // The experiment contrasts raw and standardized features itself.
    const auto data = load_csv(o.input, o.response);
    require_enumerable(data.features.cols(), 1);
    for (bool standardized : {false, true}) {
      Stopwatch watch;
      const auto r = power_set_dependence_experiment(data.features, *data.response, cfg, standardized);
      Json stage;
      stage["name"] = standardized ? "standardized" : "raw";
      stage["subsets"] = r.rho_E.size();
      stage["rho_of_rho_nu"] = number(r.rho_of_rho_nu);
      report.add_stage(stage, watch.ms());
    }
  } else if (o.experiment == "maximizers") {
    const auto data = load(o, false);
    require_enumerable(data.features.cols(), 2);
    Stopwatch watch;
    const auto cache = build_cache(data.features, cfg);
    const auto result = enumerate_m_pi(cache, cfg.eps);
    const auto as_names = [&](const std::vector<SubsetMask>& masks) {
      Json list = Json::array();
      for (auto m : masks) list.push_back(names_of(data.features, mask_to_set(m)));
      return list;
    };
    Json stage;
    stage["name"] = "enumerate";
    stage["subsets"] = (std::size_t{1} << cache.size()) - 2;
    stage["objective"] = number(result.best);
    stage["maximizers"] = as_names(result.maximizers);
    stage["minimal_maximizers"] = as_names(result.minimal_maximizers);
    stage["union_decomposition"] = union_decomposition_check(result);
    stage["intersection_closure_violations"] = intersection_closure_violations(result);
    report.add_stage(stage, watch.ms());
  } else {
    throw InvalidArgument("unknown experiment '" + o.experiment + "' (expected maximizers or scaling)");
  }
  out << report.render(o.timing).dump(2) << '\n';
  return 0;
}

}  // namespace detail

/// Runs one invocation. args[0] is the program name. Returns the process exit code:
/// 0 success, 2 usage error, 3 data error, 4 size-guard violation.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Distance-covariance feature selection: diverse minimal maximizers and all-relevant forward selection"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "CSV file with a header row")->required();
    sub->add_option("--response", o.response, "Response column names or 0-based indices, comma separated");
    sub->add_option("--exponent", o.exponent, "Distance exponent in (0, 2]; 2 uses squared distances")
        ->capture_default_str();
    sub->add_flag("--standardize,!--no-standardize", o.standardize,
                  "Center features and scale to unit standard deviation (divisor n); on by default");
    sub->add_option("--eps", o.eps, "Comparison tolerance")->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads, 0 = all cores")->capture_default_str();
    sub->add_option("--format", o.format, "Output encoding")->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub->add_flag("--timing", o.timing, "Fill the timing section with wall-clock milliseconds");
  };

  auto* dcov = app.add_subcommand("dcov", "Distance covariance and correlation between two column groups");
  add_common(dcov);
  dcov->add_option("--x", o.x_columns, "First column group")->required();
  dcov->add_option("--y", o.y_columns, "Second column group (defaults to --response)");

  auto* diverse = app.add_subcommand("diverse", "All inclusion-minimal maximizers of the diversity objective");
  add_common(diverse);

  auto* relevant = app.add_subcommand("relevant", "All-relevant forward selection against the response");
  add_common(relevant);

  auto* select = app.add_subcommand("select", "Combined relevant and diverse selection");
  add_common(select);
  select->add_option("--mode", o.mode, "controlled | kww_then_diverse | diverse_then_kww")
      ->check(CLI::IsMember({"controlled", "kww_then_diverse", "diverse_then_kww"}))
      ->capture_default_str();
  select->add_option("--alpha", o.alpha, "Marginal dcor2 threshold (controlled mode only)");

  auto* order = app.add_subcommand("order", "Diversity ordering by repeated peeling of minimal maximizers");
  add_common(order);
  order->add_option("--top-k", o.top_k, "Keep only the first k tiers")->check(CLI::PositiveNumber);

  auto* enumerate = app.add_subcommand("enumerate", "Exhaustive power-set experiments (at most 20 features)");
  add_common(enumerate);
  enumerate->add_option("--experiment", o.experiment, "maximizers | scaling")
      ->check(CLI::IsMember({"maximizers", "scaling"}))
      ->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return static_cast<int>(ErrorKind::usage);
  }

  try {
    if (*dcov) return detail::run_dcov(o, out);
    if (*diverse) return detail::run_diverse(o, out);
    if (*relevant) return detail::run_relevant(o, out);
    if (*select) return detail::run_select(o, out);
    if (*order) return detail::run_order(o, out);
    if (*enumerate) return detail::run_enumerate(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return static_cast<int>(ErrorKind::usage);
}

}  // namespace dcovsel::cli

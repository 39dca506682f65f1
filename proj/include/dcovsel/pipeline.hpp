#pragma once

// Relevant-and-diverse selection built from the two primitives:
//
//   controlled        keep features whose marginal dcor2 with the response is
//                     at least alpha, then find the minimal maximizers among them
//   kww_then_diverse  forward relevant selection, then minimal maximizers of
//                     the selected features
//   diverse_then_kww  minimal maximizers of all features, then forward relevant
//                     selection restricted to their union

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcovsel/data_matrix.hpp"
#include "dcovsel/diverse.hpp"
#include "dcovsel/error.hpp"
#include "dcovsel/linkage.hpp"
#include "dcovsel/relevant.hpp"

namespace dcovsel {

enum class PipelineMode { controlled, kww_then_diverse, diverse_then_kww };

inline std::string_view to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::controlled:
      return "controlled";
    case PipelineMode::kww_then_diverse:
      return "kww_then_diverse";
    case PipelineMode::diverse_then_kww:
      return "diverse_then_kww";
  }
  return "unknown";
}

inline PipelineMode parse_pipeline_mode(std::string_view text) {
  for (auto mode : {PipelineMode::controlled, PipelineMode::kww_then_diverse, PipelineMode::diverse_then_kww}) {
    if (to_string(mode) == text) return mode;
  }
  throw InvalidArgument("unknown pipeline mode '" + std::string(text) + "'");
}

struct PipelineConfig {
  PipelineMode mode = PipelineMode::kww_then_diverse;
  /// Marginal dcor2 threshold; required for, and only for, controlled mode.
  std::optional<double> alpha;
  DCovConfig base;

  void validate() const {
    base.validate();
    if (mode == PipelineMode::controlled && !alpha) throw InvalidArgument("controlled mode requires alpha");
    if (mode != PipelineMode::controlled && alpha) {
      throw InvalidArgument("alpha only applies to controlled mode");
    }
    if (alpha && !(*alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  }
};

struct StageReport {
  std::string name;
  /// Indices into the feature matrix, in stage order.
  ColumnSet selected;
  std::vector<std::string> selected_names;
  /// Per-selected-feature score: marginal dcor2 for relevance stages.
  std::vector<double> scores;
  /// Minimal maximizers found by a diverse stage.
  std::vector<ColumnSet> clusters;
  /// Shared M_pi value of the clusters (diverse stages).
  std::optional<double> objective;
  /// Forward-selection trace (relevance stages).
  std::vector<double> trace;
  double elapsed_ms = 0.0;
};

struct SelectionReport {
  std::string command;
  std::vector<StageReport> stages;
  ColumnSet final_selection;
};

namespace detail {

class StageTimer {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::vector<double> marginal_scores(const RelevanceRanking& ranking, const ColumnSet& selected) {
  std::vector<double> by_index;
  for (const auto& r : ranking.ranked) {
    if (r.index >= by_index.size()) by_index.resize(r.index + 1, 0.0);
    by_index[r.index] = r.dcor2;
  }
  std::vector<double> out;
  for (auto j : selected) out.push_back(by_index[j]);
  return out;
}

// Minimal maximizers among `subset` of the features, reported in feature indices.
inline StageReport diverse_stage(const DataMatrix& features, const ColumnSet& subset, const DCovConfig& cfg) {
  StageTimer timer;
  if (subset.size() < 2) {
    throw DataError("diverse stage needs at least 2 features, got " + std::to_string(subset.size()));
  }
  const auto cache = build_cache(features, subset, cfg);
  const auto found = minimal_maximizers(cache, cfg.eps, cfg.threads);

  StageReport stage;
  stage.name = "diverse";
  std::vector<std::size_t> members;
  for (const auto& c : found.clusters) {
    std::vector<std::size_t> mapped;
    for (auto local : c.members) mapped.push_back(subset[local]);
    members.insert(members.end(), mapped.begin(), mapped.end());
    stage.clusters.emplace_back(std::move(mapped));
  }
  stage.selected = ColumnSet(std::move(members));
  stage.selected_names = features.names_of(stage.selected);
  stage.objective = found.objective;
  stage.elapsed_ms = timer.elapsed_ms();
  return stage;
}

// Forward relevant selection among `subset`, reported in feature indices.
inline StageReport relevant_stage(const DataMatrix& features, const ColumnSet& subset, const DataMatrix& response,
                                  const DCovConfig& cfg) {
  StageTimer timer;
  if (subset.empty()) throw DataError("relevant stage has no features to select from");
  const auto restricted = features.select(subset);
  const auto chosen = kww_select(restricted, response, cfg);

  StageReport stage;
  stage.name = "relevant";
  std::vector<std::size_t> mapped;
  for (auto local : chosen.selected) mapped.push_back(subset[local]);
  stage.scores = marginal_scores(chosen.ranking, chosen.selected);
  stage.selected = ColumnSet(std::move(mapped));
  stage.selected_names = features.names_of(stage.selected);
  stage.trace = chosen.dcov_trace;
  stage.elapsed_ms = timer.elapsed_ms();
  return stage;
}

}  // namespace detail

inline SelectionReport controlled_select(const DataMatrix& features, const DataMatrix& response,
                                         const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.mode != PipelineMode::controlled) throw InvalidArgument("controlled_select needs controlled mode");

  SelectionReport report;
  report.command = "select";
  const auto all = ColumnSet::range(features.cols());

  detail::StageTimer timer;
  const auto ranking = marginal_ranking(features, response, cfg.base);
  const auto marginal = detail::marginal_scores(ranking, all);
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < features.cols(); ++j) {
    if (marginal[j] >= *cfg.alpha) kept.push_back(j);
  }
  StageReport controlled;
  controlled.name = "controlled";
  controlled.selected = ColumnSet(std::move(kept));
  controlled.selected_names = features.names_of(controlled.selected);
  controlled.scores = detail::marginal_scores(ranking, controlled.selected);
  controlled.elapsed_ms = timer.elapsed_ms();
  if (controlled.selected.size() < 2) {
    throw DataError("controlled set has " + std::to_string(controlled.selected.size()) +
                    " feature(s) at alpha " + std::to_string(*cfg.alpha) + "; the diverse stage needs at least 2");
  }
  report.stages.push_back(controlled);

  report.stages.push_back(detail::diverse_stage(features, controlled.selected, cfg.base));
  report.final_selection = report.stages.back().selected;
  return report;
}

inline SelectionReport two_stage(const DataMatrix& features, const DataMatrix& response,
                                 const PipelineConfig& cfg) {
  cfg.validate();
  SelectionReport report;
  report.command = "select";
  const auto all = ColumnSet::range(features.cols());

  switch (cfg.mode) {
    case PipelineMode::kww_then_diverse: {
      auto relevant = detail::relevant_stage(features, all, response, cfg.base);
      if (relevant.selected.size() < 2) {
        throw DataError("relevant stage kept " + std::to_string(relevant.selected.size()) +
                        " feature(s); the diverse stage needs at least 2");
      }
      report.stages.push_back(relevant);
      report.stages.push_back(detail::diverse_stage(features, relevant.selected, cfg.base));
      break;
    }
    case PipelineMode::diverse_then_kww: {
      auto diverse = detail::diverse_stage(features, all, cfg.base);
      report.stages.push_back(diverse);
      report.stages.push_back(detail::relevant_stage(features, diverse.selected, response, cfg.base));
      break;
    }
    case PipelineMode::controlled:
      throw InvalidArgument("two_stage does not run controlled mode; use controlled_select");
  }
  report.final_selection = report.stages.back().selected;
  return report;
}

inline SelectionReport run_pipeline(const DataMatrix& features, const DataMatrix& response,
                                    const PipelineConfig& cfg) {
  return cfg.mode == PipelineMode::controlled ? controlled_select(features, response, cfg)
                                              : two_stage(features, response, cfg);
}

}  // namespace dcovsel

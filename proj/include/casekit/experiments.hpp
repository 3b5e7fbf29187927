#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "casekit/corpus.hpp"
#include "casekit/tagger.hpp"
#include "casekit/truecaser.hpp"

namespace casekit::experiments {

enum class ScenarioId {
  E1_CASED,
  E2_UNCASED,
  E3_C_PLUS_U,
  E3_5_HALF_MIXED,
  E4_TRUECASE_TEST,
  E5_TRUECASE_ALL,
};

const std::vector<ScenarioId>& all_scenarios();
std::string scenario_name(ScenarioId id);
ScenarioId parse_scenario(const std::string& name);

enum class MetricKind { SPAN_F1, ACCURACY, MENTION_F1 };
MetricKind parse_metric(const std::string& name);
std::string metric_name(MetricKind m);

struct ReportRow {
  ScenarioId scenario;
  double cased_score = 0.0;    // 0-100 scale, as in the result tables
  double uncased_score = 0.0;
  double average = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  MetricKind metric = MetricKind::SPAN_F1;
  uint64_t seed = 0;
  std::string config_digest;
};

// Trains a tagger on the scenario's transform of the train corpus and
// evaluates on the scenario's test condition(s). Scores are on the 0-100
// scale. E4/E5 require a truecaser.
std::pair<double, double> run_scenario(
    const corpus::Corpus& train, const corpus::Corpus& test, ScenarioId scenario,
    const std::optional<truecaser::TruecaserModel>& truecaser_model,
    const tagger::TaggerTrainConfig& tagger_config, MetricKind metric);

ExperimentReport run_matrix(
    const corpus::Corpus& train, const corpus::Corpus& test,
    const std::vector<ScenarioId>& scenarios,
    const std::optional<truecaser::TruecaserModel>& truecaser_model,
    const tagger::TaggerTrainConfig& tagger_config, MetricKind metric,
    uint64_t seed);

enum class ReportFormat { TEXT, JSON };

// TEXT renders aligned columns with 2-decimal half-up rounding; JSON emits
// unrounded values.
std::string render_report(const ExperimentReport& report, ReportFormat format);

}  // namespace casekit::experiments

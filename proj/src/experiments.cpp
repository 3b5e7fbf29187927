#include "casekit/experiments.hpp"

#include <cstdio>
#include <sstream>

#include "casekit/casing.hpp"
#include "casekit/errors.hpp"
#include "casekit/eval.hpp"
#include "json.hpp"

namespace casekit::experiments {

const std::vector<ScenarioId>& all_scenarios() {
  static const std::vector<ScenarioId> all = {
      ScenarioId::E1_CASED,        ScenarioId::E2_UNCASED,
      ScenarioId::E3_C_PLUS_U,     ScenarioId::E3_5_HALF_MIXED,
      ScenarioId::E4_TRUECASE_TEST, ScenarioId::E5_TRUECASE_ALL,
  };
  return all;
}

std::string scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::E1_CASED: return "1. Cased";
    case ScenarioId::E2_UNCASED: return "2. Uncased";
    case ScenarioId::E3_C_PLUS_U: return "3. C+U";
    case ScenarioId::E3_5_HALF_MIXED: return "3.5 Half Mixed";
    case ScenarioId::E4_TRUECASE_TEST: return "4. Truecase Test";
    case ScenarioId::E5_TRUECASE_ALL: return "5. Truecase All";
  }
  return "?";
}

ScenarioId parse_scenario(const std::string& name) {
  if (name == "e1" || name == "cased") return ScenarioId::E1_CASED;
  if (name == "e2" || name == "uncased") return ScenarioId::E2_UNCASED;
  if (name == "e3" || name == "c+u") return ScenarioId::E3_C_PLUS_U;
  if (name == "e3.5" || name == "half-mixed") return ScenarioId::E3_5_HALF_MIXED;
  if (name == "e4" || name == "truecase-test") return ScenarioId::E4_TRUECASE_TEST;
  if (name == "e5" || name == "truecase-all") return ScenarioId::E5_TRUECASE_ALL;
  throw ParseError("unknown scenario '" + name + "'");
}

MetricKind parse_metric(const std::string& name) {
  if (name == "span-f1") return MetricKind::SPAN_F1;
  if (name == "accuracy") return MetricKind::ACCURACY;
  if (name == "mention-f1") return MetricKind::MENTION_F1;
  throw ParseError("unknown metric '" + name + "' (expected span-f1|accuracy|mention-f1)");
}

std::string metric_name(MetricKind m) {
  switch (m) {
    case MetricKind::SPAN_F1: return "span-f1";
    case MetricKind::ACCURACY: return "accuracy";
    case MetricKind::MENTION_F1: return "mention-f1";
  }
  return "?";
}

namespace {

double evaluate(const tagger::TaggerModel& model, const corpus::Corpus& test,
                MetricKind metric) {
  const auto predicted = tagger::decode_corpus(test, model);
  switch (metric) {
    case MetricKind::SPAN_F1:
      return 100.0 * eval::span_prf(test, predicted).overall.f1();
    case MetricKind::ACCURACY:
      return 100.0 * eval::token_accuracy(test, predicted);
    case MetricKind::MENTION_F1:
      return 100.0 * eval::mention_detection_prf(test, predicted).f1();
  }
  return 0.0;
}

casing::TruecaseFn truecase_fn_for(
    const std::optional<truecaser::TruecaserModel>& model) {
  if (!model) return nullptr;
  const truecaser::TruecaserModel* m = &*model;
  return [m](const std::string& text) { return truecaser::truecase(*m, text); };
}

uint64_t fnv1a(const std::string& data, uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::pair<double, double> run_scenario(
    const corpus::Corpus& train, const corpus::Corpus& test, ScenarioId scenario,
    const std::optional<truecaser::TruecaserModel>& truecaser_model,
    const tagger::TaggerTrainConfig& tagger_config, MetricKind metric) {
  using casing::AugmentationStrategy;
  const uint64_t seed = tagger_config.seed;

  const auto lower_test =
      casing::augment_corpus(test, AugmentationStrategy::uncased(), seed);
  const auto truecase_fn = truecase_fn_for(truecaser_model);

  switch (scenario) {
    case ScenarioId::E1_CASED: {
      const auto model = tagger::train_tagger(train, tagger_config);
      return {evaluate(model, test, metric), evaluate(model, lower_test, metric)};
    }
    case ScenarioId::E2_UNCASED: {
      const auto model = tagger::train_tagger(
          casing::augment_corpus(train, AugmentationStrategy::uncased(), seed),
          tagger_config);
      // all test input is lowercased, so both columns coincide
      const double s = evaluate(model, lower_test, metric);
      return {s, s};
    }
    case ScenarioId::E3_C_PLUS_U: {
      const auto model = tagger::train_tagger(
          casing::augment_corpus(train, AugmentationStrategy::cased_plus_uncased(),
                                 seed),
          tagger_config);
      return {evaluate(model, test, metric), evaluate(model, lower_test, metric)};
    }
    case ScenarioId::E3_5_HALF_MIXED: {
      const auto model = tagger::train_tagger(
          casing::augment_corpus(train, AugmentationStrategy::half_mixed(0.5), seed),
          tagger_config);
      return {evaluate(model, test, metric), evaluate(model, lower_test, metric)};
    }
    case ScenarioId::E4_TRUECASE_TEST: {
      if (!truecase_fn) {
        throw ContractViolation("scenario 4 requires a truecaser model");
      }
      const auto model = tagger::train_tagger(train, tagger_config);
      const auto truecased_test = casing::augment_corpus(
          test, AugmentationStrategy::truecase_train(), seed, truecase_fn);
      const double s = evaluate(model, truecased_test, metric);
      return {s, s};
    }
    case ScenarioId::E5_TRUECASE_ALL: {
      if (!truecase_fn) {
        throw ContractViolation("scenario 5 requires a truecaser model");
      }
      const auto model = tagger::train_tagger(
          casing::augment_corpus(train, AugmentationStrategy::truecase_train(),
                                 seed, truecase_fn),
          tagger_config);
      const auto truecased_test = casing::augment_corpus(
          test, AugmentationStrategy::truecase_train(), seed, truecase_fn);
      const double s = evaluate(model, truecased_test, metric);
      return {s, s};
    }
  }
  throw ContractViolation("unknown scenario");
}

ExperimentReport run_matrix(
    const corpus::Corpus& train, const corpus::Corpus& test,
    const std::vector<ScenarioId>& scenarios,
    const std::optional<truecaser::TruecaserModel>& truecaser_model,
    const tagger::TaggerTrainConfig& tagger_config, MetricKind metric,
    uint64_t seed) {
  if (scenarios.empty()) throw ContractViolation("run_matrix: no scenarios");

  // every scenario retrains from the same seed, so row differences come from
  // the data transforms alone
  tagger::TaggerTrainConfig cfg = tagger_config;
  cfg.seed = seed;

  ExperimentReport report;
  report.metric = metric;
  report.seed = seed;
  uint64_t digest = fnv1a(corpus::write_conll(train), 0xCBF29CE484222325ULL);
  digest = fnv1a(corpus::write_conll(test), digest);
  digest = fnv1a(metric_name(metric) + "#" + std::to_string(seed) + "#" +
                     std::to_string(cfg.epochs),
                 digest);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  report.config_digest = buf;

  for (ScenarioId id : scenarios) {
    try {
      const auto [cased, uncased] =
          run_scenario(train, test, id, truecaser_model, cfg, metric);
      report.rows.push_back(
          {id, cased, uncased, eval::scenario_average(cased, uncased)});
    } catch (const Error& e) {
      throw Error("scenario " + scenario_name(id) + ": " + e.what());
    }
  }
  return report;
}

std::string render_report(const ExperimentReport& report, ReportFormat format) {
  if (format == ReportFormat::JSON) {
    nlohmann::json j;
    j["metric"] = metric_name(report.metric);
    j["seed"] = report.seed;
    j["config_digest"] = report.config_digest;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
      rows.push_back({{"scenario", scenario_name(row.scenario)},
                      {"cased", row.cased_score},
                      {"uncased", row.uncased_score},
                      {"avg", row.average}});
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-18s %9s %9s %9s\n", "Scenario", "Test (C)",
                "Test (U)", "Avg");
  out << line;
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof(line), "%-18s %9s %9s %9s\n",
                  scenario_name(row.scenario).c_str(),
                  eval::render_score(row.cased_score).c_str(),
                  eval::render_score(row.uncased_score).c_str(),
                  eval::render_score(row.average).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace casekit::experiments

#include <cstdio>
#include <fstream>
#include <memory>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "casekit/casing.hpp"
#include "casekit/corpus.hpp"
#include "casekit/errors.hpp"
#include "casekit/eval.hpp"
#include "casekit/experiments.hpp"
#include "casekit/tagger.hpp"
#include "casekit/truecaser.hpp"

namespace {

using namespace casekit;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
}

corpus::Corpus load_train_corpus(const std::string& path, const std::string& format) {
  const std::string text = read_file(path);
  if (format == "plain") return corpus::parse_plain(text);
  if (format == "conll") return corpus::parse_conll(text);
  throw ParseError("unknown corpus format '" + format + "'");
}

corpus::Corpus truecase_corpus(const truecaser::TruecaserModel& model,
                               const corpus::Corpus& gold) {
  // lowercase, truecase per sentence; token boundaries survive because the
  // truecaser never touches spaces
  return casing::augment_corpus(
      gold, casing::AugmentationStrategy::truecase_train(), 0,
      [&](const std::string& text) { return truecaser::truecase(model, text); });
}

int run(int argc, char** argv) {
  CLI::App app{"casing-robust sequence tagging toolkit"};
  app.require_subcommand(1);

  // fixture generate
  auto* fixture = app.add_subcommand("fixture", "synthetic corpus tools");
  fixture->require_subcommand(1);
  auto* fix_gen = fixture->add_subcommand("generate", "generate a train/test fixture");
  std::string fix_spec, fix_out_train, fix_out_test;
  fix_gen->add_option("--spec", fix_spec, "fixture spec JSON file")->required();
  fix_gen->add_option("--out-train", fix_out_train)->required();
  fix_gen->add_option("--out-test", fix_out_test)->required();

  // truecase train/apply/eval
  auto* truecase_cmd = app.add_subcommand("truecase", "character-level truecaser");
  truecase_cmd->require_subcommand(1);
  auto* tc_train = truecase_cmd->add_subcommand("train", "train a truecaser");
  std::string tc_train_path, tc_config_path, tc_out, tc_format = "conll";
  tc_train->add_option("--train", tc_train_path, "training corpus")->required();
  tc_train->add_option("--format", tc_format, "conll|plain (default conll)");
  tc_train->add_option("--config", tc_config_path, "training config JSON file");
  tc_train->add_option("--out", tc_out, "model output path")->required();

  auto* tc_apply = truecase_cmd->add_subcommand("apply", "truecase plain text");
  std::string tc_model_path, tc_in, tc_apply_out;
  tc_apply->add_option("--model", tc_model_path)->required();
  tc_apply->add_option("--in", tc_in, "input text, one sentence per line")->required();
  tc_apply->add_option("--out", tc_apply_out)->required();

  auto* tc_eval = truecase_cmd->add_subcommand("eval", "word-level P/R/F1");
  std::string tc_eval_model, tc_gold;
  tc_eval->add_option("--model", tc_eval_model)->required();
  tc_eval->add_option("--gold", tc_gold, "gold CoNLL corpus")->required();

  // augment
  auto* augment = app.add_subcommand("augment", "apply a casing strategy");
  std::string aug_strategy, aug_in, aug_out, aug_truecaser;
  uint64_t aug_seed = 0;
  augment->add_option("--strategy", aug_strategy,
                      "cased|uncased|c+u|half-mixed:<p>|truecase-train")
      ->required();
  augment->add_option("--seed", aug_seed);
  augment->add_option("--truecaser", aug_truecaser, "truecaser model path");
  augment->add_option("--in", aug_in)->required();
  augment->add_option("--out", aug_out)->required();

  // tag train/eval
  auto* tag = app.add_subcommand("tag", "sequence tagger");
  tag->require_subcommand(1);
  auto* tag_train = tag->add_subcommand("train", "train an averaged perceptron tagger");
  std::string tag_train_path, tag_out;
  uint64_t tag_seed = 0;
  size_t tag_epochs = 5;
  tag_train->add_option("--train", tag_train_path)->required();
  tag_train->add_option("--epochs", tag_epochs);
  tag_train->add_option("--seed", tag_seed);
  tag_train->add_option("--out", tag_out)->required();

  auto* tag_eval = tag->add_subcommand("eval", "score a tagger against gold");
  std::string tag_model_path, tag_gold, tag_metric = "span-f1";
  tag_eval->add_option("--model", tag_model_path)->required();
  tag_eval->add_option("--gold", tag_gold)->required();
  tag_eval->add_option("--metric", tag_metric, "span-f1|accuracy|mention-f1");

  // experiment run
  auto* experiment = app.add_subcommand("experiment", "scenario matrix");
  experiment->require_subcommand(1);
  auto* exp_run = experiment->add_subcommand("run", "run the scenario matrix");
  std::string exp_train, exp_test, exp_truecaser, exp_metric = "span-f1";
  std::string exp_format = "text";
  uint64_t exp_seed = 0;
  size_t exp_epochs = 5;
  std::vector<std::string> exp_scenarios;
  exp_run->add_option("--train", exp_train)->required();
  exp_run->add_option("--test", exp_test)->required();
  exp_run->add_option("--truecaser", exp_truecaser, "truecaser model (needed for e4/e5)");
  exp_run->add_option("--metric", exp_metric, "span-f1|accuracy|mention-f1");
  exp_run->add_option("--seed", exp_seed);
  exp_run->add_option("--epochs", exp_epochs, "tagger training epochs");
  exp_run->add_option("--format", exp_format, "text|json");
  exp_run->add_option("--scenario", exp_scenarios,
                      "subset of e1 e2 e3 e3.5 e4 e5 (default: all)");

  CLI11_PARSE(app, argc, argv);

  if (fix_gen->parsed()) {
    const auto spec = corpus::parse_fixture_spec(read_file(fix_spec));
    const auto [train, test] = corpus::generate_fixture(spec);
    write_file(fix_out_train, corpus::write_conll(train));
    write_file(fix_out_test, corpus::write_conll(test));
    return 0;
  }

  if (tc_train->parsed()) {
    const auto c = load_train_corpus(tc_train_path, tc_format);
    truecaser::TruecaserTrainConfig cfg;
    if (!tc_config_path.empty()) {
      cfg = truecaser::parse_train_config(read_file(tc_config_path));
    }
    const auto result = truecaser::train_truecaser(c, cfg);
    truecaser::save_model_file(result.model, tc_out);
    for (size_t e = 0; e < result.epoch_losses.size(); ++e) {
      std::fprintf(stderr, "epoch %zu loss %.6f\n", e + 1, result.epoch_losses[e]);
    }
    return 0;
  }

  if (tc_apply->parsed()) {
    const auto model = truecaser::load_model_file(tc_model_path);
    std::istringstream in(read_file(tc_in));
    std::string line, out;
    while (std::getline(in, line)) {
      out += truecaser::truecase(model, line);
      out += '\n';
    }
    write_file(tc_apply_out, out);
    return 0;
  }

  if (tc_eval->parsed()) {
    const auto model = truecaser::load_model_file(tc_eval_model);
    const auto gold = corpus::parse_conll(read_file(tc_gold));
    const auto predicted = truecase_corpus(model, gold);
    const auto prf = eval::word_level_prf(gold, predicted);
    std::printf("precision %.4f\nrecall %.4f\nf1 %.4f\n", prf.precision(),
                prf.recall(), prf.f1());
    return 0;
  }

  if (augment->parsed()) {
    const auto strategy = casing::parse_strategy(aug_strategy);
    casing::TruecaseFn fn;
    if (strategy.kind == casing::StrategyKind::TRUECASE_TRAIN) {
      if (aug_truecaser.empty()) {
        throw ContractViolation("--strategy truecase-train requires --truecaser");
      }
      auto model = std::make_shared<truecaser::TruecaserModel>(
          truecaser::load_model_file(aug_truecaser));
      fn = [model](const std::string& text) {
        return truecaser::truecase(*model, text);
      };
    }
    const auto c = corpus::parse_conll(read_file(aug_in));
    write_file(aug_out, corpus::write_conll(
                            casing::augment_corpus(c, strategy, aug_seed, fn)));
    return 0;
  }

  if (tag_train->parsed()) {
    const auto c = corpus::parse_conll(read_file(tag_train_path));
    tagger::TaggerTrainConfig cfg;
    cfg.epochs = tag_epochs;
    cfg.seed = tag_seed;
    const auto model = tagger::train_tagger(c, cfg);
    tagger::save_tagger_file(model, tag_out);
    return 0;
  }

  if (tag_eval->parsed()) {
    const auto model = tagger::load_tagger_file(tag_model_path);
    const auto gold = corpus::parse_conll(read_file(tag_gold));
    const auto metric = experiments::parse_metric(tag_metric);
    const auto predicted = tagger::decode_corpus(gold, model);
    switch (metric) {
      case experiments::MetricKind::SPAN_F1: {
        const auto r = eval::span_prf(gold, predicted);
        std::printf("precision %.4f\nrecall %.4f\nf1 %.4f\n",
                    r.overall.precision(), r.overall.recall(), r.overall.f1());
        for (const auto& [type, prf] : r.per_type) {
          std::printf("%s f1 %.4f\n", type.c_str(), prf.f1());
        }
        break;
      }
      case experiments::MetricKind::ACCURACY:
        std::printf("accuracy %.4f\n", eval::token_accuracy(gold, predicted));
        break;
      case experiments::MetricKind::MENTION_F1: {
        const auto prf = eval::mention_detection_prf(gold, predicted);
        std::printf("precision %.4f\nrecall %.4f\nf1 %.4f\n", prf.precision(),
                    prf.recall(), prf.f1());
        break;
      }
    }
    return 0;
  }

  if (exp_run->parsed()) {
    const auto train = corpus::parse_conll(read_file(exp_train));
    const auto test = corpus::parse_conll(read_file(exp_test));
    std::optional<truecaser::TruecaserModel> truecaser_model;
    if (!exp_truecaser.empty()) {
      truecaser_model = truecaser::load_model_file(exp_truecaser);
    }
    std::vector<experiments::ScenarioId> scenarios;
    if (exp_scenarios.empty()) {
      scenarios = experiments::all_scenarios();
    } else {
      for (const auto& s : exp_scenarios) {
        scenarios.push_back(experiments::parse_scenario(s));
      }
    }
    tagger::TaggerTrainConfig cfg;
    cfg.epochs = exp_epochs;
    const auto report = experiments::run_matrix(
        train, test, scenarios, truecaser_model, cfg,
        experiments::parse_metric(exp_metric), exp_seed);
    const auto format = exp_format == "json" ? experiments::ReportFormat::JSON
                                             : experiments::ReportFormat::TEXT;
    std::fputs(experiments::render_report(report, format).c_str(), stdout);
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const casekit::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

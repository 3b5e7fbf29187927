#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "casekit/casing.hpp"
#include "casekit/corpus.hpp"
#include "casekit/errors.hpp"
#include "casekit/eval.hpp"
#include "casekit/experiments.hpp"
#include "casekit/tagger.hpp"
#include "casekit/truecaser.hpp"

namespace py = pybind11;
using namespace casekit;

namespace {

std::optional<truecaser::TruecaserModel> optional_model(
    const py::object& truecaser_model) {
  if (truecaser_model.is_none()) return std::nullopt;
  return truecaser_model.cast<truecaser::TruecaserModel>();
}

}  // namespace

PYBIND11_MODULE(_casekit, m) {
  m.doc() = "casing-robust sequence tagging toolkit";

  py::register_exception<ContractViolation>(m, "ContractViolation");
  py::register_exception<ParseError>(m, "ParseError");

  py::enum_<corpus::TagsetKind>(m, "TagsetKind")
      .value("NER_BIO", corpus::TagsetKind::NER_BIO)
      .value("POS", corpus::TagsetKind::POS)
      .value("PLAIN", corpus::TagsetKind::PLAIN);

  py::class_<corpus::Token>(m, "Token")
      .def(py::init<>())
      .def_readwrite("surface", &corpus::Token::surface)
      .def_readwrite("tag", &corpus::Token::tag);

  py::class_<corpus::Sentence>(m, "Sentence")
      .def(py::init<>())
      .def_readwrite("tokens", &corpus::Sentence::tokens)
      .def_readwrite("is_document_start", &corpus::Sentence::is_document_start);

  py::class_<corpus::Corpus>(m, "Corpus")
      .def(py::init<>())
      .def_readwrite("sentences", &corpus::Corpus::sentences)
      .def_readwrite("tagset_kind", &corpus::Corpus::tagset_kind)
      .def("__len__", [](const corpus::Corpus& c) { return c.sentences.size(); })
      .def("__eq__", [](const corpus::Corpus& a, const corpus::Corpus& b) {
        return a == b;
      });

  py::class_<corpus::FixtureSpec>(m, "FixtureSpec")
      .def(py::init<>())
      .def_readwrite("vocab_size", &corpus::FixtureSpec::vocab_size)
      .def_readwrite("entity_lexicon_size", &corpus::FixtureSpec::entity_lexicon_size)
      .def_readwrite("sentences", &corpus::FixtureSpec::sentences)
      .def_readwrite("cased_entity_rate", &corpus::FixtureSpec::cased_entity_rate)
      .def_readwrite("seed", &corpus::FixtureSpec::seed)
      .def_readwrite("tagset_kind", &corpus::FixtureSpec::tagset_kind);

  m.def("parse_conll", &corpus::parse_conll, py::arg("text"),
        py::arg("token_column") = 0, py::arg("tag_column") = -1);
  m.def("write_conll", &corpus::write_conll);
  m.def("parse_plain", &corpus::parse_plain);
  m.def("convert_iob1_to_bio2", &corpus::convert_iob1_to_bio2);
  m.def("generate_fixture", &corpus::generate_fixture);

  m.def("lowercase_text", &casing::lowercase_text);
  m.def("extract_case_pattern", [](const std::string& s) {
    const auto p = casing::extract_case_pattern(s);
    std::string out;
    for (bool u : p) out.push_back(u ? 'U' : 'L');
    return out;
  });
  m.def("apply_case_pattern", [](const std::string& s, const std::string& labels) {
    casing::CasePattern p;
    for (char c : labels) p.push_back(c == 'U');
    return casing::apply_case_pattern(s, p);
  });
  m.def(
      "augment_corpus",
      [](const corpus::Corpus& c, const std::string& strategy, uint64_t seed,
         const py::object& truecaser_model) {
        casing::TruecaseFn fn;
        auto model = optional_model(truecaser_model);
        if (model) {
          fn = [model](const std::string& text) {
            return truecaser::truecase(*model, text);
          };
        }
        return casing::augment_corpus(c, casing::parse_strategy(strategy), seed, fn);
      },
      py::arg("corpus"), py::arg("strategy"), py::arg("seed") = 0,
      py::arg("truecaser") = py::none());

  py::class_<truecaser::TruecaserModel>(m, "TruecaserModel")
      .def("__eq__", [](const truecaser::TruecaserModel& a,
                        const truecaser::TruecaserModel& b) { return a == b; });

  py::class_<truecaser::TruecaserTrainConfig>(m, "TruecaserTrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &truecaser::TruecaserTrainConfig::epochs)
      .def_readwrite("batch_size", &truecaser::TruecaserTrainConfig::batch_size)
      .def_readwrite("lr", &truecaser::TruecaserTrainConfig::lr)
      .def_readwrite("seed", &truecaser::TruecaserTrainConfig::seed)
      .def_readwrite("min_char_freq", &truecaser::TruecaserTrainConfig::min_char_freq)
      .def_readwrite("embedding_dim", &truecaser::TruecaserTrainConfig::embedding_dim)
      .def_readwrite("hidden_dim", &truecaser::TruecaserTrainConfig::hidden_dim);

  m.def("train_truecaser", [](const corpus::Corpus& c,
                              const truecaser::TruecaserTrainConfig& cfg) {
    auto result = truecaser::train_truecaser(c, cfg);
    return py::make_tuple(result.model, result.epoch_losses);
  });
  m.def("truecase", &truecaser::truecase);
  m.def("save_truecaser", &truecaser::save_model);
  m.def("load_truecaser", &truecaser::load_model);

  py::class_<tagger::TaggerModel>(m, "TaggerModel")
      .def_readonly("labels", &tagger::TaggerModel::labels);
  py::class_<tagger::TaggerTrainConfig>(m, "TaggerTrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &tagger::TaggerTrainConfig::epochs)
      .def_readwrite("seed", &tagger::TaggerTrainConfig::seed)
      .def_readwrite("shuffle", &tagger::TaggerTrainConfig::shuffle);

  m.def("word_shape", &tagger::word_shape, py::arg("surface"),
        py::arg("collapsed") = false);
  m.def("train_tagger", &tagger::train_tagger);
  m.def("decode_corpus", &tagger::decode_corpus);
  m.def("save_tagger", &tagger::save_tagger);
  m.def("load_tagger", &tagger::load_tagger);

  py::class_<eval::PRF>(m, "PRF")
      .def_readonly("true_positives", &eval::PRF::true_positives)
      .def_readonly("false_positives", &eval::PRF::false_positives)
      .def_readonly("false_negatives", &eval::PRF::false_negatives)
      .def_property_readonly("precision", &eval::PRF::precision)
      .def_property_readonly("recall", &eval::PRF::recall)
      .def_property_readonly("f1", &eval::PRF::f1);

  m.def("word_level_prf", &eval::word_level_prf);
  m.def("span_prf", [](const corpus::Corpus& gold,
                       const std::vector<std::vector<std::string>>& pred) {
    return eval::span_prf(gold, pred).overall;
  });
  m.def("token_accuracy", &eval::token_accuracy);
  m.def("mention_detection_prf", &eval::mention_detection_prf);
  m.def("scenario_average", &eval::scenario_average);
  m.def("render_score", &eval::render_score);

  m.def(
      "run_matrix",
      [](const corpus::Corpus& train, const corpus::Corpus& test,
         const std::vector<std::string>& scenarios,
         const py::object& truecaser_model,
         const tagger::TaggerTrainConfig& tagger_config,
         const std::string& metric, uint64_t seed, const std::string& format) {
        std::vector<experiments::ScenarioId> ids;
        if (scenarios.empty()) {
          ids = experiments::all_scenarios();
        } else {
          for (const auto& s : scenarios) ids.push_back(experiments::parse_scenario(s));
        }
        const auto report = experiments::run_matrix(
            train, test, ids, optional_model(truecaser_model), tagger_config,
            experiments::parse_metric(metric), seed);
        return experiments::render_report(report,
                                          format == "json"
                                              ? experiments::ReportFormat::JSON
                                              : experiments::ReportFormat::TEXT);
      },
      py::arg("train"), py::arg("test"),
      py::arg("scenarios") = std::vector<std::string>{},
      py::arg("truecaser") = py::none(),
      py::arg("tagger_config") = tagger::TaggerTrainConfig{},
      py::arg("metric") = "span-f1", py::arg("seed") = 0,
      py::arg("format") = "text");
}

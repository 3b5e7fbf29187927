"""Smoke tests for the python bindings."""

import pytest

import casekit as ck


def make_corpus(text):
    return ck.parse_conll(text)


def test_conll_round_trip():
    text = "Alice NNP B-PER\nran VBD O\n\n"
    corpus = make_corpus(text)
    assert len(corpus) == 1
    assert corpus.tagset_kind == ck.TagsetKind.NER_BIO
    assert corpus.sentences[0].tokens[0].surface == "Alice"
    assert ck.parse_conll(ck.write_conll(corpus)) == corpus


def test_parse_error_maps_to_python():
    with pytest.raises(ck.ParseError):
        ck.parse_conll("bad\n", 0, 1)


def test_case_patterns():
    assert ck.lowercase_text("Mr. Susulu") == "mr. susulu"
    assert ck.extract_case_pattern("eBay") == "LULL"
    assert ck.apply_case_pattern("ebay", "LULL") == "eBay"


def test_fixture_and_augmentation():
    spec = ck.FixtureSpec()
    spec.vocab_size = 20
    spec.entity_lexicon_size = 5
    spec.sentences = 50
    spec.seed = 3
    train, test = ck.generate_fixture(spec)
    assert len(train) + len(test) == 50

    lowered = ck.augment_corpus(train, "uncased")
    assert len(lowered) == len(train)
    doubled = ck.augment_corpus(train, "c+u")
    assert len(doubled) == 2 * len(train)


def test_tagger_end_to_end():
    corpus = make_corpus("Alice NNP B-PER\nwent VBD O\nhome NN O\n\n")
    cfg = ck.TaggerTrainConfig()
    cfg.epochs = 2
    model = ck.train_tagger(corpus, cfg)
    assert ck.decode_corpus(corpus, model)[0] == ["B-PER", "O", "O"]
    blob = ck.save_tagger(model)
    assert ck.save_tagger(ck.load_tagger(blob)) == blob


def test_truecaser_end_to_end():
    corpus = make_corpus("Mr NNP O\nsmith NN O\n\nMr NNP O\njones NN O\n\n")
    cfg = ck.TruecaserTrainConfig()
    cfg.embedding_dim = 8
    cfg.hidden_dim = 8
    cfg.epochs = 3
    model, losses = ck.train_truecaser(corpus, cfg)
    assert len(losses) == 3
    out = ck.truecase(model, "mr smith")
    assert out.lower() == "mr smith"
    assert ck.load_truecaser(ck.save_truecaser(model)) == model


def test_metrics():
    gold = make_corpus("a _ B-PER\nb _ I-PER\nc _ O\n\n")
    prf = ck.span_prf(gold, [["B-PER", "I-PER", "O"]])
    assert prf.f1 == 1.0
    assert ck.token_accuracy(gold, [["B-PER", "O", "O"]]) == pytest.approx(2 / 3)
    assert ck.render_score(ck.scenario_average(92.45, 34.46)) == "63.46"


def test_experiment_matrix():
    spec = ck.FixtureSpec()
    spec.vocab_size = 20
    spec.entity_lexicon_size = 5
    spec.sentences = 100
    spec.seed = 7
    train, test = ck.generate_fixture(spec)
    cfg = ck.TaggerTrainConfig()
    cfg.epochs = 2
    report = ck.run_matrix(train, test, scenarios=["e1", "e2"],
                           tagger_config=cfg, seed=1)
    lines = report.splitlines()
    assert lines[0].split() == ["Scenario", "Test", "(C)", "Test", "(U)", "Avg"]
    assert len(lines) == 3

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deftkit.classifier import (NaiveBayesModel, Prediction, parse_predictions, predict_file,
                                predict_nb, tokenize, train_nb, write_predictions)
from deftkit.corpus import ClassificationInstance as CI
from deftkit.errors import DeftError, LengthMismatchError, ParseError

TOY = [CI("a a", 1), CI("b", 0)]


def test_tokenize():
    assert tokenize("Water boils at 100C.") == ["water", "boils", "at", "100c"]
    assert tokenize("") == []
    assert tokenize("a-b") == ["a", "b"]


def test_toy_likelihoods():
    # hand-computed: V={a,b}; class 1 has a:2, b:0 -> (2+1)/(2+2), (0+1)/(2+2)
    m = train_nb(TOY, 1.0)
    lik1 = np.exp(m.log_lik[:, 1])
    assert lik1[m.vocab["a"]] == pytest.approx(0.75, abs=1e-12)
    assert lik1[m.vocab["b"]] == pytest.approx(0.25, abs=1e-12)
    lik0 = np.exp(m.log_lik[:, 0])
    assert lik0[m.vocab["a"]] == pytest.approx(1 / 3, abs=1e-12)
    assert np.exp(m.log_prior) == pytest.approx([0.5, 0.5])


def test_toy_prediction():
    m = train_nb(TOY)
    p = predict_nb(m, "a")
    assert p.label == 1
    assert p.score == pytest.approx(math.log(0.75) - math.log(1 / 3), abs=1e-12)


def test_empty_and_unseen():
    m = train_nb([CI("x y", 1), CI("z", 0), CI("z w", 0)])
    prior = m.log_prior[1] - m.log_prior[0]
    assert predict_nb(m, "").score == pytest.approx(prior)
    assert predict_nb(m, "unseen words only").score == pytest.approx(prior)
    assert predict_nb(m, "").label == 0


def test_tie_goes_to_zero():
    m = train_nb(TOY)
    assert m.score("") == 0.0
    assert m.predict("").label == 0


def test_single_class_rejected():
    with pytest.raises(DeftError):
        train_nb([CI("a", 1), CI("b", 1)])


def random_corpus(rng, n=30):
    words = "cell atom gene is a the of unit energy means".split()
    out = [CI(" ".join(rng.choice(words) for _ in range(rng.randint(0, 8))), rng.randint(0, 1))
           for _ in range(n)]
    out[0] = CI(out[0].text, 0)
    out[1] = CI(out[1].text, 1)
    return out


def test_normalization_many_corpora():
    rng = random.Random(0)
    for _ in range(100):
        train_nb(random_corpus(rng), alpha=rng.choice([0.1, 0.5, 1.0, 2.0])).check(1e-9)


def test_permutation_invariance():
    rng = random.Random(1)
    data = random_corpus(rng, 50)
    a = train_nb(data)
    shuffled = data[:]
    rng.shuffle(shuffled)
    b = train_nb(shuffled)
    assert a.vocab == b.vocab
    assert np.array_equal(a.log_lik, b.log_lik) and np.array_equal(a.log_prior, b.log_prior)


@settings(max_examples=100)
@given(st.permutations(["cell", "atom", "gene", "unit", "the", "zzz"]))
def test_word_order_invariance(words):
    m = train_nb(random_corpus(random.Random(2), 40))
    assert m.score(" ".join(words)) == m.score("cell atom gene unit the zzz")


def test_monotonicity():
    m = train_nb(random_corpus(random.Random(4), 60))
    diff = m.log_lik[:, 1] - m.log_lik[:, 0]
    for term, i in m.vocab.items():
        base = m.score("cell the")
        if diff[i] > 0:
            assert m.score("cell the " + term) > base
        elif diff[i] < 0:
            assert m.score("cell the " + term) < base


def test_save_load(tmp_path):
    m = train_nb(random_corpus(random.Random(5), 40), alpha=0.5)
    m.save(tmp_path / "m.nb")
    n = NaiveBayesModel.load(tmp_path / "m.nb")
    assert n.vocab == m.vocab and n.alpha == 0.5
    assert np.array_equal(n.log_lik, m.log_lik) and np.array_equal(n.log_prior, m.log_prior)
    header = (tmp_path / "m.nb").read_text().splitlines()[:4]
    assert header[0] == "#deftkit-nb v1" and header[1] == "alpha\t0.5"


def test_load_rejects_other_files(tmp_path):
    p = tmp_path / "x"
    p.write_text("hello\n")
    with pytest.raises(ParseError):
        NaiveBayesModel.load(p)


def test_external_predictions(tmp_path):
    inst = [CI("a", 1), CI("b", 0), CI("c", 1)]
    p = tmp_path / "pred.txt"
    p.write_text("1\n0\t-2.5\n1\t0.3\n")
    preds = predict_file(p, inst)
    assert preds == [Prediction(1, 1.0), Prediction(0, -2.5), Prediction(1, 0.3)]
    p.write_text("1\n0\n")
    with pytest.raises(LengthMismatchError):
        predict_file(p, inst)


def test_external_predictions_malformed():
    with pytest.raises(ParseError):
        parse_predictions("2\n")
    with pytest.raises(ParseError):
        parse_predictions("1\t-3.0\n")


def test_model_path_matches_predict_nb():
    m = train_nb(random_corpus(random.Random(6), 40))
    inst = random_corpus(random.Random(7), 20)
    assert predict_file(m, inst) == [predict_nb(m, x.text) for x in inst]
    assert parse_predictions(write_predictions(predict_file(m, inst))) == predict_file(m, inst)

"""Smoke tests for the python bindings: each exposed operation is called once
with a value already pinned by the C++ suites."""

import json
import math
import os
import sys
import tempfile

import mtdiag


def approx(a, b, tol=1e-9):
    assert abs(a - b) < tol, f"{a} != {b} (tol {tol})"


def test_tar():
    approx(mtdiag.tar(2469, 151669), 2469 / 151669)
    assert mtdiag.tar_percent(2469, 151669) == "1.63%"
    assert mtdiag.tar_percent(1, 2, decimals=1) == "50.0%"


def test_tokenizer_roundtrip():
    vocab = {chr(cp): i for i, cp in enumerate(range(ord("a"), ord("f") + 1))}
    vocab["ab"] = 6
    with tempfile.TemporaryDirectory() as tmp:
        vocab_path = os.path.join(tmp, "vocab.json")
        merges_path = os.path.join(tmp, "merges.txt")
        with open(vocab_path, "w") as f:
            json.dump(vocab, f)
        with open(merges_path, "w") as f:
            f.write("a b\n")
        model = mtdiag.load_vocab(vocab_path, merges_path, byte_level=False)
        assert model.vocab_size == 7
        assert mtdiag.encode(model, "abab") == [6, 6]
        assert mtdiag.encode(model, "") == []
    assert sorted(mtdiag.unique_ids([[1, 1, 2], [2, 3]])) == [1, 2, 3]


def test_metrics():
    corpus = ["the cat sat on the mat .", "hello , world !"]
    approx(mtdiag.bleu(corpus, corpus), 100.0)
    approx(mtdiag.chrf(corpus, corpus), 100.0)
    assert mtdiag.bleu(["the the the the"], ["the cat"]) == 0.0
    assert mtdiag.bleu(["the the the the"], ["the cat"], smoothing="exp") > 0.0


def test_statistics():
    actual = [4.65, 30.11, 12.94, 16.21, 0.50, 0.07, 1.53, 0.23, 4.92, 0.19]
    tar = [2.58, 3.63, 2.56, 4.17, 1.73, 2.30, 2.88, 2.46, 4.78, 2.34]
    r, p_r = mtdiag.pearson(actual, tar)
    rho, p_rho = mtdiag.spearman(actual, tar)
    tau, p_tau = mtdiag.kendall(actual, tar)
    approx(r, 0.4980, 5e-4)
    approx(rho, 0.7697, 5e-4)
    approx(tau, 0.5556, 5e-4)
    assert p_r > 0.05 and p_rho < 0.05 and p_tau < 0.05

    labels = ["Arabic", "English", "French", "Chinese", "Tamil",
              "Gujarati", "Hindi", "Malayalam", "Portuguese", "Telugu"]
    rows = mtdiag.leave_one_out(labels, actual, tar)
    assert len(rows) == 11
    assert rows[0]["left_out"] == "None"
    by_label = {row["left_out"]: row for row in rows}
    approx(by_label["Portuguese"]["r"], 0.7544, 5e-4)
    assert by_label["Portuguese"]["significant_r"]

    slope, intercept, r2 = mtdiag.ols_fit([1.0, 2.0, 3.0, 4.0], [1.0, 3.0, 5.0, 7.0])
    approx(slope, 2.0)
    approx(intercept, -1.0)
    approx(r2, 1.0)


def test_noise_and_reasoning():
    assert mtdiag.detect_explanatory("**Explanation of choices:** x", ["explanation"])
    assert not mtdiag.detect_explanatory("saubere ausgabe", ["explanation"])
    assert mtdiag.wrong_language("en", 0.95, "de")
    assert not mtdiag.wrong_language("en", 0.55, "de", threshold=0.60)

    reasoning, answer, unterminated = mtdiag.split_reasoning("<think>plan</think>Hallo")
    assert (reasoning, answer, unterminated) == ("plan", "Hallo", False)


def test_corpus_helpers():
    items = [f"item{i}" for i in range(10)]
    a = mtdiag.sample(items, 3, 42)
    b = mtdiag.sample(items, 3, 42)
    assert a == b and len(a) == 3 and len(set(a)) == 3

    prompt = mtdiag.render_prompt("p2", "en", "de", "Hello")
    assert prompt == ("Translate the following English into German "
                      "and only output the target text: Hello")
    approx(mtdiag.mean_distance([0.1, 0.2, 0.3, 0.4, 0.5, 0.6]), 0.35)


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed (mtdiag {mtdiag.__version__})")


if __name__ == "__main__":
    sys.exit(main())

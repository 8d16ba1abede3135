"""Quantum-plane side: braid-relation checks for the built-in matrices,
bialgebra consistency of the induced reorder rules, normal-form rewriting
(cross-checked against a naive expander), confluence, and the closed
product formulas."""

from __future__ import annotations

import json
import random

import pytest

from qgl11.plane import (
    DEFAULT_STEP_CAP,
    LEMMA2_FACTORS,
    LEMMA2_ZERO_FACTORS,
    RMatrix,
    RewriteLimitError,
    builtin_rmatrix,
    case_rmatrix,
    check_frt_consistency,
    closed_product_r12,
    confluence_probe,
    elem_eq,
    elem_sub,
    gmul,
    mono_elem,
    perturb_rmatrix,
    presentation,
    reordered_odd_product,
    rewrite_graph_acyclic,
    rewrite_words,
    word_to_mono,
    ybe_check,
)
from qgl11.scalars import Scalar, SymbolicField, random_numeric_field

CASES = ("classical", "r22", "r12", "r11")
FRAMEWORKS = ("unbraided", "braided")
BUILTINS = ("superidentity", "r22", "r12", "r11")


def _all_presentations():
    for case in CASES:
        for fw in FRAMEWORKS:
            yield presentation(case, fw)


def _naive_normalize(pres, word, rightmost=False, cap=100_000):
    """Reference normalizer: plain worklist, no sharing, no memoization."""
    rules = pres.rules
    pending = [(word, pres.field.one())]
    out = {}
    steps = 0
    while pending:
        w, coeff = pending.pop()
        idx = -1
        scan = range(len(w) - 2, -1, -1) if rightmost else range(len(w) - 1)
        for i in scan:
            if w[i:i + 2] in rules:
                idx = i
                break
        if idx < 0:
            mono = word_to_mono(w)
            cur = out.get(mono)
            s = coeff if cur is None else (cur + coeff).canon()
            if s.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = s
            continue
        steps += 1
        if steps > cap:
            raise RewriteLimitError("naive normalizer exceeded its cap")
        head, tail = w[:idx], w[idx + 2:]
        for c, repl in rules[w[idx:idx + 2]]:
            pending.append((head + repl + tail, coeff * c))
    return out


def _random_word(rng, max_len):
    n = rng.randint(2, max_len)
    return "".join(rng.choice("adbc") for _ in range(n))


def test_braid_relation_builtins():
    for name in BUILTINS:
        res = ybe_check(builtin_rmatrix(name))
        assert res.ok, (name, res.residuals[:3])
        assert res.residuals == []


def test_braid_relation_perturbation_breaks():
    one = Scalar.from_rational(1)
    for name in BUILTINS:
        broken = perturb_rmatrix(builtin_rmatrix(name), 1, 2, one)
        res = ybe_check(broken)
        assert not res.ok, name
        assert res.residuals


def test_braid_relation_numeric_backend():
    field = random_numeric_field(3)
    for name in BUILTINS:
        res = ybe_check(builtin_rmatrix(name, field))
        assert res.ok, name


def test_case_rmatrix_mapping():
    assert case_rmatrix("classical").name == "superidentity"
    for case in ("r22", "r12", "r11"):
        assert case_rmatrix(case).name == case


def test_bialgebra_consistency_all_presentations():
    for case in CASES:
        for fw in FRAMEWORKS:
            pres = presentation(case, fw)
            R = case_rmatrix(case)
            res = check_frt_consistency(pres, R)
            assert res.ok, (case, fw, res.residuals[:2])
            assert res.rank > 0


def test_rule_tables_have_eight_rules():
    for pres in _all_presentations():
        assert len(pres.rules) == 8
        for pair, terms in pres.rules.items():
            assert len(pair) == 2
            for coeff, repl in terms:
                assert not coeff.is_zero()
                # replacement words never grow the letter multiset size
                assert len(repl) <= 2


def test_rewriting_matches_naive_expander():
    rng = random.Random(21)
    for pres in _all_presentations():
        for _ in range(12):
            w = _random_word(rng, 5)
            for rightmost in (False, True):
                fast = rewrite_words(pres, [(w, pres.field.one())],
                                     rightmost=rightmost)
                slow = _naive_normalize(pres, w, rightmost=rightmost)
                assert elem_eq(fast, slow), (pres.case, pres.framework,
                                             w, rightmost)


def test_rewriting_is_strategy_independent():
    rng = random.Random(22)
    for pres in _all_presentations():
        for _ in range(10):
            w = _random_word(rng, 6)
            left = rewrite_words(pres, [(w, pres.field.one())])
            right = rewrite_words(pres, [(w, pres.field.one())],
                                  rightmost=True)
            assert elem_eq(left, right), (pres.case, pres.framework, w)


def test_normal_forms_are_sorted_and_square_free_in_odd_letters():
    rng = random.Random(23)
    for pres in _all_presentations():
        for _ in range(10):
            w = _random_word(rng, 6)
            out = rewrite_words(pres, [(w, pres.field.one())])
            for mono in out:
                k, l, m, n = mono
                assert m in (0, 1) and n in (0, 1)


def test_confluence_probe_and_acyclicity():
    for pres in _all_presentations():
        samples = 30 if pres.case == "r11" else 60
        max_len = 5 if pres.case == "r11" else 6
        probe = confluence_probe(pres, samples=samples, seed=4,
                                 max_len=max_len)
        assert probe.ok, (pres.case, pres.framework, probe.mismatches[:2])
        acyclic, visited = rewrite_graph_acyclic(pres, max_len=4)
        assert acyclic
        assert visited > 0


def test_product_is_associative():
    rng = random.Random(24)
    for case in CASES:
        pres = presentation(case, "unbraided")
        for _ in range(6):
            x = mono_elem(pres, (rng.randint(0, 2), rng.randint(0, 2),
                                 rng.randint(0, 1), rng.randint(0, 1)))
            y = mono_elem(pres, (rng.randint(0, 2), rng.randint(0, 2),
                                 rng.randint(0, 1), rng.randint(0, 1)))
            z = mono_elem(pres, (rng.randint(0, 1), rng.randint(0, 1),
                                 rng.randint(0, 1), rng.randint(0, 1)))
            assert elem_eq(gmul(pres, gmul(pres, x, y), z),
                           gmul(pres, x, gmul(pres, y, z))), case


def test_closed_product_r12_against_rewriting():
    pres = presentation("r12", "unbraided")
    field = pres.field
    for idx, ((m1, n1), (m2, n2)) in sorted(LEMMA2_FACTORS.items()):
        for k, l, kp, lp in ((1, 1, 1, 1), (2, 1, 0, 2), (0, 2, 2, 1)):
            x = mono_elem(pres, (k, l, m1, n1))
            y = mono_elem(pres, (kp, lp, m2, n2))
            got = gmul(pres, x, y)
            want = closed_product_r12(field, idx, k, l, kp, lp)
            diff = elem_sub(got, want)
            assert not diff, (idx, k, l, kp, lp, diff)


def test_zero_factor_products_r12():
    pres = presentation("r12", "unbraided")
    for (m1, n1), (m2, n2) in LEMMA2_ZERO_FACTORS:
        for k, l, kp, lp in ((1, 1, 1, 1), (2, 0, 1, 2)):
            got = gmul(pres, mono_elem(pres, (k, l, m1, n1)),
                       mono_elem(pres, (kp, lp, m2, n2)))
            assert not got, ((m1, n1), (m2, n2))


def test_reordered_odd_product_r11():
    pres = presentation("r11", "unbraided")
    field = pres.field
    for letter in ("b", "c"):
        for k, l in ((1, 0), (0, 1), (1, 1), (2, 1), (1, 2)):
            word = letter + "a" * k + "d" * l
            got = rewrite_words(pres, [(word, field.one())])
            want = reordered_odd_product(field, letter, k, l)
            assert elem_eq(got, want), (letter, k, l)


def test_step_cap_raises():
    pres = presentation("r11", "unbraided")
    # a fresh presentation so the memo cache cannot short-circuit the cap
    with pytest.raises(RewriteLimitError):
        rewrite_words(presentation("r11", "unbraided"),
                      [("cb" * 6, pres.field.one())], step_cap=3)
    assert DEFAULT_STEP_CAP >= 10_000


def test_rmatrix_json_round_trip(tmp_path):
    R = builtin_rmatrix("r12")
    path = tmp_path / "m.json"
    R.dump(path)
    back = RMatrix.load(path)
    assert back.name == "r12"
    for i, row_pair in enumerate(((1, 1), (1, 2), (2, 1), (2, 2))):
        for j, col_pair in enumerate(((1, 1), (1, 2), (2, 1), (2, 2))):
            assert back.entry(row_pair, col_pair) == R.entry(row_pair, col_pair)
    with pytest.raises((ValueError, KeyError)):
        RMatrix.from_json({"name": "bad"})
    with pytest.raises(ValueError):
        RMatrix.from_json({"name": "bad", "entries": [["1"] * 4] * 3})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x", "entries": [["1"] * 4] * 4})[:-8])
    with pytest.raises(json.JSONDecodeError):
        RMatrix.load(bad)


def test_numeric_field_rewriting_agrees():
    # the same word normalized symbolically then evaluated must match the
    # all-numeric computation
    from qgl11.scalars import to_field

    field = random_numeric_field(31)
    rng = random.Random(32)
    for case in CASES:
        sym = presentation(case, "braided")
        num = presentation(case, "braided", field)
        for _ in range(5):
            w = _random_word(rng, 5)
            s = rewrite_words(sym, [(w, sym.field.one())])
            n = rewrite_words(num, [(w, num.field.one())])
            evaluated = {m: to_field(field, c) for m, c in s.items()}
            evaluated = {m: c for m, c in evaluated.items() if not c.is_zero()}
            assert set(evaluated) == set(n), (case, w)
            for m in n:
                assert evaluated[m] == n[m], (case, w, m)

"""Deformed enveloping algebras dual to the quantum-plane picture.

Each deformation case carries an associative superalgebra on two even
generators A, D, two odd generators B, C, central group-likes K, L
(deformation exponentials of A + D), and — in the unbraided framework —
a grading involution eta that anticommutes with the odd generators.
Elements are held in the normal order

    eta^e  A^pA  D^pD  B^i  C^j  K^kK  L^kL        (e, i, j in {0, 1})

and every product is reduced to it by a terminating rewrite system read
off the case's commutation relations.  On top of the rewriter this
module provides the generator coproduct tables, homomorphism /
coassociativity / counit checks (with a sign-disabled negative control
for the braided framework), classical-limit expansions, and the
change-of-basis verifications that recast the odd sector in undeformed
form.
"""

from __future__ import annotations

import random

from .scalars import PoleError, SymbolicField, classical_series, scalar_to_str
from .plane import DEFAULT_STEP_CAP, RewriteLimitError

CASES = ("classical", "r22", "r12", "r11")
FRAMEWORKS = ("unbraided", "braided")
LETTERS = "ADBC"
_ORDER = {"A": 0, "D": 1, "B": 2, "C": 3}

UNIT = (0, 0, 0, 0, 0, 0, 0)


def env_mono(e=0, pA=0, pD=0, i=0, j=0, kK=0, kL=0):
    return (e, pA, pD, i, j, kK, kL)


# Generator monomials used throughout the tables.
M_A = env_mono(pA=1)
M_D = env_mono(pD=1)
M_B = env_mono(i=1)
M_C = env_mono(j=1)
M_ETA = env_mono(e=1)
M_K = env_mono(kK=1)
M_L = env_mono(kL=1)

GENERATOR_MONOS = {"A": M_A, "D": M_D, "B": M_B, "C": M_C,
                   "eta": M_ETA, "K": M_K, "L": M_L}


def mono_parity(mono):
    """Odd-generator parity of a normal monomial (eta, K, L are even)."""
    return (mono[3] + mono[4]) & 1


def mono_to_str(mono):
    e, pA, pD, i, j, kK, kL = mono
    parts = []
    if e:
        parts.append("eta")
    for sym, p in (("A", pA), ("D", pD), ("B", i), ("C", j)):
        if p == 1:
            parts.append(sym)
        elif p:
            parts.append(f"{sym}^{p}")
    for sym, p in (("K", kK), ("L", kL)):
        if p == 1:
            parts.append(sym)
        elif p:
            parts.append(f"{sym}^{p}")
    return "*".join(parts) if parts else "1"


def element_to_str(elem):
    if not elem:
        return "0"
    bits = []
    for mono in sorted(elem):
        c = elem[mono].canon()
        bits.append(f"({c.to_str()})*{mono_to_str(mono)}")
    return " + ".join(bits)


def tensor_to_str(t):
    if not t:
        return "0"
    bits = []
    for key in sorted(t):
        c = t[key].canon()
        legs = "(x)".join(mono_to_str(m) for m in key)
        bits.append(f"({c.to_str()})*{legs}")
    return " + ".join(bits)


class EnvPresentation:
    """One (case, framework) enveloping algebra with its rewrite rules."""

    def __init__(self, case, framework, field, rules):
        self.case = case
        self.framework = framework
        self.field = field
        self.rules = rules
        self.caches = {"delta_table": {}, "delta": {}}

    def __repr__(self):
        return f"EnvPresentation({self.case}, {self.framework})"


def _build_env_rules(case, field):
    """Oriented rules pair -> [(coeff, replacement word, dK, dL)].

    dK / dL shift the central group-like exponents; replacement words are
    already normal-ordered.  The braided and unbraided frameworks share
    the same relations, so the table depends on the case only.
    """
    one = field.one()
    half = field.from_fraction(1, 2)
    quarter = field.from_fraction(1, 4)
    rules = {"DA": [(one, "AD", 0, 0)],
             "BA": [(one, "AB", 0, 0), (-one, "B", 0, 0)],
             "BD": [(one, "DB", 0, 0), (one, "B", 0, 0)],
             "CA": [(one, "AC", 0, 0), (one, "C", 0, 0)],
             "CD": [(one, "DC", 0, 0), (-one, "C", 0, 0)],
             "BB": [],
             "CC": []}
    if case == "classical":
        rules["CB"] = [(-one, "BC", 0, 0), (one, "A", 0, 0),
                       (one, "D", 0, 0)]
        return rules
    q = field.var("q")
    if case == "r22":
        c1 = (q - one).inverse()
        rules["CB"] = [(-one, "BC", 0, 0), (c1, "", 1, 0), (-c1, "", 0, 0)]
        return rules
    if case == "r12":
        r = field.var("r")
        c1 = (q - one).inverse()
        c2 = field.from_int(2) * r * q / (q * q - one)
        c3 = r * q / ((q * q - one) * (q - one))
        rules["CB"] = [(-one, "BC", 0, 0), (c1, "", 1, 0), (-c1, "", 0, 0)]
        rules["CA"] = [(one, "AC", 0, 0), (one, "C", 0, 0),
                       (c2, "B", 1, 0), (-q * c2, "B", 0, 0)]
        rules["CD"] = [(one, "DC", 0, 0), (-one, "C", 0, 0),
                       (-c2, "B", 1, 0), (q * c2, "B", 0, 0)]
        rules["CC"] = [(-c3, "", 2, 0), ((q + one) * c3, "", 1, 0),
                       (-q * c3, "", 0, 0)]
        return rules
    if case == "r11":
        # u = (K^2/q^2 + q^2/K^2)/4 and w = (K^2/q^2 - q^2/K^2)/4 split
        # into explicit K-exponent shifts.
        qm2 = quarter / (q * q)
        qp2 = quarter * q * q
        d1 = (q * q - one).inverse() * half          # K^2 part of the
        d2 = -q * q * d1                             # anticommutator term
        g2a = -half * d1                             # and of the squares
        g2b = half * d2
        g2c = quarter * (one + q * q) / (q * q - one)
        rules["BA"] = [(one, "AB", 0, 0), (-half, "B", 0, 0),
                       (-qm2, "B", 2, 0), (-qp2, "B", -2, 0),
                       (-qm2, "C", 2, 0), (qp2, "C", -2, 0)]
        rules["BD"] = [(one, "DB", 0, 0), (half, "B", 0, 0),
                       (qm2, "B", 2, 0), (qp2, "B", -2, 0),
                       (qm2, "C", 2, 0), (-qp2, "C", -2, 0)]
        rules["CA"] = [(one, "AC", 0, 0), (half, "C", 0, 0),
                       (qm2, "C", 2, 0), (qp2, "C", -2, 0),
                       (qm2, "B", 2, 0), (-qp2, "B", -2, 0)]
        rules["CD"] = [(one, "DC", 0, 0), (-half, "C", 0, 0),
                       (-qm2, "C", 2, 0), (-qp2, "C", -2, 0),
                       (-qm2, "B", 2, 0), (qp2, "B", -2, 0)]
        rules["CB"] = [(-one, "BC", 0, 0), (d1, "", 2, 0), (d2, "", -2, 0),
                       (half, "", 0, 0)]
        rules["BB"] = [(g2a, "", 2, 0), (g2b, "", -2, 0), (g2c, "", 0, 0)]
        rules["CC"] = [(g2a, "", 2, 0), (g2b, "", -2, 0), (g2c, "", 0, 0)]
        return rules
    raise ValueError(f"unknown case {case!r}")


def env_presentation(case, framework, field=None):
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    if framework not in FRAMEWORKS:
        raise ValueError(f"unknown framework {framework!r}")
    if field is None:
        field = SymbolicField()
    return EnvPresentation(case, framework, field, _build_env_rules(case, field))


# ----------------------------------------------------------------------
# rewriting to normal order
# ----------------------------------------------------------------------

def _find_redex(word, rightmost=False):
    rng = range(len(word) - 2, -1, -1) if rightmost else range(len(word) - 1)
    for p in rng:
        x, y = word[p], word[p + 1]
        if _ORDER[x] > _ORDER[y] or (x == y and x in "BC"):
            return p
    return -1


def _word_key(e, word, kK, kL):
    return (e, word.count("A"), word.count("D"),
            word.count("B"), word.count("C"), kK, kL)


def _put(out, key, coeff):
    cur = out.get(key)
    # canonicalize as we accumulate: repeated uncanonical adds multiply
    # denominators and make the symbolic backend degrade quadratically
    tot = coeff if cur is None else (cur + coeff).canon()
    if tot.is_zero():
        out.pop(key, None)
    else:
        out[key] = tot


def _env_normalize_word(pres, word, rightmost, folded, counter, step_cap):
    """Normal form of a bare letter word, memoized per strategy.

    Returns {(normal word, dkK, dkL): coeff} with the group-like exponent
    shifts kept relative (always zero when folded: the shifts are rolled
    into the coefficients as K / L powers instead).  Letter rewriting
    never depends on the eta flag or the absolute exponents, so one cache
    entry serves every context the word appears in.
    """
    cache = pres.caches.setdefault(("norm", rightmost, folded), {})
    hit = cache.get(word)
    if hit is not None:
        return hit
    field = pres.field
    if folded:
        kv, lv = field.var("K"), field.var("L")
    rules = pres.rules
    stack = [word]
    on_path = {word}
    while stack:
        w = stack[-1]
        if w in cache:
            on_path.discard(w)
            stack.pop()
            continue
        p = _find_redex(w, rightmost)
        if p < 0:
            cache[w] = {(w, 0, 0): field.one()}
            on_path.discard(w)
            stack.pop()
            continue
        pre, pair, post = w[:p], w[p:p + 2], w[p + 2:]
        children = [(rc, pre + repl + post, dk, dl)
                    for rc, repl, dk, dl in rules[pair]]
        pending = []
        for _rc, ch, _dk, _dl in children:
            if ch not in cache:
                if ch in on_path:
                    raise RewriteLimitError(f"rewriting cycle at {ch!r}")
                pending.append(ch)
        if pending:
            stack.extend(pending)
            on_path.update(pending)
            continue
        counter[0] += 1
        if counter[0] > step_cap:
            raise RewriteLimitError(f"step cap exceeded on {w!r}")
        out = {}
        for rc, ch, dk, dl in children:
            if folded:
                if dk:
                    rc = rc * kv ** dk
                if dl:
                    rc = rc * lv ** dl
                for (w2, _z1, _z2), c2 in cache[ch].items():
                    _put(out, (w2, 0, 0), rc * c2)
            else:
                for (w2, dk2, dl2), c2 in cache[ch].items():
                    _put(out, (w2, dk + dk2, dl + dl2), rc * c2)
        cache[w] = out
        on_path.discard(w)
        stack.pop()
    return cache[word]


def env_rewrite(pres, items, rightmost=False, folded=False,
                step_cap=DEFAULT_STEP_CAP):
    """Normalize terms (coeff, e, word, kK, kL) into an element dict.

    With ``folded=True`` the group-like exponent shifts of the rules are
    rolled into the coefficients as powers of the K / L variables instead
    of the integer exponent slots (used by the change-of-basis checks,
    whose coefficients are rational in K to begin with).
    """
    out = {}
    counter = [0]
    for coeff, e, word, kK, kL in items:
        if coeff.is_zero():
            continue
        normal = _env_normalize_word(pres, word, rightmost, folded,
                                     counter, step_cap)
        for (w2, dk, dl), c in normal.items():
            _put(out, _word_key(e, w2, kK + dk, kL + dl), coeff * c)
    return out


def mono_word(mono):
    e, pA, pD, i, j, kK, kL = mono
    return "A" * pA + "D" * pD + "B" * i + "C" * j


def env_mul_monos(pres, m1, m2, folded=False):
    """Product of two normal monomials, as a normalized element."""
    cache = pres.caches.setdefault("mul", {})
    cache_key = (m1, m2, folded)
    hit = cache.get(cache_key)
    if hit is not None:
        return hit
    e1, pA1, pD1, i1, j1, k1, l1 = m1
    e2 = m2[0]
    coeff = pres.field.one()
    if e2 and (i1 + j1) & 1:
        coeff = -coeff
    word = mono_word(m1) + mono_word(m2)
    out = env_rewrite(pres, [(coeff, (e1 + e2) & 1, word,
                              k1 + m2[5], l1 + m2[6])], folded=folded)
    cache[cache_key] = out
    return out


def env_elem(field, mono, coeff=None):
    if coeff is None:
        coeff = field.one()
    return {} if coeff.is_zero() else {mono: coeff}


def env_add(a, b):
    out = dict(a)
    for mono, c in b.items():
        _put(out, mono, c)
    return out


def env_scale(a, c):
    if c.is_zero():
        return {}
    return {mono: v * c for mono, v in a.items()}


def env_sub(a, b):
    out = dict(a)
    for mono, c in b.items():
        _put(out, mono, -c)
    return out


def env_eq(a, b):
    keys = set(a) | set(b)
    for mono in keys:
        ca, cb = a.get(mono), b.get(mono)
        if ca is None:
            if not cb.is_zero():
                return False
        elif cb is None:
            if not ca.is_zero():
                return False
        elif not (ca - cb).is_zero():
            return False
    return True


def env_mul(pres, x, y, folded=False):
    out = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            c = c1 * c2
            for mono, cm in env_mul_monos(pres, m1, m2, folded=folded).items():
                _put(out, mono, c * cm)
    return out


# ----------------------------------------------------------------------
# coproduct tables and tensor algebra
# ----------------------------------------------------------------------

def _t_acc(out, key, c):
    _put(out, key, c)


def env_delta_table(pres, swapped_bc=False):
    """Generator coproducts as 2-tensor elements {(m1, m2): coeff}.

    Keys: "A", "D", "B", "C", "K", "L" and (unbraided only) "eta".  The
    braided (1,1) table defaults to the internally consistent form; with
    ``swapped_bc=True`` the odd rows carry the swapped (B-C)/(B+C)
    attachments instead — kept as a negative-control variant because it
    fails the homomorphism property in a frozen, reproducible pattern.
    """
    key = bool(swapped_bc)
    cache = pres.caches["delta_table"]
    if key in cache:
        return cache[key]
    field = pres.field
    one = field.one()
    half = field.from_fraction(1, 2)
    braided = pres.framework == "braided"
    eeta = 0 if braided else 1

    def mk(e=0, pA=0, pD=0, i=0, j=0, kK=0, kL=0):
        return (e, pA, pD, i, j, kK, kL)

    def prim(mono):
        return {(UNIT, mono): one, (mono, UNIT): one}

    table = {"K": {(M_K, M_K): one},
             "L": {(M_L, M_L): one},
             "A": prim(M_A),
             "D": prim(M_D)}
    if not braided:
        table["eta"] = {(M_ETA, M_ETA): one}
    case = pres.case
    if case == "classical":
        table["B"] = {(UNIT, M_B): one, (M_B, mk(e=eeta)): one}
        table["C"] = {(UNIT, M_C): one, (M_C, mk(e=eeta)): one}
    elif case == "r22":
        table["B"] = {(UNIT, M_B): one, (M_B, mk(e=eeta, kL=1)): one}
        table["C"] = {(UNIT, M_C): one, (M_C, mk(e=eeta, kK=1, kL=-1)): one}
    elif case == "r12":
        q, r = field.var("q"), field.var("r")
        cA = field.from_int(2) * r * q / (q + one)
        cC = r * q / (q - one)
        table["A"] = {(UNIT, M_A): one, (M_A, UNIT): one,
                      (M_B, mk(e=eeta, i=1)): cA}
        table["D"] = {(UNIT, M_D): one, (M_D, UNIT): one,
                      (M_B, mk(e=eeta, i=1)): -cA}
        table["B"] = {(UNIT, M_B): one, (M_B, mk(e=eeta)): one}
        table["C"] = {(UNIT, M_C): one, (M_C, mk(e=eeta, kK=1)): one,
                      (M_B, mk(e=eeta, kK=1)): -cC,
                      (M_B, mk(e=eeta)): cC}
    elif case == "r11":
        q = field.var("q")
        c = (q - q ** -1) * field.from_fraction(1, 4)
        cp, cm = c * q ** -1, c * q
        table["A"] = {(UNIT, M_A): one, (M_A, UNIT): one,
                      (M_B, mk(e=eeta, i=1, kK=1)): cp,
                      (M_B, mk(e=eeta, j=1, kK=1)): cp,
                      (M_C, mk(e=eeta, i=1, kK=1)): -cp,
                      (M_C, mk(e=eeta, j=1, kK=1)): -cp,
                      (M_B, mk(e=eeta, i=1, kK=-1)): cm,
                      (M_B, mk(e=eeta, j=1, kK=-1)): -cm,
                      (M_C, mk(e=eeta, i=1, kK=-1)): cm,
                      (M_C, mk(e=eeta, j=1, kK=-1)): -cm}
        table["D"] = {(UNIT, M_D): one, (M_D, UNIT): one}
        for tk, tc in table["A"].items():
            if mono_parity(tk[0]):
                table["D"][(tk[0], tk[1])] = -tc
        ek, ei = mk(e=eeta, kK=1), mk(e=eeta, kK=-1)
        if braided and swapped_bc:
            table["B"] = {(UNIT, M_B): one, (M_B, ek): half, (M_C, ek): half,
                          (M_B, ei): half, (M_C, ei): -half}
            table["C"] = {(UNIT, M_C): one, (M_B, ek): half, (M_C, ek): half,
                          (M_B, ei): -half, (M_C, ei): half}
        else:
            table["B"] = {(UNIT, M_B): one, (M_B, ek): half, (M_C, ek): -half,
                          (M_B, ei): half, (M_C, ei): half}
            table["C"] = {(UNIT, M_C): one, (M_B, ek): -half, (M_C, ek): half,
                          (M_B, ei): half, (M_C, ei): half}
    cache[key] = table
    return table


def env_tensor_add(t1, t2):
    out = dict(t1)
    for key, c in t2.items():
        _t_acc(out, key, c)
    return out


def env_tensor_scale(t, c):
    if c.is_zero():
        return {}
    return {key: v * c for key, v in t.items()}


def env_tensor_sub(t1, t2):
    out = dict(t1)
    for key, c in t2.items():
        _t_acc(out, key, -c)
    return out


def env_tensor_eq(t1, t2):
    for key in set(t1) | set(t2):
        ca, cb = t1.get(key), t2.get(key)
        if ca is None:
            if not cb.is_zero():
                return False
        elif cb is None:
            if not ca.is_zero():
                return False
        elif not (ca - cb).is_zero():
            return False
    return True


def env_tensor_mul(pres, t1, t2, sign_disabled=False):
    """Multiply in the two-fold tensor algebra.

    In the braided framework the factors pick up the graded sign
    (-1)^{|y1||x2|}; in the unbraided one the eta flags inside each leg
    carry the grading and no tensor sign appears.  ``sign_disabled``
    suppresses the braided sign (negative control).
    """
    braided = pres.framework == "braided" and not sign_disabled
    out = {}
    for (x1, y1), c1 in t1.items():
        py1 = mono_parity(y1)
        for (x2, y2), c2 in t2.items():
            c = c1 * c2
            if braided and py1 and mono_parity(x2):
                c = -c
            left = env_mul_monos(pres, x1, x2)
            if not left:
                continue
            right = env_mul_monos(pres, y1, y2)
            for mx, cx in left.items():
                cl = c * cx
                for my, cy in right.items():
                    _t_acc(out, (mx, my), cl * cy)
    return out


def _shift_group_likes(t, kK, kL):
    if not kK and not kL:
        return t
    out = {}
    for (m1, m2), c in t.items():
        n1 = m1[:5] + (m1[5] + kK, m1[6] + kL)
        n2 = m2[:5] + (m2[5] + kK, m2[6] + kL)
        out[(n1, n2)] = c
    return out


def env_delta_mono(pres, mono, swapped_bc=False, sign_disabled=False):
    """Coproduct of a normal monomial (product of the generator table)."""
    cache_key = (mono, bool(swapped_bc), bool(sign_disabled))
    cache = pres.caches["delta"]
    if cache_key in cache:
        return cache[cache_key]
    table = env_delta_table(pres, swapped_bc)
    e, pA, pD, i, j, kK, kL = mono
    if e and pres.framework == "braided":
        raise ValueError("braided monomials carry no eta flag")
    cur = {(UNIT, UNIT): pres.field.one()}
    factors = (["eta"] * e + ["A"] * pA + ["D"] * pD + ["B"] * i + ["C"] * j)
    for gen in factors:
        cur = env_tensor_mul(pres, cur, table[gen], sign_disabled=sign_disabled)
    cur = _shift_group_likes(cur, kK, kL)
    cache[cache_key] = cur
    return cur


def env_delta_elem(pres, elem, swapped_bc=False, sign_disabled=False):
    out = {}
    for mono, c in elem.items():
        for key, tc in env_delta_mono(pres, mono, swapped_bc,
                                      sign_disabled).items():
            _t_acc(out, key, c * tc)
    return out


def env_counit_mono(field, mono):
    e, pA, pD, i, j, kK, kL = mono
    if pA or pD or i or j:
        return field.zero()
    return field.one()


def env_counit(pres, elem):
    total = pres.field.zero()
    for mono, c in elem.items():
        total = total + c * env_counit_mono(pres.field, mono)
    return total


# ----------------------------------------------------------------------
# structural checks
# ----------------------------------------------------------------------

class EnvCheckResult:
    def __init__(self, ok, residuals, checked):
        self.ok = ok
        self.residuals = residuals
        self.checked = checked

    def __repr__(self):
        flag = "ok" if self.ok else f"{len(self.residuals)} residuals"
        return f"EnvCheckResult({flag}, checked={self.checked})"


def _tensor_residuals(out, context, diff):
    for key in sorted(diff):
        c = diff[key].canon()
        if not c.is_zero():
            legs = "(x)".join(mono_to_str(m) for m in key)
            out.append((f"{context} at {legs}", c.to_str()))


def _random_mono(rng, braided, max_letters=3):
    e = 0 if braided else rng.randint(0, 1)
    while True:
        pA, pD = rng.randint(0, 2), rng.randint(0, 2)
        i, j = rng.randint(0, 1), rng.randint(0, 1)
        if pA + pD + i + j <= max_letters:
            return (e, pA, pD, i, j, rng.randint(-1, 1), rng.randint(-1, 1))


def hom_check(pres, samples=25, seed=0, swapped_bc=False,
              sign_disabled=False):
    """Verify that the coproduct respects every rewrite rule.

    For each oriented rule xy -> rhs the two-sided coproduct of the rule
    is expanded in the tensor algebra and compared; the eta relations are
    checked likewise, and ``samples`` random monomial pairs probe the
    multiplicativity Delta(m1 m2) = Delta(m1) Delta(m2) on top.
    """
    field = pres.field
    braided = pres.framework == "braided"
    residuals = []
    checked = 0

    def dm(mono):
        return env_delta_mono(pres, mono, swapped_bc, sign_disabled)

    def dword(word, dk, dl):
        mono = _word_key(0, word, dk, dl)
        return env_delta_mono(pres, mono, swapped_bc, sign_disabled)

    for pair in sorted(pres.rules):
        lhs = env_tensor_mul(pres, dm(GENERATOR_MONOS[pair[0]]),
                             dm(GENERATOR_MONOS[pair[1]]),
                             sign_disabled=sign_disabled)
        rhs = {}
        for rc, repl, dk, dl in pres.rules[pair]:
            rhs = env_tensor_add(rhs, env_tensor_scale(dword(repl, dk, dl), rc))
        checked += 1
        _tensor_residuals(residuals, f"rule {pair}", env_tensor_sub(lhs, rhs))
    if not braided:
        deta = dm(M_ETA)
        for gen in LETTERS:
            dg = dm(GENERATOR_MONOS[gen])
            left = env_tensor_mul(pres, deta, dg, sign_disabled=sign_disabled)
            right = env_tensor_mul(pres, dg, deta, sign_disabled=sign_disabled)
            if gen in "BC":
                right = env_tensor_scale(right, -field.one())
            checked += 1
            _tensor_residuals(residuals, f"eta swap {gen}",
                              env_tensor_sub(left, right))
        sq = env_tensor_mul(pres, deta, deta, sign_disabled=sign_disabled)
        checked += 1
        _tensor_residuals(residuals, "eta square",
                          env_tensor_sub(sq, {(UNIT, UNIT): field.one()}))
    # One-generator-times-monomial probes, both orders: together with the
    # rule compatibility above, multiplicativity on arbitrary products
    # follows by induction on word length, so small probes suffice.
    rng = random.Random(seed)
    gen_pool = list(LETTERS) + ["K", "L"] + ([] if braided else ["eta"])
    for _ in range(samples):
        g = GENERATOR_MONOS[rng.choice(gen_pool)]
        m = _random_mono(rng, braided)
        m1, m2 = (g, m) if rng.random() < 0.5 else (m, g)
        lhs = env_tensor_mul(pres, dm(m1), dm(m2), sign_disabled=sign_disabled)
        rhs = env_delta_elem(pres, env_mul_monos(pres, m1, m2),
                             swapped_bc, sign_disabled)
        checked += 1
        _tensor_residuals(residuals,
                          f"probe {mono_to_str(m1)} * {mono_to_str(m2)}",
                          env_tensor_sub(lhs, rhs))
    return EnvCheckResult(not residuals, residuals, checked)


def _delta_leg(pres, t, which, swapped_bc=False):
    """Apply the coproduct to one tensor leg, giving a 3-tensor dict."""
    out = {}
    for (m1, m2), c in t.items():
        if which == 0:
            inner = env_delta_mono(pres, m1, swapped_bc)
            for (n1, n2), ci in inner.items():
                _put(out, (n1, n2, m2), c * ci)
        else:
            inner = env_delta_mono(pres, m2, swapped_bc)
            for (n1, n2), ci in inner.items():
                _put(out, (m1, n1, n2), c * ci)
    return out


def coassoc_check(pres, samples=10, seed=0, swapped_bc=False):
    """Coassociativity and counit law on generators plus random monomials."""
    field = pres.field
    braided = pres.framework == "braided"
    residuals = []
    checked = 0
    gens = ["A", "D", "B", "C", "K", "L"] + ([] if braided else ["eta"])
    monos = [GENERATOR_MONOS[g] for g in gens]
    rng = random.Random(seed)
    monos += [_random_mono(rng, braided) for _ in range(samples)]
    for mono in monos:
        t = env_delta_mono(pres, mono, swapped_bc)
        left = _delta_leg(pres, t, 0, swapped_bc)
        right = _delta_leg(pres, t, 1, swapped_bc)
        checked += 1
        diff = dict(left)
        for key, c in right.items():
            _put(diff, key, -c)
        for key in sorted(diff):
            c = diff[key].canon()
            if not c.is_zero():
                legs = "(x)".join(mono_to_str(m) for m in key)
                residuals.append(
                    (f"coassoc {mono_to_str(mono)} at {legs}", c.to_str()))
        # counit law: (eps (x) id) Delta = id = (id (x) eps) Delta
        lcu, rcu = {}, {}
        for (m1, m2), c in t.items():
            _put(lcu, m2, c * env_counit_mono(field, m1))
            _put(rcu, m1, c * env_counit_mono(field, m2))
        ident = env_elem(field, mono)
        checked += 1
        for label, side in (("left counit", lcu), ("right counit", rcu)):
            diff = env_sub(side, ident) if side or ident else {}
            for m in sorted(diff):
                c = diff[m].canon()
                if not c.is_zero():
                    residuals.append(
                        (f"{label} {mono_to_str(mono)} at {mono_to_str(m)}",
                         c.to_str()))
    return EnvCheckResult(not residuals, residuals, checked)


def env_confluence_probe(pres, samples=300, seed=0, max_len=7):
    """Leftmost vs rightmost rewriting on random words (with eta flags)."""
    rng = random.Random(seed)
    braided = pres.framework == "braided"
    one = pres.field.one()
    mismatches = []
    for _ in range(samples):
        length = rng.randint(1, max_len)
        word = "".join(rng.choice(LETTERS) for _ in range(length))
        e = 0 if braided else rng.randint(0, 1)
        items = [(one, e, word, rng.randint(-1, 1), rng.randint(-1, 1))]
        left = env_rewrite(pres, items)
        right = env_rewrite(pres, items, rightmost=True)
        if not env_eq(left, right):
            mismatches.append(
                (f"word {word}",
                 f"left={element_to_str(left)} right={element_to_str(right)}"))
    return EnvCheckResult(not mismatches, mismatches, samples)


# ----------------------------------------------------------------------
# classical limits
# ----------------------------------------------------------------------

CLASSICAL_RULES = {
    "DA": ((1, "AD", 0),),
    "BA": ((1, "AB", 0), (-1, "B", 0)),
    "BD": ((1, "DB", 0), (1, "B", 0)),
    "CA": ((1, "AC", 0), (1, "C", 0)),
    "CD": ((1, "DC", 0), (-1, "C", 0)),
    # the group-like limit direction tau tracks the A + D eigenvalue
    "CB": ((-1, "BC", 0), (1, "", 1)),
    "BB": (),
    "CC": (),
}

# The undeformed case is its own limit: A + D stays an operator there,
# with no group-like to contract into the tau direction.
CLASSICAL_RULES_SELF = dict(CLASSICAL_RULES)
CLASSICAL_RULES_SELF["CB"] = ((-1, "BC", 0), (1, "A", 0), (1, "D", 0))


class LimitResult:
    """Outcome of a classical-limit expansion.

    ``ok`` means every order-0 coefficient matched the expected pattern
    and none depended on the path slope; ``obstruction`` is set when the
    expected pattern is the eta-twisted one (unbraided framework), where
    the limit provably cannot be primitive.
    """

    def __init__(self, ok, obstruction, residuals, checked):
        self.ok = ok
        self.obstruction = obstruction
        self.residuals = residuals
        self.checked = checked

    def __repr__(self):
        flag = "ok" if self.ok else f"{len(self.residuals)} residuals"
        return f"LimitResult({flag}, obstruction={self.obstruction})"


def _fold_scalar(field, coeff, kK, kL):
    """Roll group-like exponents into the coefficient as K / L powers."""
    s = coeff
    if kK:
        s = s * field.var("K") ** kK
    if kL:
        s = s * field.var("L") ** kL
    return s


def _series_c0(case, s, residuals, context):
    """Order-0 coefficient of s along the classical path, or None.

    Pole and slope (rho) dependence are tested only after merging, so
    individually singular terms that cancel in the sum stay silent.
    """
    try:
        series = classical_series(s, case)
    except PoleError as exc:
        residuals.append((f"{context}: pole", str(exc)))
        return None
    if series.pole:
        residuals.append((f"{context}: pole of order {series.pole_order}",
                          scalar_to_str(s)))
        return None
    c0 = series.c0.canon()
    if c0.depends_on("rho"):
        residuals.append((f"{context}: slope-dependent limit",
                          scalar_to_str(c0)))
        return None
    return c0


def classical_limit_check(case, framework):
    """Expand the generator coproducts and rules along the classical path.

    Always runs on the symbolic backend: the path substitutes every
    deformation variable by an expansion in eps, so no free numeric
    choice remains and the verdict is backend-independent.

    Braided coproducts must become primitive (PASS); unbraided ones keep
    an eta twist on the right legs — the limit is 1 (x) g + g (x) eta^|g|
    — which is reported as a confirmed obstruction, not a failure.
    """
    field = SymbolicField()
    pres = env_presentation(case, framework, field)
    braided = framework == "braided"
    residuals = []
    checked = 0
    one = field.one()

    # generator coproducts: merge K/L powers per folded key, then expand
    table = env_delta_table(pres)
    for gen in LETTERS:
        mono = GENERATOR_MONOS[gen]
        merged = {}
        for (m1, m2), c in table[gen].items():
            key = (m1[:5], m2[:5])
            s = _fold_scalar(field, c, m1[5] + m2[5], m1[6] + m2[6])
            merged[key] = merged.get(key, field.zero()) + s
        twist = 0 if braided or gen in "AD" else 1
        expected = {(UNIT[:5], mono[:5]): one,
                    (mono[:5], (twist, 0, 0, 0, 0)): one}
        checked += 1
        for key in sorted(set(merged) | set(expected)):
            context = "coproduct {} at {}".format(
                gen, "(x)".join(mono_to_str(m + (0, 0)) for m in key))
            c0 = _series_c0(case, merged.get(key, field.zero()),
                            residuals, context)
            if c0 is None:
                continue
            diff = c0 - expected.get(key, field.zero())
            if not diff.canon().is_zero():
                residuals.append((f"{context}: limit mismatch", diff.to_str()))

    # rewrite rules: order-0 limit must be the classical table
    rule_table = CLASSICAL_RULES_SELF if case == "classical" else CLASSICAL_RULES
    for pair in sorted(pres.rules):
        merged = {}
        for rc, repl, dk, dl in pres.rules[pair]:
            s = _fold_scalar(field, rc, dk, dl)
            merged[repl] = merged.get(repl, field.zero()) + s
        expected = {}
        for ci, repl, tpow in rule_table[pair]:
            c = field.from_int(ci)
            if tpow:
                c = c * field.var("tau") ** tpow
            expected[repl] = expected.get(repl, field.zero()) + c
        checked += 1
        for repl in sorted(set(merged) | set(expected)):
            context = f"rule {pair} at {repl or '1'}"
            c0 = _series_c0(case, merged.get(repl, field.zero()),
                            residuals, context)
            if c0 is None:
                continue
            diff = c0 - expected.get(repl, field.zero())
            if not diff.canon().is_zero():
                residuals.append((f"{context}: limit mismatch", diff.to_str()))
    return LimitResult(not residuals, not braided, residuals, checked)


# ----------------------------------------------------------------------
# change of basis onto the undeformed odd sector
# ----------------------------------------------------------------------

def _fold_elem(field, spec):
    """Build a folded element {(e,pA,pD,i,j,0,0): coeff} from a spec."""
    out = {}
    for mono, c in spec.items():
        if not c.is_zero():
            out[mono] = c
    return out


def _comm(pres, x, y):
    return env_sub(env_mul(pres, x, y, folded=True),
                   env_mul(pres, y, x, folded=True))


def _anti(pres, x, y):
    return env_add(env_mul(pres, x, y, folded=True),
                   env_mul(pres, y, x, folded=True))


def _basis_residuals(residuals, name, got, want):
    diff = env_sub(got, want) if got or want else {}
    for mono in sorted(diff):
        c = diff[mono].canon()
        if not c.is_zero():
            residuals.append((f"{name} at {mono_to_str(mono)}", c.to_str()))


def basis_change_check_r12(pres, variant="printed"):
    """Check the odd-sector change of basis in the (1,2) case.

    B' = ((q-1)/p) B and C' = C + [(rq/(q^2-1))(K-q) + kappa (K-1)] B.
    ``variant='printed'`` takes kappa = r(p-1)/(2 p^2), which leaves
    exact residuals proportional to (p + q - 2) in three of the eight
    targets; ``variant='adjusted'`` takes kappa = r(1-q)/(2 p^2), under
    which all eight close.
    """
    if pres.case != "r12":
        raise ValueError("change of basis defined for the r12 case")
    if variant not in ("printed", "adjusted"):
        raise ValueError(f"unknown variant {variant!r}")
    field = pres.field
    one = field.one()
    q, r, p = field.var("q"), field.var("r"), field.var("p")
    kv = field.var("K")
    two = field.from_int(2)
    if variant == "printed":
        kappa = r * (p - one) / (two * p * p)
    else:
        kappa = r * (one - q) / (two * p * p)
    cc = (r * q / (q * q - one)) * (kv - q) + kappa * (kv - one)
    Ap = _fold_elem(field, {M_A: one})
    Dp = _fold_elem(field, {M_D: one})
    Bp = _fold_elem(field, {M_B: (q - one) / p})
    Cp = _fold_elem(field, {M_C: one, M_B: cc})
    zero = {}
    tail = (r / p) * (kv - one)
    targets = [
        ("[A',D']", _comm(pres, Ap, Dp), zero),
        ("{B',C'}", _anti(pres, Bp, Cp),
         {UNIT: (kv - one) / p}),
        ("[A',B']", _comm(pres, Ap, Bp), Bp),
        ("[D',B']", _comm(pres, Dp, Bp), env_scale(Bp, -one)),
        ("[A',C']", _comm(pres, Ap, Cp),
         env_sub(env_scale(Cp, -one), env_scale(Bp, tail))),
        ("[D',C']", _comm(pres, Dp, Cp),
         env_add(Cp, env_scale(Bp, tail))),
        ("{B',B'}", _anti(pres, Bp, Bp), zero),
        ("{C',C'}", _anti(pres, Cp, Cp),
         {UNIT: -(r / (p * p)) * (kv - one) * (kv - one)}),
    ]
    residuals = []
    for name, got, want in targets:
        _basis_residuals(residuals, name, got, want)
    return EnvCheckResult(not residuals, residuals, len(targets))


def basis_change_check_r11(pres, branch=1):
    """Check the odd-sector change of basis in the (1,1) case.

    A' = D'-prefactor = q (K^2+1)/(K^2+q^2) on A resp. D;
    B' = sigma (B + C) with sigma^2 = 1 - q^{-2}, and C' = sigma2 (B - C)
    with sigma2^2 = q^2 - 1.  ``branch=+1`` resolves sigma2 = q sigma
    (all eight targets close); ``branch=-1`` takes the opposite root.
    """
    if pres.case != "r11":
        raise ValueError("change of basis defined for the r11 case")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    field = pres.field
    one = field.one()
    half = field.from_fraction(1, 2)
    two = field.from_int(2)
    q, kv = field.var("q"), field.var("K")
    s = field.sigma()
    s2 = q * s if branch == 1 else -(q * s)
    pref = q * (kv * kv + one) / (kv * kv + q * q)
    kinv2 = (kv * kv).inverse()
    Ap = _fold_elem(field, {M_A: pref})
    Dp = _fold_elem(field, {M_D: pref})
    Bp = _fold_elem(field, {M_B: s, M_C: s})
    Cp = _fold_elem(field, {M_B: s2, M_C: -s2})
    zero = {}
    targets = [
        ("[A',D']", _comm(pres, Ap, Dp), zero),
        ("{B',C'}", _anti(pres, Bp, Cp), zero),
        ("[A',B']", _comm(pres, Ap, Bp),
         env_scale(Cp, half * (one + kinv2))),
        ("[D',B']", _comm(pres, Dp, Bp),
         env_scale(Cp, -half * (one + kinv2))),
        ("[A',C']", _comm(pres, Ap, Cp),
         env_scale(Bp, half * (one + kv * kv))),
        ("[D',C']", _comm(pres, Dp, Cp),
         env_scale(Bp, -half * (one + kv * kv))),
        ("{B',B'}", _anti(pres, Bp, Bp),
         {UNIT: two * (one - kinv2)}),
        ("{C',C'}", _anti(pres, Cp, Cp),
         {UNIT: two * (one - kv * kv)}),
    ]
    residuals = []
    for name, got, want in targets:
        _basis_residuals(residuals, name, got, want)
    return EnvCheckResult(not residuals, residuals, len(targets))


# ----------------------------------------------------------------------
# translation into the duality-pairing letters
# ----------------------------------------------------------------------

def env_to_dual_word(field, mono):
    """Express a normal monomial in duality-pairing letters.

    The group-like block eta^e K^kK L^kL becomes one two-character
    atom (K pairs as the (q, q) character, L as (r, r), eta as (1, -1)),
    followed by the A/D/B/C letters in order.
    """
    from .pairing import gl_atom

    e, pA, pD, i, j, kK, kL = mono
    parts = []
    if e or kK or kL:
        u = field.var("q") ** kK * field.var("r") ** kL
        v = -u if e else u
        parts.append(gl_atom(field, u, v))
    parts += ["A"] * pA + ["D"] * pD + ["B"] * i + ["C"] * j
    return tuple(parts)


def env_elem_to_dual(field, elem):
    out = {}
    for mono, c in elem.items():
        word = env_to_dual_word(field, mono)
        cur = out.get(word)
        tot = c if cur is None else cur + c
        if tot.is_zero():
            out.pop(word, None)
        else:
            out[word] = tot
    return out

"""Dual functionals on the quantum plane and their bilinear pairing.

The dual side is spanned by words in the letters A, B, C, D together with
group-like characters GL(u, v) (a |-> u, d |-> v, zero on b and c).  A word
is paired against a plane element by iterated comultiplication: the first
letter eats the first tensor leg, the remaining word eats the second,

    <w0 w1 ... wn, x> = sum over Delta(x) of <w0, x'> * <w1 ... wn, x''>.

The empty word acts as the counit.  On top of the raw pairing this module
provides the relation / coproduct consistency checkers used by the verifier
and the closed-form evaluation tables they are compared against.
"""

from __future__ import annotations

import re

from .coproduct import delta, eval_coeff, extract_coeff_polys, ones_point
from .plane import gmul, mono_parity, mono_to_str
from .scalars import parse_scalar, to_field

__all__ = [
    "GLAtom",
    "gl_atom",
    "group_like",
    "k_atom",
    "eta_atom",
    "l_atom",
    "word_normalize",
    "dual_word",
    "dual_add",
    "dual_scale",
    "dual_sub",
    "dual_mul",
    "dual_eq",
    "dual_to_str",
    "pair_letter",
    "pair",
    "PairCheckResult",
    "relation_check",
    "coproduct_check",
    "dual_delta_table",
    "dual_relation_suite",
    "pair_table_r12",
    "delta_pair_table_r12",
    "delta_pair_table_r11",
    "commutator_pair_table_r11",
    "dual_route_r11",
    "parse_dual",
]


# ----------------------------------------------------------------------
# Dual letters

LETTER_ATOMS = ("A", "B", "C", "D")


class GLAtom:
    """Group-like character a |-> u, d |-> v (and zero on b, c)."""

    __slots__ = ("u", "v", "key")

    def __init__(self, u, v):
        self.u = u
        self.v = v
        self.key = ("GL", u.canon().to_str(), v.canon().to_str())

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, GLAtom) and self.key == other.key

    def __repr__(self):
        return f"GL({self.key[1]}, {self.key[2]})"

    def is_unit(self):
        return self.key == ("GL", "1", "1")


def _coerce_scalar(field, x):
    if isinstance(x, int):
        return field.from_int(x)
    return x


def gl_atom(field, u, v):
    """Raw group-like functional; no character validation."""
    return GLAtom(_coerce_scalar(field, u), _coerce_scalar(field, v))


def group_like(pres, u, v):
    """Validated group-like: in the one-parameter deformations an algebra
    character must satisfy u^2 = v^2; reject anything else there."""
    u = _coerce_scalar(pres.field, u)
    v = _coerce_scalar(pres.field, v)
    if pres.case in ("r12", "r11") and not (u * u == v * v):
        raise ValueError(
            f"GL({u.to_str()}, {v.to_str()}) is not an algebra character "
            f"for case {pres.case}: it needs u^2 = v^2"
        )
    return GLAtom(u, v)


def k_atom(field):
    """The character a, d |-> q (pairs to q^(k+l))."""
    q = field.var("q")
    return GLAtom(q, q)


def eta_atom(field):
    """The parity character a |-> 1, d |-> -1."""
    return GLAtom(field.one(), -field.one())


def l_atom(field):
    """The character a, d |-> r."""
    r = field.var("r")
    return GLAtom(r, r)


def atom_parity(atom):
    return 1 if atom in ("B", "C") else 0


def atom_key(atom):
    return atom.key if isinstance(atom, GLAtom) else atom


def word_parity(word):
    return sum(atom_parity(a) for a in word) & 1


def word_key(word):
    return tuple(atom_key(a) for a in word)


def word_normalize(word):
    """Merge adjacent group-likes (characters compose pointwise) and drop
    unit characters; returns a canonical tuple."""
    out = []
    for atom in word:
        if isinstance(atom, GLAtom):
            if out and isinstance(out[-1], GLAtom):
                merged = GLAtom(out[-1].u * atom.u, out[-1].v * atom.v)
                out.pop()
                if not merged.is_unit():
                    out.append(merged)
                continue
            if atom.is_unit():
                continue
        out.append(atom)
    return tuple(out)


# ----------------------------------------------------------------------
# Dual elements: {word tuple: scalar}

def dual_word(field, atoms, coeff=None):
    if coeff is None:
        coeff = field.one()
    if coeff.is_zero():
        return {}
    return {word_normalize(tuple(atoms)): coeff}


def _dacc(out, word, coeff):
    if coeff.is_zero():
        return
    if word in out:
        s = out[word] + coeff
        if s.is_zero():
            del out[word]
        else:
            out[word] = s
    else:
        out[word] = coeff


def dual_add(a, b):
    out = dict(a)
    for w, c in b.items():
        _dacc(out, w, c)
    return out


def dual_scale(a, c):
    if c.is_zero():
        return {}
    return {w: c * x for w, x in a.items()}


def dual_sub(a, b):
    out = dict(a)
    for w, c in b.items():
        _dacc(out, w, -c)
    return out


def dual_mul(a, b):
    """Concatenation product, bilinear, renormalizing the glued words."""
    out = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            _dacc(out, word_normalize(w1 + w2), c1 * c2)
    return out


def dual_eq(a, b):
    diff = dual_sub(a, b)
    return all(c.is_zero() for c in diff.values())


def _atom_str(atom):
    if isinstance(atom, GLAtom):
        return f"GL({atom.key[1]},{atom.key[2]})"
    return atom


def dual_to_str(a):
    if not a:
        return "0"
    parts = []
    for word in sorted(a, key=lambda w: (len(w), word_key(w))):
        c = a[word]
        body = "*".join(_atom_str(x) for x in word) if word else "1"
        parts.append(f"({c.to_str()})*{body}")
    return " + ".join(parts)


# ----------------------------------------------------------------------
# The pairing

def pair_letter(field, atom, mono):
    """Base table of the bilinear form on single dual letters."""
    k, l, m, n = mono
    if atom == "B":
        return field.one() if (m, n) == (1, 0) else field.zero()
    if atom == "C":
        return field.one() if (m, n) == (0, 1) else field.zero()
    if m or n:
        return field.zero()
    if atom == "A":
        return field.from_int(k)
    if atom == "D":
        return field.from_int(l)
    if isinstance(atom, GLAtom):
        return (atom.u ** k) * (atom.v ** l)
    raise ValueError(f"unknown dual letter: {atom!r}")


def _pair_word(pres, word, mono, signed):
    field = pres.field
    if not word:
        return field.one() if (mono[2], mono[3]) == (0, 0) else field.zero()
    if len(word) == 1:
        return pair_letter(field, word[0], mono)
    cache = pres.caches["pair"]
    key = (word_key(word), mono, signed)
    hit = cache.get(key)
    if hit is not None:
        return hit
    head, rest = word[0], word[1:]
    rest_parity = word_parity(rest)
    total = field.zero()
    for (m1, m2), c in delta(pres, mono).items():
        c_head = pair_letter(field, head, m1)
        if c_head.is_zero():
            continue
        c_rest = _pair_word(pres, rest, m2, signed)
        if c_rest.is_zero():
            continue
        term = c * c_head * c_rest
        if signed and rest_parity and mono_parity(m1):
            term = -term
        total = total + term
    cache[key] = total
    return total


def pair(pres, dual, x, signed=False):
    """Pair a dual element (or bare word/letter) against a plane element
    (or bare monomial).  `signed` switches on the graded contraction rule
    (-1)^(deg tail * deg first leg); the default convention carries no such
    sign, which is the one every built-in table satisfies."""
    field = pres.field
    if isinstance(dual, str):
        dual = {(dual,): field.one()}
    elif isinstance(dual, tuple):
        dual = {word_normalize(dual): field.one()}
    elif isinstance(dual, GLAtom):
        dual = {(dual,): field.one()}
    if isinstance(x, tuple):
        x = {x: field.one()}
    total = field.zero()
    for word, cw in dual.items():
        for mono, cm in x.items():
            if cw.is_zero() or cm.is_zero():
                continue
            val = _pair_word(pres, word, mono, signed)
            if not val.is_zero():
                total = total + cw * cm * val
    return total


# ----------------------------------------------------------------------
# Relation / coproduct checkers

class PairCheckResult:
    """Outcome of a pairing-level check: ok flag plus labelled residuals."""

    def __init__(self, ok, residuals, checked):
        self.ok = ok
        self.residuals = residuals
        self.checked = checked

    def __repr__(self):
        status = "ok" if self.ok else f"{len(self.residuals)} residuals"
        return f"PairCheckResult({status}, checked={self.checked})"


def _degree_monos(max_degree):
    """Normal monomials a^k d^l b^m c^n with k + l <= max_degree and
    m, n in {0, 1} (the PBW grid the relation checks run over)."""
    out = []
    for k in range(max_degree + 1):
        for l in range(max_degree + 1 - k):
            for m in (0, 1):
                for n in (0, 1):
                    out.append((k, l, m, n))
    return out


def relation_check(pres, lhs, rhs, max_degree, signed=False):
    """PASS iff <lhs - rhs, a^k d^l b^m c^n> = 0 for all k + l <= max_degree
    and m, n in {0, 1}."""
    diff = dual_sub(lhs, rhs)
    residuals = []
    checked = 0
    for mono in _degree_monos(max_degree):
        val = pair(pres, diff, mono, signed=signed)
        checked += 1
        if not val.is_zero():
            residuals.append((mono_to_str(mono), val))
    return PairCheckResult(not residuals, residuals, checked)


def _flatten_formula(formula):
    """Accept either [(coeff, left word, right word)] triples or
    [(DualElement, DualElement)] pairs; return the triple form."""
    flat = []
    for entry in formula:
        if len(entry) == 3:
            flat.append(entry)
        else:
            left, right = entry
            for w1, c1 in left.items():
                for w2, c2 in right.items():
                    flat.append((c1 * c2, w1, w2))
    return flat


def _total_degree_monos(max_degree):
    out = []
    for k in range(max_degree + 1):
        for l in range(max_degree + 1 - k):
            for m in (0, 1):
                for n in (0, 1):
                    if k + l + m + n <= max_degree:
                        out.append((k, l, m, n))
    return out


def coproduct_check(pres, gen, formula, max_degree, signed=False):
    """PASS iff sum <P', x> <P'', y> = <gen, x y> for all normal monomials
    x, y of total degree <= max_degree each.  `formula` is the candidate
    coproduct of the dual letter `gen` as a sum of word pairs."""
    field = pres.field
    flat = _flatten_formula(formula)
    monos = _total_degree_monos(max_degree)
    prod_cache = {}
    residuals = []
    checked = 0
    for x in monos:
        px = {w: _pair_word(pres, w, x, False) for (_, w, _) in flat}
        x_par = mono_parity(x)
        for y in monos:
            lhs = field.zero()
            for coeff, w1, w2 in flat:
                c1 = px[w1]
                if c1.is_zero():
                    continue
                c2 = _pair_word(pres, w2, y, False)
                if c2.is_zero():
                    continue
                term = coeff * c1 * c2
                if signed and word_parity(w2) and x_par:
                    term = -term
                lhs = lhs + term
            z = prod_cache.get((x, y))
            if z is None:
                z = gmul(pres, {x: field.one()}, {y: field.one()})
                prod_cache[(x, y)] = z
            rhs = pair(pres, gen, z)
            checked += 1
            diff = lhs - rhs
            if not diff.is_zero():
                residuals.append((f"({mono_to_str(x)}, {mono_to_str(y)})", diff))
    return PairCheckResult(not residuals, residuals, checked)


# ----------------------------------------------------------------------
# Built-in coproduct tables on the dual side
#
# Words are written exactly as the closed displays compose them; group-like
# products are pre-merged (characters compose pointwise), e.g. the parity
# character times the q-character is GL(q, -q).

def dual_delta_table(pres, gen, swapped_bc=False):
    """Coproduct of a dual generator as [(coeff, left word, right word)].

    `swapped_bc` selects, for the odd generators of the braided
    one-parameter case only, the variant with the (B-C)/(B+C) tails
    exchanged.  That variant is inconsistent with the braided product
    (see the swap negative control); the default is the consistent form.
    """
    field = pres.field
    one = field.one()
    q = field.var("q")
    case, fw = pres.case, pres.framework
    eta = eta_atom(field)
    K = k_atom(field)

    def t(coeff, left, right):
        return (coeff, word_normalize(tuple(left)), word_normalize(tuple(right)))

    if case == "classical":
        if fw == "braided" or gen in ("A", "D"):
            return [t(one, (), (gen,)), t(one, (gen,), ())]
        return [t(one, (), (gen,)), t(one, (gen,), (eta,))]

    if case == "r22":
        L = l_atom(field)
        if gen in ("A", "D"):
            return [t(one, (), (gen,)), t(one, (gen,), ())]
        tail = {"B": (L,), "C": (K, GLAtom(field.one() / field.var("r"),
                                           field.one() / field.var("r")))}[gen]
        if fw == "unbraided":
            tail = (eta,) + tail
        return [t(one, (), (gen,)), t(one, (gen,), tail)]

    if case == "r12":
        r = field.var("r")
        braid = fw == "braided"
        bb = (2 * r * q) / (q + 1)
        ck = (r * q) / (q - 1)
        parity = () if braid else (eta,)
        if gen == "A":
            return [t(one, (), ("A",)), t(one, ("A",), ()),
                    t(bb, ("B",), parity + ("B",))]
        if gen == "D":
            return [t(one, (), ("D",)), t(one, ("D",), ()),
                    t(-bb, ("B",), parity + ("B",))]
        if gen == "B":
            return [t(one, (), ("B",)), t(one, ("B",), parity)]
        # gen == "C": 1 (x) C + C (x) [eta] K - ck * B (x) [eta] (K - 1)
        return [t(one, (), ("C",)),
                t(one, ("C",), parity + (K,)),
                t(-ck, ("B",), parity + (K,)),
                t(ck, ("B",), parity)]

    # case == "r11"
    Kinv = GLAtom(field.one() / q, field.one() / q)
    braid = fw == "braided"
    parity = () if braid else (eta,)
    s4 = (q - field.one() / q) / 4
    half = field.from_fraction(1, 2)
    if gen in ("A", "D"):
        sgn = one if gen == "A" else -one
        out = [t(one, (), (gen,)), t(one, (gen,), ())]
        # (B - C) (x) [eta] q^-1 K (B + C)  +  (B + C) (x) [eta] q K^-1 (B - C)
        for lsign, left in ((one, "B"), (-one, "C")):
            for rsign, right in ((one, "B"), (one, "C")):
                out.append(t(sgn * s4 * lsign * rsign / q,
                             (left,), parity + (K, right)))
        for lsign, left in ((one, "B"), (one, "C")):
            for rsign, right in ((one, "B"), (-one, "C")):
                out.append(t(sgn * s4 * lsign * rsign * q,
                             (left,), parity + (Kinv, right)))
        return out
    sgn = one if gen == "B" else -one
    if not (braid and swapped_bc):
        # Delta(B) = 1(x)B + 1/2 (B-C)(x)[eta]K + 1/2 (B+C)(x)[eta]K^-1
        # Delta(C) = 1(x)C - 1/2 (B-C)(x)[eta]K + 1/2 (B+C)(x)[eta]K^-1
        return [t(one, (), (gen,)),
                t(sgn * half, ("B",), parity + (K,)),
                t(-sgn * half, ("C",), parity + (K,)),
                t(half, ("B",), parity + (Kinv,)),
                t(half, ("C",), parity + (Kinv,))]
    # swapped control variant: (B+C)(x)K and (B-C)(x)K^-1
    return [t(one, (), (gen,)),
            t(half, ("B",), (K,)),
            t(half, ("C",), (K,)),
            t(sgn * half, ("B",), (Kinv,)),
            t(-sgn * half, ("C",), (Kinv,))]


# ----------------------------------------------------------------------
# Built-in relation suites on the dual side

def _w(field, *entries):
    """Sum of (coeff, atoms) entries into a dual element."""
    out = {}
    for coeff, atoms in entries:
        _dacc(out, word_normalize(tuple(atoms)), _coerce_scalar(field, coeff))
    return out


def dual_relation_suite(pres):
    """The defining relations of the dual generators, as (name, lhs, rhs)
    with both sides dual elements, ready for relation_check."""
    field = pres.field
    one = field.one()
    q = field.var("q")
    K = k_atom(field)
    case = pres.case

    def comm(x, y):
        return _w(field, (one, (x, y)), (-one, (y, x)))

    def anti(x, y):
        return _w(field, (one, (x, y)), (one, (y, x)))

    suite = [("[A,D] = 0", comm("A", "D"), {})]
    if case in ("classical", "r22", "r12"):
        suite += [
            ("[A,B] = B", comm("A", "B"), _w(field, (one, ("B",)))),
            ("[D,B] = -B", comm("D", "B"), _w(field, (-one, ("B",)))),
        ]
    if case in ("classical", "r22"):
        suite += [
            ("[A,C] = -C", comm("A", "C"), _w(field, (-one, ("C",)))),
            ("[D,C] = C", comm("D", "C"), _w(field, (one, ("C",)))),
            ("B^2 = 0", _w(field, (one, ("B", "B"))), {}),
            ("C^2 = 0", _w(field, (one, ("C", "C"))), {}),
        ]
    if case == "classical":
        suite.append(("{B,C} = A+D", anti("B", "C"),
                      _w(field, (one, ("A",)), (one, ("D",)))))
        return suite
    if case == "r22":
        suite.append(("{B,C} = (K-1)/(q-1)", anti("B", "C"),
                      _w(field, (one / (q - 1), (K,)), (-one / (q - 1), ()))))
        return suite
    if case == "r12":
        r = field.var("r")
        c2 = (r * q) / ((q * q - 1) * (q - 1))
        cb = (2 * r * q) / (q * q - 1)
        # [A,C] = -C - 2rq/(q^2-1) (K - q) B, and [D,C] is its negative
        ac_rhs = _w(field, (-one, ("C",)), (-cb, (K, "B")), (cb * q, ("B",)))
        suite += [
            ("[A,C] = -C - 2rq/(q^2-1)(K-q)B", comm("A", "C"), ac_rhs),
            ("[D,C] = C + 2rq/(q^2-1)(K-q)B", comm("D", "C"),
             dual_scale(ac_rhs, -one)),
            ("{B,C} = (K-1)/(q-1)", anti("B", "C"),
             _w(field, (one / (q - 1), (K,)), (-one / (q - 1), ()))),
            ("B^2 = 0", _w(field, (one, ("B", "B"))), {}),
            ("C^2 = -rq/((q^2-1)(q-1))(K-1)(K-q)",
             _w(field, (one, ("C", "C"))),
             # -(c2) (K^2 - (q+1) K + q)
             _w(field, (-c2, (gl_atom(field, q * q, q * q),)),
                (c2 * (q + 1), (K,)), (-c2 * q, ()))),
        ]
        return suite
    # case == "r11"
    K2 = gl_atom(field, q * q, q * q)
    K2inv = gl_atom(field, one / (q * q), one / (q * q))
    quarter = field.from_fraction(1, 4)
    # u = (q^-2 K^2 + q^2 K^-2)/4,  w = (q^-2 K^2 - q^2 K^-2)/4
    uB = _w(field, (quarter / (q * q), (K2, "B")), (quarter * q * q, (K2inv, "B")))
    wC = _w(field, (quarter / (q * q), (K2, "C")), (-quarter * q * q, (K2inv, "C")))
    uC = _w(field, (quarter / (q * q), (K2, "C")), (quarter * q * q, (K2inv, "C")))
    wB = _w(field, (quarter / (q * q), (K2, "B")), (-quarter * q * q, (K2inv, "B")))
    half_f = field.from_fraction(1, 2)
    ab_rhs = dual_add(_w(field, (half_f, ("B",))), dual_add(uB, wC))
    ac_rhs = dual_add(_w(field, (-half_f, ("C",))),
                      dual_add(dual_scale(uC, -one), dual_scale(wB, -one)))
    # h = ((K^2-1)/(q^2-1) + (K^-2-1)/(q^-2-1))/2,  anticommutator {B,C} = h
    e1 = one / (q * q - 1)
    e2 = one / (one / (q * q) - 1)
    h = _w(field, (half_f * e1, (K2,)), (-half_f * e1, ()),
           (half_f * e2, (K2inv,)), (-half_f * e2, ()))
    # g/2 = -((K^2-1)/(q^2-1) - (K^-2-1)/(q^-2-1))/4,  B^2 = C^2 = g/2
    g2 = _w(field, (-quarter * e1, (K2,)), (quarter * e1, ()),
            (quarter * e2, (K2inv,)), (-quarter * e2, ()))
    suite += [
        ("[A,B] = B/2 + uB + wC", comm("A", "B"), ab_rhs),
        ("[D,B] = -(B/2 + uB + wC)", comm("D", "B"), dual_scale(ab_rhs, -one)),
        ("[A,C] = -C/2 - uC - wB", comm("A", "C"), ac_rhs),
        ("[D,C] = C/2 + uC + wB", comm("D", "C"), dual_scale(ac_rhs, -one)),
        ("{B,C} = h", anti("B", "C"), h),
        ("B^2 = g/2", _w(field, (one, ("B", "B"))), g2),
        ("C^2 = g/2", _w(field, (one, ("C", "C"))), g2),
    ]
    return suite


# ----------------------------------------------------------------------
# Closed-form evaluation tables
#
# Each checker below replays a printed table of pairing values and returns a
# PairCheckResult; the verifier surfaces any mismatch verbatim.

def _qp(field, n):
    return field.var("q") ** n


def _sign_pow(field, n):
    return field.one() if n % 2 == 0 else -field.one()


def pair_table_r12(pres, kmax=5, nmax=4):
    """Closed pairing values of the two-parameter case: the five commutator/
    anticommutator evaluations, the powers <A^n> = k^n and <D^n> = l^n, the
    exponential characters, and the shifted-character identity
    <q^(A+D-1) B, a^k d^l b> = q^(k+l)."""
    field = pres.field
    one = field.one()
    q = field.var("q")
    r = field.var("r")
    residuals = []
    checked = 0

    def expect(label, dual, mono, want):
        nonlocal checked
        checked += 1
        got = pair(pres, dual, mono)
        if not (got - want).is_zero():
            residuals.append((label, got - want))

    BCp = _w(field, (one, ("B", "C")), (one, ("C", "B")))
    AB = _w(field, (one, ("A", "B")), (-one, ("B", "A")))
    DB = _w(field, (one, ("D", "B")), (-one, ("B", "D")))
    AC = _w(field, (one, ("A", "C")), (-one, ("C", "A")))
    DC = _w(field, (one, ("D", "C")), (-one, ("C", "D")))
    CC = _w(field, (one, ("C", "C")))
    Kq = k_atom(field)
    qA = gl_atom(field, q, one)
    qD = gl_atom(field, one, q)
    shift = dual_scale(_w(field, (one, (Kq, "B"))), one / q)
    shift_c = dual_scale(_w(field, (one, (Kq, "C"))), one / q)

    for k in range(kmax + 1):
        for l in range(kmax + 1 - k):
            e = (k, l, 0, 0)
            eb = (k, l, 1, 0)
            ec = (k, l, 0, 1)
            s = k + l
            geo = (_qp(field, s) - 1) / (q - 1)
            expect(f"<BC+CB, {mono_to_str(e)}>", BCp, e, geo)
            expect(f"<[A,B], {mono_to_str(eb)}>", AB, eb, one)
            expect(f"<[D,B], {mono_to_str(eb)}>", DB, eb, -one)
            expect(f"<[A,C], {mono_to_str(ec)}>", AC, ec, -one)
            expect(f"<[D,C], {mono_to_str(ec)}>", DC, ec, one)
            acb = -2 * r * q * q * (_qp(field, s) - 1) / (q * q - 1)
            expect(f"<[A,C], {mono_to_str(eb)}>", AC, eb, acb)
            expect(f"<[D,C], {mono_to_str(eb)}>", DC, eb, -acb)
            cc = -r * q * q * (_qp(field, s) - 1) * (_qp(field, s - 1) - 1) \
                / ((q * q - 1) * (q - 1))
            expect(f"<C^2, {mono_to_str(e)}>", CC, e, cc)
            if k <= nmax and l <= nmax:
                for n in range(nmax + 1):
                    expect(f"<A^{n}, {mono_to_str(e)}>", ("A",) * n, e,
                           field.from_int(k ** n))
                    expect(f"<D^{n}, {mono_to_str(e)}>", ("D",) * n, e,
                           field.from_int(l ** n))
                    expect(f"<(A+D)^{n}, {mono_to_str(e)}>",
                           _pow_sum_ad(field, n), e, field.from_int(s ** n))
                expect(f"<q^A, {mono_to_str(e)}>", qA, e, _qp(field, k))
                expect(f"<q^D, {mono_to_str(e)}>", qD, e, _qp(field, l))
                expect(f"<q^(A+D), {mono_to_str(e)}>", Kq, e, _qp(field, s))
                expect(f"<q^(A+D-1)B, {mono_to_str(eb)}>", shift, eb,
                       _qp(field, s))
                expect(f"<q^(A+D-1)C, {mono_to_str(ec)}>", shift_c, ec,
                       _qp(field, s))
    return PairCheckResult(not residuals, residuals, checked)


def _pow_sum_ad(field, n):
    """(A + D)^n as a dual element (expanded words)."""
    one = field.one()
    out = {(): one}
    for _ in range(n):
        nxt = {}
        for word, c in out.items():
            _dacc(nxt, word + ("A",), c)
            _dacc(nxt, word + ("D",), c)
        out = nxt
    return out


def delta_pair_table_r12(pres, kmax=4):
    """Evaluations of the two-parameter coproducts on tensor monomials:
    <Delta(X), x (x) y> for x = a^k d^l (b), y = a^k' d^l' (b|c), matched
    against their closed forms; unlisted parity combinations must vanish."""
    field = pres.field
    one = field.one()
    q = field.var("q")
    r = field.var("r")
    residuals = []
    checked = 0
    tables = {g: _flatten_formula(dual_delta_table(pres, g))
              for g in LETTER_ATOMS}

    def lhs_value(gen, x, y):
        total = field.zero()
        for coeff, w1, w2 in tables[gen]:
            c1 = _pair_word(pres, w1, x, False)
            if c1.is_zero():
                continue
            c2 = _pair_word(pres, w2, y, False)
            if c2.is_zero():
                continue
            total = total + coeff * c1 * c2
        return total

    def expect(gen, x, y, want):
        nonlocal checked
        checked += 1
        got = lhs_value(gen, x, y)
        if not (got - want).is_zero():
            residuals.append(
                (f"<Delta({gen}), {mono_to_str(x)} (x) {mono_to_str(y)}>",
                 got - want))

    for k in range(kmax + 1):
        for l in range(kmax + 1 - k):
            for kp in range(kmax + 1):
                for lp in range(kmax + 1 - kp):
                    e, eb, ec = (k, l, 0, 0), (k, l, 1, 0), (k, l, 0, 1)
                    f, fb, fc = (kp, lp, 0, 0), (kp, lp, 1, 0), (kp, lp, 0, 1)
                    sg = _sign_pow(field, lp)
                    qs = _qp(field, kp + lp)
                    expect("A", e, f, field.from_int(k + kp))
                    expect("A", eb, fb, sg * 2 * r * q / (q + 1))
                    expect("D", e, f, field.from_int(l + lp))
                    expect("D", eb, fb, -sg * 2 * r * q / (q + 1))
                    expect("B", e, fb, one)
                    expect("B", eb, f, sg)
                    expect("C", e, fc, one)
                    expect("C", ec, f, sg * qs)
                    expect("C", eb, f, -sg * r * q * (qs - 1) / (q - 1))
                    zero = field.zero()
                    for gen in ("A", "D"):
                        for x, y in ((e, fb), (eb, f), (e, fc), (ec, f),
                                     (ec, fc), (eb, fc), (ec, fb)):
                            expect(gen, x, y, zero)
                    for gen in ("B", "C"):
                        for x, y in ((eb, fb), (ec, fc), (eb, fc), (ec, fb)):
                            expect(gen, x, y, zero)
                    expect("B", e, fc, zero)
                    expect("B", ec, f, zero)
                    expect("C", e, fb, zero)
    return PairCheckResult(not residuals, residuals, checked)


def delta_pair_table_r11(pres, kmax=4):
    """Same style of table for the one-parameter self-dual case."""
    field = pres.field
    one = field.one()
    q = field.var("q")
    residuals = []
    checked = 0
    tables = {g: _flatten_formula(dual_delta_table(pres, g))
              for g in LETTER_ATOMS}

    def lhs_value(gen, x, y):
        total = field.zero()
        for coeff, w1, w2 in tables[gen]:
            c1 = _pair_word(pres, w1, x, False)
            if c1.is_zero():
                continue
            c2 = _pair_word(pres, w2, y, False)
            if c2.is_zero():
                continue
            total = total + coeff * c1 * c2
        return total

    def expect(gen, x, y, want):
        nonlocal checked
        checked += 1
        got = lhs_value(gen, x, y)
        if not (got - want).is_zero():
            residuals.append(
                (f"<Delta({gen}), {mono_to_str(x)} (x) {mono_to_str(y)}>",
                 got - want))

    quarter = field.from_fraction(1, 4)
    half = field.from_fraction(1, 2)
    for k in range(kmax + 1):
        for l in range(kmax + 1 - k):
            for kp in range(kmax + 1):
                for lp in range(kmax + 1 - kp):
                    e, eb, ec = (k, l, 0, 0), (k, l, 1, 0), (k, l, 0, 1)
                    f, fb, fc = (kp, lp, 0, 0), (kp, lp, 1, 0), (kp, lp, 0, 1)
                    sg = _sign_pow(field, lp)
                    qp = _qp(field, kp + lp)
                    qm = _qp(field, -(kp + lp))
                    ssum = quarter * (q - one / q) * sg * (qp + qm)
                    sdiff = quarter * (q - one / q) * sg * (qp - qm)
                    expect("A", e, f, field.from_int(k + kp))
                    expect("A", eb, fb, ssum)
                    expect("A", ec, fc, ssum)
                    expect("A", eb, fc, -sdiff)
                    expect("A", ec, fb, -sdiff)
                    expect("D", e, f, field.from_int(l + lp))
                    expect("D", eb, fb, -ssum)
                    expect("D", ec, fc, -ssum)
                    expect("D", eb, fc, sdiff)
                    expect("D", ec, fb, sdiff)
                    expect("B", e, fb, one)
                    expect("B", eb, f, half * sg * (qp + qm))
                    expect("B", ec, f, -half * sg * (qp - qm))
                    expect("C", e, fc, one)
                    expect("C", ec, f, half * sg * (qp + qm))
                    expect("C", eb, f, -half * sg * (qp - qm))
                    zero = field.zero()
                    for gen in ("A", "D"):
                        for x, y in ((e, fb), (eb, f), (e, fc), (ec, f)):
                            expect(gen, x, y, zero)
                    for gen in ("B", "C"):
                        for x, y in ((eb, fb), (ec, fc), (eb, fc), (ec, fb)):
                            expect(gen, x, y, zero)
                        expect(gen, e, fc if gen == "B" else fb, zero)
    return PairCheckResult(not residuals, residuals, checked)


def commutator_pair_table_r11(pres, kmax=4):
    """Closed values of the eight bracket functionals on a^k d^l (geometric
    series in q^2 for the even brackets, zero for the commutators), on
    a^k d^l b and a^k d^l c, plus their joint vanishing on a^k d^l b c."""
    field = pres.field
    one = field.one()
    quarter = field.from_fraction(1, 4)
    half = field.from_fraction(1, 2)
    residuals = []
    checked = 0

    def comm(x, y):
        return _w(field, (one, (x, y)), (-one, (y, x)))

    AD = comm("A", "D")
    AB = comm("A", "B")
    AC = comm("A", "C")
    DB = comm("D", "B")
    DC = comm("D", "C")
    BC = _w(field, (one, ("B", "C")), (one, ("C", "B")))
    BB = _w(field, (one, ("B", "B")))
    CC = _w(field, (one, ("C", "C")))
    brackets = (("[A,D]", AD), ("[A,B]", AB), ("[A,C]", AC), ("[D,B]", DB),
                ("[D,C]", DC), ("{B,C}", BC), ("B^2", BB), ("C^2", CC))

    def expect(label, dual, mono, want):
        nonlocal checked
        checked += 1
        got = pair(pres, dual, mono)
        if not (got - want).is_zero():
            residuals.append((f"<{label}, {mono_to_str(mono)}>", got - want))

    zero = field.zero()
    q2 = _qp(field, 2)
    qm2 = _qp(field, -2)
    one_ = field.one()
    for k in range(kmax + 1):
        for l in range(kmax + 1 - k):
            e = (k, l, 0, 0)
            eb = (k, l, 1, 0)
            ec = (k, l, 0, 1)
            ebc = (k, l, 1, 1)
            Qp = _qp(field, 2 * (k + l))
            Qm = _qp(field, -2 * (k + l))
            dif = quarter * (Qp - Qm)
            summ = half + quarter * (Qp + Qm)
            geo_p = (Qp - one_) / (q2 - one_)
            geo_m = (Qm - one_) / (qm2 - one_)
            expect("{B,C}", BC, e, half * (geo_p + geo_m))
            expect("B^2", BB, e, -quarter * (geo_p - geo_m))
            expect("C^2", CC, e, -quarter * (geo_p - geo_m))
            for label, dual in (("[A,B]", AB), ("[A,C]", AC), ("[D,B]", DB),
                                ("[D,C]", DC), ("[A,D]", AD)):
                expect(label, dual, e, zero)
            expect("[A,C]", AC, eb, -dif)
            expect("[D,B]", DB, ec, -dif)
            expect("[A,C]", AC, ec, -summ)
            expect("[D,B]", DB, eb, -summ)
            expect("[A,B]", AB, eb, summ)
            expect("[D,C]", DC, ec, summ)
            expect("[A,B]", AB, ec, dif)
            expect("[D,C]", DC, eb, dif)
            for label, dual in (("[A,D]", AD), ("{B,C}", BC), ("B^2", BB),
                                ("C^2", CC)):
                expect(label, dual, eb, zero)
                expect(label, dual, ec, zero)
            for label, dual in brackets:
                expect(label, dual, ebc, zero)
    return PairCheckResult(not residuals, residuals, checked)


# ----------------------------------------------------------------------
# Dual-route comparison: pairing values recomputed through the coefficient
# polynomials of the coproduct expansion (independent of the sequential
# contraction code path), then matched against the closed forms above.

def dual_route_r11(pres, kmax=3):
    """For each bracket functional, evaluate it on a^k d^l b / c / bc two
    ways: via the pairing and via derivative combinations of the extracted
    coefficient polynomials; both must agree with the closed table."""
    field = pres.field
    one = field.one()
    residuals = []
    checked = 0

    def comm(x, y):
        return _w(field, (one, (x, y)), (-one, (y, x)))

    rone = ones_point(field)

    def D(poly, *vars_):
        return eval_coeff(poly, rone, derivative=vars_ if vars_ else None)

    def expect(label, got, want):
        nonlocal checked
        checked += 1
        if not (got - want).is_zero():
            residuals.append((label, got - want))

    brackets = {
        "{B,C}": _w(field, (one, ("B", "C")), (one, ("C", "B"))),
        "B^2": _w(field, (one, ("B", "B"))),
        "C^2": _w(field, (one, ("C", "C"))),
        "[A,B]": comm("A", "B"),
        "[A,C]": comm("A", "C"),
        "[D,B]": comm("D", "B"),
        "[D,C]": comm("D", "C"),
        "[A,D]": comm("A", "D"),
    }
    for k in range(kmax + 1):
        for l in range(kmax + 1 - k):
            for family, mono in (("b", (k, l, 1, 0)), ("c", (k, l, 0, 1)),
                                 ("bc", (k, l, 1, 1))):
                polys = extract_coeff_polys(pres, k, l, family)

                def P(i, j, ip, jp):
                    return polys[(i, j, ip, jp)]

                # a1, d1, a2, d2 carry derivative indices 0, 1, 2, 3
                route = {
                    "{B,C}": D(P(1, 0, 0, 1)) + D(P(0, 1, 1, 0)),
                    "B^2": D(P(1, 0, 1, 0)),
                    "C^2": D(P(0, 1, 0, 1)),
                    "[A,B]": D(P(0, 0, 1, 0), 0) - D(P(1, 0, 0, 0), 2),
                    "[A,C]": D(P(0, 0, 0, 1), 0) - D(P(0, 1, 0, 0), 2),
                    "[D,B]": D(P(0, 0, 1, 0), 1) - D(P(1, 0, 0, 0), 3),
                    "[D,C]": D(P(0, 0, 0, 1), 1) - D(P(0, 1, 0, 0), 3),
                    "[A,D]": D(P(0, 0, 0, 0), 0, 3) - D(P(0, 0, 0, 0), 2, 1),
                }
                for label, via_polys in route.items():
                    via_pair = pair(pres, brackets[label], mono)
                    expect(f"route <{label}, {mono_to_str(mono)}>",
                           via_polys, via_pair)
    return PairCheckResult(not residuals, residuals, checked)


# ----------------------------------------------------------------------
# Text grammar:  sums of terms, terms are * / chains of factors, factors
# are the atoms A B C D eta K L, GL(u,v), parenthesized subexpressions
# (each optionally ^n), or anything the scalar grammar accepts.

_ATOM_RE = re.compile(r"^(A|B|C|D|eta|K|L)(?:\^([0-9]+))?$")
_GL_RE = re.compile(r"^GL\((.*)\)(?:\^([0-9]+))?$", re.S)
_PAREN_RE = re.compile(r"^\((.*)\)(?:\^([0-9]+))?$", re.S)


def _balanced(text):
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def _split_ops(text, seps, unit_op):
    """Split into [(op, chunk)] at paren depth zero; adjacent +/- signs
    fold into the pending operator (unary minus)."""
    items = []
    depth = 0
    op = unit_op
    current = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced ')' in {text!r}")
        if depth == 0 and ch in seps:
            chunk = "".join(current).strip()
            current = []
            if chunk:
                items.append((op, chunk))
                op = ch
            elif ch in "+-" and op in "+-":
                op = "-" if op != ch else "+"
            else:
                raise ValueError(f"misplaced {ch!r} in {text!r}")
        else:
            current.append(ch)
    if depth != 0:
        raise ValueError(f"unbalanced '(' in {text!r}")
    chunk = "".join(current).strip()
    if not chunk:
        raise ValueError(f"dangling operator in {text!r}")
    items.append((op, chunk))
    return items


def _split_args(text):
    parts = []
    depth = 0
    current = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch == ",":
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def _atom_for_name(pres, name):
    field = pres.field
    if name in LETTER_ATOMS:
        return name
    if name == "eta":
        return eta_atom(field)
    if name == "K":
        return k_atom(field)
    if name == "L":
        return l_atom(field)
    raise ValueError(f"unknown atom {name!r}")


def _as_pure_scalar(dual, what):
    if not dual:
        raise ZeroDivisionError(f"division by zero in {what!r}")
    if set(dual) != {()}:
        raise ValueError(f"can only divide by scalar expressions: {what!r}")
    return dual[()]


def _dual_pow(field, base, n):
    out = {(): field.one()}
    for _ in range(n):
        out = dual_mul(out, base)
    return out


def parse_dual(pres, text):
    """Parse a dual-element expression such as 'B*C + C*B - (K - 1)/(q - 1)'
    or 'GL(q,-q)*B'.  Group-likes written GL(u,v) go through the character
    validation for the active case."""
    text = text.strip()
    if not text:
        raise ValueError("empty dual expression")
    return _parse_dual_expr(pres, text)


def _parse_dual_expr(pres, text):
    field = pres.field
    result = {}
    for op, chunk in _split_ops(text, "+-", "+"):
        term = _parse_dual_term(pres, chunk)
        if op == "-":
            term = dual_scale(term, -field.one())
        result = dual_add(result, term)
    return result


def _parse_dual_term(pres, text):
    acc = None
    for op, chunk in _split_ops(text, "*/", "*"):
        factor = _parse_dual_factor(pres, chunk)
        if acc is None:
            if op == "/":
                raise ValueError(f"term starts with '/': {text!r}")
            acc = factor
        elif op == "*":
            acc = dual_mul(acc, factor)
        else:
            acc = dual_scale(acc, _as_pure_scalar(factor, chunk).inverse())
    return acc


def _parse_dual_factor(pres, text):
    field = pres.field
    m = _ATOM_RE.match(text)
    if m:
        atom = _atom_for_name(pres, m.group(1))
        count = int(m.group(2)) if m.group(2) else 1
        return dual_word(field, (atom,) * count)
    m = _GL_RE.match(text)
    if m and _balanced(m.group(1)):
        args = _split_args(m.group(1))
        if len(args) != 2:
            raise ValueError(f"GL takes two arguments: {text!r}")
        u = to_field(field, parse_scalar(args[0].strip()))
        v = to_field(field, parse_scalar(args[1].strip()))
        atom = group_like(pres, u, v)
        if m.group(2):
            return _dual_pow(field, dual_word(field, (atom,)), int(m.group(2)))
        return dual_word(field, (atom,))
    m = _PAREN_RE.match(text)
    if m and _balanced(m.group(1)):
        inner = _parse_dual_expr(pres, m.group(1).strip())
        if m.group(2):
            return _dual_pow(field, inner, int(m.group(2)))
        return inner
    return {(): to_field(field, parse_scalar(text))}

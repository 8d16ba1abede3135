"""Exact scalar arithmetic for the deformation verifier.

Scalars live in the field Q(q, r, p, K, L, tau, rho, eps)[sigma] with
sigma^2 = 1 - q^-2.  A scalar is stored as (x + y*sigma)/den where x, y, den
are sparse multivariate polynomials with exact rational coefficients.  The
eight commuting indeterminates are, in canonical order:

    q    deformation parameter
    r    secondary deformation parameter
    p    formal stand-in for ln(q) in change-of-basis checks
    K    central group-like exponential q^(A+D)
    L    central group-like exponential r^(A+D)
    tau  formal stand-in for A+D in classical limits
    rho  formal slope of the r-path in classical limits
    eps  series variable for classical limits

Polynomials are dicts mapping an int-packed exponent vector (16 bits per
variable) to an exact rational coefficient.  Addition of packed keys is
monomial multiplication.  Fractions are reduced lazily: every dict-level
operation is exact, so zero tests and equality never require a gcd; full
canonicalization (gcd reduction plus monic denominator) happens on demand.

A parallel numeric backend evaluates the same expressions at random rational
points (Schwartz-Zippel style); it represents a scalar as an (x, y) pair of
rationals with a fixed rational value for sigma^2.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

try:
    from gmpy2 import mpq as _Q, gcd as _zgcd, lcm as _zlcm
except ImportError:  # pragma: no cover - mirror always has gmpy2
    from fractions import Fraction as _Q
    from math import gcd as _zgcd, lcm as _zlcm

VARS = ("q", "r", "p", "K", "L", "tau", "rho", "eps")
NVARS = len(VARS)
_VAR_INDEX = {name: i for i, name in enumerate(VARS)}
_SHIFT = 16
_MASK = 0xFFFF

_QZERO = _Q(0)
_QONE = _Q(1)


class PoleError(ArithmeticError):
    """A denominator vanished (numeric evaluation or series expansion)."""


# ----------------------------------------------------------------------
# packed exponent keys


def _pack(exps):
    key = 0
    for i, e in enumerate(exps):
        if e:
            key |= e << (_SHIFT * i)
    return key


def _unpack(key):
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(NVARS))


def _key_degree(key):
    d = 0
    while key:
        d += key & _MASK
        key >>= _SHIFT
    return d


def _key_exp(key, i):
    return (key >> (_SHIFT * i)) & _MASK


def _mono_order(key):
    # graded lex: total degree first, then exponents with q most significant
    return (_key_degree(key), _unpack(key))


# ----------------------------------------------------------------------
# raw polynomial layer: dict[packed key] -> rational, zero coeffs pruned


def _padd(a, b):
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, _QZERO) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _pneg(a):
    return {k: -c for k, c in a.items()}


def _pmul(a, b):
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            k = k1 + k2
            s = out.get(k, _QZERO) + c1 * c2
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def _pscale(a, c):
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


def _pconst(c):
    c = _Q(c)
    return {0: c} if c else {}


_PONE = {0: _QONE}


def _pvar(i, e=1):
    return {e << (_SHIFT * i): _QONE}


def _ppow(a, n):
    if n < 0:
        raise ValueError("negative power at the raw polynomial layer")
    out = dict(_PONE)
    base = a
    while n:
        if n & 1:
            out = _pmul(out, base)
        base = _pmul(base, base) if n > 1 else base
        n >>= 1
    return out


def _pdeg_in(a, i):
    return max((_key_exp(k, i) for k in a), default=0)


def _pleading(a):
    return max(a, key=_mono_order)


def _pdivexact(a, b):
    """Exact polynomial quotient a/b; raises if the division is not exact."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    if len(b) == 1:
        (kb, cb), = b.items()
        out = {}
        for k, c in a.items():
            kq = k - kb
            if kq < 0 or any(_key_exp(k, i) < _key_exp(kb, i) for i in range(NVARS)):
                raise ArithmeticError("inexact polynomial division")
            out[kq] = c / cb
        return out
    rem = dict(a)
    kb = _pleading(b)
    cb = b[kb]
    quo = {}
    while rem:
        ka = _pleading(rem)
        eq = [_key_exp(ka, i) - _key_exp(kb, i) for i in range(NVARS)]
        if any(e < 0 for e in eq):
            raise ArithmeticError("inexact polynomial division")
        kq = _pack(eq)
        cq = rem[ka] / cb
        quo[kq] = quo.get(kq, _QZERO) + cq
        for k, c in b.items():
            kk = kq + k
            s = rem.get(kk, _QZERO) - cq * c
            if s:
                rem[kk] = s
            else:
                rem.pop(kk, None)
    return {k: c for k, c in quo.items() if c}


def _pcontent(a):
    """Positive rational content: gcd of numerators over lcm of denominators."""
    num = 0
    den = 1
    for c in a.values():
        num = _zgcd(num, abs(c.numerator))
        den = _zlcm(den, c.denominator)
    return _Q(int(num), int(den))


def _to_recursive(a, i):
    """View a as a univariate polynomial in variable i with poly coefficients."""
    out = {}
    step = 1 << (_SHIFT * i)
    for k, c in a.items():
        e = _key_exp(k, i)
        out.setdefault(e, {})[k - e * step] = c
    return out


def _from_recursive(rec, i):
    out = {}
    step = 1 << (_SHIFT * i)
    for e, coeff in rec.items():
        for k, c in coeff.items():
            out[k + e * step] = c
    return out


def _rec_content(rec):
    cont = {}
    for coeff in rec.values():
        cont = _pgcd(cont, coeff)
        if len(cont) == 1 and 0 in cont:
            break
    return cont


def _rec_mul(rec, poly):
    return {e: _pmul(c, poly) for e, c in rec.items()}


def _rec_sub(a, b):
    out = dict(a)
    for e, c in b.items():
        s = _padd(out.get(e, {}), _pneg(c))
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _rec_shift(rec, n):
    return {e + n: c for e, c in rec.items()}


def _prem_rec(a, b, _depth=0):
    """Pseudo-remainder of recursive-form univariates a mod b."""
    da = max(a) if a else -1
    db = max(b)
    lb = b[db]
    while a and max(a) >= db:
        da = max(a)
        la = a[da]
        # a <- lb*a - la*x^(da-db)*b
        a = _rec_sub(_rec_mul(a, lb), _rec_shift(_rec_mul(b, la), da - db))
    return a


def _pgcd(a, b):
    """Gcd in Q[vars], returned with positive integer-primitive coefficients."""
    if not a:
        return _pprimitive(b)
    if not b:
        return _pprimitive(a)
    if (len(a) == 1 and 0 in a) or (len(b) == 1 and 0 in b):
        return dict(_PONE)
    # pick the first variable present in either operand
    main = None
    for i in range(NVARS):
        if _pdeg_in(a, i) or _pdeg_in(b, i):
            main = i
            break
    if main is None:
        return dict(_PONE)
    if not _pdeg_in(a, main):
        rb = _to_recursive(b, main)
        return _pgcd(a, _rec_content(rb))
    if not _pdeg_in(b, main):
        ra = _to_recursive(a, main)
        return _pgcd(_rec_content(ra), b)
    ra = _to_recursive(a, main)
    rb = _to_recursive(b, main)
    ca = _rec_content(ra)
    cb = _rec_content(rb)
    ra = {e: _pdivexact(c, ca) for e, c in ra.items()}
    rb = {e: _pdivexact(c, cb) for e, c in rb.items()}
    if max(ra) < max(rb):
        ra, rb = rb, ra
    while True:
        rem = _prem_rec(ra, rb)
        if not rem:
            break
        if max(rem) == 0:
            rb = {0: dict(_PONE)}
            break
        cont = _rec_content(rem)
        rem = {e: _pdivexact(c, cont) for e, c in rem.items()}
        ra, rb = rb, rem
    gc = _pgcd(ca, cb)
    return _pprimitive(_pmul(_from_recursive(rb, main), gc))


def _pprimitive(a):
    """Scale to integer-primitive form with positive leading coefficient."""
    if not a:
        return {}
    cont = _pcontent(a)
    if a[_pleading(a)] < 0:
        cont = -cont
    return {k: c / cont for k, c in a.items()}


def _psubst(a, table):
    """Substitute table[i] (a raw poly) for variable i in a."""
    out = {}
    pows = [dict() for _ in range(NVARS)]
    for k, c in a.items():
        term = _pconst(c)
        for i in range(NVARS):
            e = _key_exp(k, i)
            if not e:
                continue
            cache = pows[i]
            if e not in cache:
                cache[e] = _ppow(table[i], e)
            term = _pmul(term, cache[e])
        out = _padd(out, term)
    return out


# ----------------------------------------------------------------------
# polynomial text form


def _fmt_rat(c):
    return str(c)


def _poly_to_str(a):
    if not a:
        return "0"
    keys = sorted(a, key=_mono_order, reverse=True)
    parts = []
    for k in keys:
        c = a[k]
        factors = []
        for i in range(NVARS):
            e = _key_exp(k, i)
            if e == 1:
                factors.append(VARS[i])
            elif e > 1:
                factors.append(f"{VARS[i]}^{e}")
        mono = "*".join(factors)
        if not mono:
            body = _fmt_rat(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{_fmt_rat(abs(c))}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


# ----------------------------------------------------------------------
# symbolic scalars


class Scalar:
    """Element (x + y*sigma)/den of Q(q,r,p,K,L,tau,rho,eps)[sigma]."""

    __slots__ = ("nx", "ny", "den", "canonical")

    def __init__(self, nx, ny=None, den=None, canonical=False):
        self.nx = nx
        self.ny = {} if ny is None else ny
        self.den = dict(_PONE) if den is None else den
        self.canonical = canonical

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_rational(c):
        return Scalar(_pconst(c), canonical=True)

    @staticmethod
    def variable(name):
        return Scalar(_pvar(_VAR_INDEX[name]), canonical=True)

    @staticmethod
    def sigma():
        return Scalar({}, dict(_PONE), canonical=True)

    # -- predicates ------------------------------------------------------

    def is_zero(self):
        return not self.nx and not self.ny

    def is_sigma_free(self):
        return not self.ny

    def is_rational(self):
        if self.ny:
            return False
        if not self.nx:
            return True
        return set(self.nx) <= {0} and set(self.den) <= {0}

    def as_rational(self):
        if not self.is_rational():
            raise ValueError("scalar is not a plain rational")
        num = self.nx.get(0, _QZERO)
        den = self.den.get(0, _QONE)
        return num / den

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, int) or type(other) is _Q:
            return Scalar.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return Scalar(_padd(self.nx, other.nx), _padd(self.ny, other.ny),
                          dict(self.den))
        return Scalar(
            _padd(_pmul(self.nx, other.den), _pmul(other.nx, self.den)),
            _padd(_pmul(self.ny, other.den), _pmul(other.ny, self.den)),
            _pmul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return Scalar(_pneg(self.nx), _pneg(self.ny), dict(self.den),
                      self.canonical)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        den = _pmul(self.den, other.den)
        if not self.ny and not other.ny:
            return Scalar(_pmul(self.nx, other.nx), {}, den)
        # sigma^2 = 1 - q^-2 = (q^2 - 1)/q^2
        q2 = _pvar(_VAR_INDEX["q"], 2)
        s2num = _padd(q2, _pconst(-1))
        xx = _pmul(self.nx, other.nx)
        yy = _pmul(self.ny, other.ny)
        xy = _padd(_pmul(self.nx, other.ny), _pmul(self.ny, other.nx))
        nx = _padd(_pmul(xx, q2), _pmul(yy, s2num))
        ny = _pmul(xy, q2)
        return Scalar(nx, ny, _pmul(den, q2))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("scalar inverse of zero")
        if not self.ny:
            return Scalar(self.den, {}, dict(self.nx))
        # 1/((x+y*sigma)/d) = d*(x-y*sigma)/(x^2 - y^2*sigma^2)
        q2 = _pvar(_VAR_INDEX["q"], 2)
        s2num = _padd(q2, _pconst(-1))
        norm = _padd(_pmul(_pmul(self.nx, self.nx), q2),
                     _pneg(_pmul(_pmul(self.ny, self.ny), s2num)))
        if not norm:
            raise ZeroDivisionError("scalar inverse of zero divisor")
        nx = _pmul(_pmul(self.den, self.nx), q2)
        ny = _pneg(_pmul(_pmul(self.den, self.ny), q2))
        return Scalar(nx, ny, norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.__mul__(other.inverse())

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__mul__(self.inverse())

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse().__pow__(-n)
        out = Scalar.from_rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # cross-multiplication avoids gcd work
        if _padd(_pmul(self.nx, other.den), _pneg(_pmul(other.nx, self.den))):
            return False
        return not _padd(_pmul(self.ny, other.den),
                         _pneg(_pmul(other.ny, self.den)))

    __hash__ = None

    # -- canonical form ----------------------------------------------------

    def canon(self):
        """Reduce num/den by their gcd and make the denominator monic."""
        if self.canonical:
            return self
        if self.is_zero():
            self.nx, self.ny, self.den = {}, {}, dict(_PONE)
            self.canonical = True
            return self
        g = _pgcd(_pgcd(self.nx, self.ny), self.den)
        if g != _PONE:
            self.nx = _pdivexact(self.nx, g)
            self.ny = _pdivexact(self.ny, g)
            self.den = _pdivexact(self.den, g)
        lc = self.den[_pleading(self.den)]
        if lc != 1:
            inv = 1 / lc
            self.nx = _pscale(self.nx, inv)
            self.ny = _pscale(self.ny, inv)
            self.den = _pscale(self.den, inv)
        self.canonical = True
        return self

    # -- queries / transforms ----------------------------------------------

    def degree_in(self, name):
        i = _VAR_INDEX[name]
        self.canon()
        return max(_pdeg_in(self.nx, i), _pdeg_in(self.ny, i),
                   _pdeg_in(self.den, i))

    def depends_on(self, name):
        i = _VAR_INDEX[name]
        self.canon()
        return bool(_pdeg_in(self.nx, i) or _pdeg_in(self.ny, i)
                    or _pdeg_in(self.den, i))

    def substitute(self, bindings):
        """Replace variables by Scalars.  Refuses q-substitution when a
        sigma part is present (sigma is tied to q)."""
        if self.ny and "q" in bindings:
            raise ValueError("cannot substitute q into a sigma-carrying scalar")
        table = {}
        for name, val in bindings.items():
            if not isinstance(val, Scalar):
                val = Scalar.from_rational(val)
            if val.ny:
                raise ValueError("substitution values must be sigma-free")
            table[_VAR_INDEX[name]] = val
        num_x = Scalar.from_rational(0)
        num_y = Scalar.from_rational(0)
        den = Scalar.from_rational(0)
        for poly, acc in ((self.nx, "x"), (self.ny, "y"), (self.den, "d")):
            total = Scalar.from_rational(0)
            pows = {}
            for k, c in poly.items():
                term = Scalar.from_rational(c)
                for i in range(NVARS):
                    e = _key_exp(k, i)
                    if not e:
                        continue
                    if i in table:
                        key = (i, e)
                        if key not in pows:
                            pows[key] = table[i] ** e
                        term = term * pows[key]
                    else:
                        term = term * Scalar(_pvar(i, e), canonical=True)
                total = total + term
            if acc == "x":
                num_x = total
            elif acc == "y":
                num_y = total
            else:
                den = total
        if den.is_zero():
            raise PoleError("denominator vanished under substitution")
        result = (num_x + num_y * Scalar.sigma()) / den
        return result

    def eval_rational(self, assignment):
        """Evaluate at rational values for every variable that occurs.

        Raises on a sigma part (numeric sigma handling lives in the numeric
        backend) and on a vanishing denominator.
        """
        if self.ny:
            raise ValueError("eval_rational requires a sigma-free scalar")
        vals = {}
        for name, v in assignment.items():
            vals[_VAR_INDEX[name]] = _Q(v)

        def _ev(poly):
            total = _QZERO
            for k, c in poly.items():
                t = c
                for i in range(NVARS):
                    e = _key_exp(k, i)
                    if e:
                        if i not in vals:
                            raise ValueError(f"no value for {VARS[i]}")
                        t = t * vals[i] ** e
                total += t
            return total

        den = _ev(self.den)
        if not den:
            raise PoleError("denominator vanished at the evaluation point")
        return _ev(self.nx) / den

    def __repr__(self):
        return f"Scalar({self.to_str()})"

    def to_str(self):
        self.canon()
        den_one = self.den == _PONE
        if not self.ny:
            body = _poly_to_str(self.nx)
            if den_one:
                return body
            return f"({body})/({_poly_to_str(self.den)})"
        if den_one:
            x = _poly_to_str(self.nx)
            y = _poly_to_str(self.ny)
        else:
            d = _poly_to_str(self.den)
            x = f"({_poly_to_str(self.nx)})/({d})"
            y = f"({_poly_to_str(self.ny)})/({d})"
        if not self.nx:
            return f"({y})*sigma"
        return f"{x} + ({y})*sigma"


def scalar_arith(op, x, y=None):
    """Dispatch basic field operations by name."""
    ops = {
        "add": lambda: x + y,
        "sub": lambda: x - y,
        "mul": lambda: x * y,
        "div": lambda: x / y,
        "neg": lambda: -x,
        "pow": lambda: x ** y,
        "eq": lambda: x == y,
        "is_zero": lambda: x.is_zero(),
    }
    if op not in ops:
        raise ValueError(f"unknown scalar operation {op!r}")
    return ops[op]()


def substitute(x, bindings):
    return x.substitute(bindings)


def eval_rational(x, assignment):
    return x.eval_rational(assignment)


# ----------------------------------------------------------------------
# classical limit series


@dataclass
class EpsSeries:
    """Truncated expansion c0 + c1*eps + O(eps^2), with pole bookkeeping."""

    c0: object
    c1: object
    pole: bool = False
    pole_order: int = 0


_LIMIT_PATHS = {
    # case -> bindings applied before expanding around eps = 0
    "r22": {"q": "1+eps", "r": "1+eps*rho", "K": "1+eps*tau",
            "L": "1+eps*rho*tau"},
    "r12": {"q": "1+eps", "r": "eps*rho", "K": "1+eps*tau",
            "L": "1+eps*rho*tau"},
    "r11": {"q": "1+eps", "K": "1+eps*tau", "L": "1+eps*tau"},
    "classical": {"q": "1+eps", "K": "1+eps*tau", "L": "1+eps*tau"},
}

_I_EPS = _VAR_INDEX["eps"]


def _limit_table(case):
    paths = _LIMIT_PATHS[case]
    e = _pvar(_I_EPS)
    table = {i: _pvar(i) for i in range(NVARS)}
    for name, expr in paths.items():
        i = _VAR_INDEX[name]
        if expr == "1+eps":
            table[i] = _padd(_PONE, e)
        elif expr == "1+eps*rho":
            table[i] = _padd(_PONE, _pmul(e, _pvar(_VAR_INDEX["rho"])))
        elif expr == "1+eps*tau":
            table[i] = _padd(_PONE, _pmul(e, _pvar(_VAR_INDEX["tau"])))
        elif expr == "1+eps*rho*tau":
            table[i] = _padd(_PONE, _pmul(e, _pmul(_pvar(_VAR_INDEX["rho"]),
                                                   _pvar(_VAR_INDEX["tau"]))))
        elif expr == "eps*rho":
            table[i] = _pmul(e, _pvar(_VAR_INDEX["rho"]))
        else:  # pragma: no cover
            raise ValueError(expr)
    return table


def _eps_split(poly):
    """Split a poly into {eps-exponent: eps-free poly}."""
    out = {}
    step = 1 << (_SHIFT * _I_EPS)
    for k, c in poly.items():
        e = _key_exp(k, _I_EPS)
        out.setdefault(e, {})[k - e * step] = c
    return out


def classical_series(x, case):
    """Expand a scalar along the classical path of the given case.

    Substitutes q = 1+eps (plus the case-specific r, K, L paths), then
    returns the order-0 and order-1 coefficients around eps = 0 or flags a
    pole.  Sigma parts are unsupported (no check needs them in a limit).
    """
    if case not in _LIMIT_PATHS:
        raise ValueError(f"unknown case {case!r}")
    if x.ny:
        raise ValueError("classical_series requires a sigma-free scalar")
    if _pdeg_in(x.nx, _I_EPS) or _pdeg_in(x.den, _I_EPS):
        raise ValueError("input scalar already mentions eps")
    table = _limit_table(case)
    num = _psubst(x.nx, table)
    den = _psubst(x.den, table)
    if not den:
        raise PoleError("denominator is identically zero on the path")
    zero = Scalar.from_rational(0)
    if not num:
        return EpsSeries(zero, zero)
    nsplit = _eps_split(num)
    dsplit = _eps_split(den)
    vn = min(nsplit)
    vd = min(dsplit)
    val = vn - vd
    if val < 0:
        return EpsSeries(zero, zero, pole=True, pole_order=-val)
    n0 = nsplit.get(vn, {})
    n1 = nsplit.get(vn + 1, {})
    d0 = dsplit.get(vd, {})
    d1 = dsplit.get(vd + 1, {})
    if val >= 2:
        return EpsSeries(zero, zero)
    if val == 1:
        return EpsSeries(zero, Scalar(n0, {}, dict(d0)))
    c0 = Scalar(n0, {}, dict(d0))
    c1num = _padd(_pmul(n1, d0), _pneg(_pmul(n0, d1)))
    c1 = Scalar(c1num, {}, _pmul(d0, d0))
    return EpsSeries(c0, c1)


# ----------------------------------------------------------------------
# parsing


class _Tok:
    __slots__ = ("kind", "val")

    def __init__(self, kind, val=None):
        self.kind = kind
        self.val = val


def _tokenize(text):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("int", int(text[i:j])))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("name", text[i:j]))
            i = j
        elif text.startswith("**", i):
            toks.append(_Tok("^"))
            i += 2
        elif ch in "+-*/^()":
            toks.append(_Tok(ch))
            i += 1
        else:
            raise ValueError(f"bad character {ch!r} in scalar text")
    toks.append(_Tok("end"))
    return toks


class _ScalarParser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok.kind != kind:
            raise ValueError(f"expected {kind!r}, got {tok.kind!r}")
        self.pos += 1
        return tok

    def parse(self):
        out = self.expr()
        if self.peek().kind != "end":
            raise ValueError("trailing input in scalar text")
        return out

    def expr(self):
        node = self.term()
        while self.peek().kind in "+-":
            op = self.take().kind
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind in "*/":
            op = self.take().kind
            rhs = self.factor()
            node = node * rhs if op == "*" else node / rhs
        return node

    def factor(self):
        if self.peek().kind == "-":
            self.take()
            return -self.factor()
        if self.peek().kind == "+":
            self.take()
            return self.factor()
        node = self.atom()
        if self.peek().kind == "^":
            self.take()
            sign = 1
            while self.peek().kind in "+-":
                if self.take().kind == "-":
                    sign = -sign
            e = self.take("int").val
            node = node ** (sign * e)
        return node

    def atom(self):
        tok = self.peek()
        if tok.kind == "int":
            self.take()
            return Scalar.from_rational(tok.val)
        if tok.kind == "name":
            self.take()
            if tok.val == "sigma":
                return Scalar.sigma()
            if tok.val in _VAR_INDEX:
                return Scalar.variable(tok.val)
            raise ValueError(f"unknown symbol {tok.val!r}")
        if tok.kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        raise ValueError(f"unexpected token {tok.kind!r}")


def parse_scalar(text):
    """Parse the scalar grammar: integers, the named variables, sigma,
    + - * / ^ (or **) and parentheses."""
    return _ScalarParser(text).parse()


def scalar_to_str(x):
    return x.to_str()


def to_field(field, x):
    """Re-express a symbolic scalar in `field`: the identity on the symbolic
    backend, exact evaluation at the bound assignment on a numeric one."""
    if field.symbolic or isinstance(x, NumericScalar):
        return x

    def ev(poly):
        total = _Q(0)
        for key, c in poly.items():
            val = _Q(c)
            for i, e in enumerate(_unpack(key)):
                if e:
                    val *= field.assignment[VARS[i]] ** e
            total += val
        return total

    den = ev(x.den)
    if not den:
        raise PoleError("denominator vanishes at the numeric assignment")
    return NumericScalar(field, ev(x.nx) / den, ev(x.ny) / den)


# ----------------------------------------------------------------------
# numeric backend


class NumericScalar:
    """Pair x + y*sigma of exact rationals bound to a trial assignment."""

    __slots__ = ("field", "x", "y")

    def __init__(self, field, x, y=None):
        self.field = field
        self.x = _Q(x)
        self.y = _QZERO if y is None else _Q(y)

    def is_zero(self):
        return not self.x and not self.y

    def is_sigma_free(self):
        return not self.y

    def _coerce(self, other):
        if isinstance(other, NumericScalar):
            return other
        if isinstance(other, int) or type(other) is _Q:
            return NumericScalar(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return NumericScalar(self.field, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __neg__(self):
        return NumericScalar(self.field, -self.x, -self.y)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return NumericScalar(self.field, self.x - other.x, self.y - other.y)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        s2 = self.field.sig2
        return NumericScalar(self.field,
                             self.x * other.x + self.y * other.y * s2,
                             self.x * other.y + self.y * other.x)

    __rmul__ = __mul__

    def inverse(self):
        s2 = self.field.sig2
        norm = self.x * self.x - self.y * self.y * s2
        if not norm:
            raise PoleError("numeric scalar has no inverse at this point")
        return NumericScalar(self.field, self.x / norm, -self.y / norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.__mul__(other.inverse())

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__mul__(self.inverse())

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse().__pow__(-n)
        out = NumericScalar(self.field, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.x == other.x and self.y == other.y

    __hash__ = None

    def canon(self):
        return self

    def to_str(self):
        if not self.y:
            return str(self.x)
        return f"{self.x} + ({self.y})*sigma"

    def __repr__(self):
        return f"NumericScalar({self.to_str()})"


class SymbolicField:
    """Factory handle for symbolic scalars (the default backend)."""

    symbolic = True

    def zero(self):
        return Scalar.from_rational(0)

    def one(self):
        return Scalar.from_rational(1)

    def from_int(self, n):
        return Scalar.from_rational(n)

    def from_fraction(self, a, b):
        return Scalar.from_rational(_Q(a, b))

    def var(self, name):
        return Scalar.variable(name)

    def sigma(self):
        return Scalar.sigma()

    def describe(self):
        return "symbolic"


class NumericField:
    """Factory handle bound to one random rational assignment."""

    symbolic = False

    def __init__(self, assignment):
        self.assignment = {k: _Q(v) for k, v in assignment.items()}
        q = self.assignment["q"]
        if q in (0, 1, -1):
            raise ValueError("q must avoid 0 and +/-1")
        self.sig2 = 1 - 1 / (q * q)

    @staticmethod
    def random(rng, bound=10**4):
        """Draw an assignment with numerators/denominators bounded by
        `bound`, avoiding the degenerate q values."""

        def draw(avoid=()):
            while True:
                num = rng.randint(-bound, bound)
                den = rng.randint(1, bound)
                v = _Q(num, den)
                if v not in avoid:
                    return v

        assignment = {
            "q": draw(avoid=(0, 1, -1)),
            "r": draw(avoid=(0,)),
            "p": draw(avoid=(0,)),
            "K": draw(avoid=(0,)),
            "L": draw(avoid=(0,)),
            "tau": draw(),
            "rho": draw(),
            "eps": draw(),
        }
        return NumericField(assignment)

    def zero(self):
        return NumericScalar(self, 0)

    def one(self):
        return NumericScalar(self, 1)

    def from_int(self, n):
        return NumericScalar(self, n)

    def from_fraction(self, a, b):
        return NumericScalar(self, _Q(a, b))

    def var(self, name):
        return NumericScalar(self, self.assignment[name])

    def sigma(self):
        return NumericScalar(self, 0, 1)

    def describe(self):
        vals = ", ".join(f"{k}={v}" for k, v in sorted(self.assignment.items()))
        return f"numeric({vals})"


def random_numeric_field(seed, trial=0, bound=10**4, max_resample=32):
    """Deterministic numeric field for (seed, trial), resampling past the
    rare degenerate assignments."""
    rng = random.Random(f"{seed}:{trial}")
    for _ in range(max_resample):
        try:
            return NumericField.random(rng, bound=bound)
        except ValueError:
            continue
    raise PoleError("could not draw a usable numeric assignment")

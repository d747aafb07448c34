"""Arithmetic and order for a computable non-Archimedean ordered field.

Numbers are truncated left-finite series ``sum_q c_q * eps**q`` in a fixed
positive infinitesimal generator ``eps``, with exact rational exponents and
floating-point coefficients.  The exponent window each value carries is
relative to its own leading exponent, so arithmetic is exact on all kept
orders:

* ``eps`` is smaller than every positive real, ``1/eps`` larger than every
  real, and the field order is decided by the sign of the leading
  coefficient of a difference.
* Every finite value ``u`` splits as ``st(u) + (infinitesimal part)``, which
  is what makes derivative extraction and the standard-part function work.

The field stands in for a hyperreal continuum at finite precision: it is an
ordered field extension of the reals that is not Dedekind-complete (the set
of infinitesimals is bounded above, e.g. by 1, but has no least upper
bound -- any upper bound can be halved and still bound them).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Union

from .errors import DivisionByZero, NegativeLeading, NotFinite, ParseError
from .lexer import TokenStream, tokenize

Exponent = Union[int, Fraction]
Scalar = Union[int, float, Fraction]

# Outcomes of compare().
LESS, EQUAL, GREATER = -1, 0, 1


@dataclass(frozen=True)
class FieldConfig:
    """Truncation budget and tolerances shared by every number in a computation.

    depth      orders past the leading exponent that every value carries
    max_terms  hard cap on the number of stored terms
    zero_tol   coefficients at or below this magnitude are dropped
    eq_tol     coefficientwise tolerance used by compare() for equality
    """

    depth: int = 10
    max_terms: int = 64
    zero_tol: float = 1e-14
    eq_tol: float = 1e-10

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.zero_tol < 0:
            raise ValueError("zero_tol must be >= 0")
        if self.eq_tol < self.zero_tol:
            raise ValueError("eq_tol must be >= zero_tol")


DEFAULT_CONFIG = FieldConfig()


class Classification(str, Enum):
    ZERO = "zero"
    INFINITESIMAL = "infinitesimal"
    APPRECIABLE = "appreciable-finite"
    FINITE_WITH_INFINITESIMAL_PART = "finite-with-infinitesimal-part"
    INFINITE = "infinite"


class _Exp(Fraction):
    """Fraction with a cached hash; exponents are hash-hot as dict keys."""

    __slots__ = ("_hash",)

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = super().__hash__()
            self._hash = h
            return h


_EXP_CACHE: dict = {}
_EXP_SUMS: dict = {}


def _intern_exp(q: Fraction):
    num, den = q.numerator, q.denominator
    if den == 1:
        return num
    key = (num, den)
    cached = _EXP_CACHE.get(key)
    if cached is None:
        cached = _Exp(num, den)
        _EXP_CACHE[key] = cached
    return cached


def _exp_add(a, b):
    """Exponent addition with memoization (exponent universes are small)."""
    if type(a) is int and type(b) is int:
        return a + b
    key = (
        a if type(a) is int else (a.numerator, a.denominator),
        b if type(b) is int else (b.numerator, b.denominator),
    )
    s = _EXP_SUMS.get(key)
    if s is None:
        if len(_EXP_SUMS) > 200_000:
            _EXP_SUMS.clear()
        s = _intern_exp(a + b if isinstance(a, Fraction) else Fraction(a) + b)
        _EXP_SUMS[key] = s
    return s


def _as_exponent(q) -> Exponent:
    if type(q) is int:
        return q
    if isinstance(q, Fraction):
        return _intern_exp(q)
    if isinstance(q, int):
        return int(q)
    if isinstance(q, float) and q.is_integer():
        return int(q)
    raise TypeError(f"exponent must be an exact rational, got {q!r}")


def _normalize(terms, config: FieldConfig):
    acc: dict = {}
    for q, c in terms:
        q = _as_exponent(q)
        acc[q] = acc.get(q, 0.0) + float(c)
    return _settle(acc, config)


def _settle(acc: dict, config: FieldConfig):
    """Normalization tail for an accumulator whose keys are already interned."""
    zt = config.zero_tol
    kept = [(q, c) for q, c in acc.items() if (c if c >= 0 else -c) > zt]
    if not kept:
        return ()
    kept.sort()
    limit = _exp_add(kept[0][0], config.depth)
    out = []
    for t in kept:
        if t[0] > limit or len(out) >= config.max_terms:
            break
        out.append(t)
    return tuple(out)


class LCNumber:
    """One field element: an immutable, normalized, truncated series.

    ``terms`` is a tuple of (exponent, coefficient) pairs with strictly
    increasing exact-rational exponents; zero is the empty tuple.  Instances
    are value objects: every operation returns a fresh number, so they are
    safe to share between threads.
    """

    __slots__ = ("terms", "config")

    def __init__(self, terms: Iterable[tuple], config: FieldConfig = DEFAULT_CONFIG):
        self.terms = _normalize(terms, config)
        self.config = config

    @classmethod
    def from_real(cls, x: Scalar, config: FieldConfig = DEFAULT_CONFIG) -> "LCNumber":
        return cls(((0, float(x)),), config)

    @classmethod
    def _raw(cls, terms: tuple, config: FieldConfig) -> "LCNumber":
        # Fast path for terms already in normalized form.
        obj = object.__new__(cls)
        obj.terms = terms
        obj.config = config
        return obj

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading_exponent(self):
        return self.terms[0][0] if self.terms else None

    @property
    def leading_coefficient(self):
        return self.terms[0][1] if self.terms else None

    @property
    def is_real(self) -> bool:
        """True when the value is zero or a single exponent-0 term."""
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    def coefficient(self, q) -> float:
        q = _as_exponent(q)
        for e, c in self.terms:
            if e == q:
                return c
        return 0.0

    def truncated(self, max_exponent) -> "LCNumber":
        """Drop every term with exponent above ``max_exponent``."""
        return LCNumber._raw(tuple(t for t in self.terms if t[0] <= max_exponent), self.config)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LCNumber):
            if other.config is not self.config and other.config != self.config:
                raise ValueError("operands carry different FieldConfig values")
            return other
        if isinstance(other, (int, float, Fraction)):
            return LCNumber.from_real(other, self.config)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return sub(self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return sub(other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return mul(self, inv(other))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return mul(other, inv(self))

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self

    def __abs__(self):
        return neg(self) if (self.terms and self.terms[0][1] < 0) else self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return powi(self, k)

    # -- order -------------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return compare(self, other) == EQUAL

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return compare(self, other) == LESS

    def __le__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return compare(self, other) != GREATER

    def __gt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return compare(self, other) == GREATER

    def __ge__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return compare(self, other) != LESS

    __hash__ = None  # equality is tolerance-based

    # -- rendering ---------------------------------------------------------

    def __str__(self):
        return format_lc(self)

    def __repr__(self):
        return f"LCNumber({format_lc(self)!r})"


def _require_same_config(a: LCNumber, b: LCNumber) -> FieldConfig:
    if a.config is not b.config and a.config != b.config:
        raise ValueError("operands carry different FieldConfig values")
    return a.config


def zero(config: FieldConfig = DEFAULT_CONFIG) -> LCNumber:
    return LCNumber((), config)


def one(config: FieldConfig = DEFAULT_CONFIG) -> LCNumber:
    return LCNumber.from_real(1.0, config)


def eps(config: FieldConfig = DEFAULT_CONFIG) -> LCNumber:
    """The distinguished positive infinitesimal generator."""
    return LCNumber(((1, 1.0),), config)


def infinite(config: FieldConfig = DEFAULT_CONFIG) -> LCNumber:
    """A canonical positive infinite element, 1/eps."""
    return LCNumber(((-1, 1.0),), config)


def add(a: LCNumber, b: LCNumber) -> LCNumber:
    config = _require_same_config(a, b)
    if not a.terms:
        return b
    if not b.terms:
        return a
    out = dict(a.terms)
    for q, c in b.terms:
        out[q] = out.get(q, 0.0) + c
    return LCNumber._raw(_settle(out, config), config)


def neg(a: LCNumber) -> LCNumber:
    return LCNumber._raw(tuple((q, -c) for q, c in a.terms), a.config)


def sub(a: LCNumber, b: LCNumber) -> LCNumber:
    return add(a, neg(b))


def mul(a: LCNumber, b: LCNumber) -> LCNumber:
    config = _require_same_config(a, b)
    if not a.terms or not b.terms:
        return zero(config)
    lead_b = b.terms[0][0]
    limit = _exp_add(_exp_add(a.terms[0][0], lead_b), config.depth)
    out: dict = {}
    get = out.get
    for qa, ca in a.terms:
        if _exp_add(qa, lead_b) > limit:
            break
        for qb, cb in b.terms:
            q = _exp_add(qa, qb)
            if q > limit:
                break
            out[q] = get(q, 0.0) + ca * cb
    return LCNumber._raw(_settle(out, config), config)


def powi(a: LCNumber, k: int) -> LCNumber:
    """Integer power by repeated squaring; negative k routes through inv()."""
    if k < 0:
        return powi(inv(a), -k)
    if k == 0:
        return one(a.config)
    if k == 1:
        return a
    if k == 2:
        return mul(a, a)
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def _split_leading(a: LCNumber):
    """Write a = c * eps**q * (1 + m) with m infinitesimal; return (q, c, m)."""
    q, c = a.terms[0]
    shift = -q
    m = LCNumber([(_exp_add(e, shift), coef / c) for e, coef in a.terms[1:]], a.config)
    return q, c, m


def _monomial(q, c, config) -> LCNumber:
    return LCNumber(((q, c),), config)


def inv(a: LCNumber) -> LCNumber:
    """Multiplicative inverse via the geometric series of the relative tail."""
    if not a.terms:
        raise DivisionByZero("inverse of zero")
    config = a.config
    q, c, m = _split_leading(a)
    acc = {0: 1.0}
    p = one(config)
    while True:
        p = mul(p, m).truncated(config.depth)
        if p.is_zero:
            break
        for e, coef in p.terms:
            acc[e] = acc.get(e, 0.0) - coef
        p = neg(p)
    series = LCNumber(acc.items(), config)
    return mul(_monomial(-q, 1.0 / c, config), series)


def nth_root(a: LCNumber, n: int) -> LCNumber:
    """The positive n-th root; exact on exponents, binomial series on the tail."""
    if n < 1:
        raise ValueError("root index must be a positive integer")
    if not a.terms or a.terms[0][1] <= 0:
        raise NegativeLeading(f"{n}-th root requires a positive leading coefficient")
    config = a.config
    q, c, m = _split_leading(a)
    root_q = Fraction(q) / n
    root_c = math.sqrt(c) if n == 2 else c ** (1.0 / n)
    alpha = 1.0 / n
    acc = {0: 1.0}
    p = one(config)
    binom = 1.0
    k = 0
    while True:
        k += 1
        binom *= (alpha - (k - 1)) / k
        p = mul(p, m).truncated(config.depth)
        if p.is_zero:
            break
        for e, coef in p.terms:
            acc[e] = acc.get(e, 0.0) + binom * coef
    series = LCNumber(acc.items(), config)
    return mul(_monomial(root_q, root_c, config), series)


def sqrt(a: LCNumber) -> LCNumber:
    return nth_root(a, 2)


def compare(a: LCNumber, b: LCNumber) -> int:
    """Return LESS/EQUAL/GREATER; equality is coefficientwise within eq_tol.

    The order is decided by the sign of the leading coefficient of the
    normalized difference a - b, computed here without building the series.
    """
    config = _require_same_config(a, b)
    d = dict(a.terms)
    for q, c in b.terms:
        d[q] = d.get(q, 0.0) - c
    zt = config.zero_tol
    kept = [(q, c) for q, c in d.items() if (c if c >= 0 else -c) > zt]
    if not kept:
        return EQUAL
    kept.sort()
    limit = _exp_add(kept[0][0], config.depth)
    biggest = 0.0
    for q, c in kept:
        if q > limit:
            break
        mag = c if c >= 0 else -c
        if mag > biggest:
            biggest = mag
    if biggest <= config.eq_tol:
        return EQUAL
    return GREATER if kept[0][1] > 0 else LESS


def classify(u: LCNumber) -> Classification:
    if not u.terms:
        return Classification.ZERO
    lead = u.terms[0][0]
    if lead > 0:
        return Classification.INFINITESIMAL
    if lead < 0:
        return Classification.INFINITE
    if len(u.terms) == 1:
        return Classification.APPRECIABLE
    return Classification.FINITE_WITH_INFINITESIMAL_PART


def standard_part(u: LCNumber) -> float:
    """The real number infinitely close to a finite u (its shadow)."""
    if not u.terms:
        return 0.0
    if u.terms[0][0] < 0:
        raise NotFinite("standard part of an infinite element")
    return u.coefficient(0)


def is_infinitely_close(a: LCNumber, b: LCNumber) -> bool:
    """True iff a - b is zero or infinitesimal."""
    diff = sub(a, b)
    return diff.is_zero or diff.terms[0][0] > 0


def coefficient_norm(u: LCNumber) -> float:
    """Largest coefficient magnitude; 0.0 for the zero element."""
    return max((abs(c) for _, c in u.terms), default=0.0)


# -- text and JSON rendering ------------------------------------------------


def _fmt_scalar(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _fmt_exponent(q) -> str:
    if q == 1:
        return "eps"
    if isinstance(q, int) and q > 1:
        return f"eps^{q}"
    return f"eps^({q})"


def format_lc(u: LCNumber) -> str:
    """Render as e.g. ``1 - 2*eps + 0.5*eps^(1/2)``; parse_lc inverts this."""
    if not u.terms:
        return "0"
    pieces = []
    for q, c in u.terms:
        mag = abs(c)
        if q == 0:
            body = _fmt_scalar(mag)
        elif mag == 1.0:
            body = _fmt_exponent(q)
        else:
            body = f"{_fmt_scalar(mag)}*{_fmt_exponent(q)}"
        pieces.append((c < 0, body))
    first_neg, first = pieces[0]
    out = ("-" if first_neg else "") + first
    for negative, body in pieces[1:]:
        out += (" - " if negative else " + ") + body
    return out


def parse_lc(text: str, config: FieldConfig = DEFAULT_CONFIG) -> LCNumber:
    """Parse the text rendering of a field element."""
    stream = TokenStream(tokenize(text))
    terms = []
    first = True
    while stream.peek().kind != "end":
        sign = 1.0
        if first:
            while stream.match("-"):
                sign = -sign
            first = False
        else:
            tok = stream.next()
            if tok.kind == "-":
                sign = -1.0
            elif tok.kind != "+":
                raise ParseError(f"expected '+' or '-', got '{tok.text}'", tok.line, tok.col)
            while stream.match("-"):
                sign = -sign
        terms.append(_parse_lc_term(stream, sign))
    if first:
        raise ParseError("empty series literal")
    return LCNumber(terms, config)


def _parse_lc_term(stream: TokenStream, sign: float):
    tok = stream.peek()
    if tok.kind == "number":
        stream.next()
        coef = sign * float(tok.text)
        if stream.match("*"):
            name = stream.expect("ident", "'eps'")
            if name.text != "eps":
                raise ParseError(f"expected 'eps', got '{name.text}'", name.line, name.col)
            return _parse_lc_exponent(stream), coef
        return 0, coef
    if tok.kind == "ident" and tok.text == "eps":
        stream.next()
        return _parse_lc_exponent(stream), sign
    raise stream.error(f"expected a term, got {TokenStream._describe(tok)}")


def _parse_lc_exponent(stream: TokenStream):
    if not stream.match("^"):
        return 1
    if stream.match("("):
        q = _parse_lc_rational(stream)
        stream.expect(")")
        return q
    return _parse_lc_rational(stream)


def _parse_lc_rational(stream: TokenStream):
    sign = -1 if stream.match("-") else 1
    tok = stream.expect("number", "an integer exponent")
    if not tok.text.isdigit():
        raise ParseError(f"exponent parts must be integers, got '{tok.text}'", tok.line, tok.col)
    num = sign * int(tok.text)
    if stream.match("/"):
        den = stream.expect("number", "an integer denominator")
        if not den.text.isdigit() or int(den.text) == 0:
            raise ParseError(f"bad exponent denominator '{den.text}'", den.line, den.col)
        return Fraction(num, int(den.text))
    return num


def to_json(u: LCNumber) -> list:
    """JSON-ready form: a list of {"exp": "p/q", "coef": float} objects."""
    return [{"exp": str(Fraction(q)), "coef": c} for q, c in u.terms]


def from_json(data, config: FieldConfig = DEFAULT_CONFIG) -> LCNumber:
    return LCNumber([(Fraction(item["exp"]), float(item["coef"])) for item in data], config)

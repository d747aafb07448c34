"""First-order formula DSL over field terms, with a randomized checker.

Formulas are prenex: a prefix of typed quantifiers over strata of the field
(reals, infinitesimals, finite or infinite elements, ...) and a
quantifier-free matrix of comparisons between terms.  The checker evaluates
them as a sampling game:

* each maximal block of universal quantifiers is instantiated jointly with
  stratified random draws (plus a deterministic set of coverage probes so
  every compatible stratum, and pairs such as (eps, 1/eps), always appear);
* each existential block runs a bounded witness search over distinguished
  candidates (0, 1, eps, eps^2, 1/eps, the values of already-bound siblings
  and their halves and squares) followed by random draws.

A "falsified" verdict always carries a concrete counterexample that
re-evaluates to false; a failed witness search is reported as inconclusive
("witness-not-found"), never as falsity.  Equality between terms means
coefficientwise agreement within the field's eq_tol, and the report records
the tolerance that was used.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from . import field
from .errors import BindingError, EvaluationError, LevicalcError, ParseError
from .expr import Expr, _eval_hyper, eval_real, free_variables, parse_expr_tokens, render_expr
from .field import DEFAULT_CONFIG, EQUAL, GREATER, LESS, FieldConfig, LCNumber
from .lexer import TokenStream, tokenize

STRATA = ("real", "positive-real", "infinitesimal", "positive", "finite", "infinite", "any")

_KEYWORDS = {"forall", "exists", "and", "or", "not"}


@dataclass(frozen=True)
class Quantifier:
    kind: str  # "forall" | "exists"
    var: str
    stratum: str = "any"


@dataclass(frozen=True)
class Atom:
    op: str  # "<" | "<=" | "="
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    operand: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Formula:
    prefix: tuple  # of Quantifier
    matrix: object


# -- parsing -----------------------------------------------------------------


def parse_formula(src: str) -> Formula:
    stream = TokenStream(tokenize(src))
    formula = _parse_formula(stream)
    tok = stream.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected trailing input '{tok.text}'", tok.line, tok.col)
    _check_bindings(formula)
    return formula


def _parse_formula(stream: TokenStream) -> Formula:
    prefix = []
    while stream.peek().kind == "ident" and stream.peek().text in ("forall", "exists"):
        prefix.append(_parse_quantifier(stream))
        tok = stream.next()
        if tok.kind == ",":
            continue
        if tok.kind == ".":
            break
        raise ParseError(f"expected ',' or '.' after quantifier, got '{tok.text or 'end of input'}'",
                         tok.line, tok.col)
    return Formula(tuple(prefix), _parse_matrix(stream))


def _parse_quantifier(stream: TokenStream) -> Quantifier:
    kind = stream.next().text
    name = stream.expect("ident", "a variable name")
    if name.text in _KEYWORDS or name.text == "eps":
        raise ParseError(f"'{name.text}' cannot be a quantified variable", name.line, name.col)
    stratum = "any"
    if stream.match(":"):
        stratum = _parse_stratum(stream)
    return Quantifier(kind, name.text, stratum)


def _parse_stratum(stream: TokenStream) -> str:
    tok = stream.expect("ident", "a stratum name")
    name = tok.text
    if name == "positive" and stream.peek().kind == "-":
        save = stream.pos
        stream.next()
        nxt = stream.peek()
        if nxt.kind == "ident" and nxt.text == "real":
            stream.next()
            name = "positive-real"
        else:
            stream.pos = save
    if name not in STRATA:
        raise ParseError(f"unknown stratum '{name}'", tok.line, tok.col)
    return name


def _parse_matrix(stream: TokenStream):
    left = _parse_disjunction(stream)
    if stream.match("=>"):
        return Implies(left, _parse_matrix(stream))
    return left


def _parse_disjunction(stream: TokenStream):
    node = _parse_conjunction(stream)
    while stream.peek().kind == "ident" and stream.peek().text == "or":
        stream.next()
        node = Or(node, _parse_conjunction(stream))
    return node


def _parse_conjunction(stream: TokenStream):
    node = _parse_atomf(stream)
    while stream.peek().kind == "ident" and stream.peek().text == "and":
        stream.next()
        node = And(node, _parse_atomf(stream))
    return node


def _parse_atomf(stream: TokenStream):
    tok = stream.peek()
    if tok.kind == "ident" and tok.text == "not":
        stream.next()
        return Not(_parse_atomf(stream))
    # A comparison and a parenthesized sub-formula can both start with "(";
    # try the comparison first and fall back on failure.
    save = stream.pos
    try:
        left = parse_expr_tokens(stream)
        op_tok = stream.peek()
        if op_tok.kind in ("<", "<=", "="):
            stream.next()
            right = parse_expr_tokens(stream)
            return Atom(op_tok.kind, left, right)
        if tok.kind != "(":
            raise ParseError("expected a comparison operator after the term",
                             op_tok.line, op_tok.col)
    except ParseError:
        if tok.kind != "(":
            raise
    stream.pos = save
    stream.expect("(")
    node = _parse_matrix(stream)
    stream.expect(")")
    return node


def _matrix_variables(node) -> set:
    if isinstance(node, Atom):
        return free_variables(node.left) | free_variables(node.right)
    if isinstance(node, Not):
        return _matrix_variables(node.operand)
    if isinstance(node, (And, Or, Implies)):
        return _matrix_variables(node.left) | _matrix_variables(node.right)
    raise TypeError(f"not a matrix node: {node!r}")


def _check_bindings(formula: Formula) -> None:
    seen = set()
    for q in formula.prefix:
        if q.var in seen:
            raise BindingError(f"variable '{q.var}' is bound more than once")
        seen.add(q.var)
    unbound = _matrix_variables(formula.matrix) - seen - {"eps"}
    if unbound:
        name = sorted(unbound)[0]
        raise BindingError(f"variable '{name}' is not bound by any quantifier")


def render_formula(formula: Formula) -> str:
    parts = []
    for q in formula.prefix:
        piece = f"{q.kind} {q.var}"
        if q.stratum != "any":
            piece += f": {q.stratum}"
        parts.append(piece)
    head = ", ".join(parts) + ". " if parts else ""
    return head + _render_matrix(formula.matrix)


def _render_matrix(node) -> str:
    if isinstance(node, Implies):
        left = _render_matrix(node.left)
        if isinstance(node.left, Implies):
            left = f"({left})"
        return f"{left} => {_render_matrix(node.right)}"
    if isinstance(node, Or):
        left = _render_matrix(node.left)
        if isinstance(node.left, Implies):
            left = f"({left})"
        right = _render_matrix(node.right)
        if isinstance(node.right, (Implies, Or)):
            right = f"({right})"
        return f"{left} or {right}"
    if isinstance(node, And):
        left = _render_matrix(node.left)
        if isinstance(node.left, (Implies, Or)):
            left = f"({left})"
        right = _render_matrix(node.right)
        if isinstance(node.right, (Implies, Or, And)):
            right = f"({right})"
        return f"{left} and {right}"
    if isinstance(node, Not):
        inner = _render_matrix(node.operand)
        if not isinstance(node.operand, (Atom, Not)):
            inner = f"({inner})"
        return f"not {inner}"
    return f"{render_expr(node.left)} {node.op} {render_expr(node.right)}"


def parse_formula_file(text: str) -> list:
    """One formula per line; '#' starts a comment, blank lines are skipped.
    Returns a list of (line_number, source, Formula)."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        src = raw.split("#", 1)[0].strip()
        if not src:
            continue
        try:
            out.append((lineno, src, parse_formula(src)))
        except ParseError as e:
            raise ParseError(str(e).split(": ", 1)[-1], lineno, e.col) from None
        except BindingError as e:
            raise BindingError(f"line {lineno}: {e}") from None
    return out


# -- sampling -----------------------------------------------------------------


def _default_weights() -> dict:
    return {"real": 1.0, "infinitesimal": 1.0, "infinite": 1.0, "mixed": 1.0}


@dataclass(frozen=True, eq=False)
class SamplerConfig:
    """Knobs of the randomized checker.

    samples        draws per universal quantifier block
    witness_pool   random candidates per existential block (after the
                   distinguished ones)
    nested_samples draws for a universal block nested under an existential
                   one (witness verification budget)
    weights        relative frequency of the basic sample shapes within the
                   composite strata (any/finite/positive)
    coef_range     range of exponent-0 (real-part) coefficients
    series_bound   magnitude bound for the leading coefficient of drawn
                   infinitesimal and infinite elements; tail coefficients
                   are further damped below min(|lead|, 1)/2.  Keeping
                   series coefficients O(1) keeps inverses and function
                   jets well conditioned, so identities are checked against
                   eq_tol rather than against float-noise blowup.
    exp_den_bound  largest denominator of randomly drawn exponents
    """

    samples: int = 1000
    witness_pool: int = 200
    nested_samples: int = 60
    weights: Mapping[str, float] = dc_field(default_factory=_default_weights)
    coef_range: tuple = (-10.0, 10.0)
    series_bound: float = 2.0
    exp_den_bound: int = 3
    seed: int = 0


def _draw_coef(rng: random.Random, cfg: SamplerConfig, positive: bool) -> float:
    lo, hi = cfg.coef_range
    while True:
        c = rng.uniform(lo, hi)
        if abs(c) >= 0.05:
            return abs(c) if positive else c


def _draw_series_coef(rng: random.Random, cfg: SamplerConfig, positive: bool) -> float:
    while True:
        c = rng.uniform(-cfg.series_bound, cfg.series_bound)
        if abs(c) >= 0.05:
            return abs(c) if positive else c


@lru_cache(maxsize=64)
def _exponent_row(den: int) -> tuple:
    return tuple(field._as_exponent(Fraction(num, den)) for num in range(1, 2 * den + 1))


def _draw_exponent(rng: random.Random, cfg: SamplerConfig):
    row = _exponent_row(rng.randint(1, cfg.exp_den_bound))
    return row[rng.randrange(len(row))]


def _draw_terms(rng, cfg, lead_exp, lead):
    terms = [(lead_exp, lead)]
    cap = 0.5 * min(abs(lead), 1.0)
    for _ in range(rng.randint(0, 2)):
        offset = _draw_exponent(rng, cfg)
        terms.append((field._exp_add(lead_exp, offset), rng.uniform(-cap, cap)))
    return terms


def _sample_shape(shape: str, rng: random.Random, cfg: SamplerConfig,
                  config: FieldConfig, positive: bool) -> LCNumber:
    if shape == "real":
        return LCNumber([(0, _draw_coef(rng, cfg, positive))], config)
    if shape == "infinitesimal":
        lead = _draw_series_coef(rng, cfg, positive)
        return LCNumber(_draw_terms(rng, cfg, _draw_exponent(rng, cfg), lead), config)
    if shape == "infinite":
        lead = _draw_series_coef(rng, cfg, positive)
        return LCNumber(_draw_terms(rng, cfg, -_draw_exponent(rng, cfg), lead), config)
    if shape == "mixed":
        return LCNumber(_draw_terms(rng, cfg, 0, _draw_coef(rng, cfg, positive)), config)
    raise ValueError(f"unknown shape '{shape}'")


_STRATUM_SHAPES = {
    "real": ("real",),
    "positive-real": ("real",),
    "infinitesimal": ("infinitesimal",),
    "infinite": ("infinite",),
    "finite": ("real", "infinitesimal", "mixed"),
    "positive": ("real", "infinitesimal", "infinite", "mixed"),
    "any": ("real", "infinitesimal", "infinite", "mixed"),
}


def sample(stratum: str, cfg: "SamplerConfig | None" = None, rng: "random.Random | None" = None,
           config: FieldConfig = DEFAULT_CONFIG) -> LCNumber:
    """Draw one stratified random field element."""
    if stratum not in STRATA:
        raise ValueError(f"unknown stratum '{stratum}'")
    cfg = cfg or SamplerConfig()
    rng = rng or random.Random(cfg.seed)
    shapes = _STRATUM_SHAPES[stratum]
    weights = [cfg.weights.get(s, 1.0) for s in shapes]
    shape = rng.choices(shapes, weights)[0] if len(shapes) > 1 else shapes[0]
    positive = stratum in ("positive", "positive-real")
    return _sample_shape(shape, rng, cfg, config, positive)


def stratum_contains(u: LCNumber, stratum: str) -> bool:
    if stratum == "any":
        return True
    if u.is_zero:
        return stratum in ("real", "finite")
    lead_exp, lead_coef = u.terms[0]
    if stratum == "real":
        return u.is_real
    if stratum == "positive-real":
        return u.is_real and lead_coef > 0
    if stratum == "infinitesimal":
        return lead_exp > 0
    if stratum == "infinite":
        return lead_exp < 0
    if stratum == "finite":
        return lead_exp >= 0
    if stratum == "positive":
        return lead_coef > 0
    raise ValueError(f"unknown stratum '{stratum}'")


def _coverage_values(stratum: str, config: FieldConfig) -> list:
    """Deterministic probes guaranteeing every compatible shape shows up."""
    e = field.eps(config)
    candidates = [
        field.zero(config),
        field.one(config),
        e,
        field.infinite(config),
        field.add(field.one(config), e),
        field.neg(field.one(config)),
    ]
    return [u for u in candidates if stratum_contains(u, stratum)]


# -- checking -----------------------------------------------------------------


@dataclass
class CheckReport:
    """Outcome of one randomized transfer check; reproducible from the seed."""

    verdict: str  # not-falsified | falsified | witness-found | witness-not-found
    samples_used: int
    seed: int
    eq_tol: float
    counterexample: "dict | None" = None
    witness: "dict | None" = None
    assignment: "dict | None" = None  # forall values behind an inconclusive search

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "samples_used": self.samples_used,
            "seed": self.seed,
            "eq_tol": self.eq_tol,
        }
        for key in ("counterexample", "witness", "assignment"):
            value = getattr(self, key)
            if value is not None:
                out[key] = {name: str(u) for name, u in value.items()}
        return out


@lru_cache(maxsize=None)
def _uses_eps(e: Expr) -> bool:
    return "eps" in free_variables(e)


class _BindingContext:
    """Per-assignment evaluation context: the field binding (with the eps
    literal bound), plus the same binding projected to floats when every
    value is real, enabling a cheap scalar path."""

    __slots__ = ("binding", "reals", "config")

    def __init__(self, binding, config, eps_value):
        self.config = config
        if all(u.is_real for u in binding.values()):
            self.reals = {name: u.coefficient(0) for name, u in binding.items()}
        else:
            self.reals = None
        if "eps" not in binding:
            binding = {**binding, "eps": eps_value}
        self.binding = binding


def evaluate_matrix(node, binding: Mapping[str, LCNumber], config: FieldConfig = DEFAULT_CONFIG) -> bool:
    """Evaluate a quantifier-free matrix under a field-valued binding.

    Connectives short-circuit left to right, so guards like
    ``not (a = 0) => ...`` protect the terms they dominate.
    """
    ctx = _BindingContext(dict(binding), config, _eps_cached(config))
    return _eval_node(node, ctx)


@lru_cache(maxsize=None)
def _eps_cached(config: FieldConfig) -> LCNumber:
    return field.eps(config)


def _eval_node(node, ctx: _BindingContext) -> bool:
    if isinstance(node, Atom):
        return _eval_atom(node, ctx)
    if isinstance(node, Not):
        return not _eval_node(node.operand, ctx)
    if isinstance(node, And):
        return _eval_node(node.left, ctx) and _eval_node(node.right, ctx)
    if isinstance(node, Or):
        return _eval_node(node.left, ctx) or _eval_node(node.right, ctx)
    if isinstance(node, Implies):
        return (not _eval_node(node.left, ctx)) or _eval_node(node.right, ctx)
    raise TypeError(f"not a matrix node: {node!r}")


def _eval_atom(atom: Atom, ctx: _BindingContext) -> bool:
    eq_tol = ctx.config.eq_tol
    try:
        if ctx.reals is not None and not (_uses_eps(atom.left) or _uses_eps(atom.right)):
            d = eval_real(atom.left, ctx.reals) - eval_real(atom.right, ctx.reals)
            order = EQUAL if abs(d) <= eq_tol else (GREATER if d > 0 else LESS)
        else:
            left = _eval_hyper(atom.left, ctx.binding, ctx.config)
            right = _eval_hyper(atom.right, ctx.binding, ctx.config)
            order = field.compare(left, right)
    except LevicalcError as e:
        rendered = ", ".join(f"{name} = {u}" for name, u in ctx.binding.items() if name != "eps")
        raise EvaluationError(f"{type(e).__name__}: {e} (at {rendered})") from e
    if atom.op == "<":
        return order == LESS
    if atom.op == "<=":
        return order != GREATER
    return order == EQUAL


def _blocks(prefix):
    return [(kind, list(group)) for kind, group in itertools.groupby(prefix, key=lambda q: q.kind)]


class _Budget:
    __slots__ = ("evaluations",)

    def __init__(self):
        self.evaluations = 0


def _forall_assignments(quants, n, rng, cfg, config):
    """Coverage probes (a deterministic product over per-variable probe lists,
    capped at half the budget) followed by joint random draws, n in total."""
    probe_lists = [_coverage_values(q.stratum, config) for q in quants]
    produced = 0
    for combo in itertools.islice(itertools.product(*probe_lists), max(1, n // 2)):
        if produced >= n:
            return
        yield dict(zip((q.var for q in quants), combo))
        produced += 1
    while produced < n:
        yield {q.var: sample(q.stratum, cfg, rng, config) for q in quants}
        produced += 1


def _witness_candidates(quant, binding, rng, cfg, config):
    e = _eps_cached(config)
    distinguished = []
    for u in binding.values():
        half = field.mul(u, field.LCNumber.from_real(0.5, config))
        distinguished.extend([u, half, field.mul(u, u)])
    distinguished.extend([
        field.zero(config),
        field.one(config),
        e,
        field.mul(e, e),
        field.infinite(config),
    ])
    seen = set()
    for u in distinguished:
        if stratum_contains(u, quant.stratum) and u.terms not in seen:
            seen.add(u.terms)
            yield u
    for _ in range(cfg.witness_pool):
        yield sample(quant.stratum, cfg, rng, config)


def _eval_blocks(blocks, matrix, binding, rng, cfg, config, budget, inside_exists, memo=None):
    """Recursive game evaluation.  Returns (truth, info) where info carries
    the interesting assignment: a counterexample path for a failing forall,
    or the witness values for a succeeding exists.

    ``memo`` shares the drawn forall batches between the candidates of one
    existential entry, so every witness candidate is verified against the
    same sample set.
    """
    if not blocks:
        budget.evaluations += 1
        ctx = _BindingContext(binding, config, _eps_cached(config))
        return _eval_node(matrix, ctx), {}
    kind, quants = blocks[0]
    rest = blocks[1:]
    if kind == "forall":
        n = cfg.nested_samples if inside_exists else cfg.samples
        if memo is not None:
            assignments = memo.get(len(blocks))
            if assignments is None:
                assignments = list(_forall_assignments(quants, n, rng, cfg, config))
                memo[len(blocks)] = assignments
        else:
            assignments = _forall_assignments(quants, n, rng, cfg, config)
        for assignment in assignments:
            new_binding = {**binding, **assignment}
            ok, info = _eval_blocks(rest, matrix, new_binding, rng, cfg, config, budget,
                                    inside_exists, memo)
            if not ok:
                return False, {**assignment, **info}
        return True, {}
    # existential block: search candidates per variable, first distinguished
    # then random; candidates are drawn lazily since most searches succeed
    # within the first few.
    names = [q.var for q in quants]
    entry_memo: dict = {}
    if len(quants) == 1:
        combos = ((u,) for u in itertools.islice(
            _witness_candidates(quants[0], binding, rng, cfg, config), cfg.witness_pool))
    else:
        pools = [list(itertools.islice(_witness_candidates(q, binding, rng, cfg, config),
                                       cfg.witness_pool)) for q in quants]
        combos = itertools.islice(itertools.product(*pools), cfg.witness_pool * len(quants))
    for combo in combos:
        assignment = dict(zip(names, combo))
        new_binding = {**binding, **assignment}
        ok, info = _eval_blocks(rest, matrix, new_binding, rng, cfg, config, budget,
                                True, entry_memo)
        if ok:
            return True, {**assignment, **info}
    return False, {}


def check(formula: Formula, cfg: "SamplerConfig | None" = None,
          config: FieldConfig = DEFAULT_CONFIG) -> CheckReport:
    """Randomized falsification run over stratified samples.

    The verdict vocabulary is deliberately modest: universally quantified
    statements come back "not-falsified" or "falsified" (with a verified
    counterexample), existentially rooted ones "witness-found" or
    "witness-not-found".  A failed witness search below universal
    quantifiers is inconclusive and also reports "witness-not-found".
    """
    cfg = cfg or SamplerConfig()
    rng = random.Random(cfg.seed)
    budget = _Budget()
    blocks = _blocks(formula.prefix)
    truth, info = _eval_blocks(blocks, formula.matrix, {}, rng, cfg, config, budget, False)

    has_exists = any(kind == "exists" for kind, _ in blocks)
    root_exists = bool(blocks) and blocks[0][0] == "exists"
    report = CheckReport("not-falsified", budget.evaluations, cfg.seed, config.eq_tol)
    if truth:
        if root_exists:
            report.verdict = "witness-found"
            report.witness = info
    else:
        if root_exists or has_exists:
            report.verdict = "witness-not-found"
            if info:
                report.assignment = info
        else:
            report.verdict = "falsified"
            report.counterexample = info
    return report

"""Term ASTs for smooth real functions and their extension to the field.

A parsed expression denotes an ordinary real function; evaluating it with
field-valued bindings produces the value of the canonically extended
function.  For the rational operations that is just field arithmetic; the
transcendental primitives (sin, cos, exp, log, sqrt) are extended at a
finite argument ``u`` by Taylor expansion about ``st(u)``, truncated at the
configured depth, so identities proved over the reals keep holding
coefficientwise over the extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Union

import numpy as np

from . import field
from .errors import BindingError, DomainError, NegativeLeading, NotFinite, ParseError
from .field import DEFAULT_CONFIG, FieldConfig, LCNumber
from .lexer import TokenStream, tokenize

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")

RealValue = Union[float, np.ndarray]


class Expr:
    """Base class for expression nodes.  Trees are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int  # possibly negative; non-integer powers go via exp/log or sqrt


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str  # one of FUNCTIONS
    arg: Expr


def free_variables(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, (Add, Sub, Mul, Div)):
        return free_variables(e.left) | free_variables(e.right)
    if isinstance(e, Pow):
        return free_variables(e.base)
    if isinstance(e, Neg):
        return free_variables(e.operand)
    if isinstance(e, Call):
        return free_variables(e.arg)
    raise TypeError(f"not an expression node: {e!r}")


# -- parsing -----------------------------------------------------------------


def parse_expr(src: str) -> Expr:
    """Parse an expression; raises ParseError with a 1-based position."""
    stream = TokenStream(tokenize(src))
    e = parse_expr_tokens(stream)
    tok = stream.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected trailing input '{tok.text}'", tok.line, tok.col)
    return e


def parse_expr_tokens(stream: TokenStream) -> Expr:
    """Expression parser over an existing token stream (used by the formula DSL)."""
    e = _parse_term(stream)
    while True:
        if stream.match("+"):
            e = Add(e, _parse_term(stream))
        elif stream.match("-"):
            e = Sub(e, _parse_term(stream))
        else:
            return e


def _parse_term(stream: TokenStream) -> Expr:
    e = _parse_unary(stream)
    while True:
        if stream.match("*"):
            e = Mul(e, _parse_unary(stream))
        elif stream.match("/"):
            e = Div(e, _parse_unary(stream))
        else:
            return e


def _parse_unary(stream: TokenStream) -> Expr:
    if stream.match("-"):
        operand = _parse_unary(stream)
        if isinstance(operand, Const):
            return Const(-operand.value)
        return Neg(operand)
    return _parse_power(stream)


def _parse_power(stream: TokenStream) -> Expr:
    base = _parse_atom(stream)
    if stream.match("^"):
        sign = -1 if stream.match("-") else 1
        tok = stream.expect("number", "an integer exponent")
        if not tok.text.isdigit():
            raise ParseError(f"power exponents must be integers, got '{tok.text}'", tok.line, tok.col)
        return Pow(base, sign * int(tok.text))
    return base


def _parse_atom(stream: TokenStream) -> Expr:
    tok = stream.peek()
    if tok.kind == "number":
        stream.next()
        return Const(float(tok.text))
    if tok.kind == "ident":
        stream.next()
        if stream.peek().kind == "(":
            if tok.text not in FUNCTIONS:
                raise ParseError(f"unknown function '{tok.text}'", tok.line, tok.col)
            stream.next()
            arg = parse_expr_tokens(stream)
            stream.expect(")")
            return Call(tok.text, arg)
        if tok.text in FUNCTIONS:
            raise ParseError(f"expected '(' after function name '{tok.text}'", tok.line, tok.col)
        return Var(tok.text)
    if tok.kind == "(":
        stream.next()
        e = parse_expr_tokens(stream)
        stream.expect(")")
        return e
    raise stream.error(f"expected an expression, got {TokenStream._describe(tok)}")


# -- rendering ---------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 2, Pow: 3}


def render_expr(e: Expr, min_prec: int = 0) -> str:
    """Render with parentheses chosen so the output reparses to the same tree."""
    if isinstance(e, Const):
        if e.value < 0:
            out = "-" + field._fmt_scalar(-e.value)
            return f"({out})" if min_prec > 2 else out  # negative literal binds like a unary minus
        return field._fmt_scalar(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({render_expr(e.arg)})"
    prec = _PREC[type(e)]
    if isinstance(e, (Add, Sub)):
        op = "+" if isinstance(e, Add) else "-"
        out = f"{render_expr(e.left, prec)} {op} {render_expr(e.right, prec + 1)}"
    elif isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        out = f"{render_expr(e.left, prec)} {op} {render_expr(e.right, prec + 1)}"
    elif isinstance(e, Neg):
        out = f"-{render_expr(e.operand, prec + 1)}"
    else:
        k = e.exponent
        out = f"{render_expr(e.base, prec + 1)}^{k}"
    if prec < min_prec:
        return f"({out})"
    return out


# -- real evaluation ----------------------------------------------------------

_REAL_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "log": math.log, "sqrt": math.sqrt}
_ARRAY_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log, "sqrt": np.sqrt}


def eval_real(e: Expr, binding: Mapping[str, RealValue]) -> RealValue:
    """Evaluate over the reals.  Scalar bindings give floats; numpy arrays
    are evaluated elementwise (used for grid sweeps)."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return binding[e.name]
        except KeyError:
            raise BindingError(f"unbound variable '{e.name}'") from None
    if isinstance(e, Add):
        return eval_real(e.left, binding) + eval_real(e.right, binding)
    if isinstance(e, Sub):
        return eval_real(e.left, binding) - eval_real(e.right, binding)
    if isinstance(e, Mul):
        return eval_real(e.left, binding) * eval_real(e.right, binding)
    if isinstance(e, Div):
        num = eval_real(e.left, binding)
        den = eval_real(e.right, binding)
        if _any(den == 0):
            raise DomainError("division by zero")
        return num / den
    if isinstance(e, Pow):
        base = eval_real(e.base, binding)
        if e.exponent < 0 and _any(base == 0):
            raise DomainError("zero raised to a negative power")
        return base ** e.exponent
    if isinstance(e, Neg):
        return -eval_real(e.operand, binding)
    if isinstance(e, Call):
        u = eval_real(e.arg, binding)
        if e.func == "log" and _any(u <= 0):
            raise DomainError("log of a nonpositive value")
        if e.func == "sqrt" and _any(u < 0):
            raise DomainError("sqrt of a negative value")
        fn = _ARRAY_FUNCS[e.func] if isinstance(u, np.ndarray) else _REAL_FUNCS[e.func]
        return fn(u)
    raise TypeError(f"not an expression node: {e!r}")


def _any(condition) -> bool:
    return bool(np.any(condition)) if isinstance(condition, np.ndarray) else bool(condition)


# -- field evaluation (the extended function) ---------------------------------


def eval_hyper(e: Expr, binding: Mapping[str, LCNumber], config: FieldConfig | None = None) -> LCNumber:
    """Evaluate with field-valued bindings, i.e. apply the extended function.

    Real numbers in the binding are coerced to exponent-0 elements.  With
    purely real bindings the result agrees with eval_real to rounding.
    """
    if config is None:
        config = next((v.config for v in binding.values() if isinstance(v, LCNumber)), DEFAULT_CONFIG)
    coerced = {}
    for name, value in binding.items():
        coerced[name] = value if isinstance(value, LCNumber) else LCNumber.from_real(value, config)
    return _eval_hyper(e, coerced, config)


@lru_cache(maxsize=4096)
def _const_lc(value: float, config: FieldConfig) -> LCNumber:
    return LCNumber.from_real(value, config)


def _hyper_const(e, binding, config):
    return _const_lc(e.value, config)


def _hyper_var(e, binding, config):
    try:
        return binding[e.name]
    except KeyError:
        raise BindingError(f"unbound variable '{e.name}'") from None


def _hyper_add(e, binding, config):
    return field.add(_eval_hyper(e.left, binding, config), _eval_hyper(e.right, binding, config))


def _hyper_sub(e, binding, config):
    return field.sub(_eval_hyper(e.left, binding, config), _eval_hyper(e.right, binding, config))


def _hyper_mul(e, binding, config):
    return field.mul(_eval_hyper(e.left, binding, config), _eval_hyper(e.right, binding, config))


def _hyper_div(e, binding, config):
    return field.mul(_eval_hyper(e.left, binding, config), field.inv(_eval_hyper(e.right, binding, config)))


def _hyper_pow(e, binding, config):
    return field.powi(_eval_hyper(e.base, binding, config), e.exponent)


def _hyper_neg(e, binding, config):
    return field.neg(_eval_hyper(e.operand, binding, config))


def _hyper_call(e, binding, config):
    return _call_hyper(e.func, _eval_hyper(e.arg, binding, config))


_HYPER_DISPATCH = {
    Const: _hyper_const,
    Var: _hyper_var,
    Add: _hyper_add,
    Sub: _hyper_sub,
    Mul: _hyper_mul,
    Div: _hyper_div,
    Pow: _hyper_pow,
    Neg: _hyper_neg,
    Call: _hyper_call,
}


def _eval_hyper(e: Expr, binding, config) -> LCNumber:
    try:
        handler = _HYPER_DISPATCH[type(e)]
    except KeyError:
        raise TypeError(f"not an expression node: {e!r}") from None
    return handler(e, binding, config)


_REAL_AT = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "log": math.log, "sqrt": math.sqrt}


def _call_hyper(func: str, u: LCNumber) -> LCNumber:
    """Extend one primitive at a finite argument via its jet about st(u).

    Each primitive is expanded in a form whose series coefficients stay O(1),
    so the zero_tol coefficient cleanup never eats relatively significant
    orders: exp factors out e**st(u), log works on the relative tail of
    u = st(u) * (1 + w), sqrt goes through the field's n-th root (exact on
    exponents), and sin/cos have bounded derivative cycles to begin with.
    """
    config = u.config
    if not u.is_zero and u.leading_exponent < 0:
        raise NotFinite(f"{func} applied to an infinite argument")
    if func == "sqrt":
        if u.is_zero:
            return u
        try:
            return field.nth_root(u, 2)
        except NegativeLeading:
            raise DomainError("sqrt of a value with negative leading coefficient") from None
    x0 = field.standard_part(u)
    if func == "log" and x0 <= 0:
        raise DomainError("log at a standard part <= 0")
    delta = field.sub(u, LCNumber.from_real(x0, config))
    if delta.is_zero:
        return LCNumber.from_real(_REAL_AT[func](x0), config)
    # The argument only carries orders up to its own window top; nothing the
    # jet produces beyond that is trustworthy (log raises the leading
    # exponent, which would otherwise let the window creep upward).
    arg_limit = u.leading_exponent + config.depth

    if func == "exp":
        state = {"inv_fact": 1.0}

        def coef(k):
            if k > 0:
                state["inv_fact"] /= k
            return state["inv_fact"]

        series = _jet_series(coef, delta, config, arg_limit)
        return field.mul(LCNumber.from_real(math.exp(x0), config), series).truncated(arg_limit)

    if func == "log":
        w = LCNumber([(q, c / x0) for q, c in delta.terms], config)

        def coef(k):
            if k == 0:
                return 0.0
            return (1.0 if k % 2 else -1.0) / k

        series = _jet_series(coef, w, config, arg_limit)
        return field.add(LCNumber.from_real(math.log(x0), config), series).truncated(arg_limit)

    s0, c0 = math.sin(x0), math.cos(x0)
    cycle = (s0, c0, -s0, -c0) if func == "sin" else (c0, -s0, -c0, s0)
    state = {"inv_fact": 1.0}

    def coef(k):
        if k > 0:
            state["inv_fact"] /= k
        return cycle[k % 4] * state["inv_fact"]

    return _jet_series(coef, delta, config, arg_limit)


def _jet_series(coef, delta: LCNumber, config: FieldConfig, arg_limit) -> LCNumber:
    """sum_k coef(k) * delta**k, truncated to the window and to arg_limit.

    ``coef`` is a stateful iterator-style callable queried once per k in
    increasing order starting at 0.
    """
    acc = {}
    c0 = coef(0)
    lead_min = None
    if c0 != 0.0:
        acc[0] = c0
        lead_min = 0
    p = field.one(config)
    k = 0
    while True:
        k += 1
        p = field.mul(p, delta)
        limit = arg_limit if lead_min is None else min(arg_limit, lead_min + config.depth)
        p = p.truncated(limit)
        if p.is_zero:
            break
        ck = coef(k)
        if ck != 0.0:
            for q, c in p.terms:
                acc[q] = acc.get(q, 0.0) + ck * c
            if lead_min is None or p.terms[0][0] < lead_min:
                lead_min = min(acc)
    return LCNumber(acc.items(), config).truncated(arg_limit)


# -- symbolic differentiation --------------------------------------------------


def _const(v) -> Const:
    return Const(float(v))


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value + b.value)
    if isinstance(a, Const) and a.value == 0:
        return b
    if isinstance(b, Const) and b.value == 0:
        return a
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value - b.value)
    if isinstance(b, Const) and b.value == 0:
        return a
    if isinstance(a, Const) and a.value == 0:
        return _neg(b)
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value * b.value)
    if isinstance(a, Const):
        if a.value == 0:
            return _const(0)
        if a.value == 1:
            return b
    if isinstance(b, Const):
        if b.value == 0:
            return _const(0)
        if b.value == 1:
            return a
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and a.value == 0 and not (isinstance(b, Const) and b.value == 0):
        return _const(0)
    if isinstance(b, Const) and b.value == 1:
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return _const(a.value / b.value)
    return Div(a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return _const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def _pow(a: Expr, k: int) -> Expr:
    if k == 0:
        return _const(1)
    if k == 1:
        return a
    if isinstance(a, Const) and not (a.value == 0 and k < 0):
        return _const(a.value ** k)
    return Pow(a, k)


def symbolic_derivative(e: Expr, var: str) -> Expr:
    """Exact derivative by structural rules; only constants get folded."""
    if isinstance(e, Const):
        return _const(0)
    if isinstance(e, Var):
        return _const(1 if e.name == var else 0)
    if isinstance(e, Add):
        return _add(symbolic_derivative(e.left, var), symbolic_derivative(e.right, var))
    if isinstance(e, Sub):
        return _sub(symbolic_derivative(e.left, var), symbolic_derivative(e.right, var))
    if isinstance(e, Mul):
        da = symbolic_derivative(e.left, var)
        db = symbolic_derivative(e.right, var)
        return _add(_mul(da, e.right), _mul(e.left, db))
    if isinstance(e, Div):
        da = symbolic_derivative(e.left, var)
        db = symbolic_derivative(e.right, var)
        return _div(_sub(_mul(da, e.right), _mul(e.left, db)), _pow(e.right, 2))
    if isinstance(e, Pow):
        if e.exponent == 0:
            return _const(0)
        db = symbolic_derivative(e.base, var)
        return _mul(_mul(_const(e.exponent), _pow(e.base, e.exponent - 1)), db)
    if isinstance(e, Neg):
        return _neg(symbolic_derivative(e.operand, var))
    if isinstance(e, Call):
        du = symbolic_derivative(e.arg, var)
        u = e.arg
        if e.func == "sin":
            outer = Call("cos", u)
        elif e.func == "cos":
            outer = _neg(Call("sin", u))
        elif e.func == "exp":
            outer = Call("exp", u)
        elif e.func == "log":
            return _div(du, u)
        else:  # sqrt
            return _div(du, _mul(_const(2), Call("sqrt", u)))
        return _mul(outer, du)
    raise TypeError(f"not an expression node: {e!r}")

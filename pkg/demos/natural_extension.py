#!/usr/bin/env python3
"""Smooth functions extended from the reals to the field.

A parsed expression is an ordinary real function; handing it field-valued
bindings evaluates the extended function instead.  Identities that hold for
all reals keep holding coefficientwise, and the series coefficients at an
expansion point are exactly the Taylor data, so derivatives fall out of an
evaluation at x0 + eps.
"""

import math

from levicalc import LCNumber, eps, eval_hyper, eval_real, parse_expr, symbolic_derivative

print("-- parsing and real evaluation ------------------------------------")
f = parse_expr("sin(x)^2 + cos(x)^2")
print(f"f(0.7) over the reals: {eval_real(f, {'x': 0.7})!r}")

print()
print("-- the same identity at hyper arguments ---------------------------")
for binding in ("0.3 + eps", "eps", "2 - 3*eps^2"):
    from levicalc import parse_lc

    x = parse_lc(binding)
    v = eval_hyper(f, {"x": x})
    print(f"sin^2 + cos^2 at x = {binding:<12} -> {v}")

print()
print("-- Maclaurin coefficients appear by themselves --------------------")
w = eval_hyper(parse_expr("exp(x)"), {"x": eps()})
print(f"exp(eps) = {w}")
print("coefficient of eps^k times k! (should all be 1):")
print("  ", [round(w.coefficient(k) * math.factorial(k), 12) for k in range(11)])

print()
print("-- jets vs symbolic differentiation -------------------------------")
g = parse_expr("x * exp(x)")
x0 = 1.0
jet = eval_hyper(g, {"x": LCNumber([(0, x0), (1, 1.0)])})
d = g
for k in range(4):
    sym = eval_real(d, {"x": x0})
    via_jet = jet.coefficient(k) * math.factorial(k)
    print(f"  order {k}: jet {via_jet:.12f}   symbolic {sym:.12f}")
    d = symbolic_derivative(d, "x")

print()
print("-- extension is only defined at finite arguments -------------------")
from levicalc import infinite

try:
    eval_hyper(parse_expr("sin(x)"), {"x": infinite()})
except Exception as ex:
    print(f"sin(1/eps) -> {type(ex).__name__}: {ex}")
try:
    eval_hyper(parse_expr("log(x)"), {"x": eps()})
except Exception as ex:
    print(f"log(eps)   -> {type(ex).__name__}: {ex}")

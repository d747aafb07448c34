#!/usr/bin/env python3
"""Tour of the number system: a field with working infinitesimals.

Every value is a truncated series in the infinitesimal generator eps, with
exact rational exponents.  That gives an ordered field strictly larger than
the reals: eps is positive yet smaller than every positive real, 1/eps is
larger than every real, and finite values split cleanly into a real shadow
plus an infinitesimal remainder.
"""

from fractions import Fraction

from levicalc import (
    LCNumber,
    classify,
    compare,
    eps,
    infinite,
    inv,
    is_infinitely_close,
    nth_root,
    parse_lc,
    sqrt,
    standard_part,
    to_json,
    zero,
)


def section(title):
    print()
    print("=" * 72)
    print(title)
    print("=" * 72)


e = eps()
H = infinite()  # 1/eps

section("Arithmetic on series")
a = 3 + 5 * e
b = 1 - 5 * e
print(f"(3 + 5*eps) + (1 - 5*eps) = {a + b}")
print(f"(1 + eps) * (1 - eps)     = {(1 + e) * (1 - e)}")
print(f"eps * (1/eps)             = {e * H}")
print(f"1 / (1 + eps)             = {inv(1 + e)}")

section("Order: eps is below every positive real")
for r in (1e-3, 1e-9, 1e-15):
    print(f"eps < {r:g}?   {compare(e, LCNumber.from_real(r)) < 0}")
print(f"1/eps > 10^6?  {compare(H, LCNumber.from_real(1e6)) > 0}")
print(f"n * eps < 1 for n = 10^6?  {compare(10**6 * e, LCNumber.from_real(1)) < 0}")

section("Shadows (standard parts) and infinite proximity")
u = 3 + 5 * e + e * e
print(f"u = {u}")
print(f"st(u) = {standard_part(u)}")
print(f"u ~ 3?        {is_infinitely_close(u, LCNumber.from_real(3))}")
print(f"eps ~ eps^2?  {is_infinitely_close(e, e * e)}")
try:
    standard_part(H)
except Exception as ex:
    print(f"st(1/eps) -> {type(ex).__name__}: {ex}")

section("Classification")
for value in (zero(), e, LCNumber.from_real(3), 3 + e, H):
    print(f"classify({str(value):>12}) = {classify(value).value}")

section("Roots with exact exponent arithmetic")
print(f"sqrt(4)       = {sqrt(LCNumber.from_real(4))}")
print(f"sqrt(eps^2)   = {sqrt(e * e)}")
r = sqrt(1 + 2 * e)
print(f"sqrt(1+2*eps) = {r}")
print(f"  squared back: {r * r}")
c = nth_root(LCNumber([(Fraction(-2), 8.0)]), 3)
print(f"cbrt(8/eps^2) = {c}")

section("No least upper bound of the infinitesimals")
print("1 bounds every infinitesimal above; so does 1/2, then 1/4, ...")
bound = LCNumber.from_real(1.0)
for _ in range(4):
    print(f"  {str(bound):>8} bounds eps?  {compare(e, bound) < 0}")
    bound = bound * 0.5
print("halving never stops working, so no bound is least: the field is not")
print("Dedekind-complete (and cannot be, being a proper ordered extension).")

section("Text and JSON round trips")
v = parse_lc("1 + 2*eps^(1/2) - 0.25*eps^2")
print(f"parsed  : {v}")
print(f"as JSON : {to_json(v)}")

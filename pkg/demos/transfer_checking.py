#!/usr/bin/env python3
"""Randomized checking of first-order statements over the extended field.

First-order properties of the reals are expected to keep holding over the
extension; the checker probes that claim with stratified samples (reals,
infinitesimals, infinite elements, mixtures) instead of proving it.  False
statements come back with concrete counterexamples; existential claims run
a bounded witness search and are honest about inconclusiveness.
"""

import argparse
from pathlib import Path

from levicalc import SamplerConfig, check, parse_formula, parse_formula_file


def show(report, src):
    print(f"  {report.verdict:<18} {src}")
    for label, binding in (("counterexample", report.counterexample),
                           ("witness", report.witness)):
        if binding:
            rendered = ", ".join(f"{k} = {v}" for k, v in binding.items())
            print(f"  {'':<18} {label}: {rendered}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    cfg = SamplerConfig(samples=args.samples, seed=args.seed)

    print("statements that transfer")
    print("------------------------")
    for src in [
        "forall x: positive, forall y: positive. x < y => 1/y < 1/x",
        "forall x: finite. sin(x)^2 + cos(x)^2 = 1",
        "forall a: any, forall b: any. a + b = b + a",
    ]:
        show(check(parse_formula(src), cfg), src)

    print()
    print("statements that do not survive (counterexamples found)")
    print("-------------------------------------------------------")
    for src in [
        "forall x: positive, forall y: positive. x < y => 1/x < 1/y",
        "forall x: infinitesimal. x < eps",
        "forall x: any. x * x = x",
    ]:
        show(check(parse_formula(src), cfg), src)

    print()
    print("existential claims: bounded witness search")
    print("-------------------------------------------")
    for src in [
        "exists x: infinitesimal. x * x < x",
        "exists x: positive-real. x < 0",
    ]:
        show(check(parse_formula(src), cfg), src)

    print()
    print("epsilon-delta continuity of x^2 at 0.3 (formula file)")
    print("------------------------------------------------------")
    path = Path(__file__).resolve().parent / "formulas" / "continuity.fof"
    for lineno, src, formula in parse_formula_file(path.read_text()):
        report = check(formula, cfg)
        print(f"  line {lineno}: {report.verdict}  ({report.samples_used} matrix evaluations)")


if __name__ == "__main__":
    main()

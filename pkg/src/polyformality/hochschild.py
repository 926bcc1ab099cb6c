"""DG-algebra structure on polydifferential operators.

Sign convention for the Hochschild differential of an arity-k operator::

    (dT)(f_0, ..., f_k) = f_0 T(f_1, ..., f_k)
                          + sum_{i=0}^{k-1} (-1)^{i+1} T(f_0, ..., f_i f_{i+1}, ..., f_k)
                          + (-1)^{k+1} T(f_0, ..., f_{k-1}) f_k

With this choice d(A u B) = dA u B + (-1)^{arity A} A u dB.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence

from .algebra import EMPTY, MultiIndex, Polynomial, PolyDiffOp, Polyvector, mi_splits, mi_var


def cup(a: PolyDiffOp, b: PolyDiffOp) -> PolyDiffOp:
    """(a u b)(f_1..f_{k+l}) = a(f_1..f_k) * b(f_{k+1}..f_{k+l})."""
    terms = []
    for da, ca in a.items():
        for db, cb in b.items():
            terms.append((ca * cb, da + db))
    return PolyDiffOp(a.arity + b.arity, terms)


def hochschild_d(op: PolyDiffOp) -> PolyDiffOp:
    k = op.arity
    terms: list[tuple[Polynomial, tuple[MultiIndex, ...]]] = []
    for derivs, coef in op.items():
        terms.append((coef, (EMPTY,) + derivs))
        for i in range(k):
            sign = -1 if i % 2 == 0 else 1
            head, alpha, tail = derivs[:i], derivs[i], derivs[i + 1:]
            # Leibniz: d^alpha(f g) = sum_beta C(alpha, beta) d^beta f d^{alpha-beta} g
            for beta, rest, c in mi_splits(alpha):
                terms.append((coef.scale(sign * c), head + (beta, rest) + tail))
        last = 1 if k % 2 == 1 else -1
        terms.append((coef.scale(last), derivs + (EMPTY,)))
    return PolyDiffOp(k + 1, terms)


def hochschild_d_extensional(op: PolyDiffOp, args: Sequence[Polynomial]) -> Polynomial:
    """Evaluate (d op)(args) directly from the defining formula."""
    k = op.arity
    if len(args) != k + 1:
        raise ValueError(f"d of an arity-{k} operator takes {k + 1} arguments, got {len(args)}")
    args = list(args)
    total = args[0] * op.evaluate(args[1:])
    for i in range(k):
        merged = args[:i] + [args[i] * args[i + 1]] + args[i + 2:]
        value = op.evaluate(merged)
        total = total + value if i % 2 == 1 else total - value
    tail = op.evaluate(args[:k]) * args[k]
    return total + tail if k % 2 == 1 else total - tail


def hkr(gamma: Polyvector) -> PolyDiffOp:
    """HKR map: gamma -> (1/k!) sum_J <gamma, J> d_{J_1} f_1 ... d_{J_k} f_k."""
    k = gamma.degree
    norm = Fraction(1, factorial(k))
    terms = [
        (coef.scale(norm), tuple(mi_var(j) for j in ordered))
        for ordered, coef in gamma.ordered_components()
    ]
    return PolyDiffOp(k, terms)

"""JSON encoding of polynomials, polyvectors and polydifferential operators.

Monomials are sorted lists of ``[var, exp]`` pairs and rationals are
``"num/den"`` strings, so encodings are exact and canonical.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .algebra import Polynomial, PolyDiffOp, Polyvector, multi_index


def rational_to_json(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def rational_from_json(s: str) -> Fraction:
    return Fraction(s)


def _mono_to_json(mono):
    return [[v, e] for v, e in mono]


def _mono_from_json(obj):
    return multi_index((int(v), int(e)) for v, e in obj)


def poly_to_json(p: Polynomial) -> list:
    return [[_mono_to_json(mono), rational_to_json(c)] for mono, c in p.sorted_items()]


def poly_from_json(obj) -> Polynomial:
    terms = {}
    for mono, c in obj:
        key = _mono_from_json(mono)
        terms[key] = terms.get(key, Fraction(0)) + rational_from_json(c)
    return Polynomial(terms)


def polyvector_to_json(g: Polyvector) -> dict:
    return {
        "degree": g.degree,
        "components": [[list(k), poly_to_json(c)] for k, c in sorted(g.items())],
    }


def polyvector_from_json(obj) -> Polyvector:
    return Polyvector(
        int(obj["degree"]),
        {tuple(int(i) for i in k): poly_from_json(c) for k, c in obj["components"]},
    )


def op_to_json(op: PolyDiffOp) -> dict:
    return {
        "arity": op.arity,
        "terms": [[poly_to_json(c), [_mono_to_json(a) for a in d]] for c, d in op.terms],
    }


def op_from_json(obj) -> PolyDiffOp:
    return PolyDiffOp(
        int(obj["arity"]),
        [(poly_from_json(c), tuple(_mono_from_json(a) for a in d)) for c, d in obj["terms"]],
    )


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))

"""Codimension-1 boundary strata of the compactified configuration spaces.

C_{n,m}: points p_1 < ... < p_n < 0 < q_m < ... < q_1 modulo t -> at,
dimension n + m - 1.  C_n: points p_1 < ... < p_n modulo t -> at + b,
dimension n - 2.

A codimension-1 stratum of C_{n,m} is one cluster of points collapsing
together, either onto the origin or away from it:

* ``i``   -- the innermost p's and innermost q's collapse onto 0
             (at least one of each): C_{n1-1, m1-1} x C_{n-n1+1, m-m1+1}
* ``ii``  -- consecutive p's (or q's), two or more, collapse away from 0:
             C_{k} x C_{n-k+1, m}
* ``iii`` -- the innermost p's only (or q's only) collapse onto 0:
             C_{n1-1, m} x C_{n-n1+1, 0}

Factors that are not valid spaces (C_{0,0}) are filtered out.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ConfSpace:
    kind: str  # "cnm" (half-lines with origin) or "cn" (line)
    n: int
    m: int = 0

    @property
    def dim(self) -> int:
        return self.n + self.m - 1 if self.kind == "cnm" else self.n - 2

    def exists(self) -> bool:
        if self.kind == "cnm":
            return self.n >= 0 and self.m >= 0 and self.n + self.m >= 1
        return self.n >= 2

    def label(self) -> str:
        return f"C_{{{self.n},{self.m}}}" if self.kind == "cnm" else f"C_{{{self.n}}}"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "dim": self.dim}
        if self.kind == "cnm":
            out["m"] = self.m
        return out


def cnm(n: int, m: int) -> ConfSpace:
    return ConfSpace("cnm", n, m)


def cn(n: int) -> ConfSpace:
    return ConfSpace("cn", n)


@dataclass(frozen=True)
class StratumDescriptor:
    variant: str  # "i", "ii" or "iii"
    params: tuple  # ((name, value), ...)
    factors: tuple  # ConfSpace factors
    cluster: tuple  # collapsing points, e.g. ("p2", "q1")

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "params": dict(self.params),
            "cluster": list(self.cluster),
            "factors": [f.to_json() for f in self.factors],
            "factor_dims": [f.dim for f in self.factors],
        }


@dataclass(frozen=True)
class TreeStratum:
    block: tuple  # consecutive indices collapsing together
    factors: tuple

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    def to_json(self) -> dict:
        return {
            "block": list(self.block),
            "factors": [f.to_json() for f in self.factors],
            "factor_dims": [f.dim for f in self.factors],
        }


@dataclass
class StrataListing:
    strata: list
    rejected: list = field(default_factory=list)  # candidates with a non-existent factor


def _p(a, b):
    return tuple(f"p{i}" for i in range(a, b + 1))


def _q(a, b):
    return tuple(f"q{j}" for j in range(a, b + 1))


def codim1_strata_cnm(n: int, m: int, with_rejected: bool = False):
    if n < 0 or m < 0 or n + m < 1:
        raise ValueError(f"C_{{{n},{m}}} needs n, m >= 0 and n + m >= 1")
    kept, rejected = [], []

    def offer(desc: StratumDescriptor):
        (kept if all(f.exists() for f in desc.factors) else rejected).append(desc)

    # (i) p_{n1..n} and q_{m1..m} onto the origin
    for n1 in range(1, n + 1):
        for m1 in range(1, m + 1):
            offer(StratumDescriptor(
                "i",
                (("n1", n1), ("m1", m1)),
                (cnm(n1 - 1, m1 - 1), cnm(n - n1 + 1, m - m1 + 1)),
                _p(n1, n) + _q(m1, m),
            ))
    # (ii) consecutive block away from the origin
    for n1 in range(1, n + 1):
        for n2 in range(n1 + 1, n + 1):
            k = n2 - n1 + 1
            offer(StratumDescriptor(
                "ii", (("side", "p"), ("n1", n1), ("n2", n2)),
                (cn(k), cnm(n - k + 1, m)), _p(n1, n2),
            ))
    for m1 in range(1, m + 1):
        for m2 in range(m1 + 1, m + 1):
            k = m2 - m1 + 1
            offer(StratumDescriptor(
                "ii", (("side", "q"), ("m1", m1), ("m2", m2)),
                (cn(k), cnm(n, m - k + 1)), _q(m1, m2),
            ))
    # (iii) one-sided tail onto the origin
    for n1 in range(1, n + 1):
        offer(StratumDescriptor(
            "iii", (("side", "p"), ("n1", n1)),
            (cnm(n1 - 1, m), cnm(n - n1 + 1, 0)), _p(n1, n),
        ))
    for m1 in range(1, m + 1):
        offer(StratumDescriptor(
            "iii", (("side", "q"), ("m1", m1)),
            (cnm(n, m1 - 1), cnm(0, m - m1 + 1)), _q(m1, m),
        ))
    if with_rejected:
        return StrataListing(kept, rejected)
    return kept


def codim1_strata_cn(n: int) -> list[TreeStratum]:
    """One stratum per proper consecutive block of size 2..n-1."""
    if n < 2:
        raise ValueError("C_n needs n >= 2")
    out = []
    for k in range(2, n):
        for start in range(1, n - k + 2):
            block = tuple(range(start, start + k))
            out.append(TreeStratum(block, (cn(k), cn(n - k + 1))))
    return out

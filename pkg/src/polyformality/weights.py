"""Weights of bipartite graphs as integrals over C_{n,m}.

Points are parametrized by xi_i = log(-p_i) and eta_j = log(q_j).  Each
edge (i, j) contributes the 1-form d g(s_e) with s_e = xi_i - eta_j, where g
is a smooth-enough CDF whose density g' has compact support.  Scaling is
fixed by eta_m = 0 (xi_n = 0 when m = 0) and the slice is oriented by
d xi_1 ^ ... ^ d xi_n ^ d eta_1 ^ ... ^ d eta_{m-1}.

When the graph is a spanning tree the map (xi, eta) -> s is unimodular, so
the integral is sign(det) times the g'-probability of the polyhedron cut
out by xi_1 > ... > xi_n, eta_1 > ... > eta_m.  If every such constraint
compares just two edges the probability is an order-polytope volume,
(#linear extensions) / E!, whatever g is.
"""
from __future__ import annotations

import enum
import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt

import numpy as np

from .graphs import Graph

log = logging.getLogger(__name__)

CHUNK = 1 << 16


class BumpFunction(enum.Enum):
    """Densities g' on [-1, 1] in the log coordinate."""

    QUARTIC = "quartic-kernel"  # (15/16)(1 - s^2)^2
    EPANECHNIKOV = "epanechnikov"  # (3/4)(1 - s^2)

    @property
    def beta_shape(self) -> float:
        # (1 - s^2)^(a-1) on [-1, 1] is 2 * Beta(a, a) - 1
        return 3.0 if self is BumpFunction.QUARTIC else 2.0

    def density(self, s):
        s = np.asarray(s, dtype=float)
        inside = np.abs(s) < 1
        if self is BumpFunction.QUARTIC:
            vals = 15.0 / 16.0 * (1 - s**2) ** 2
        else:
            vals = 0.75 * (1 - s**2)
        return np.where(inside, vals, 0.0)

    def cdf(self, s):
        s = np.clip(np.asarray(s, dtype=float), -1.0, 1.0)
        if self is BumpFunction.QUARTIC:
            return (8 + 15 * s - 10 * s**3 + 3 * s**5) / 16
        return (2 + 3 * s - s**3) / 4

    def phi(self, x):
        """The bump function itself on the negative half-line: g(log(-x))."""
        x = np.asarray(x, dtype=float)
        return self.cdf(np.log(-x))

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        a = self.beta_shape
        return 2.0 * rng.beta(a, a, size=shape) - 1.0

    @classmethod
    def parse(cls, name: str) -> "BumpFunction":
        for b in cls:
            if name in (b.value, b.name.lower()):
                return b
        raise ValueError(f"unknown bump function {name!r}")


def _det(rows: list[list[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _inverse(rows: list[list[int]]) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col])
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [r[n:] for r in a]


@dataclass(frozen=True)
class LogLinearization:
    graph: Graph
    coords: tuple  # names of the free gauge-slice coordinates, e.g. ("xi1", "eta1")
    matrix: tuple  # rows = edges in graph order, entries of d s_e / d coord
    is_spanning_tree: bool
    orientation_sign: int  # sign of det(matrix); 0 when degenerate


def log_linearize(g: Graph) -> LogLinearization:
    for star in g.stars:
        if any(t.kind != "q" for t in star):
            raise ValueError("weights are only defined for bipartite graphs (edges into type-2 vertices)")
    if g.m >= 1:
        coords = [("xi", i) for i in range(1, g.n + 1)] + [("eta", j) for j in range(1, g.m)]
    else:
        coords = [("xi", i) for i in range(1, g.n)]
    col = {c: k for k, c in enumerate(coords)}
    rows = []
    for i, t in g.edges():
        row = [0] * len(coords)
        if ("xi", i) in col:
            row[col[("xi", i)]] += 1
        if ("eta", t.index) in col:
            row[col[("eta", t.index)]] -= 1
        rows.append(row)
    if len(rows) != len(coords):
        det = 0
    else:
        det = _det(rows)
    names = tuple(f"{kind}{idx}" for kind, idx in coords)
    return LogLinearization(
        graph=g,
        coords=names,
        matrix=tuple(tuple(r) for r in rows),
        is_spanning_tree=det != 0,
        orientation_sign=(det > 0) - (det < 0),
    )


@dataclass(frozen=True)
class OrderingConstraints:
    """Each row r encodes sum_e r[e] * s_e > 0."""

    rows: tuple
    labels: tuple  # e.g. ("xi1>xi2", "eta1>eta2")
    pairwise: bool

    def relations(self) -> list[tuple[int, int]]:
        """For pairwise constraints: edge pairs (a, b) meaning s_a > s_b."""
        out = []
        for r in self.rows:
            a = r.index(1)
            b = r.index(-1)
            out.append((a, b))
        return out


def ordering_constraints(lin: LogLinearization) -> OrderingConstraints:
    if not lin.is_spanning_tree:
        raise ValueError(f"{lin.graph.key()} is not a spanning tree; its weight is zero")
    g = lin.graph
    inv = _inverse([list(r) for r in lin.matrix])
    index = {name: k for k, name in enumerate(lin.coords)}
    n_edges = len(lin.matrix)

    def coord_row(name):
        # gauge-fixed coordinate is identically zero
        if name not in index:
            return [Fraction(0)] * n_edges
        return inv[index[name]]

    rows, labels = [], []
    for i in range(1, g.n):
        a, b = coord_row(f"xi{i}"), coord_row(f"xi{i + 1}")
        rows.append(tuple(int(x - y) for x, y in zip(a, b)))
        labels.append(f"xi{i}>xi{i + 1}")
    for j in range(1, g.m):
        a, b = coord_row(f"eta{j}"), coord_row(f"eta{j + 1}")
        rows.append(tuple(int(x - y) for x, y in zip(a, b)))
        labels.append(f"eta{j}>eta{j + 1}")
    pairwise = all(
        sorted(v for v in r if v) == [-1, 1] for r in rows
    )
    return OrderingConstraints(tuple(rows), tuple(labels), pairwise)


def count_linear_extensions(size: int, relations) -> int:
    """Orderings of range(size) compatible with every (a, b) meaning a above b."""
    below = [0] * size  # bitmask of elements that must come earlier (lower)
    for a, b in relations:
        below[a] |= 1 << b
    ways = [0] * (1 << size)
    ways[0] = 1
    for mask in range(1 << size):
        w = ways[mask]
        if not w:
            continue
        for e in range(size):
            bit = 1 << e
            if not mask & bit and below[e] & ~mask == 0:
                ways[mask | bit] += w
    return ways[(1 << size) - 1]


@dataclass(frozen=True)
class WeightResult:
    mode: str  # "exact" | "mc" | "zero"
    value: Fraction | None = None
    mean: float | None = None
    stderr: float = 0.0
    samples: int = 0
    bump: str | None = None
    seed: int | None = None

    @property
    def is_exact(self) -> bool:
        return self.mode in ("exact", "zero")

    def as_float(self) -> float:
        return float(self.value) if self.is_exact else self.mean

    def to_json(self) -> dict:
        out = {"mode": self.mode}
        if self.is_exact:
            out["value"] = f"{self.value.numerator}/{self.value.denominator}"
        else:
            out.update(mean=self.mean, stderr=self.stderr, samples=self.samples, phi=self.bump, seed=self.seed)
        return out


ZERO_WEIGHT = WeightResult("zero", Fraction(0))


def weight_exact(g: Graph) -> WeightResult:
    lin = log_linearize(g)
    if not lin.is_spanning_tree:
        return ZERO_WEIGHT
    cons = ordering_constraints(lin)
    if not cons.pairwise:
        raise ValueError(f"{g.key()} has non-pairwise ordering constraints; use weight_mc")
    size = len(lin.matrix)
    count = count_linear_extensions(size, cons.relations())
    return WeightResult("exact", Fraction(lin.orientation_sign * count, factorial(size)))


def canonical(g: Graph) -> Graph:
    """Same graph with every star sorted by target."""
    return Graph(g.n, g.m, tuple(tuple(sorted(star)) for star in g.stars))


def _stream_key(g: Graph) -> int:
    digest = hashlib.blake2b(g.key().encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _count_chunk(bump: BumpFunction, rows: np.ndarray, seed: int, gkey: int, chunk: int, size: int) -> int:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, gkey, chunk])))
    s = bump.sample(rng, (size, rows.shape[1]))
    if rows.shape[0] == 0:
        return size
    return int(np.count_nonzero(np.all(s @ rows.T > 0, axis=1)))


def weight_mc(g: Graph, bump: BumpFunction, samples: int, seed: int, workers: int = 1) -> WeightResult:
    """Monte Carlo estimate of the weight.

    Samples are drawn in fixed-size chunks, each from its own Philox stream
    keyed by (seed, graph, chunk index), so the result does not depend on
    ``workers``.
    """
    lin = log_linearize(g)
    if not lin.is_spanning_tree:
        return ZERO_WEIGHT
    if samples < 2:
        raise ValueError("need at least 2 samples")
    # sample the canonically labelled graph so relabelings share one estimate
    canon = canonical(g)
    clin = log_linearize(canon)
    relabel_sign = lin.orientation_sign * clin.orientation_sign
    cons = ordering_constraints(clin)
    rows = np.array(cons.rows, dtype=float).reshape(len(cons.rows), len(clin.matrix))
    gkey = _stream_key(canon)
    sizes = [min(CHUNK, samples - start) for start in range(0, samples, CHUNK)]
    jobs = [(bump, rows, seed, gkey, c, size) for c, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(lambda a: _count_chunk(*a), jobs))
    else:
        hits = sum(_count_chunk(*a) for a in jobs)
    p = hits / samples
    std = sqrt(p * (1 - p) * samples / (samples - 1))
    return WeightResult(
        "mc",
        mean=relabel_sign * clin.orientation_sign * p,
        stderr=std / sqrt(samples),
        samples=samples,
        bump=bump.value,
        seed=seed,
    )


@dataclass(frozen=True)
class WeightConfig:
    mode: str = "exact-preferred"  # or "mc-only"
    bump: BumpFunction = BumpFunction.QUARTIC
    samples: int = 10**6
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("exact-preferred", "mc-only"):
            raise ValueError(f"unknown weight mode {self.mode!r}")

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "phi": self.bump.value,
            "samples": self.samples,
            "seed": self.seed,
        }


@lru_cache(maxsize=None)
def weight(g: Graph, cfg: WeightConfig = WeightConfig()) -> WeightResult:
    lin = log_linearize(g)
    if not lin.is_spanning_tree:
        return ZERO_WEIGHT
    if cfg.mode == "exact-preferred" and ordering_constraints(lin).pairwise:
        return weight_exact(g)
    log.debug("Monte Carlo weight for %s", g.key())
    return weight_mc(g, cfg.bump, cfg.samples, cfg.seed, cfg.workers)

"""Oriented graphs with two kinds of vertices and the operators they define.

Type-1 vertices ("p", labelled 1..n) carry polyvector fields and are the only
edge sources.  Type-2 vertices ("q", labelled 1..m) carry the function
arguments.  ``stars[i-1]`` is the ordered list of targets of the edges leaving
type-1 vertex i; the order matters because it is the order in which edge
indices are fed into the antisymmetric coefficient of the polyvector.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, product
from typing import NamedTuple, Sequence

from .algebra import EMPTY, ONE, MultiIndex, Polynomial, PolyDiffOp, Polyvector, mi_add, mi_var


class Vertex(NamedTuple):
    kind: str  # "p" (type 1) or "q" (type 2)
    index: int

    def to_json(self):
        return {"kind": self.kind, "index": self.index}

    @classmethod
    def from_json(cls, obj):
        if obj["kind"] not in ("p", "q"):
            raise ValueError(f"unknown vertex kind {obj['kind']!r}")
        return cls(obj["kind"], int(obj["index"]))


def P(i: int) -> Vertex:
    return Vertex("p", i)


def Q(j: int) -> Vertex:
    return Vertex("q", j)


@dataclass(frozen=True)
class Graph:
    n: int
    m: int
    stars: tuple  # tuple[tuple[Vertex, ...], ...], one per type-1 vertex

    def __post_init__(self):
        object.__setattr__(self, "stars", tuple(tuple(Vertex(*t) for t in s) for s in self.stars))
        if len(self.stars) != self.n:
            raise ValueError(f"expected {self.n} stars, got {len(self.stars)}")

    @classmethod
    def from_edges(cls, n: int, m: int, edges: Sequence[tuple[int, int]]) -> "Graph":
        """Bipartite graph from (source, type-2 target) pairs, kept in the given order."""
        stars = [[] for _ in range(n)]
        for i, j in edges:
            stars[i - 1].append(Q(j))
        return cls(n, m, tuple(tuple(s) for s in stars))

    @property
    def star_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.stars)

    @property
    def num_edges(self) -> int:
        return sum(self.star_sizes)

    def edges(self) -> list[tuple[int, Vertex]]:
        """Edges in reference order: by source, then position in its star."""
        return [(i + 1, t) for i, star in enumerate(self.stars) for t in star]

    def is_gnm(self) -> bool:
        """Membership in G_{n,m}: bipartite, n+m-1 edges, no parallel edges."""
        if self.num_edges != self.n + self.m - 1:
            return False
        for star in self.stars:
            if any(t.kind != "q" or not 1 <= t.index <= self.m for t in star):
                return False
            if len(set(star)) != len(star):
                return False
        return True

    def permute_star(self, i: int, order: Sequence[int]) -> "Graph":
        """Reorder the edges of star i (1-based) by the positions in ``order``."""
        stars = list(self.stars)
        stars[i - 1] = tuple(stars[i - 1][k] for k in order)
        return Graph(self.n, self.m, tuple(stars))

    def key(self) -> str:
        body = "|".join(
            ",".join(f"{t.kind}{t.index}" for t in star) for star in self.stars
        )
        return f"G[{self.n},{self.m}]({body})"

    def to_json(self):
        return {
            "n": self.n,
            "m": self.m,
            "stars": [[t.to_json() for t in star] for star in self.stars],
        }

    @classmethod
    def from_json(cls, obj) -> "Graph":
        return cls(
            int(obj["n"]),
            int(obj["m"]),
            tuple(tuple(Vertex.from_json(t) for t in star) for star in obj["stars"]),
        )


def validate_graph(g: Graph) -> dict:
    """Diagnostics: loops, out-of-range targets, star sizes and the excess l."""
    loops = []
    out_of_range = []
    for i, star in enumerate(g.stars, start=1):
        for t in star:
            if t.kind == "p" and t.index == i:
                loops.append(i)
            limit = g.n if t.kind == "p" else g.m
            if not 1 <= t.index <= limit:
                out_of_range.append((i, t.kind, t.index))
    return {
        "n": g.n,
        "m": g.m,
        "stars": list(g.star_sizes),
        "edges": g.num_edges,
        "l": g.num_edges - (g.n + g.m - 1),
        "loops": loops,
        "out_of_range": out_of_range,
        "ok": not loops and not out_of_range,
        "gnm": g.is_gnm(),
    }


def enumerate_gnm(n: int, m: int, include_parallel: bool = False) -> list[Graph]:
    """All graphs in G_{n,m}, with stars sorted by target index.

    ``include_parallel`` also yields edge multisets with repeated
    source/target pairs; those always get weight zero.
    """
    if n < 1:
        raise ValueError("G_{n,m} needs n >= 1")
    if m < 0:
        raise ValueError("m must be >= 0")
    k = n + m - 1
    pool = [(i, j) for i in range(1, n + 1) for j in range(1, m + 1)]
    if k == 0:
        return [Graph(n, m, tuple(() for _ in range(n)))]
    chooser = combinations_with_replacement if include_parallel else combinations
    return [Graph.from_edges(n, m, edges) for edges in chooser(pool, k)]


def graphs_with_profile(n: int, m: int, sizes: Sequence[int]) -> list[Graph]:
    """The members of G_{n,m} whose star sizes equal ``sizes``."""
    if len(sizes) != n or sum(sizes) != n + m - 1 or any(s > m for s in sizes):
        return []
    choices = [combinations(range(1, m + 1), s) for s in sizes]
    out = []
    for targets in product(*choices):
        out.append(Graph(n, m, tuple(tuple(Q(j) for j in ts) for ts in targets)))
    return out


def u_gamma(g: Graph, gammas: Sequence[Polyvector]) -> PolyDiffOp:
    """The polydifferential operator U_Gamma(gamma_1, ..., gamma_n).

    Edge indices range over the variables occurring in the component keys of
    the gammas, which is where the antisymmetric coefficients are nonzero.
    """
    if len(gammas) != g.n:
        raise ValueError(f"graph has {g.n} type-1 vertices, got {len(gammas)} polyvectors")
    for i, (gamma, star) in enumerate(zip(gammas, g.stars), start=1):
        if gamma.degree != len(star) and not gamma.is_zero():
            raise ValueError(
                f"vertex {i}: star has {len(star)} edges but polyvector has degree {gamma.degree}"
            )
        if any(t.kind == "p" and t.index == i for t in star):
            raise ValueError(f"vertex {i} has a loop")
    if any(gamma.is_zero() for gamma in gammas):
        return PolyDiffOp.zero(g.m)

    per_vertex = [list(gamma.ordered_components()) for gamma in gammas]
    terms = []
    for choice in product(*per_vertex):
        into_p = [EMPTY] * g.n
        into_q = [EMPTY] * g.m
        for (indices, _), star in zip(choice, g.stars):
            for var, target in zip(indices, star):
                d = mi_var(var)
                if target.kind == "q":
                    into_q[target.index - 1] = mi_add(into_q[target.index - 1], d)
                else:
                    into_p[target.index - 1] = mi_add(into_p[target.index - 1], d)
        coef = ONE
        for (_, psi), alpha in zip(choice, into_p):
            coef = coef * psi.partial(alpha)
            if not coef:
                break
        if coef:
            terms.append((coef, tuple(into_q)))
    return PolyDiffOp(g.m, terms)

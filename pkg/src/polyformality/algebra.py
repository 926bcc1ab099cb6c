"""Sparse exact polynomials, polyvector fields and polydifferential operators.

Variables are indexed by positive integers with no upper bound, so the
same code handles C[x_1, ..., x_d] for any d as well as the
infinitely-generated polynomial ring.  All coefficients are
``fractions.Fraction``.

A multi-index is a tuple of ``(var, exponent)`` pairs sorted by variable,
with no zero exponents.  It doubles as a monomial key and as a stack of
partial derivatives.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

MultiIndex = tuple  # tuple[tuple[int, int], ...]

EMPTY: MultiIndex = ()


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("float coefficients are not allowed; use Fraction")
    return Fraction(x)


def multi_index(exponents: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> MultiIndex:
    """Build a canonical multi-index from a mapping or pairs (var, exp)."""
    items = exponents.items() if isinstance(exponents, Mapping) else exponents
    acc: dict[int, int] = {}
    for var, exp in items:
        if var < 1:
            raise ValueError(f"variable index must be >= 1, got {var}")
        if exp < 0:
            raise ValueError(f"negative exponent {exp} for x{var}")
        acc[var] = acc.get(var, 0) + exp
    return tuple(sorted((v, e) for v, e in acc.items() if e))


def mi_var(*vars_: int) -> MultiIndex:
    """Multi-index of d/dx_{v1} d/dx_{v2} ... (repeats allowed)."""
    return multi_index((v, 1) for v in vars_)


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for v, e in b:
        acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items()))


def mi_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """a - b; caller guarantees b <= a componentwise."""
    acc = dict(a)
    for v, e in b:
        acc[v] -= e
    return tuple(sorted((v, e) for v, e in acc.items() if e))


def mi_order(a: MultiIndex) -> int:
    return sum(e for _, e in a)


def mi_splits(alpha: MultiIndex):
    """Yield (beta, alpha - beta, binomial(alpha, beta)) for all beta <= alpha."""
    vars_ = [v for v, _ in alpha]
    ranges = [range(e + 1) for _, e in alpha]
    for choice in product(*ranges):
        beta = tuple((v, c) for v, c in zip(vars_, choice) if c)
        rest = tuple((v, e - c) for (v, e), c in zip(alpha, choice) if e - c)
        coeff = 1
        for (_, e), c in zip(alpha, choice):
            coeff *= comb(e, c)
        yield beta, rest, coeff


def mi_rename(a: MultiIndex, mapping: Mapping[int, int]) -> MultiIndex:
    return multi_index((mapping.get(v, v), e) for v, e in a)


def permutation_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class Polynomial:
    """Sparse polynomial with Fraction coefficients, immutable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[MultiIndex, object] | None = None):
        clean: dict[MultiIndex, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                c = _frac(c)
                if c:
                    clean[mono] = clean.get(mono, Fraction(0)) + c
                    if not clean[mono]:
                        del clean[mono]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[MultiIndex, Fraction]) -> "Polynomial":
        # terms already canonical; skips validation
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls({EMPTY: c})

    @classmethod
    def var(cls, i: int, power: int = 1) -> "Polynomial":
        return cls({multi_index({i: power}): 1})

    @classmethod
    def coerce(cls, x) -> "Polynomial":
        return x if isinstance(x, Polynomial) else cls.const(x)

    @property
    def terms(self) -> dict[MultiIndex, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mono: MultiIndex) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Fraction)):
                other = Polynomial.const(other)
            else:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for mono, c in other._terms.items():
            s = acc.get(mono, 0) + c
            if s:
                acc[mono] = s
            else:
                acc.pop(mono, None)
        return Polynomial._raw(acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other):
        return Polynomial.coerce(other) - self

    def scale(self, r) -> "Polynomial":
        r = _frac(r)
        if not r:
            return ZERO
        return Polynomial._raw({m: c * r for m, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        acc: dict[MultiIndex, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = mi_add(m1, m2)
                s = acc.get(mono, 0) + c1 * c2
                if s:
                    acc[mono] = s
                else:
                    acc.pop(mono, None)
        return Polynomial._raw(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def partial(self, alpha: MultiIndex) -> "Polynomial":
        """Iterated partial derivative d^alpha."""
        if not alpha:
            return self
        acc: dict[MultiIndex, Fraction] = {}
        for mono, c in self._terms.items():
            exps = dict(mono)
            coeff = c
            for v, k in alpha:
                e = exps.get(v, 0)
                if e < k:
                    coeff = 0
                    break
                for t in range(k):
                    coeff *= e - t
                exps[v] = e - k
            if coeff:
                key = tuple(sorted((v, e) for v, e in exps.items() if e))
                acc[key] = acc.get(key, 0) + coeff
        return Polynomial._raw({m: c for m, c in acc.items() if c})

    def variables(self) -> set[int]:
        return {v for mono in self._terms for v, _ in mono}

    def degree(self) -> int:
        return max((mi_order(m) for m in self._terms), default=-1)

    def rename(self, mapping: Mapping[int, int]) -> "Polynomial":
        return Polynomial({mi_rename(m, mapping): c for m, c in self._terms.items()})

    def sorted_items(self):
        return sorted(self._terms.items())

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.sorted_items():
            m = "*".join(f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in mono)
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(m)
            elif c == -1:
                parts.append("-" + m)
            else:
                parts.append(f"{c}*{m}")
        return " + ".join(parts).replace("+ -", "- ")


ZERO = Polynomial()
ONE = Polynomial.const(1)


def x(i: int, power: int = 1) -> Polynomial:
    """Shorthand for the monomial x_i^power."""
    return Polynomial.var(i, power)


def poly_arith(a: Polynomial, b: Polynomial, op: str, r=None) -> Polynomial:
    """Dispatch ``add``, ``mul`` or ``scale`` (scale ignores ``b``)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(r)
    raise ValueError(f"unknown op {op!r}")


class Polyvector:
    """Homogeneous polyvector field of degree k.

    ``components`` maps strictly increasing k-tuples (j_1 < ... < j_k) to the
    coefficient of d_{j_1} ^ ... ^ d_{j_k}.  Degree 0 stores a single key ().
    """

    __slots__ = ("degree", "_components")

    def __init__(self, degree: int, components: Mapping[tuple, Polynomial] | None = None):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.degree = degree
        clean: dict[tuple, Polynomial] = {}
        for key, coef in (components or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"component {key} does not have length {degree}")
            sign = permutation_sign(key)
            if sign == 0:
                continue
            coef = Polynomial.coerce(coef)
            if sign < 0:
                coef = -coef
            key = tuple(sorted(key))
            if key and key[0] < 1:
                raise ValueError("variable indices must be >= 1")
            total = clean.get(key, ZERO) + coef
            if total:
                clean[key] = total
            else:
                clean.pop(key, None)
        self._components = clean

    @classmethod
    def function(cls, p) -> "Polyvector":
        return cls(0, {(): Polynomial.coerce(p)})

    @classmethod
    def basis(cls, *indices: int, coef=1) -> "Polyvector":
        """coef * d_{i1} ^ d_{i2} ^ ... in the order given."""
        return cls(len(indices), {tuple(indices): Polynomial.coerce(coef)})

    @property
    def components(self) -> dict[tuple, Polynomial]:
        return dict(self._components)

    def items(self):
        return self._components.items()

    def is_zero(self) -> bool:
        return not self._components

    def __eq__(self, other):
        if not isinstance(other, Polyvector):
            return NotImplemented
        if not self._components and not other._components:
            return True
        return self.degree == other.degree and self._components == other._components

    def __hash__(self):
        return hash((self.degree, frozenset(self._components.items())))

    def _check_degree(self, other):
        if self.degree != other.degree and self._components and other._components:
            raise ValueError("cannot add polyvectors of different degree")

    def __add__(self, other: "Polyvector") -> "Polyvector":
        self._check_degree(other)
        deg = self.degree if self._components else other.degree
        comps = dict(self._components)
        for k, c in other._components.items():
            comps[k] = comps.get(k, ZERO) + c
        return Polyvector(deg, comps)

    def __neg__(self):
        return Polyvector(self.degree, {k: -c for k, c in self._components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, r) -> "Polyvector":
        return Polyvector(self.degree, {k: c.scale(r) for k, c in self._components.items()})

    def multiply(self, p: Polynomial) -> "Polyvector":
        return Polyvector(self.degree, {k: c * p for k, c in self._components.items()})

    def wedge(self, other: "Polyvector") -> "Polyvector":
        deg = self.degree + other.degree
        comps: dict[tuple, Polynomial] = {}
        for j, a in self._components.items():
            for k, b in other._components.items():
                if set(j) & set(k):
                    continue
                merged = j + k
                key = tuple(sorted(merged))
                term = a * b
                if permutation_sign(merged) < 0:
                    term = -term
                comps[key] = comps.get(key, ZERO) + term
        return Polyvector(deg, comps)

    __xor__ = wedge

    def extract(self, indices: Sequence[int]) -> Polynomial:
        """Antisymmetric coefficient <gamma, dx^{i1} (x) ... (x) dx^{ik}>."""
        if len(indices) != self.degree:
            raise ValueError(
                f"expected {self.degree} indices for a degree-{self.degree} polyvector, got {len(indices)}"
            )
        sign = permutation_sign(indices)
        if sign == 0:
            return ZERO
        coef = self._components.get(tuple(sorted(indices)), ZERO)
        return coef if sign > 0 else -coef

    def ordered_components(self):
        """Yield (ordered index tuple, coefficient) over all orderings of each component."""
        for key, coef in self._components.items():
            for perm in permutations(key):
                yield perm, (coef if permutation_sign(perm) > 0 else -coef)

    def variables(self) -> set[int]:
        out: set[int] = set()
        for key, coef in self._components.items():
            out.update(key)
            out |= coef.variables()
        return out

    def rename(self, mapping: Mapping[int, int]) -> "Polyvector":
        return Polyvector(
            self.degree,
            {tuple(mapping.get(i, i) for i in k): c.rename(mapping) for k, c in self._components.items()},
        )

    def __repr__(self):
        if not self._components:
            return f"Polyvector({self.degree}, 0)"
        parts = []
        for key, coef in sorted(self._components.items()):
            basis = "^".join(f"d{i}" for i in key) or "1"
            parts.append(f"({coef})*{basis}")
        return f"Polyvector({self.degree}, {' + '.join(parts)})"


class PolyDiffOp:
    """Polydifferential operator of fixed arity, always in canonical form.

    A term is a coefficient polynomial together with one derivative
    multi-index per argument slot: ``c * d^{a_1} f_1 * ... * d^{a_m} f_m``.
    Terms with equal derivative lists are merged and zero terms dropped.
    """

    __slots__ = ("arity", "_terms")

    def __init__(self, arity: int, terms: Iterable[tuple[Polynomial, Sequence[MultiIndex]]] = ()):
        if arity < 0:
            raise ValueError("arity must be >= 0")
        self.arity = arity
        acc: dict[tuple, Polynomial] = {}
        for coef, derivs in terms:
            derivs = tuple(derivs)
            if len(derivs) != arity:
                raise ValueError(f"term has {len(derivs)} derivative slots, arity is {arity}")
            coef = Polynomial.coerce(coef)
            if not coef:
                continue
            s = acc.get(derivs, ZERO) + coef
            if s:
                acc[derivs] = s
            else:
                acc.pop(derivs)
        self._terms = acc

    @classmethod
    def _raw(cls, arity: int, terms: dict) -> "PolyDiffOp":
        op = cls.__new__(cls)
        op.arity = arity
        op._terms = terms
        return op

    @classmethod
    def zero(cls, arity: int) -> "PolyDiffOp":
        return cls._raw(arity, {})

    @classmethod
    def constant(cls, p) -> "PolyDiffOp":
        return cls(0, [(Polynomial.coerce(p), ())])

    @property
    def terms(self) -> list[tuple[Polynomial, tuple]]:
        return [(c, d) for d, c in sorted(self._terms.items())]

    def items(self):
        """(derivs, coefficient) pairs."""
        return self._terms.items()

    def normalize(self) -> "PolyDiffOp":
        # construction already canonicalizes; kept as an explicit idempotent step
        return PolyDiffOp(self.arity, ((c, d) for d, c in self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        if not self._terms and not other._terms:
            return True
        return self.arity == other.arity and self._terms == other._terms

    def __hash__(self):
        return hash((self.arity, frozenset(self._terms.items())))

    def __add__(self, other: "PolyDiffOp") -> "PolyDiffOp":
        if not other._terms:
            return self
        if not self._terms:
            return other
        if self.arity != other.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")
        acc = dict(self._terms)
        for d, c in other._terms.items():
            s = acc.get(d, ZERO) + c
            if s:
                acc[d] = s
            else:
                acc.pop(d, None)
        return PolyDiffOp._raw(self.arity, acc)

    def __neg__(self):
        return PolyDiffOp._raw(self.arity, {d: -c for d, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, r) -> "PolyDiffOp":
        r = _frac(r)
        if not r:
            return PolyDiffOp.zero(self.arity)
        return PolyDiffOp._raw(self.arity, {d: c.scale(r) for d, c in self._terms.items()})

    def multiply(self, p: Polynomial) -> "PolyDiffOp":
        return PolyDiffOp(self.arity, ((c * p, d) for d, c in self._terms.items()))

    def __call__(self, *args: Polynomial) -> Polynomial:
        return self.evaluate(args)

    def evaluate(self, args: Sequence[Polynomial]) -> Polynomial:
        if len(args) != self.arity:
            raise ValueError(f"operator of arity {self.arity} applied to {len(args)} arguments")
        cache: dict[tuple[int, MultiIndex], Polynomial] = {}
        total = ZERO
        for derivs, coef in self._terms.items():
            value = coef
            for slot, alpha in enumerate(derivs):
                key = (slot, alpha)
                if key not in cache:
                    cache[key] = args[slot].partial(alpha)
                value = value * cache[key]
                if not value:
                    break
            total = total + value
        return total

    def total_order(self) -> set[int]:
        """Set of total derivative orders appearing across terms."""
        return {sum(mi_order(a) for a in d) for d in self._terms}

    def variables(self) -> set[int]:
        out: set[int] = set()
        for d, c in self._terms.items():
            out |= c.variables()
            for a in d:
                out.update(v for v, _ in a)
        return out

    def rename(self, mapping: Mapping[int, int]) -> "PolyDiffOp":
        return PolyDiffOp(
            self.arity,
            ((c.rename(mapping), tuple(mi_rename(a, mapping) for a in d)) for d, c in self._terms.items()),
        )

    def __repr__(self):
        if not self._terms:
            return f"PolyDiffOp({self.arity}, 0)"
        parts = []
        for coef, derivs in self.terms:
            slots = ",".join("".join(f"d{v}" * e for v, e in a) or "1" for a in derivs)
            parts.append(f"({coef})[{slots}]")
        return f"PolyDiffOp({self.arity}, {' + '.join(parts)})"


def op_evaluate(op: PolyDiffOp, args: Sequence[Polynomial]) -> Polynomial:
    return op.evaluate(args)


def op_normalize(op: PolyDiffOp) -> PolyDiffOp:
    return op.normalize()

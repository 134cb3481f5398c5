"""Monomials and degree-truncated multivariate power series (jets).

A monomial in n variables is an exponent tuple ``alpha`` of length n.
Monomials are ordered by total degree first; within a degree, the tuple
whose first differing exponent is larger comes first.  This puts the
basis in the order z1, z2, z1^2, z1*z2, z2^2, ... and the constant
monomial is deliberately excluded from enumeration.

A jet is a power series kept only through a fixed total degree.  The
coefficient table is sparse and canonical: zero coefficients are never
stored, and no stored exponent exceeds the truncation degree, so
structural equality coincides with mathematical equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, Iterator, List, Tuple

from .scalars import ONE, ZERO, Scalar

MultiIndex = Tuple[int, ...]


def degree(alpha: MultiIndex) -> int:
    return sum(alpha)


def order_key(alpha: MultiIndex) -> Tuple[int, Tuple[int, ...]]:
    """Sort key realizing the graded monomial order."""
    return (sum(alpha), tuple(-e for e in alpha))


def compare_monomials(alpha: MultiIndex, beta: MultiIndex) -> int:
    """Return -1, 0, or 1 as alpha sorts before, equal to, or after beta."""
    if len(alpha) != len(beta):
        raise ValueError(f"dimension mismatch: {len(alpha)} vs {len(beta)}")
    ka, kb = order_key(alpha), order_key(beta)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


def _compositions_desc(total: int, parts: int) -> Iterator[MultiIndex]:
    """All exponent tuples with the given sum, first coordinate largest first."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions_desc(total - head, parts - 1):
            yield (head,) + tail


def enumerate_monomials(n: int, max_degree: int) -> List[MultiIndex]:
    """Ordered monomials with 1 <= |alpha| <= max_degree (constant omitted)."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    if max_degree < 1:
        raise ValueError(f"max degree must be positive, got {max_degree}")
    out: List[MultiIndex] = []
    for d in range(1, max_degree + 1):
        out.extend(_compositions_desc(d, n))
    return out


def monomial_count(n: int, max_degree: int) -> int:
    """Number of monomials with 1 <= |alpha| <= max_degree."""
    return comb(n + max_degree, n) - 1


def monomials_of_degree(n: int, d: int) -> List[MultiIndex]:
    """Ordered monomials with |alpha| == d."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    if d < 0:
        raise ValueError(f"degree must be nonnegative, got {d}")
    return list(_compositions_desc(d, n))


def unit_index(n: int, i: int) -> MultiIndex:
    """The exponent tuple of the variable z_{i+1}."""
    return tuple(1 if j == i else 0 for j in range(n))


@dataclass(frozen=True)
class Jet:
    """A power series truncated at total degree `degree`.

    `coeffs` maps exponent tuples to nonzero scalars.  Use `Jet.build` to
    construct one from arbitrary term data; it canonicalizes for you.
    """

    dim: int
    degree: int
    coeffs: Dict[MultiIndex, Scalar] = field(default_factory=dict)

    @staticmethod
    def build(dim: int, deg: int, terms: Iterable[Tuple[MultiIndex, Scalar]]) -> Jet:
        """Accumulate terms, dropping zeros and exponents beyond the degree."""
        acc: Dict[MultiIndex, Scalar] = {}
        for alpha, c in terms:
            if len(alpha) != dim:
                raise ValueError(f"exponent {alpha} has length {len(alpha)}, expected {dim}")
            if any(e < 0 for e in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            if sum(alpha) > deg or c.is_zero():
                continue
            s = acc.get(alpha, ZERO) + c
            if s.is_zero():
                acc.pop(alpha, None)
            else:
                acc[alpha] = s
        return Jet(dim, deg, acc)

    @staticmethod
    def zero(dim: int, deg: int) -> Jet:
        return Jet(dim, deg, {})

    @staticmethod
    def monomial(dim: int, deg: int, alpha: MultiIndex, coeff: Scalar = ONE) -> Jet:
        return Jet.build(dim, deg, [(alpha, coeff)])

    def coefficient(self, alpha: MultiIndex) -> Scalar:
        return self.coeffs.get(tuple(alpha), ZERO)

    def terms(self) -> List[Tuple[MultiIndex, Scalar]]:
        """Stored terms in monomial order (constant first if present)."""
        return sorted(self.coeffs.items(), key=lambda kv: order_key(kv[0]))

    def is_zero(self) -> bool:
        return not self.coeffs

    def constant_term(self) -> Scalar:
        return self.coefficient((0,) * self.dim)

    def __add__(self, other: Jet) -> Jet:
        self._check(other)
        deg = min(self.degree, other.degree)
        return Jet.build(self.dim, deg, list(self.coeffs.items()) + list(other.coeffs.items()))

    def __sub__(self, other: Jet) -> Jet:
        return self + (-other)

    def __neg__(self) -> Jet:
        return Jet(self.dim, self.degree, {a: -c for a, c in self.coeffs.items()})

    def scale(self, s: Scalar) -> Jet:
        if s.is_zero():
            return Jet.zero(self.dim, self.degree)
        return Jet(self.dim, self.degree, {a: c * s for a, c in self.coeffs.items()})

    def __mul__(self, other: Jet) -> Jet:
        return jet_mul(self, other)

    def truncate(self, deg: int) -> Jet:
        """Retruncate; raising the degree is allowed (missing terms are zero)."""
        if deg >= self.degree:
            return Jet(self.dim, deg, dict(self.coeffs))
        return Jet(self.dim, deg, {a: c for a, c in self.coeffs.items() if sum(a) <= deg})

    def homogeneous_slice(self, d: int) -> Jet:
        """The degree-d part, as a jet of the same truncation degree."""
        return Jet(self.dim, self.degree, {a: c for a, c in self.coeffs.items() if sum(a) == d})

    def max_term_degree(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    def _check(self, other: Jet) -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")


def jet_mul(f: Jet, g: Jet) -> Jet:
    """Product truncated at the smaller of the two degrees."""
    f._check(g)
    deg = min(f.degree, g.degree)
    acc: Dict[MultiIndex, Scalar] = {}
    for a, ca in f.coeffs.items():
        da = sum(a)
        if da > deg:
            continue
        for b, cb in g.coeffs.items():
            if da + sum(b) > deg:
                continue
            gamma = tuple(x + y for x, y in zip(a, b))
            s = acc.get(gamma, ZERO) + ca * cb
            if s.is_zero():
                acc.pop(gamma, None)
            else:
                acc[gamma] = s
    return Jet(f.dim, deg, acc)


def grad0(f: Jet) -> Tuple[Scalar, ...]:
    """The gradient at 0: the vector of degree-one coefficients."""
    return tuple(f.coefficient(unit_index(f.dim, i)) for i in range(f.dim))

"""Truncated composition operator on monomial coefficient vectors.

For a polynomial self-map phi with upper-triangular derivative at the
fixed point and all eigenvalues strictly inside the punctured unit disk,
the operator sends a jet f to the jet of f(phi(z)).  On the graded
monomial basis its matrix is lower triangular with the eigenvalue
products lambda^alpha on the diagonal.

`truncation_degree` picks the smallest basis degree K so that every
eigenvalue product that equals an eigenvalue already occurs among the
multi-indices of degree at most K.  Beyond K the products are too small
in modulus to hit the spectrum again, so the K-truncated matrix carries
the complete eigenvalue-collision structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .linalg import ExactMatrix
from .maps import PolyMap, PowerMemo, monomial_power
from .scalars import Scalar, abs_sq
from .series import Jet, MultiIndex, enumerate_monomials


class UnsupportedSpectrumError(ValueError):
    """Raised when an eigenvalue is zero or not strictly inside the unit disk."""


def _check_spectrum(diag: Sequence[Scalar]) -> None:
    for i, lam in enumerate(diag):
        sq = abs_sq(lam)
        if sq == 0:
            raise UnsupportedSpectrumError(
                f"eigenvalue {i + 1} is zero; the map is not invertible at the origin"
            )
        if sq >= 1:
            raise UnsupportedSpectrumError(
                f"eigenvalue {i + 1} has modulus >= 1; attraction to the fixed point is required"
            )


def eigenvalue_products(
    diag: Sequence[Scalar], min_total: int, max_total: int
) -> List[Tuple[MultiIndex, Scalar]]:
    """All (k, lambda^k) with min_total <= |k| <= max_total, in basis order."""
    n = len(diag)
    out = []
    for alpha in enumerate_monomials(n, max_total):
        if sum(alpha) < min_total:
            continue
        prod = Scalar.of(1)
        for lam, e in zip(diag, alpha):
            prod = prod * lam**e
        out.append((alpha, prod))
    return out


def truncation_degree(diag: Sequence[Scalar]) -> int:
    """The largest |k| with lambda^k in the spectrum (at least 1).

    Products of total degree >= B, where (max |lambda_i|^2)^B is below
    min |lambda_j|^2, are strictly smaller in modulus than every
    eigenvalue, so the search space is finite.
    """
    _check_spectrum(diag)
    squares = [abs_sq(lam) for lam in diag]
    hi, lo = max(squares), min(squares)
    bound = 1
    cap = hi
    while cap >= lo:
        bound += 1
        cap = cap * hi
    spectrum = set(diag)
    k = 1
    for alpha, prod in eigenvalue_products(diag, 2, bound):
        if prod in spectrum:
            k = max(k, sum(alpha))
    return k


@dataclass(frozen=True)
class TruncatedCompOp:
    """The operator matrix over monomials of degree 1..K.

    `matrix` column j holds the coefficients of phi^basis[j]; applying
    `matrix` to a coefficient vector of f yields the coefficients of
    f(phi(z)).  `source` is phi truncated to degree K.
    """

    source: PolyMap
    degree: int
    basis: Tuple[MultiIndex, ...]
    matrix: ExactMatrix
    index: Dict[MultiIndex, int]

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return self.source.dim

    def diagonal(self) -> Tuple[Scalar, ...]:
        return self.matrix.diagonal_entries()

    def project_linear(self, vec: Sequence[Scalar]) -> Tuple[Scalar, ...]:
        """The degree-one coordinates of a coefficient vector."""
        return tuple(vec[: self.dim])


def build(phi: PolyMap, degree: int | None = None) -> TruncatedCompOp:
    """The truncated operator of phi at the collision-complete degree.

    Requires an upper-triangular derivative; pass `degree` to override
    the automatic truncation degree upward (never downward).
    """
    if phi.dim != phi.source_dim:
        raise ValueError("composition operator requires a self-map")
    linear = phi.linear_part()
    if not linear.is_upper_triangular():
        raise ValueError("derivative at the origin must be upper triangular")
    k = truncation_degree(linear.diagonal_entries())
    if degree is not None:
        if degree < k:
            raise ValueError(
                f"truncation degree {degree} is below the required degree {k}"
            )
        k = degree
    source = phi.truncate(k)
    basis = tuple(enumerate_monomials(phi.dim, k))
    memo: PowerMemo = {}
    columns = [monomial_power(source, beta, memo) for beta in basis]
    rows = [
        [columns[j].coefficient(alpha) for j in range(len(basis))]
        for alpha in basis
    ]
    matrix = ExactMatrix.from_rows(rows)
    if not matrix.is_lower_triangular():
        raise RuntimeError("operator matrix is not lower triangular")
    index = {alpha: i for i, alpha in enumerate(basis)}
    return TruncatedCompOp(source, k, basis, matrix, index)


def jet_vector(op: TruncatedCompOp, f: Jet) -> Tuple[Scalar, ...]:
    """Coefficients of a jet in the operator's basis order."""
    return tuple(f.coefficient(alpha) for alpha in op.basis)


def vector_jet(op: TruncatedCompOp, vec: Sequence[Scalar]) -> Jet:
    """The jet with the given coefficients in the operator's basis order."""
    if len(vec) != op.size:
        raise ValueError(f"vector length {len(vec)} does not match basis size {op.size}")
    return Jet.build(op.dim, op.degree, list(zip(op.basis, vec)))

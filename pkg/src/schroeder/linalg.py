"""Exact dense linear algebra over Gaussian rationals.

Provides kernels, ranks, inverses and solving via exact Gaussian
elimination (leading-entry pivoting; no magnitude concerns over an exact
field), plus Jordan-chain computations for triangular matrices:

* `jordan_chains_triangular` finds the chains of a triangular matrix for
  one eigenvalue through the kernel filtration ker((M - lambda)^p).
* `incremental_jordanize` appends the rows of a lower-triangular matrix
  below a protected Jordan corner one at a time, maintaining a chain
  basis and recording which original corner block each final chain
  extends.

Chain storage convention: ``vectors[0]`` is the eigenvector and
``(M - lambda) vectors[i] = vectors[i-1]``.  Matrices are dense and
immutable; vectors are plain tuples of scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .scalars import ONE, ZERO, Scalar, scalar_inv

Vector = Tuple[Scalar, ...]


class SingularMatrixError(ValueError):
    """Raised when an inverse or a unique solve is requested of a singular matrix."""


@dataclass(frozen=True)
class ExactMatrix:
    rows: int
    cols: int
    entries: Tuple[Tuple[Scalar, ...], ...]

    @staticmethod
    def from_rows(rows: Sequence[Sequence[Scalar]]) -> ExactMatrix:
        if not rows:
            raise ValueError("matrix needs at least one row")
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise ValueError("ragged rows")
        return ExactMatrix(len(rows), width, tuple(tuple(r) for r in rows))

    @staticmethod
    def identity(n: int) -> ExactMatrix:
        return ExactMatrix.from_rows(
            [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(rows: int, cols: int) -> ExactMatrix:
        return ExactMatrix.from_rows([[ZERO] * cols for _ in range(rows)])

    @staticmethod
    def diagonal(values: Sequence[Scalar]) -> ExactMatrix:
        n = len(values)
        return ExactMatrix.from_rows(
            [[values[i] if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    def at(self, i: int, j: int) -> Scalar:
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def transpose(self) -> ExactMatrix:
        return ExactMatrix.from_rows(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        self._same_shape(other)
        return ExactMatrix.from_rows(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        self._same_shape(other)
        return ExactMatrix.from_rows(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def scale(self, s: Scalar) -> ExactMatrix:
        return ExactMatrix.from_rows([[s * a for a in row] for row in self.entries])

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        return mat_mul(self, other)

    def shift(self, lam: Scalar) -> ExactMatrix:
        """self - lam * I (square matrices only)."""
        self._square()
        return self - ExactMatrix.identity(self.rows).scale(lam)

    def corner(self, n: int) -> ExactMatrix:
        """The upper-left n x n block."""
        return ExactMatrix.from_rows([list(self.entries[i][:n]) for i in range(n)])

    def is_lower_triangular(self) -> bool:
        return all(
            self.entries[i][j].is_zero()
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def is_upper_triangular(self) -> bool:
        return all(
            self.entries[i][j].is_zero()
            for i in range(self.rows)
            for j in range(min(i, self.cols))
        )

    def diagonal_entries(self) -> Vector:
        self._square()
        return tuple(self.entries[i][i] for i in range(self.rows))

    def _same_shape(self, other: ExactMatrix) -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def _square(self) -> None:
        if self.rows != self.cols:
            raise ValueError(f"square matrix required, got {self.rows}x{self.cols}")


def mat_mul(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    if a.cols != b.rows:
        raise ValueError(f"inner dimensions differ: {a.cols} vs {b.rows}")
    bt = b.transpose().entries
    return ExactMatrix.from_rows(
        [
            [_dot(ra, cb) for cb in bt]
            for ra in a.entries
        ]
    )


def mat_vec(a: ExactMatrix, v: Sequence[Scalar]) -> Vector:
    if a.cols != len(v):
        raise ValueError(f"vector length {len(v)} does not match {a.cols} columns")
    return tuple(_dot(row, v) for row in a.entries)


def mat_pow(a: ExactMatrix, k: int) -> ExactMatrix:
    a._square()
    if k < 0:
        raise ValueError("negative matrix power")
    out = ExactMatrix.identity(a.rows)
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def _dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    acc = ZERO
    for a, b in zip(u, v):
        if not a.is_zero() and not b.is_zero():
            acc = acc + a * b
    return acc


def _rref(rows: List[List[Scalar]]) -> Tuple[List[List[Scalar]], List[int]]:
    """In-place reduced row echelon form; returns (rows, pivot columns)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = scalar_inv(rows[r][c])
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m: ExactMatrix) -> int:
    _, pivots = _rref([list(r) for r in m.entries])
    return len(pivots)


def vectors_rank(vectors: Sequence[Sequence[Scalar]]) -> int:
    """Rank of the span of a (possibly empty) list of equal-length vectors."""
    if not vectors:
        return 0
    _, pivots = _rref([list(v) for v in vectors])
    return len(pivots)


def kernel_basis(m: ExactMatrix) -> List[Vector]:
    """Exact basis of the null space; empty list iff m is injective.

    The basis is canonical: one vector per free column of the reduced row
    echelon form, with a 1 in that free coordinate.
    """
    rows, pivots = _rref([list(r) for r in m.entries])
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    basis: List[Vector] = []
    for fc in free:
        v = [ZERO] * m.cols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(tuple(v))
    return basis


def inverse(m: ExactMatrix) -> ExactMatrix:
    m._square()
    n = m.rows
    aug = [list(m.entries[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    aug, pivots = _rref(aug)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return ExactMatrix.from_rows([row[n:] for row in aug])


def mat_solve(a: ExactMatrix, b: Sequence[Scalar]) -> Vector:
    """Solve a x = b for square nonsingular a."""
    a._square()
    if len(b) != a.rows:
        raise ValueError(f"right-hand side length {len(b)} does not match {a.rows}")
    aug = [list(a.entries[i]) + [b[i]] for i in range(a.rows)]
    aug, pivots = _rref(aug)
    if pivots != list(range(a.rows)):
        raise SingularMatrixError("matrix is singular")
    return tuple(row[-1] for row in aug)


def rank_sequence_oracle(m: ExactMatrix, lam: Scalar) -> List[int]:
    """dim ker((m - lam I)^p) for p = 1..size.

    The sequence is nondecreasing and eventually constant; the number of
    Jordan blocks of size >= p for lam is its p-th difference.
    """
    m._square()
    shifted = m.shift(lam)
    power = shifted
    dims = []
    for _ in range(m.rows):
        dims.append(m.rows - rank(power))
        power = mat_mul(power, shifted)
    return dims


@dataclass(frozen=True)
class JordanChain:
    """Vectors e_1..e_k with (M - lam) e_1 = 0 and (M - lam) e_j = e_{j-1}."""

    eigenvalue: Scalar
    vectors: Tuple[Vector, ...]

    @property
    def length(self) -> int:
        return len(self.vectors)

    def eigenvector(self) -> Vector:
        return self.vectors[0]


def chain_is_valid(m: ExactMatrix, chain: JordanChain) -> bool:
    """Replay (M - lam) along the chain and check the shift relation exactly."""
    shifted = m.shift(chain.eigenvalue)
    prev: Optional[Vector] = None
    for v in chain.vectors:
        if all(x.is_zero() for x in v):
            return False
        image = mat_vec(shifted, v)
        expect = prev if prev is not None else tuple([ZERO] * m.rows)
        if image != expect:
            return False
        prev = v
    return True


@dataclass(frozen=True)
class Block:
    """A Jordan block of the protected corner: eigenvalue, length, offset."""

    eigenvalue: Scalar
    length: int
    offset: int


@dataclass(frozen=True)
class JordanBasis:
    """A chain basis of a matrix with provenance into a protected corner.

    `provenance` maps an original corner-block index to the index of the
    chain extending it.  `chain_matrix()` stacks all chain vectors as
    columns, each chain in top-to-eigenvector order, so that
    ``matrix @ S == S @ jordan_form()`` holds exactly.
    """

    matrix: ExactMatrix
    chains: Tuple[JordanChain, ...]
    provenance: Dict[int, int]
    original_blocks: Tuple[Block, ...]

    def chain_matrix(self) -> ExactMatrix:
        cols: List[Vector] = []
        for c in self.chains:
            cols.extend(reversed(c.vectors))
        return ExactMatrix.from_rows(cols).transpose()

    def jordan_form(self) -> ExactMatrix:
        n = sum(c.length for c in self.chains)
        rows = [[ZERO] * n for _ in range(n)]
        pos = 0
        for c in self.chains:
            for i in range(c.length):
                rows[pos + i][pos + i] = c.eigenvalue
                if i + 1 < c.length:
                    rows[pos + i + 1][pos + i] = ONE
            pos += c.length
        return ExactMatrix.from_rows(rows)

    def block_sizes(self, lam: Scalar) -> List[int]:
        return sorted(c.length for c in self.chains if c.eigenvalue == lam)


def _normalize_chain(chain: JordanChain) -> JordanChain:
    """Canonical form: leading eigenvector coordinate 1, and that coordinate
    zeroed in all higher chain vectors by shift moves."""
    vecs = [list(v) for v in chain.vectors]
    lead = next((i for i, x in enumerate(vecs[0]) if not x.is_zero()), None)
    if lead is None:
        raise ValueError("zero eigenvector in chain")
    inv = scalar_inv(vecs[0][lead])
    vecs = [[x * inv for x in v] for v in vecs]
    for shift in range(1, len(vecs)):
        mu = vecs[shift][lead]
        if mu.is_zero():
            continue
        for i in range(shift, len(vecs)):
            vecs[i] = [x - mu * y for x, y in zip(vecs[i], vecs[i - shift])]
    return JordanChain(chain.eigenvalue, tuple(tuple(v) for v in vecs))


def _extend_independent(
    span: List[List[Scalar]], candidates: Sequence[Vector], need: int
) -> List[Vector]:
    """Pick `need` candidates that each enlarge the span, in the given order."""
    picked: List[Vector] = []
    base = [list(v) for v in span]
    current = vectors_rank(base)
    for cand in candidates:
        if len(picked) == need:
            break
        trial = base + [list(cand)]
        r = vectors_rank(trial)
        if r > current:
            picked.append(cand)
            base = trial
            current = r
    if len(picked) != need:
        raise RuntimeError("kernel filtration did not supply enough chain tops")
    return picked


def jordan_chains_triangular(m: ExactMatrix, lam: Scalar) -> List[JordanChain]:
    """A maximal independent set of chains of a triangular matrix for lam.

    Returns normalized chains sorted by decreasing length; the empty list
    when lam is not a diagonal entry.  Block sizes agree with the
    differences of `rank_sequence_oracle`.
    """
    m._square()
    if not (m.is_lower_triangular() or m.is_upper_triangular()):
        raise ValueError("matrix is not triangular")
    if lam not in m.diagonal_entries():
        return []
    shifted = m.shift(lam)
    kernels: List[List[Vector]] = []
    power = shifted
    dims = [0]
    while True:
        k = kernel_basis(power)
        kernels.append(k)
        dims.append(len(k))
        if len(dims) > 1 and dims[-1] == dims[-2]:
            kernels.pop()
            dims.pop()
            break
        power = mat_mul(power, shifted)
    p_max = len(kernels)
    chains: List[JordanChain] = []
    carried: List[Vector] = []
    for p in range(p_max, 0, -1):
        need = (dims[p] - dims[p - 1]) - len(carried)
        lower = kernels[p - 2] if p >= 2 else []
        span = [list(v) for v in lower] + [list(v) for v in carried]
        tops = _extend_independent(span, kernels[p - 1], need)
        for t in tops:
            vecs = [t]
            for _ in range(p - 1):
                vecs.append(mat_vec(shifted, vecs[-1]))
            vecs.reverse()
            chains.append(_normalize_chain(JordanChain(lam, tuple(vecs))))
        carried = [mat_vec(shifted, v) for v in carried + list(tops)]
    return chains


def _parse_jordan_corner(corner: ExactMatrix) -> List[Block]:
    """Split a lower-triangular Jordan-form matrix into its blocks."""
    n = corner.rows
    blocks: List[Block] = []
    i = 0
    while i < n:
        lam = corner.at(i, i)
        length = 1
        while (
            i + length < n
            and corner.at(i + length, i + length - 1) == ONE
            and corner.at(i + length, i + length) == lam
        ):
            length += 1
        blocks.append(Block(lam, length, i))
        i += length
    for i in range(n):
        for j in range(n):
            expect = ZERO
            if i == j:
                expect = corner.at(i, i)
            elif i == j + 1 and any(
                b.offset <= j and i < b.offset + b.length for b in blocks
            ):
                expect = ONE
            if corner.at(i, j) != expect:
                raise ValueError(
                    f"corner is not in lower Jordan form at entry ({i}, {j})"
                )
    return blocks


class _MutableChain:
    __slots__ = ("eigenvalue", "vectors", "provenance")

    def __init__(self, eigenvalue: Scalar, vectors: List[List[Scalar]], provenance: Optional[int]):
        self.eigenvalue = eigenvalue
        self.vectors = vectors
        self.provenance = provenance


def incremental_jordanize(u: ExactMatrix, n: int) -> JordanBasis:
    """Jordanize a lower-triangular matrix by appending rows below a corner.

    The upper-left n x n corner must already be a lower-triangular
    Jordan-form matrix.  Rows n+1..N are absorbed one at a time: every
    existing chain is decoupled from the new coordinate by the one-block
    update formulas, except that when the new diagonal entry matches a
    chain eigenvalue and the eigenvector coupling is nonzero, the longest
    such chain (latest on ties) grows by one and the others are first
    cleared against it.  Chains are never renormalized, which preserves
    the corner projections of each original block's extending chain.
    """
    u._square()
    if not u.is_lower_triangular():
        raise ValueError("matrix is not lower triangular")
    if not 1 <= n <= u.rows:
        raise ValueError(f"corner size {n} out of range")
    blocks = _parse_jordan_corner(u.corner(n))
    big = u.rows
    chains: List[_MutableChain] = []
    for j, b in enumerate(blocks):
        vecs = []
        for i in range(b.length - 1, -1, -1):
            v = [ZERO] * big
            v[b.offset + i] = ONE
            vecs.append(v)
        chains.append(_MutableChain(b.eigenvalue, vecs, j))

    for r in range(n, big):
        row = u.entries[r]
        d = row[r]
        couplings = [
            [_dot(row[:r], v[:r]) for v in c.vectors] for c in chains
        ]
        eligible = [
            i
            for i, c in enumerate(chains)
            if c.eigenvalue == d and not couplings[i][0].is_zero()
        ]
        winner: Optional[int] = None
        if eligible:
            winner = eligible[0]
            for i in eligible[1:]:
                if len(chains[i].vectors) >= len(chains[winner].vectors):
                    winner = i
            w = chains[winner]
            wc = couplings[winner]
            for i in eligible:
                if i == winner:
                    continue
                c = chains[i]
                gamma = couplings[i][0] / wc[0]
                for k in range(len(c.vectors)):
                    c.vectors[k] = [
                        x - gamma * y for x, y in zip(c.vectors[k], w.vectors[k])
                    ]
                    couplings[i][k] = couplings[i][k] - gamma * wc[k]
        for i, c in enumerate(chains):
            if i == winner:
                continue
            a = couplings[i]
            k = len(c.vectors)
            if c.eigenvalue != d:
                t = a[0] / (c.eigenvalue - d)
                c.vectors[0][r] = t
                for j in range(1, k):
                    t = (t - a[j]) / (d - c.eigenvalue)
                    c.vectors[j][r] = t
            else:
                for j in range(k - 1):
                    c.vectors[j][r] = a[j + 1]
        if winner is not None:
            w = chains[winner]
            a = couplings[winner]
            eig = [ZERO] * big
            eig[r] = a[0]
            for j in range(len(w.vectors) - 1):
                w.vectors[j][r] = a[j + 1]
            w.vectors.insert(0, eig)
        else:
            v = [ZERO] * big
            v[r] = ONE
            chains.append(_MutableChain(d, [v], None))

    final = tuple(
        JordanChain(c.eigenvalue, tuple(tuple(v) for v in c.vectors)) for c in chains
    )
    provenance = {
        c.provenance: i for i, c in enumerate(chains) if c.provenance is not None
    }
    return JordanBasis(u, final, provenance, tuple(blocks))


def transition_to_jordan_triangular(a: ExactMatrix) -> Tuple[JordanBasis, ExactMatrix]:
    """Chains and Jordan form of a triangular matrix.

    Returns (basis, J) where J is lower-triangular Jordan and the chain
    matrix S of the basis satisfies a @ S == S @ J, i.e. T a T^-1 == J for
    T = S^-1.  Distinct eigenvalues appear in order of first occurrence on
    the diagonal; blocks of one eigenvalue are sorted by increasing length.
    """
    a._square()
    if not (a.is_lower_triangular() or a.is_upper_triangular()):
        raise ValueError("matrix is not triangular")
    seen: List[Scalar] = []
    for lam in a.diagonal_entries():
        if lam not in seen:
            seen.append(lam)
    chains: List[JordanChain] = []
    for lam in seen:
        found = jordan_chains_triangular(a, lam)
        found.sort(key=lambda c: c.length)
        chains.extend(found)
    blocks: List[Block] = []
    pos = 0
    for c in chains:
        blocks.append(Block(c.eigenvalue, c.length, pos))
        pos += c.length
    basis = JordanBasis(a, tuple(chains), {j: j for j in range(len(chains))}, tuple(blocks))
    j = basis.jordan_form()
    s = basis.chain_matrix()
    if mat_mul(a, s) != mat_mul(s, j):
        raise RuntimeError("jordanization failed to satisfy a@S == S@J")
    return basis, j

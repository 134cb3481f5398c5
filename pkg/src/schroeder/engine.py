"""Decide and solve the functional equation F(phi(z)) = phi'(0)^k F(z).

`analyze` reports, per eigenvalue of the derivative at the fixed point,
whether eigenvalue collisions lambda^alpha = mu obstruct a solution F
with invertible derivative; the verdict is exact, computed from kernels
of the truncated composition operator.  `solve` constructs a truncated
solution map from the operator's Jordan chains, lifting each chain to
the requested output degree by solving triangular coefficient systems
whose divisors lambda^alpha - lambda are guaranteed nonzero above the
operator's truncation degree.  `solve_power` handles exponents k >= 2 by
multiplying chain components into eigen-chains of the k-th power factor.
`verify` replays a solution against the equation term by term.

All computation happens in coordinates where the derivative is an upper
Jordan matrix; the engine conjugates in and out itself, so callers only
need a triangular derivative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .compop import (
    TruncatedCompOp,
    build,
    eigenvalue_products,
    truncation_degree,
    vector_jet,
)
from .linalg import (
    ExactMatrix,
    JordanBasis,
    incremental_jordanize,
    inverse,
    kernel_basis,
    mat_mul,
    mat_pow,
    rank,
    transition_to_jordan_triangular,
    vectors_rank,
)
from .maps import (
    PolyMap,
    PowerMemo,
    compose,
    map_compose,
    matrix_apply,
    matrix_map,
    monomial_power,
)
from .scalars import ONE, ZERO, Scalar, scalar_inv
from .series import Jet, MultiIndex, enumerate_monomials, monomials_of_degree

DEFAULT_DEGREE = 10


class InvalidMapError(ValueError):
    """Raised when a map cannot be analyzed (not a self-map, derivative not triangular)."""


class NoFullRankError(RuntimeError):
    """Raised by `solve` in full-rank mode when the analysis rules a full-rank solution out.

    The `report` attribute holds the analysis that produced the verdict.
    """

    def __init__(self, report: "AnalysisReport"):
        blocked = ", ".join(
            str(rec.value) for rec in report.eigenvalues if not rec.full_rank_possible
        )
        super().__init__(
            f"no solution with invertible derivative exists; blocked at eigenvalue(s) {blocked}"
        )
        self.report = report


@dataclass(frozen=True)
class EigenvalueRecord:
    """Exact obstruction data for one eigenvalue of the derivative."""

    value: Scalar
    resonant: bool
    witnesses: Tuple[MultiIndex, ...]
    geometric_multiplicity: int
    kernel_dimension: int
    projected_dimension: int
    full_rank_possible: bool


@dataclass(frozen=True)
class AnalysisReport:
    dimension: int
    truncation_degree: int
    basis_size: int
    eigenvalues: Tuple[EigenvalueRecord, ...]
    full_rank: bool


@dataclass(frozen=True)
class ComponentInfo:
    """Where a solution component comes from: block of the derivative and chain slot."""

    index: int
    eigenvalue: Scalar
    block: int
    position: int
    block_size: int


@dataclass(frozen=True)
class SchroederSolution:
    """A truncated solution F of F(phi(z)) = phi'(0)^power F(z)."""

    map: PolyMap
    power: int
    degree: int
    components: PolyMap
    component_info: Tuple[ComponentInfo, ...]
    analysis: AnalysisReport
    derivative_rank: int
    component_rank: int

    @property
    def full_rank(self) -> bool:
        return self.derivative_rank == self.components.dim


@dataclass(frozen=True)
class VerifyReport:
    """Result of replaying a solution against the equation."""

    degree: int
    clean_degree: int
    first_failure: Optional[Tuple[int, MultiIndex, Scalar]]
    derivative_rank: int
    component_rank: int

    @property
    def passed(self) -> bool:
        return self.first_failure is None


@dataclass(frozen=True)
class _Prep:
    phi: PolyMap
    linear: ExactMatrix
    jordan: ExactMatrix
    conjugator: ExactMatrix
    conjugator_inv: ExactMatrix
    psi: PolyMap
    op: TruncatedCompOp
    work: int


def validate_map(phi: PolyMap) -> ExactMatrix:
    """Check the engine's preconditions; returns the derivative at the origin."""
    if phi.dim != phi.source_dim:
        raise InvalidMapError(
            f"expected a self-map, got {phi.dim} components in {phi.source_dim} variables"
        )
    linear = phi.linear_part()
    if not (linear.is_lower_triangular() or linear.is_upper_triangular()):
        raise InvalidMapError(
            "derivative at the origin is not triangular; conjugate the map first"
        )
    return linear


def detect_resonance(phi: PolyMap) -> List[Tuple[MultiIndex, Scalar]]:
    """Eigenvalue products of total degree >= 2 that land back in the spectrum.

    Returns (exponent, product) pairs in monomial order; empty means no
    collisions, in which case the truncation degree is 1.
    """
    linear = validate_map(phi)
    diag = linear.diagonal_entries()
    k = truncation_degree(diag)
    spectrum = set(diag)
    return [
        (alpha, prod)
        for alpha, prod in eigenvalue_products(diag, 2, k)
        if prod in spectrum
    ]


def _prepare(phi: PolyMap, degree: Optional[int]) -> _Prep:
    linear = validate_map(phi)
    basis, jordan = transition_to_jordan_triangular(linear.transpose())
    s = basis.chain_matrix()
    m = inverse(s)
    conj = s.transpose()
    conj_inv = m.transpose()
    k = truncation_degree(jordan.diagonal_entries())
    work = k if degree is None else max(k, degree)
    inner = matrix_map(conj_inv, work)
    psi = matrix_apply(conj, map_compose(phi.truncate(work), inner))
    op = build(psi)
    if op.degree != k:
        raise RuntimeError("truncation degree changed under conjugation")
    return _Prep(phi, linear, jordan, conj, conj_inv, psi, op, work)


def _report(prep: _Prep) -> AnalysisReport:
    u = prep.op.matrix
    n = prep.phi.dim
    corner = u.corner(n)
    diag_u = u.diagonal_entries()
    seen: List[Scalar] = []
    for lam in prep.jordan.diagonal_entries():
        if lam not in seen:
            seen.append(lam)
    records = []
    for mu in seen:
        orig = len(kernel_basis(corner.shift(mu)))
        kb = kernel_basis(u.shift(mu))
        proj = vectors_rank([v[:n] for v in kb])
        witnesses = tuple(
            alpha
            for i, alpha in enumerate(prep.op.basis)
            if sum(alpha) >= 2 and diag_u[i] == mu
        )
        records.append(
            EigenvalueRecord(
                value=mu,
                resonant=bool(witnesses),
                witnesses=witnesses,
                geometric_multiplicity=orig,
                kernel_dimension=len(kb),
                projected_dimension=proj,
                full_rank_possible=(proj == orig),
            )
        )
    return AnalysisReport(
        dimension=n,
        truncation_degree=prep.op.degree,
        basis_size=prep.op.size,
        eigenvalues=tuple(records),
        full_rank=all(r.full_rank_possible for r in records),
    )


def analyze(phi: PolyMap) -> AnalysisReport:
    """Exact verdict on the existence of a solution with invertible derivative."""
    return _report(_prepare(phi, None))


def truncated_operator(phi: PolyMap) -> TruncatedCompOp:
    """The truncated operator the engine works with, in its Jordan coordinates."""
    return _prepare(phi, None).op


def _diag_power(diag: Tuple[Scalar, ...], alpha: MultiIndex) -> Scalar:
    out = ONE
    for lam, e in zip(diag, alpha):
        if e:
            out = out * lam**e
    return out


class _Lifter:
    """Extends chain components beyond the operator degree, one slice at a time.

    For each new degree m the unknown homogeneous part x solves
    x(Lz) - lambda x = (known right-hand side), a system that is lower
    triangular in monomial order with diagonal lambda^alpha - lambda;
    those divisors cannot vanish because every eigenvalue collision
    happens at or below the operator degree.
    """

    def __init__(self, psi: PolyMap, base_degree: int, out_degree: int):
        self.psi = psi
        self.base = base_degree
        self.out = out_degree
        self.n = psi.dim
        linear = psi.linear_part()
        self.diag = linear.diagonal_entries()
        self.linear_is_diagonal = (
            linear.is_lower_triangular() and linear.is_upper_triangular()
        )
        self.linear_map = matrix_map(linear, out_degree)
        self.psi_memo: PowerMemo = {}
        self.lin_memo: PowerMemo = {}

    def lift(self, g0: Jet, rhs: Optional[Jet], lam: Scalar) -> Jet:
        """Solve g(psi(z)) = lambda g + rhs through the output degree.

        `g0` must satisfy the equation through the base degree and `rhs`
        must already be complete through the output degree.
        """
        g = g0.truncate(self.out)
        for m in range(self.base + 1, self.out + 1):
            known = compose(g, self.psi, self.psi_memo).homogeneous_slice(m)
            target = rhs.homogeneous_slice(m) if rhs is not None else None
            r = target - known if target is not None else -known
            new_terms: List[Tuple[MultiIndex, Scalar]] = []
            carry = Jet.zero(self.n, self.out)
            for alpha in monomials_of_degree(self.n, m):
                divisor = _diag_power(self.diag, alpha) - lam
                if divisor.is_zero():
                    raise RuntimeError(
                        f"divisor vanished at exponent {alpha} above the truncation degree"
                    )
                num = r.coefficient(alpha)
                if not self.linear_is_diagonal:
                    num = num - carry.coefficient(alpha)
                x = num / divisor
                if x.is_zero():
                    continue
                new_terms.append((alpha, x))
                if not self.linear_is_diagonal:
                    carry = carry + monomial_power(
                        self.linear_map, alpha, self.lin_memo
                    ).scale(x)
            if new_terms:
                g = g + Jet.build(self.n, self.out, new_terms)
        return g


def _lifted_blocks(
    prep: _Prep, chains: JordanBasis
) -> List[Tuple[int, Scalar, List[Jet]]]:
    """Per original block: (offset, eigenvalue, [f_1..f_s]) lifted to the work degree.

    Within a block the components satisfy f_i(psi(z)) = lambda f_i + f_{i+1}
    and the last one is an eigenfunction; they are lifted last-first so
    each right-hand side is already complete.
    """
    lifter = _Lifter(prep.psi, prep.op.degree, prep.work)
    out = []
    for bi, block in enumerate(chains.original_blocks):
        chain = chains.chains[chains.provenance[bi]]
        s = block.length
        base = [vector_jet(prep.op, v) for v in reversed(chain.vectors[:s])]
        lifted: List[Optional[Jet]] = [None] * s
        for i in range(s, 0, -1):
            rhs = lifted[i] if i < s else None
            lifted[i - 1] = lifter.lift(base[i - 1], rhs, block.eigenvalue)
        out.append((block.offset, block.eigenvalue, [j for j in lifted if j is not None]))
    return out


def _transport(prep: _Prep, f_psi: PolyMap) -> PolyMap:
    """Pull a solution for the conjugated map back to the original coordinates."""
    outer = matrix_map(prep.conjugator, prep.work)
    return matrix_apply(prep.conjugator_inv, map_compose(f_psi, outer))


def component_rank(components: PolyMap) -> int:
    monomials = enumerate_monomials(components.source_dim, components.degree)
    rows = [
        [c.coefficient(a) for a in monomials] for c in components.components
    ]
    return vectors_rank(rows)


def solve(
    phi: PolyMap, degree: Optional[int] = None, mode: str = "full-rank"
) -> SchroederSolution:
    """Construct a truncated solution of F(phi(z)) = phi'(0) F(z).

    In "full-rank" mode the analysis verdict gates the construction and
    the result has an invertible derivative; `NoFullRankError` carries
    the report otherwise.  In "independent" mode the construction always
    proceeds and yields n linearly independent component series, with no
    claim about the derivative.  The output degree is the larger of the
    requested degree (default 10) and the operator truncation degree.
    """
    if mode not in ("full-rank", "independent"):
        raise ValueError(f"unknown mode {mode!r}")
    prep = _prepare(phi, DEFAULT_DEGREE if degree is None else degree)
    report = _report(prep)
    if mode == "full-rank" and not report.full_rank:
        raise NoFullRankError(report)
    chains = incremental_jordanize(prep.op.matrix, phi.dim)
    comps: List[Optional[Jet]] = [None] * phi.dim
    infos: List[ComponentInfo] = []
    for bi, (offset, lam, block_jets) in enumerate(_lifted_blocks(prep, chains)):
        s = len(block_jets)
        for i, jet in enumerate(block_jets, start=1):
            comps[offset + i - 1] = jet
            infos.append(
                ComponentInfo(
                    index=offset + i - 1,
                    eigenvalue=lam,
                    block=bi,
                    position=i,
                    block_size=s,
                )
            )
    f_psi = PolyMap(tuple(j for j in comps if j is not None))
    f_phi = _transport(prep, f_psi)
    rank_d = rank(f_phi.linear_part())
    if mode == "full-rank" and rank_d != phi.dim:
        raise RuntimeError(
            "full-rank verdict positive but the constructed derivative is singular"
        )
    return SchroederSolution(
        map=phi,
        power=1,
        degree=prep.work,
        components=f_phi,
        component_info=tuple(sorted(infos, key=lambda c: c.index)),
        analysis=report,
        derivative_rank=rank_d,
        component_rank=component_rank(f_phi),
    )


def _jordan_block_upper(lam: Scalar, s: int) -> ExactMatrix:
    rows = [[ZERO] * s for _ in range(s)]
    for i in range(s):
        rows[i][i] = lam
        if i + 1 < s:
            rows[i][i + 1] = ONE
    return ExactMatrix.from_rows(rows)


def _jordan_block_lower(lam: Scalar, s: int) -> ExactMatrix:
    return _jordan_block_upper(lam, s).transpose()


def _reversal(s: int) -> ExactMatrix:
    rows = [[ONE if i + j == s - 1 else ZERO for j in range(s)] for i in range(s)]
    return ExactMatrix.from_rows(rows)


def solve_power(
    phi: PolyMap, power: int, degree: Optional[int] = None
) -> SchroederSolution:
    """Construct a truncated solution of F(phi(z)) = phi'(0)^power F(z).

    For power >= 2 the components are products of the power-1 chain
    components, remixed so each derivative block carries its k-th power
    factor; the derivative of F then vanishes, but the n component
    series stay linearly independent.  power == 1 is the plain equation
    without the full-rank gate.
    """
    if power < 1:
        raise ValueError(f"power must be at least 1, got {power}")
    if power == 1:
        return solve(phi, degree, mode="independent")
    request = DEFAULT_DEGREE if degree is None else degree
    prep = _prepare(phi, max(request, power))
    report = _report(prep)
    chains = incremental_jordanize(prep.op.matrix, phi.dim)
    comps: List[Optional[Jet]] = [None] * phi.dim
    infos: List[ComponentInfo] = []
    for bi, (offset, lam, block_jets) in enumerate(_lifted_blocks(prep, chains)):
        s = len(block_jets)
        top_pow = _jet_pow(block_jets[s - 1], power - 1)
        h = []
        for i in range(1, s + 1):
            scale = scalar_inv(lam ** ((power - 1) * (s - i)))
            h.append((block_jets[i - 1] * top_pow).scale(scale))
        factor = mat_pow(_jordan_block_upper(lam, s), power)
        basis, jlow = transition_to_jordan_triangular(factor)
        if jlow != _jordan_block_lower(lam**power, s):
            raise RuntimeError(
                "k-th power of a derivative block did not stay a single block"
            )
        e_inv = mat_mul(basis.chain_matrix(), _reversal(s))
        for i in range(s):
            acc = Jet.zero(phi.dim, prep.work)
            for j in range(s):
                c = e_inv.at(i, j)
                if not c.is_zero():
                    acc = acc + h[j].scale(c)
            comps[offset + i] = acc
            infos.append(
                ComponentInfo(
                    index=offset + i,
                    eigenvalue=lam,
                    block=bi,
                    position=i + 1,
                    block_size=s,
                )
            )
    f_psi = PolyMap(tuple(j for j in comps if j is not None))
    f_phi = _transport(prep, f_psi)
    rank_d = rank(f_phi.linear_part())
    if rank_d != 0:
        raise RuntimeError("derivative should vanish for powers above 1")
    comp_rank = component_rank(f_phi)
    if comp_rank != phi.dim:
        raise RuntimeError(
            "components became dependent under truncation; request a higher degree"
        )
    return SchroederSolution(
        map=phi,
        power=power,
        degree=prep.work,
        components=f_phi,
        component_info=tuple(sorted(infos, key=lambda c: c.index)),
        analysis=report,
        derivative_rank=rank_d,
        component_rank=comp_rank,
    )


def _jet_pow(f: Jet, e: int) -> Jet:
    out = Jet.build(f.dim, f.degree, [((0,) * f.dim, ONE)])
    for _ in range(e):
        out = out * f
    return out


def verify(phi: PolyMap, components: PolyMap, power: int = 1) -> VerifyReport:
    """Replay F(phi(z)) - phi'(0)^power F(z) and report the first nonzero term.

    Works in the map's own coordinates; no triangularity or spectrum
    condition is needed, so transported solutions check against the
    original map.
    """
    f = components
    if phi.dim != f.source_dim or phi.dim != phi.source_dim:
        raise ValueError("solution and map dimensions do not match")
    d = f.degree
    lhs = map_compose(f, phi.truncate(d))
    factor = mat_pow(phi.linear_part(), power)
    rhs = matrix_apply(factor, f)
    failure: Optional[Tuple[int, MultiIndex, Scalar]] = None
    best_key = None
    for i in range(f.dim):
        residual = lhs.component(i) - rhs.component(i)
        for alpha, c in residual.terms():
            key = (sum(alpha), tuple(-e for e in alpha), i)
            if best_key is None or key < best_key:
                best_key = key
                failure = (i, alpha, c)
            break
    clean = d if failure is None else sum(failure[1]) - 1
    return VerifyReport(
        degree=d,
        clean_degree=clean,
        first_failure=failure,
        derivative_rank=rank(f.linear_part()),
        component_rank=component_rank(f),
    )

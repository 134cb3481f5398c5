"""JSON documents for maps, solutions, and reports.

All numbers travel as rational strings ("-3/4", "2"), never as floats,
so a round trip through a document loses nothing.  Serialization emits
dictionaries in a fixed key order and terms in monomial order, making
the output byte-stable for identical inputs.

A coefficient is either an object {"re": "...", "im": "..."} (the "im"
key may be omitted) or a bare rational string for real values.  Output
always uses the two-key object form.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .engine import AnalysisReport, SchroederSolution, VerifyReport
from .compop import TruncatedCompOp
from .linalg import ExactMatrix
from .maps import PolyMap
from .scalars import Scalar
from .series import Jet, MultiIndex


class DocumentError(ValueError):
    """A malformed document; `path` locates the offending element."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def load(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from exc


def dump(data: Any) -> str:
    return json.dumps(data, indent=2) + "\n"


def parse_rational(value: Any, path: str) -> Fraction:
    if isinstance(value, bool):
        raise DocumentError("expected a rational string, got a boolean", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise DocumentError(
            "floating point numbers are not accepted; write the value as a rational string",
            path,
        )
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"not a rational: {value!r}", path) from exc
    raise DocumentError(f"expected a rational string, got {type(value).__name__}", path)


def parse_scalar(value: Any, path: str) -> Scalar:
    if isinstance(value, dict):
        extra = set(value) - {"re", "im"}
        if extra:
            raise DocumentError(f"unexpected keys {sorted(extra)}", path)
        re = parse_rational(value.get("re", 0), f"{path}.re")
        im = parse_rational(value.get("im", 0), f"{path}.im")
        return Scalar(re, im)
    if isinstance(value, (str, int)) and not isinstance(value, bool):
        return Scalar(parse_rational(value, path), Fraction(0))
    raise DocumentError(
        f"expected a coefficient object or rational string, got {type(value).__name__}",
        path,
    )


def scalar_json(s: Scalar) -> Dict[str, str]:
    return {"re": str(s.re), "im": str(s.im)}


def _parse_monomial(value: Any, dim: int, path: str) -> MultiIndex:
    if not isinstance(value, list):
        raise DocumentError("monomial must be a list of exponents", path)
    if len(value) != dim:
        raise DocumentError(
            f"monomial has {len(value)} exponents, expected {dim}", path
        )
    for i, e in enumerate(value):
        if not isinstance(e, int) or isinstance(e, bool) or e < 0:
            raise DocumentError("exponents must be nonnegative integers", f"{path}[{i}]")
    return tuple(value)


def _parse_terms(value: Any, dim: int, path: str) -> List[Tuple[MultiIndex, Scalar]]:
    if not isinstance(value, list):
        raise DocumentError("expected a list of terms", path)
    out = []
    for i, term in enumerate(value):
        tpath = f"{path}[{i}]"
        if not isinstance(term, dict):
            raise DocumentError("a term is an object with monomial and coefficient", tpath)
        extra = set(term) - {"monomial", "coefficient"}
        if extra:
            raise DocumentError(f"unexpected keys {sorted(extra)}", tpath)
        if "monomial" not in term or "coefficient" not in term:
            raise DocumentError("a term needs both monomial and coefficient", tpath)
        alpha = _parse_monomial(term["monomial"], dim, f"{tpath}.monomial")
        if sum(alpha) == 0:
            raise DocumentError("constant terms are not allowed", f"{tpath}.monomial")
        coeff = parse_scalar(term["coefficient"], f"{tpath}.coefficient")
        out.append((alpha, coeff))
    return out


def _parse_components(
    value: Any, dim: int, degree_floor: int, path: str
) -> Tuple[Jet, ...]:
    if not isinstance(value, list):
        raise DocumentError("components must be a list", path)
    if len(value) != dim:
        raise DocumentError(f"{len(value)} components for dimension {dim}", path)
    term_lists = [
        _parse_terms(comp, dim, f"{path}[{i}]") for i, comp in enumerate(value)
    ]
    degree = max(
        [degree_floor] + [sum(a) for terms in term_lists for a, _ in terms]
    )
    return tuple(Jet.build(dim, degree, terms) for terms in term_lists)


def _parse_dimension(data: Dict[str, Any], path: str) -> int:
    dim = data.get("dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DocumentError("dimension must be a positive integer", f"{path}.dimension")
    return dim


def parse_matrix(value: Any, n: int, path: str) -> ExactMatrix:
    if not isinstance(value, list) or len(value) != n:
        raise DocumentError(f"expected {n} rows", path)
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"expected {n} entries", f"{path}[{i}]")
        rows.append(
            [parse_scalar(e, f"{path}[{i}][{j}]") for j, e in enumerate(row)]
        )
    return ExactMatrix.from_rows(rows)


def matrix_json(m: ExactMatrix) -> List[List[Dict[str, str]]]:
    return [[scalar_json(e) for e in row] for row in m.entries]


def parse_map_document(data: Any) -> Tuple[PolyMap, Optional[ExactMatrix]]:
    """A self-map plus an optional conjugator matrix."""
    if not isinstance(data, dict):
        raise DocumentError("top level must be an object")
    extra = set(data) - {"dimension", "components", "conjugator"}
    if extra:
        raise DocumentError(f"unexpected keys {sorted(extra)}")
    dim = _parse_dimension(data, "$")
    if "components" not in data:
        raise DocumentError("missing components", "$")
    comps = _parse_components(data["components"], dim, 1, "$.components")
    try:
        phi = PolyMap(comps)
    except ValueError as exc:
        raise DocumentError(str(exc), "$.components") from exc
    conj = None
    if "conjugator" in data:
        conj = parse_matrix(data["conjugator"], dim, "$.conjugator")
    return phi, conj


def parse_solution_document(data: Any) -> Tuple[PolyMap, int]:
    """The components and power of a previously emitted solution."""
    if not isinstance(data, dict):
        raise DocumentError("top level must be an object")
    if data.get("kind") != "solution":
        raise DocumentError('expected a document with "kind": "solution"', "$.kind")
    dim = _parse_dimension(data, "$")
    power = data.get("power")
    if not isinstance(power, int) or isinstance(power, bool) or power < 1:
        raise DocumentError("power must be a positive integer", "$.power")
    degree = data.get("degree")
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 1:
        raise DocumentError("degree must be a positive integer", "$.degree")
    if "components" not in data:
        raise DocumentError("missing components", "$")
    comps = _parse_components(data["components"], dim, degree, "$.components")
    try:
        f = PolyMap(tuple(c.truncate(degree) for c in comps))
    except ValueError as exc:
        raise DocumentError(str(exc), "$.components") from exc
    return f, power


def jet_json(f: Jet) -> List[Dict[str, Any]]:
    return [
        {"monomial": list(alpha), "coefficient": scalar_json(c)}
        for alpha, c in f.terms()
    ]


def map_json(phi: PolyMap) -> Dict[str, Any]:
    return {
        "dimension": phi.dim,
        "components": [jet_json(c) for c in phi.components],
    }


def analysis_json(report: AnalysisReport) -> Dict[str, Any]:
    return {
        "kind": "analysis",
        "dimension": report.dimension,
        "truncation_degree": report.truncation_degree,
        "basis_size": report.basis_size,
        "full_rank": report.full_rank,
        "eigenvalues": [
            {
                "value": scalar_json(rec.value),
                "resonant": rec.resonant,
                "witnesses": [list(w) for w in rec.witnesses],
                "geometric_multiplicity": rec.geometric_multiplicity,
                "kernel_dimension": rec.kernel_dimension,
                "projected_dimension": rec.projected_dimension,
                "full_rank_possible": rec.full_rank_possible,
            }
            for rec in report.eigenvalues
        ],
    }


def solution_json(sol: SchroederSolution) -> Dict[str, Any]:
    return {
        "kind": "solution",
        "dimension": sol.components.dim,
        "power": sol.power,
        "degree": sol.degree,
        "full_rank": sol.full_rank,
        "derivative_rank": sol.derivative_rank,
        "component_rank": sol.component_rank,
        "components": [jet_json(c) for c in sol.components.components],
        "component_details": [
            {
                "index": info.index,
                "eigenvalue": scalar_json(info.eigenvalue),
                "block": info.block,
                "position": info.position,
                "block_size": info.block_size,
            }
            for info in sol.component_info
        ],
    }


def verify_json(report: VerifyReport) -> Dict[str, Any]:
    failure = None
    if report.first_failure is not None:
        comp, alpha, value = report.first_failure
        failure = {
            "component": comp,
            "monomial": list(alpha),
            "value": scalar_json(value),
        }
    return {
        "kind": "verification",
        "degree": report.degree,
        "clean_degree": report.clean_degree,
        "passed": report.passed,
        "first_failure": failure,
        "derivative_rank": report.derivative_rank,
        "component_rank": report.component_rank,
    }


def operator_json(op: TruncatedCompOp) -> Dict[str, Any]:
    return {
        "kind": "operator",
        "dimension": op.dim,
        "degree": op.degree,
        "basis": [list(alpha) for alpha in op.basis],
        "matrix": matrix_json(op.matrix),
    }

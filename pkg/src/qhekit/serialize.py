"""JSON wire formats for every value the toolkit exchanges.

Matrices are {"rows", "cols", "entries"} with row-major [re, im] pairs;
kets are {"dim", "amplitudes"}; density operators add a register header.
Values are read back as IEEE doubles; bit-exact decimal round-trips are not
promised.  Index convention everywhere: the first register is the most
significant digit of the flat index.
"""

from typing import Any, Mapping

import numpy as np

from ._version import __version__
from .checks import DimensionAudit, Report
from .layout import Layout
from .localiser import LocalisationProblem, LocalisationResult
from .qinfo import DensityOp
from .scheme import Evaluation, FootprintOp, QheScheme, RegisterState


class SchemeFormatError(ValueError):
    """Malformed serialized input, with the offending location."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def _require(obj: Mapping, key: str, where: str) -> Any:
    if not isinstance(obj, Mapping):
        raise SchemeFormatError(where, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise SchemeFormatError(where, f"missing field {key!r}")
    return obj[key]


def _pairs_to_complex(pairs: Any, count: int, where: str) -> np.ndarray:
    if not isinstance(pairs, list) or len(pairs) != count:
        raise SchemeFormatError(where, f"expected {count} [re, im] pairs")
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemeFormatError(where, f"non-numeric entries: {exc}") from None
    if arr.shape != (count, 2):
        raise SchemeFormatError(where, f"expected shape ({count}, 2), got {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def _complex_to_pairs(values: np.ndarray) -> list[list[float]]:
    flat = np.asarray(values, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in flat]


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "entries": _complex_to_pairs(m)}


def matrix_from_json(obj: Mapping, where: str = "matrix") -> np.ndarray:
    rows = int(_require(obj, "rows", where))
    cols = int(_require(obj, "cols", where))
    if rows < 1 or cols < 1:
        raise SchemeFormatError(where, f"non-positive shape ({rows}, {cols})")
    entries = _pairs_to_complex(_require(obj, "entries", where), rows * cols, f"{where}.entries")
    if not np.all(np.isfinite(entries)):
        raise SchemeFormatError(where, "non-finite entries")
    return entries.reshape(rows, cols)


def ket_to_json(v: np.ndarray) -> dict:
    v = np.asarray(v, dtype=complex).ravel()
    return {"dim": int(v.size), "amplitudes": _complex_to_pairs(v)}


def ket_from_json(obj: Mapping, where: str = "ket") -> np.ndarray:
    dim = int(_require(obj, "dim", where))
    if dim < 1:
        raise SchemeFormatError(where, f"non-positive dimension {dim}")
    return _pairs_to_complex(_require(obj, "amplitudes", where), dim, f"{where}.amplitudes")


def layout_to_json(layout: Layout) -> list:
    return [[label, dim] for label, dim in layout.registers]


def layout_from_json(obj: Any, where: str = "registers") -> Layout:
    if not isinstance(obj, list) or not obj:
        raise SchemeFormatError(where, "expected a non-empty list of [label, dim] pairs")
    regs = []
    for i, item in enumerate(obj):
        if not isinstance(item, list) or len(item) != 2:
            raise SchemeFormatError(f"{where}[{i}]", "expected a [label, dim] pair")
        regs.append((str(item[0]), int(item[1])))
    try:
        return Layout(tuple(regs))
    except ValueError as exc:
        raise SchemeFormatError(where, str(exc)) from None


def density_to_json(rho: DensityOp) -> dict:
    return {"registers": layout_to_json(rho.layout), **matrix_to_json(rho.matrix)}


def density_from_json(obj: Mapping, where: str = "density") -> DensityOp:
    layout = layout_from_json(_require(obj, "registers", where), f"{where}.registers")
    matrix = matrix_from_json(obj, where)
    try:
        return DensityOp(layout, matrix)
    except ValueError as exc:
        raise SchemeFormatError(where, str(exc)) from None


def _roles(scheme: QheScheme) -> dict[str, str]:
    alice = set(scheme.alice_initial)
    roles = {scheme.input_label: "input"}
    key_labels = scheme.key_state.labels if scheme.key_state else ()
    res_labels = scheme.resource_state.labels if scheme.resource_state else ()
    for label in scheme.layout.labels:
        if label in roles:
            continue
        if label in key_labels:
            roles[label] = "key"
        elif label in res_labels:
            roles[label] = "res_a" if label in alice else "res_b"
        else:
            roles[label] = "anc_a" if label in alice else "anc_b"
    return roles


def _footprint_to_json(op: FootprintOp) -> dict:
    return {"labels": list(op.labels), **matrix_to_json(op.matrix)}


def _footprint_from_json(obj: Mapping, where: str) -> FootprintOp:
    labels = _require(obj, "labels", where)
    if not isinstance(labels, list) or not labels:
        raise SchemeFormatError(f"{where}.labels", "expected a non-empty label list")
    try:
        return FootprintOp(tuple(str(l) for l in labels), matrix_from_json(obj, where))
    except ValueError as exc:
        raise SchemeFormatError(where, str(exc)) from None


def scheme_to_json(scheme: QheScheme) -> dict:
    return {
        "format": "qhekit-scheme",
        "toolkit_version": __version__,
        "name": scheme.name,
        "registers": layout_to_json(scheme.layout),
        "roles": _roles(scheme),
        "output": scheme.output_label,
        "states": [
            {"labels": list(block.labels), **ket_to_json(block.ket)}
            for block in scheme.fixed_states
        ],
        "encrypt": _footprint_to_json(scheme.encrypt_op),
        "decrypt": _footprint_to_json(scheme.decrypt_op),
        "evaluations": [
            {
                "id": ev.circuit_id,
                "operator": _footprint_to_json(ev.operator),
                "target": matrix_to_json(ev.target),
            }
            for ev in scheme.evaluations
        ],
        "send_to_bob": list(scheme.send_to_bob),
        "return_to_alice": list(scheme.return_to_alice),
    }


_ROLE_NAMES = {"input", "key", "anc_a", "anc_b", "res_a", "res_b"}


def scheme_from_json(obj: Mapping, where: str = "scheme") -> QheScheme:
    layout = layout_from_json(_require(obj, "registers", where), f"{where}.registers")
    roles_raw = _require(obj, "roles", where)
    if not isinstance(roles_raw, Mapping):
        raise SchemeFormatError(f"{where}.roles", "expected a label -> role object")
    roles: dict[str, str] = {}
    for label in layout.labels:
        role = roles_raw.get(label)
        if role not in _ROLE_NAMES:
            raise SchemeFormatError(
                f"{where}.roles.{label}", f"expected one of {sorted(_ROLE_NAMES)}, got {role!r}"
            )
        roles[label] = role
    inputs = [l for l, r in roles.items() if r == "input"]
    if len(inputs) != 1:
        raise SchemeFormatError(f"{where}.roles", f"need exactly one input register, got {inputs}")
    key_labels = {l for l, r in roles.items() if r == "key"}
    res_labels = {l for l, r in roles.items() if r in ("res_a", "res_b")}
    bob_initial = tuple(l for l in layout.labels if roles[l] in ("anc_b", "res_b"))

    key_state = None
    resource_state = None
    ancillas: list[RegisterState] = []
    states_raw = _require(obj, "states", where)
    if not isinstance(states_raw, list):
        raise SchemeFormatError(f"{where}.states", "expected a list of state blocks")
    for i, item in enumerate(states_raw):
        here = f"{where}.states[{i}]"
        labels_raw = _require(item, "labels", here)
        if not isinstance(labels_raw, list) or not labels_raw:
            raise SchemeFormatError(f"{here}.labels", "expected a non-empty label list")
        labels = tuple(str(l) for l in labels_raw)
        try:
            block = RegisterState(labels, ket_from_json(item, here))
        except ValueError as exc:
            raise SchemeFormatError(here, str(exc)) from None
        label_set = set(labels)
        if label_set <= key_labels:
            if key_state is not None:
                raise SchemeFormatError(here, "second key state block")
            key_state = block
        elif label_set <= res_labels:
            if resource_state is not None:
                raise SchemeFormatError(here, "second resource state block")
            resource_state = block
        elif label_set & (key_labels | res_labels):
            raise SchemeFormatError(here, "state block mixes key/resource and other roles")
        else:
            ancillas.append(block)

    evals_raw = _require(obj, "evaluations", where)
    if not isinstance(evals_raw, list) or not evals_raw:
        raise SchemeFormatError(f"{where}.evaluations", "expected a non-empty list")
    evaluations = []
    for i, item in enumerate(evals_raw):
        here = f"{where}.evaluations[{i}]"
        try:
            evaluations.append(
                Evaluation(
                    str(_require(item, "id", here)),
                    _footprint_from_json(_require(item, "operator", here), f"{here}.operator"),
                    matrix_from_json(_require(item, "target", here), f"{here}.target"),
                )
            )
        except ValueError as exc:
            if isinstance(exc, SchemeFormatError):
                raise
            raise SchemeFormatError(here, str(exc)) from None

    try:
        return QheScheme(
            name=str(obj.get("name", "unnamed")),
            layout=layout,
            input_label=inputs[0],
            output_label=str(_require(obj, "output", where)),
            bob_initial=bob_initial,
            key_state=key_state,
            resource_state=resource_state,
            ancilla_states=tuple(ancillas),
            encrypt_op=_footprint_from_json(_require(obj, "encrypt", where), f"{where}.encrypt"),
            decrypt_op=_footprint_from_json(_require(obj, "decrypt", where), f"{where}.decrypt"),
            evaluations=tuple(evaluations),
            send_to_bob=tuple(
                str(l) for l in _require(obj, "send_to_bob", where)
            ),
            return_to_alice=tuple(
                str(l) for l in _require(obj, "return_to_alice", where)
            ),
        )
    except ValueError as exc:
        if isinstance(exc, SchemeFormatError):
            raise
        raise SchemeFormatError(where, str(exc)) from None


def problem_to_json(problem: LocalisationProblem) -> dict:
    return {
        "format": "qhekit-localisation-problem",
        "toolkit_version": __version__,
        "registers": layout_to_json(problem.layout),
        "unitary": matrix_to_json(problem.unitary),
        "aux_state": ket_to_json(problem.aux_state),
        "remote_state": ket_to_json(problem.remote_state),
    }


def problem_from_json(obj: Mapping, where: str = "problem") -> LocalisationProblem:
    layout = layout_from_json(_require(obj, "registers", where), f"{where}.registers")
    try:
        return LocalisationProblem(
            layout,
            matrix_from_json(_require(obj, "unitary", where), f"{where}.unitary"),
            ket_from_json(_require(obj, "aux_state", where), f"{where}.aux_state"),
            ket_from_json(_require(obj, "remote_state", where), f"{where}.remote_state"),
        )
    except ValueError as exc:
        if isinstance(exc, SchemeFormatError):
            raise
        raise SchemeFormatError(where, str(exc)) from None


def result_to_json(result: LocalisationResult) -> dict:
    return {
        "format": "qhekit-localisation-result",
        "toolkit_version": __version__,
        "unitary": matrix_to_json(result.unitary),
        "residual_state": density_to_json(result.residual_state),
        "rank": result.rank,
        "factor_dims": list(result.factor_dims),
        "gram_residual": result.gram_residual,
        "reconstruction_residual": result.reconstruction_residual,
    }


def report_to_json(report: Report) -> dict:
    out = {
        "kind": report.kind,
        "verdict": report.verdict,
        "worst_metric": report.worst_metric,
        "cases": [[case_id, metric] for case_id, metric in report.cases],
        "tolerances": dict(report.tolerances),
        "toolkit_version": __version__,
    }
    if report.reason is not None:
        out["reason"] = report.reason
    return out


def audit_to_json(audit: DimensionAudit) -> dict:
    out = {
        "kind": "dimension-audit",
        "verdict": audit.verdict,
        "set_size": audit.set_size,
        "qubits_required": audit.qubits_required,
        "toolkit_version": __version__,
    }
    if audit.classical_bits is not None:
        out.update(
            classical_bits=audit.classical_bits,
            state_count=audit.state_count,
            log2_floor=audit.log2_floor,
            log2_ceil=audit.log2_ceil,
            exponential_bound_holds=audit.exponential_bound_holds,
        )
    return out

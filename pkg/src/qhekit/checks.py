"""Verdict engines over schemes, gate arrays and evaluation-set sizes.

Every checker returns a machine-readable report: a pass/fail/inapplicable
verdict, the worst-case metric, a per-case table and the tolerances used.
"inapplicable" means a precondition of the statement under test failed, and
always carries a reason code.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .layout import Layout
from .linalg import (
    as_ket,
    as_square,
    haar_ket,
    is_unitary,
    require_unitary,
    trace_distance,
    unitaries_equal_up_to_phase,
)
from .localiser import probe_labels, probe_states
from .qinfo import orthogonal_support, product_deviation_from_ket
from .scheme import QheScheme, run_pipeline
from .tolerances import DEFAULT_TOLERANCES

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"

REASON_SECURITY_FAILED = "security-precondition-failed"
REASON_COMPLETENESS_FAILED = "completeness-precondition-failed"
REASON_MESSAGE_CORRELATED = "message-correlated-with-retained-key"

_HAAR_PLAINTEXTS_PER_CIRCUIT = 10
_COMPLETENESS_SEED = 0xC0DE


@dataclass(frozen=True)
class Report:
    kind: str
    verdict: str
    worst_metric: float
    cases: tuple[tuple[str, float], ...]
    tolerances: Mapping[str, float] = field(default_factory=dict)
    reason: str | None = None

    def __post_init__(self) -> None:
        if self.verdict not in (PASS, FAIL, INAPPLICABLE):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == INAPPLICABLE and not self.reason:
            raise ValueError("inapplicable verdicts must carry a reason code")


def check_security(
    scheme: QheScheme,
    tol: float | None = None,
    probe_rotation: np.ndarray | None = None,
) -> Report:
    """Is Bob's t1 reduced state independent of the plaintext?

    Evaluates the ciphertext for every informationally complete probe
    plaintext and reports the maximum pairwise trace distance.  The
    ciphertext is linear in the plaintext projector, so the probe set is
    conclusive.  probe_rotation conjugates the probe basis by a fixed
    unitary; the verdict must not depend on it.
    """
    if tol is None:
        tol = DEFAULT_TOLERANCES.equality
    d = scheme.input_dim
    probes = probe_states(d)
    labels = probe_labels(d)
    if probe_rotation is not None:
        rot = require_unitary(probe_rotation, where="probe rotation")
        if rot.shape[0] != d:
            raise ValueError(f"probe rotation dimension {rot.shape[0]} != plaintext dimension {d}")
        probes = [rot @ p for p in probes]
    states = [scheme.ciphertext(p).matrix for p in probes]
    cases = []
    worst = 0.0
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            dist = trace_distance(states[i], states[j])
            cases.append((f"{labels[i]}|{labels[j]}", dist))
            worst = max(worst, dist)
    return Report(
        kind="security",
        verdict=PASS if worst <= tol else FAIL,
        worst_metric=worst,
        cases=tuple(cases),
        tolerances={"security": tol},
    )


def check_completeness(scheme: QheScheme, tol: float | None = None) -> Report:
    """Does decryption deterministically yield the target circuit's output?

    For every circuit and every probe plaintext (plus seeded Haar plaintexts
    guarding against errors that linearity would mask): the output register
    must match the target state at infidelity <= tol, and must be in a
    product with the rest of Alice's registers at deviation <= tol.
    """
    if tol is None:
        tol = DEFAULT_TOLERANCES.equality
    d = scheme.input_dim
    base_probes = list(zip(probe_labels(d), probe_states(d)))
    cases = []
    worst = 0.0
    for index, ev in enumerate(scheme.evaluations):
        rng = np.random.default_rng([_COMPLETENESS_SEED, index])
        plaintexts = base_probes + [
            (f"haar-{i}", haar_ket(rng, d)) for i in range(_HAAR_PLAINTEXTS_PER_CIRCUIT)
        ]
        rest = tuple(l for l in scheme.alice_t2 if l != scheme.output_label)
        for name, psi in plaintexts:
            trace = run_pipeline(scheme, ev.circuit_id, psi)
            target = ev.target @ psi
            fid = float(np.real(np.vdot(target, trace.output.matrix @ target)))
            metric = 1.0 - fid
            if rest:
                metric = max(
                    metric,
                    product_deviation_from_ket(
                        trace.ket_final, scheme.layout, [scheme.output_label], rest
                    ),
                )
            cases.append((f"{ev.circuit_id}/{name}", metric))
            worst = max(worst, metric)
    return Report(
        kind="completeness",
        verdict=PASS if worst <= tol else FAIL,
        worst_metric=worst,
        cases=tuple(cases),
        tolerances={"completeness": tol},
    )


def check_theorem1(
    scheme: QheScheme,
    psi_in: np.ndarray,
    tol: float | None = None,
    security_report: Report | None = None,
    completeness_report: Report | None = None,
) -> Report:
    """Must distinct evaluations leave Bob's messages on orthogonal supports?

    Preconditions: the scheme must pass the security and completeness checks
    (reports may be supplied to avoid recomputation); failures yield an
    inapplicable verdict, never a silent skip.  Stage 1 tests the product
    hypothesis the orthogonality argument rests on: at t2 Alice's retained
    registers must be in a product with the message for every circuit.  If
    any circuit fails, the verdict is inapplicable with the product-form
    deviations reported.  Stage 2 computes the pairwise support overlap of
    the message states for every pair of circuits whose targets differ by
    more than a global phase; pass iff every overlap is at most tol.
    """
    if tol is None:
        tol = DEFAULT_TOLERANCES.equality
    security = security_report if security_report is not None else check_security(scheme)
    if security.verdict != PASS:
        return Report(
            kind="theorem1",
            verdict=INAPPLICABLE,
            worst_metric=security.worst_metric,
            cases=(),
            tolerances={"support-overlap": tol},
            reason=REASON_SECURITY_FAILED,
        )
    completeness = (
        completeness_report if completeness_report is not None else check_completeness(scheme)
    )
    if completeness.verdict != PASS:
        return Report(
            kind="theorem1",
            verdict=INAPPLICABLE,
            worst_metric=completeness.worst_metric,
            cases=(),
            tolerances={"support-overlap": tol},
            reason=REASON_COMPLETENESS_FAILED,
        )

    traces = {ev.circuit_id: run_pipeline(scheme, ev.circuit_id, psi_in) for ev in scheme.evaluations}

    cases = []
    retained = scheme.alice_t1
    product_worst = 0.0
    for cid, trace in traces.items():
        if retained:
            deviation = product_deviation_from_ket(
                trace.ket_t2, scheme.layout, retained, scheme.return_to_alice
            )
        else:
            deviation = 0.0
        cases.append((f"product-form/{cid}", deviation))
        product_worst = max(product_worst, deviation)
    if product_worst > tol:
        return Report(
            kind="theorem1",
            verdict=INAPPLICABLE,
            worst_metric=product_worst,
            cases=tuple(cases),
            tolerances={"support-overlap": tol},
            reason=REASON_MESSAGE_CORRELATED,
        )

    worst = 0.0
    evaluations = scheme.evaluations
    for i in range(len(evaluations)):
        for j in range(i + 1, len(evaluations)):
            a, b = evaluations[i], evaluations[j]
            if unitaries_equal_up_to_phase(a.target, b.target):
                continue
            _, overlap = orthogonal_support(
                traces[a.circuit_id].rho_message, traces[b.circuit_id].rho_message, tol
            )
            cases.append((f"overlap/{a.circuit_id}|{b.circuit_id}", overlap))
            worst = max(worst, overlap)
    return Report(
        kind="theorem1",
        verdict=PASS if worst <= tol else FAIL,
        worst_metric=worst,
        cases=tuple(cases),
        tolerances={"support-overlap": tol},
    )


def check_no_programming(
    gate: np.ndarray,
    layout: Layout,
    programs: Sequence[np.ndarray],
    tol: float | None = None,
) -> Report:
    """Programs selecting distinct operations must be orthogonal.

    The layout must hold exactly a (program, data) register pair.  For each
    program the gate must act deterministically: on every data probe the
    output must factor as (fixed program remnant) ⊗ (unitary applied to the
    probe).  Programs failing that are flagged non-deterministic and excluded
    from the pairwise orthogonality assertion; for the rest, any two whose
    extracted unitaries differ beyond a global phase must have overlap
    |<p_i|p_j>| <= tol.
    """
    if tol is None:
        tol = DEFAULT_TOLERANCES.equality
    if len(layout.registers) != 2:
        raise ValueError(f"layout must hold (program, data) registers, got {layout.labels}")
    d_prog, d_data = layout.dims
    gate = as_square(gate, "gate array")
    if gate.shape[0] != layout.dim:
        raise ValueError(f"gate dimension {gate.shape[0]} != layout dimension {layout.dim}")
    if not is_unitary(gate, DEFAULT_TOLERANCES.unitarity):
        raise ValueError("gate array is not unitary within tolerance")

    probes = probe_states(d_data)
    cases = []
    extracted: dict[int, np.ndarray] = {}
    kets = [as_ket(p, f"program {i}") for i, p in enumerate(programs)]
    for i, program in enumerate(kets):
        if program.size != d_prog:
            raise ValueError(
                f"program {i} has dimension {program.size}, register has {d_prog}"
            )
        outputs = [
            (gate @ np.kron(program, probe)).reshape(d_prog, d_data) for probe in probes
        ]
        # Program remnant read off the first basis probe's dominant factor.
        u, _, _ = np.linalg.svd(outputs[0])
        remnant = u[:, 0]
        # Weight of any output outside remnant ⊗ data flags non-determinism;
        # the conditional states are linear in the probe, so the extracted
        # map is determined by the basis-probe conditionals.
        conditionals = [remnant.conj() @ out for out in outputs]
        leak = max(1.0 - float(np.vdot(c, c).real) for c in conditionals)
        w = np.column_stack(conditionals[:d_data])
        if leak > tol or not is_unitary(w, np.sqrt(tol)):
            cases.append((f"program-{i}/non-deterministic", leak))
            continue
        cases.append((f"program-{i}/determinism", leak))
        extracted[i] = w

    worst = 0.0
    ids = sorted(extracted)
    for a_pos, i in enumerate(ids):
        for j in ids[a_pos + 1 :]:
            if unitaries_equal_up_to_phase(extracted[i], extracted[j]):
                continue
            overlap = float(abs(np.vdot(kets[i], kets[j])))
            cases.append((f"overlap/program-{i}|program-{j}", overlap))
            worst = max(worst, overlap)
    return Report(
        kind="no-programming",
        verdict=PASS if worst <= tol else FAIL,
        worst_metric=worst,
        cases=tuple(cases),
        tolerances={"support-overlap": tol},
    )


@dataclass(frozen=True)
class DimensionAudit:
    """Exact integer accounting of the message size an evaluation set forces.

    qubits_required is the exact ceiling of log2(set_size).  The reversible-
    classical variant additionally records the bit count n, the basis-state
    count 2^n, exact floor/ceil of log2((2^n)!), and whether
    log2((2^n)!) >= 2^n holds (exact big-integer comparison).
    """

    verdict: str
    set_size: int
    qubits_required: int
    classical_bits: int | None = None
    state_count: int | None = None
    log2_floor: int | None = None
    log2_ceil: int | None = None
    exponential_bound_holds: bool | None = None


def qubits_for_set(set_size: int) -> int:
    """Exact ceil(log2(set_size)) via big-integer bit structure."""
    if set_size < 1:
        raise ValueError(f"set size must be >= 1, got {set_size}")
    return int(set_size - 1).bit_length()


def audit_dimension(set_size: int) -> DimensionAudit:
    """Minimum qubits able to carry one orthogonal message state per circuit."""
    return DimensionAudit(verdict=PASS, set_size=int(set_size), qubits_required=qubits_for_set(set_size))


def audit_reversible_classical(n: int) -> DimensionAudit:
    """Audit the evaluation set of all reversible classical operations on n bits.

    There are (2^n)! permutations of the n-bit states; the audit reports the
    exact qubit requirement and checks log2((2^n)!) >= 2^n exactly.  The
    bound fails at n = 1 (log2 2 = 1 < 2) and holds for 2 <= n <= 6.
    """
    if not 1 <= n <= 6:
        raise ValueError(f"classical bit count must be in 1..6 for exact audit, got {n}")
    states = 2**n
    set_size = math.factorial(states)
    return DimensionAudit(
        verdict=PASS,
        set_size=set_size,
        qubits_required=qubits_for_set(set_size),
        classical_bits=n,
        state_count=states,
        log2_floor=set_size.bit_length() - 1,
        log2_ceil=qubits_for_set(set_size),
        exponential_bound_holds=set_size >= 2**states,
    )

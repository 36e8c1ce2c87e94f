"""Concrete schemes, problem generators and the verification catalog.

Builders are deterministic: the same parameters and seed produce
bit-identical objects.  The catalog pairs each built scheme with the checker
verdicts it is expected to produce, so it doubles as an end-to-end test
fixture for the whole toolkit.
"""

from dataclasses import dataclass
from itertools import product
from typing import Any, Mapping, Sequence

import numpy as np

from .checks import (
    INAPPLICABLE,
    PASS,
    FAIL,
    Report,
    check_completeness,
    check_security,
    check_theorem1,
)
from .layout import Layout, axis_permutation
from .linalg import basis_ket, dagger, haar_ket, haar_unitary, kron
from .localiser import LocalisationProblem
from .scheme import Evaluation, FootprintOp, QheScheme, RegisterState

_CONSTRUCTED_STREAM = 0x5EC
_LEAKY_STREAM = 0x1EAC

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_FACTORS = {"I": PAULI_I, "X": PAULI_X, "Z": PAULI_Z, "XZ": PAULI_X @ PAULI_Z}


def pauli_word_matrix(word: str) -> np.ndarray:
    """Matrix for a word like "X" or "X.XZ": per-qubit X^a Z^b factors joined by dots."""
    tokens = word.split(".")
    try:
        factors = [_FACTORS[token] for token in tokens]
    except KeyError as exc:
        raise ValueError(f"unknown factor {exc.args[0]!r} in word {word!r}") from exc
    return kron(*factors)


def pauli_words(n: int) -> tuple[str, ...]:
    """All 4^n phase-free products of bit and phase flips on n qubits."""
    return tuple(".".join(combo) for combo in product(("I", "X", "Z", "XZ"), repeat=n))


def _swap_matrix(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for h in range(d):
            s[h * d + i, i * d + h] = 1.0
    return s


def build_identity_scheme(n: int) -> QheScheme:
    """No encryption at all: the plaintext ships to Bob in the clear.

    Perfectly complete, maximally insecure; the negative control for the
    security checker.
    """
    if not 1 <= n <= 3:
        raise ValueError(f"identity scheme supports 1..3 qubits, got {n}")
    d = 2**n
    layout = Layout((("input", d),))
    identity = np.eye(d, dtype=complex)
    evaluations = [
        Evaluation(word, FootprintOp(("input",), pauli_word_matrix(word)), pauli_word_matrix(word))
        for word in pauli_words(n)
    ]
    if n >= 2:
        swap01 = kron(_swap_matrix(2), np.eye(2 ** (n - 2)))
        evaluations.append(Evaluation("SWAP01", FootprintOp(("input",), swap01), swap01))
    return QheScheme(
        name=f"identity(n={n})",
        layout=layout,
        input_label="input",
        output_label="input",
        bob_initial=(),
        key_state=None,
        resource_state=None,
        ancilla_states=(),
        encrypt_op=FootprintOp(("input",), identity),
        decrypt_op=FootprintOp(("input",), identity),
        evaluations=tuple(evaluations),
        send_to_bob=("input",),
        return_to_alice=("input",),
    )


def build_qotp_scheme(n: int) -> QheScheme:
    """Quantum one-time pad with a purified uniform key.

    The key register holds a uniform superposition over all 4^n bit/phase
    flip choices, entangled with a purifier Alice retains; encryption applies
    the key-controlled flip to the plaintext, which then ships to Bob.  The
    evaluation set is the 4^n phase-free flip words, which commute with the
    pad up to phases that cancel in the reduced output.
    """
    if not 1 <= n <= 2:
        raise ValueError(f"one-time-pad scheme supports 1..2 qubits, got {n}")
    d = 2**n
    keys = 4**n
    layout = Layout((("input", d), ("key", keys), ("key_purifier", keys)))

    key_ket = np.zeros(keys * keys, dtype=complex)
    for k in range(keys):
        key_ket[k * keys + k] = 1.0 / d

    def pad(k: int) -> np.ndarray:
        a, b = k >> n, k & (d - 1)
        factors = [
            np.linalg.matrix_power(PAULI_X, (a >> (n - 1 - i)) & 1)
            @ np.linalg.matrix_power(PAULI_Z, (b >> (n - 1 - i)) & 1)
            for i in range(n)
        ]
        return kron(*factors)

    encrypt = np.zeros((d * keys, d * keys), dtype=complex)
    decrypt = np.zeros((d * keys, d * keys), dtype=complex)
    for k in range(keys):
        marker = np.zeros((keys, keys))
        marker[k, k] = 1.0
        encrypt += kron(pad(k), marker)
        decrypt += kron(dagger(pad(k)), marker)

    evaluations = tuple(
        Evaluation(word, FootprintOp(("input",), pauli_word_matrix(word)), pauli_word_matrix(word))
        for word in pauli_words(n)
    )
    return QheScheme(
        name=f"qotp(n={n})",
        layout=layout,
        input_label="input",
        output_label="input",
        bob_initial=(),
        key_state=RegisterState(("key", "key_purifier"), key_ket),
        resource_state=None,
        ancilla_states=(),
        encrypt_op=FootprintOp(("input", "key"), encrypt),
        decrypt_op=FootprintOp(("input", "key"), decrypt),
        evaluations=evaluations,
        send_to_bob=("input",),
        return_to_alice=("input",),
    )


def build_tag_evaluate_scheme(n: int, circuit_set: Sequence[Any]) -> QheScheme:
    """Keep the plaintext home, ship a dummy, and have Bob return a circuit tag.

    Encryption swaps the plaintext into a retained register and sends the
    freed register to Bob in a fixed state; each evaluation writes its index
    onto a tag register that returns to Alice, whose decryption applies the
    tagged circuit directly.  Secure by construction, and the tag register
    realises the log2|S| message cost with exactly orthogonal tag states.

    circuit_set entries are flip words ("X", "I.XZ", ...) or (id, matrix)
    pairs for arbitrary targets.
    """
    if not 1 <= n <= 2:
        raise ValueError(f"tag-evaluate scheme supports 1..2 qubits, got {n}")
    if not 1 <= len(circuit_set) <= 16:
        raise ValueError(f"circuit set size must be 1..16, got {len(circuit_set)}")
    d = 2**n
    circuits: list[tuple[str, np.ndarray]] = []
    for entry in circuit_set:
        if isinstance(entry, str):
            circuits.append((entry, pauli_word_matrix(entry)))
        else:
            cid, matrix = entry
            circuits.append((str(cid), np.asarray(matrix, dtype=complex)))
    tag_dim = max(2, len(circuits))
    layout = Layout((("input", d), ("hold", d), ("tag", tag_dim)))

    decrypt = np.zeros((tag_dim * d, tag_dim * d), dtype=complex)
    for i in range(tag_dim):
        marker = np.zeros((tag_dim, tag_dim))
        marker[i, i] = 1.0
        block = circuits[i][1] if i < len(circuits) else np.eye(d)
        decrypt += kron(marker, block)

    evaluations = []
    for i, (cid, target) in enumerate(circuits):
        shift = np.zeros((tag_dim, tag_dim), dtype=complex)
        for m in range(tag_dim):
            shift[(m + i) % tag_dim, m] = 1.0
        evaluations.append(Evaluation(cid, FootprintOp(("tag",), shift), target))

    return QheScheme(
        name=f"tag-evaluate(n={n},S={','.join(cid for cid, _ in circuits)})",
        layout=layout,
        input_label="input",
        output_label="hold",
        bob_initial=("tag",),
        key_state=None,
        resource_state=None,
        ancilla_states=(
            RegisterState(("hold",), basis_ket(d, 0)),
            RegisterState(("tag",), basis_ket(tag_dim, 0)),
        ),
        encrypt_op=FootprintOp(("input", "hold"), _swap_matrix(d)),
        decrypt_op=FootprintOp(("tag", "hold"), decrypt),
        evaluations=tuple(evaluations),
        send_to_bob=("input",),
        return_to_alice=("tag",),
    )


def build_constructed_secure_problem(
    dims: tuple[int, int, int], seed: int
) -> LocalisationProblem:
    """A localisation instance that satisfies zero leakage by construction.

    The unitary first scrambles (aux, remote) by a seeded Haar unitary, then
    scrambles the whole retained side, so the remote reduced state can only
    depend on the fixed aux/remote kets.
    """
    d1, d2, db = (int(x) for x in dims)
    if d1 * d2 * db > 2**12:
        raise ValueError(f"total dimension {d1 * d2 * db} exceeds the 2^12 generator guard")
    rng = np.random.default_rng([_CONSTRUCTED_STREAM, seed])
    retained = haar_unitary(rng, d1 * d2)
    mixer = haar_unitary(rng, d2 * db)
    aux = haar_ket(rng, d2)
    remote = haar_ket(rng, db)
    unitary = kron(retained, np.eye(db)) @ kron(np.eye(d1), mixer)
    layout = Layout((("A1", d1), ("A2", d2), ("B", db)))
    return LocalisationProblem(layout, unitary, aux, remote)


def build_leaky_problem(dims: tuple[int, int, int], seed: int) -> LocalisationProblem:
    """A maximally leaking instance: the input is swapped into the remote side.

    The data register is exchanged with an equal-dimension slice of the
    remote register, then seeded Haar unitaries scramble each side; local
    scrambling cannot undo the handover, so orthogonal inputs stay perfectly
    distinguishable remotely.
    """
    d1, d2, db = (int(x) for x in dims)
    if db % d1 != 0:
        raise ValueError(f"data dimension {d1} must divide remote dimension {db}")
    rng = np.random.default_rng([_LEAKY_STREAM, seed])
    scramble_retained = haar_unitary(rng, d1 * d2)
    scramble_remote = haar_unitary(rng, db)
    aux = haar_ket(rng, d2)
    remote = haar_ket(rng, db)
    rest = db // d1
    swap = axis_permutation((d1, d2, d1, rest), (2, 1, 0, 3))
    unitary = kron(scramble_retained, scramble_remote)[:, swap]
    layout = Layout((("A1", d1), ("A2", d2), ("B", db)))
    return LocalisationProblem(layout, unitary, aux, remote)


def build_controlled_flip_gate(n: int = 1) -> tuple[np.ndarray, Layout]:
    """Gate array applying the program-indexed flip word to the data register."""
    d = 2**n
    words = pauli_words(n)
    gate = np.zeros((len(words) * d, len(words) * d), dtype=complex)
    for k, word in enumerate(words):
        marker = np.zeros((len(words), len(words)))
        marker[k, k] = 1.0
        gate += kron(marker, pauli_word_matrix(word))
    return gate, Layout((("program", len(words)), ("data", d)))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: str
    params: Mapping[str, Any]
    expected: Mapping[str, str]


def catalog() -> tuple[CatalogEntry, ...]:
    """Built-in schemes with the verdicts every checker is expected to return."""
    return (
        CatalogEntry(
            "identity-1",
            "identity",
            {"n": 1},
            {"security": FAIL, "completeness": PASS, "theorem1": INAPPLICABLE},
        ),
        CatalogEntry(
            "identity-2",
            "identity",
            {"n": 2},
            {"security": FAIL, "completeness": PASS, "theorem1": INAPPLICABLE},
        ),
        CatalogEntry(
            "qotp-1",
            "qotp",
            {"n": 1},
            {"security": PASS, "completeness": PASS, "theorem1": INAPPLICABLE},
        ),
        CatalogEntry(
            "tag-evaluate-ixz",
            "tag-evaluate",
            {"n": 1, "circuit_set": ("I", "X", "Z")},
            {"security": PASS, "completeness": PASS, "theorem1": PASS},
        ),
        CatalogEntry(
            "tag-evaluate-pauli",
            "tag-evaluate",
            {"n": 1, "circuit_set": ("I", "X", "Z", "XZ")},
            {"security": PASS, "completeness": PASS, "theorem1": PASS},
        ),
        CatalogEntry(
            "tag-evaluate-2q",
            "tag-evaluate",
            {"n": 2, "circuit_set": ("I.I", "X.I", "Z.Z", "X.XZ")},
            {"security": PASS, "completeness": PASS, "theorem1": PASS},
        ),
    )


_SCHEME_BUILDERS = {
    "identity": build_identity_scheme,
    "qotp": build_qotp_scheme,
    "tag-evaluate": build_tag_evaluate_scheme,
}

_PROBLEM_BUILDERS = {
    "constructed-secure": build_constructed_secure_problem,
    "leaky": build_leaky_problem,
}


def build_scheme(builder: str, **params: Any) -> QheScheme:
    if builder not in _SCHEME_BUILDERS:
        raise ValueError(
            f"unknown scheme builder {builder!r}; available: {sorted(_SCHEME_BUILDERS)}"
        )
    return _SCHEME_BUILDERS[builder](**params)


def build_problem(builder: str, **params: Any) -> LocalisationProblem:
    if builder not in _PROBLEM_BUILDERS:
        raise ValueError(
            f"unknown problem builder {builder!r}; available: {sorted(_PROBLEM_BUILDERS)}"
        )
    return _PROBLEM_BUILDERS[builder](**params)


def run_catalog_checks(entry: CatalogEntry) -> dict[str, Report]:
    """All three scheme checkers on one catalog entry, sharing precondition runs."""
    scheme = build_scheme(entry.builder, **entry.params)
    security = check_security(scheme)
    completeness = check_completeness(scheme)
    theorem1 = check_theorem1(
        scheme,
        basis_ket(scheme.input_dim, 0),
        security_report=security,
        completeness_report=completeness,
    )
    return {"security": security, "completeness": completeness, "theorem1": theorem1}


def verify_catalog() -> tuple[bool, list[tuple[str, str, str, str]]]:
    """Compare every entry's actual verdicts with its expectations.

    Returns (all_match, rows) with one (entry, checker, expected, actual)
    row per comparison.
    """
    rows = []
    all_match = True
    for entry in catalog():
        reports = run_catalog_checks(entry)
        for checker in sorted(entry.expected):
            actual = reports[checker].verdict
            rows.append((entry.name, checker, entry.expected[checker], actual))
            all_match = all_match and actual == entry.expected[checker]
    return all_match, rows

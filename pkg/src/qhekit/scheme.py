"""Four-component homomorphic-encryption scheme model and pipeline simulator.

A scheme consists of a key state, an encryption unitary, a family of
evaluation unitaries with their intended plaintext-space targets, and a
decryption unitary, wired over an explicit register layout.  Register
ownership is tracked through the run: Alice holds everything except Bob's
initial registers, hands over send_to_bob after encrypting, and receives
return_to_alice (the message) after evaluation.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .layout import (
    Layout,
    apply_operator,
    assemble_ket,
    axis_permutation,
    embed_operator,
)
from .linalg import as_ket, as_square, basis_ket, is_unitary
from .localiser import LocalisationProblem
from .qinfo import DensityOp
from .tolerances import DEFAULT_TOLERANCES

_MAILBOX_LABEL = "__mailbox"


@dataclass(frozen=True)
class RegisterState:
    """A fixed pure state on one or more named registers."""

    labels: tuple[str, ...]
    ket: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        object.__setattr__(self, "ket", as_ket(self.ket, f"state on {self.labels}"))


@dataclass(frozen=True)
class FootprintOp:
    """A unitary together with the ordered registers it acts on."""

    labels: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        m = as_square(self.matrix, f"operator on {self.labels}")
        if not is_unitary(m, DEFAULT_TOLERANCES.unitarity):
            raise ValueError(f"operator on {self.labels} is not unitary within tolerance")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class Evaluation:
    """One permitted circuit: Bob's evaluation unitary and its plaintext target."""

    circuit_id: str
    operator: FootprintOp
    target: np.ndarray

    def __post_init__(self) -> None:
        t = as_square(self.target, f"target of {self.circuit_id!r}")
        if not is_unitary(t, DEFAULT_TOLERANCES.unitarity):
            raise ValueError(f"target of {self.circuit_id!r} is not unitary within tolerance")
        object.__setattr__(self, "target", t)


@dataclass(frozen=True)
class QheScheme:
    name: str
    layout: Layout
    input_label: str
    output_label: str
    bob_initial: tuple[str, ...]
    key_state: RegisterState | None
    resource_state: RegisterState | None
    ancilla_states: tuple[RegisterState, ...]
    encrypt_op: FootprintOp
    decrypt_op: FootprintOp
    evaluations: tuple[Evaluation, ...]
    send_to_bob: tuple[str, ...]
    return_to_alice: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bob_initial", self.layout.ordered(self.bob_initial))
        object.__setattr__(self, "send_to_bob", self.layout.ordered(self.send_to_bob))
        object.__setattr__(self, "return_to_alice", self.layout.ordered(self.return_to_alice))
        object.__setattr__(self, "ancilla_states", tuple(self.ancilla_states))
        object.__setattr__(self, "evaluations", tuple(self.evaluations))

        labels = set(self.layout.labels)
        if self.input_label not in labels:
            raise ValueError(f"input register {self.input_label!r} not in layout")
        if self.output_label not in labels:
            raise ValueError(f"output register {self.output_label!r} not in layout")
        if self.input_label in self.bob_initial:
            raise ValueError("the plaintext register cannot start on Bob's side")

        covered: list[str] = []
        for block in self.fixed_states:
            covered.extend(block.labels)
            if block.ket.size != self.layout.dim_of(block.labels):
                raise ValueError(
                    f"state on {block.labels} has dimension {block.ket.size}, "
                    f"expected {self.layout.dim_of(block.labels)}"
                )
        expected = sorted(labels - {self.input_label})
        if sorted(covered) != expected:
            raise ValueError(
                f"fixed states cover {sorted(covered)}, expected every register "
                f"except the input: {expected}"
            )

        if not self.evaluations:
            raise ValueError("a scheme needs at least one evaluation")
        ids = [e.circuit_id for e in self.evaluations]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate circuit ids in {ids}")
        d_in = self.input_dim
        for ev in self.evaluations:
            if ev.target.shape != (d_in, d_in):
                raise ValueError(
                    f"target of {ev.circuit_id!r} has shape {ev.target.shape}, "
                    f"expected plaintext dimension {d_in}"
                )

        self._check_footprint(self.encrypt_op, self.alice_initial, "encryption")
        if not set(self.send_to_bob) <= set(self.alice_initial):
            raise ValueError("send_to_bob must be registers Alice holds before t1")
        if not self.bob_t1:
            raise ValueError("Bob holds nothing at t1; there is no ciphertext to evaluate")
        for ev in self.evaluations:
            self._check_footprint(ev.operator, self.bob_t1, f"evaluation {ev.circuit_id!r}")
        if not self.return_to_alice:
            raise ValueError("return_to_alice is empty; there is no message")
        if not set(self.return_to_alice) <= set(self.bob_t1):
            raise ValueError("return_to_alice must be registers Bob holds at t1")
        self._check_footprint(self.decrypt_op, self.alice_t2, "decryption")
        if self.output_label not in self.alice_t2:
            raise ValueError(f"output register {self.output_label!r} is not with Alice at t2")

    def _check_footprint(self, op: FootprintOp, owned: Sequence[str], what: str) -> None:
        missing = set(op.labels) - set(owned)
        if missing:
            raise ValueError(
                f"{what} operator touches {sorted(missing)} which the owner "
                f"does not hold at that time"
            )
        if op.matrix.shape[0] != self.layout.dim_of(op.labels):
            raise ValueError(
                f"{what} operator dimension {op.matrix.shape[0]} does not match "
                f"its footprint {op.labels}"
            )

    @property
    def fixed_states(self) -> tuple[RegisterState, ...]:
        blocks: list[RegisterState] = []
        if self.key_state is not None:
            blocks.append(self.key_state)
        if self.resource_state is not None:
            blocks.append(self.resource_state)
        blocks.extend(self.ancilla_states)
        return tuple(blocks)

    @property
    def input_dim(self) -> int:
        return self.layout.dim_of([self.input_label])

    @property
    def alice_initial(self) -> tuple[str, ...]:
        return self.layout.complement(self.bob_initial)

    @property
    def bob_t1(self) -> tuple[str, ...]:
        return self.layout.ordered(set(self.bob_initial) | set(self.send_to_bob))

    @property
    def alice_t1(self) -> tuple[str, ...]:
        return self.layout.complement(self.bob_t1)

    @property
    def alice_t2(self) -> tuple[str, ...]:
        return self.layout.ordered(set(self.alice_t1) | set(self.return_to_alice))

    @property
    def bob_t2(self) -> tuple[str, ...]:
        return self.layout.complement(self.alice_t2)

    @property
    def circuit_ids(self) -> tuple[str, ...]:
        return tuple(e.circuit_id for e in self.evaluations)

    def evaluation(self, circuit_id: str) -> Evaluation:
        for ev in self.evaluations:
            if ev.circuit_id == circuit_id:
                return ev
        raise KeyError(f"unknown circuit {circuit_id!r}; scheme offers {self.circuit_ids}")

    def initial_ket(self, psi_in: np.ndarray) -> np.ndarray:
        psi_in = as_ket(psi_in, "plaintext")
        if psi_in.size != self.input_dim:
            raise ValueError(
                f"plaintext dimension {psi_in.size} != input register dimension {self.input_dim}"
            )
        blocks: list[tuple[Sequence[str], np.ndarray]] = [((self.input_label,), psi_in)]
        blocks.extend((b.labels, b.ket) for b in self.fixed_states)
        return assemble_ket(self.layout, blocks)

    def encrypted_ket(self, psi_in: np.ndarray) -> np.ndarray:
        return apply_operator(
            self.initial_ket(psi_in), self.layout, self.encrypt_op.matrix, self.encrypt_op.labels
        )

    def ciphertext(self, psi_in: np.ndarray) -> DensityOp:
        """Bob's reduced state at t1 for the given plaintext."""
        return DensityOp.reduced(self.encrypted_ket(psi_in), self.layout, self.bob_t1)


@dataclass(frozen=True)
class PipelineTrace:
    """Full record of one encrypt -> evaluate -> decrypt run.

    The global state stays pure throughout; the kets are the primary
    carriers and the full-space density operators are derived on demand.
    """

    circuit_id: str
    input_ket: np.ndarray
    layout: Layout
    alice_t1: tuple[str, ...]
    bob_t1: tuple[str, ...]
    alice_t2: tuple[str, ...]
    bob_t2: tuple[str, ...]
    ket_t1: np.ndarray
    ket_t2: np.ndarray
    ket_final: np.ndarray
    rho_bob_t1: DensityOp
    rho_message: DensityOp
    output: DensityOp

    @cached_property
    def state_t1(self) -> DensityOp:
        return DensityOp.from_ket(self.layout, self.ket_t1)

    @cached_property
    def state_t2(self) -> DensityOp:
        return DensityOp.from_ket(self.layout, self.ket_t2)

    @cached_property
    def alice_t2_state(self) -> DensityOp:
        """Alice's joint (retained + message) state at t2, before decryption."""
        return DensityOp.reduced(self.ket_t2, self.layout, self.alice_t2)

    @cached_property
    def alice_final(self) -> DensityOp:
        """Alice's full state after decryption."""
        return DensityOp.reduced(self.ket_final, self.layout, self.alice_t2)


def run_pipeline(scheme: QheScheme, circuit_id: str, psi_in: np.ndarray) -> PipelineTrace:
    """Simulate one full run of the scheme on the given plaintext.

    Assembles the global initial state, applies the encryption unitary,
    records t1 with ownership, applies the chosen evaluation on Bob's
    registers, records t2, applies the decryption unitary on Alice's
    registers, and reduces onto the output register.
    """
    ev = scheme.evaluation(circuit_id)
    ket_t1 = scheme.encrypted_ket(psi_in)
    ket_t2 = apply_operator(ket_t1, scheme.layout, ev.operator.matrix, ev.operator.labels)
    ket_final = apply_operator(
        ket_t2, scheme.layout, scheme.decrypt_op.matrix, scheme.decrypt_op.labels
    )
    return PipelineTrace(
        circuit_id=circuit_id,
        input_ket=as_ket(psi_in, "plaintext"),
        layout=scheme.layout,
        alice_t1=scheme.alice_t1,
        bob_t1=scheme.bob_t1,
        alice_t2=scheme.alice_t2,
        bob_t2=scheme.bob_t2,
        ket_t1=ket_t1,
        ket_t2=ket_t2,
        ket_final=ket_final,
        rho_bob_t1=DensityOp.reduced(ket_t1, scheme.layout, scheme.bob_t1),
        rho_message=DensityOp.reduced(ket_t2, scheme.layout, scheme.return_to_alice),
        output=DensityOp.reduced(ket_final, scheme.layout, [scheme.output_label]),
    )


def localisation_problem_at_t1(scheme: QheScheme) -> LocalisationProblem:
    """Cast the scheme's situation at t1 as a localisation problem.

    The handover of send_to_bob is modelled as a swap with a fresh mailbox
    register on Bob's side, so the retained/sent split is a fixed bipartition
    acted on by a single unitary: data = the plaintext register, aux = every
    other register Alice retains, remote = Bob's initial registers plus the
    mailbox.  Fixed initial states must not straddle the retained/remote cut
    (a shared entangled resource is outside this product form).
    """
    aux_labels = tuple(l for l in scheme.alice_initial if l != scheme.input_label)
    if not aux_labels:
        raise ValueError(
            "the scheme retains nothing besides the plaintext register; "
            "there is no aux factor to localise into"
        )
    for block in scheme.fixed_states:
        in_aux = set(block.labels) <= set(aux_labels)
        in_remote = set(block.labels) <= set(scheme.bob_initial)
        if not (in_aux or in_remote):
            raise ValueError(
                f"fixed state on {block.labels} straddles the retained/remote cut; "
                "localisation requires a product across it"
            )

    mail_dim = scheme.layout.dim_of(scheme.send_to_bob)
    extended = Layout(scheme.layout.registers + ((_MAILBOX_LABEL, mail_dim),))
    dims = extended.dims
    n = len(dims)

    full_encrypt = embed_operator(scheme.encrypt_op.matrix, extended, scheme.encrypt_op.labels)

    # Swap the sent registers with the mailbox: exchange their digit groups.
    send_pos = [extended.position(l) for l in scheme.send_to_bob]
    send_dims = [dims[p] for p in send_pos]
    split_dims = list(dims[:-1]) + send_dims
    axes = list(range(len(split_dims)))
    for i, p in enumerate(send_pos):
        axes[p], axes[n - 1 + i] = axes[n - 1 + i], axes[p]
    swap = axis_permutation(split_dims, axes)
    unitary = full_encrypt[swap, :]
    del full_encrypt

    # Reorder registers into (data, aux..., remote...) and merge the groups.
    remote_labels = scheme.bob_initial + (_MAILBOX_LABEL,)
    new_order = (scheme.input_label,) + aux_labels + remote_labels
    order = [extended.position(l) for l in new_order]
    if order != list(range(n)):
        perm = axis_permutation(dims, order)
        unitary = unitary[np.ix_(perm, perm)]

    aux_dim = extended.dim_of(aux_labels)
    remote_dim = extended.dim_of(remote_labels)
    problem_layout = Layout((("A1", scheme.input_dim), ("A2", aux_dim), ("B", remote_dim)))

    aux_blocks = [(b.labels, b.ket) for b in scheme.fixed_states if set(b.labels) <= set(aux_labels)]
    aux_state = assemble_ket(extended.restricted(aux_labels), aux_blocks)

    remote_blocks = [
        (b.labels, b.ket) for b in scheme.fixed_states if set(b.labels) <= set(scheme.bob_initial)
    ]
    remote_blocks.append(((_MAILBOX_LABEL,), basis_ket(mail_dim, 0)))
    remote_state = assemble_ket(extended.restricted(remote_labels), remote_blocks)

    return LocalisationProblem(problem_layout, unitary, aux_state, remote_state)

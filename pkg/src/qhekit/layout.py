"""Register layouts over small multi-register Hilbert spaces.

A Layout is an ordered list of (label, dim) registers.  The first register
is the most significant digit of the flat mixed-radix index, which matches
numpy's C-order reshape, so a flat ket of length prod(dims) reshapes to one
axis per register with no reordering.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg import as_ket, as_square, kron
from .tolerances import DEFAULT_TOLERANCES

MAX_TOTAL_DIM = 2**14


@dataclass(frozen=True)
class Layout:
    registers: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        regs = tuple((str(label), int(dim)) for label, dim in self.registers)
        object.__setattr__(self, "registers", regs)
        if not regs:
            raise ValueError("layout needs at least one register")
        labels = [label for label, _ in regs]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate register labels in {labels}")
        for label, dim in regs:
            if dim < 2:
                raise ValueError(f"register {label!r} has dimension {dim}, need >= 2")
        if self.dim > MAX_TOTAL_DIM:
            raise ValueError(f"total dimension {self.dim} exceeds the {MAX_TOTAL_DIM} guard")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.registers)

    @property
    def dim(self) -> int:
        return int(np.prod([dim for _, dim in self.registers], dtype=object))

    def position(self, label: str) -> int:
        for i, (name, _) in enumerate(self.registers):
            if name == label:
                return i
        raise ValueError(f"label {label!r} not in layout {self.labels}")

    def positions(self, labels: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.position(label) for label in labels)

    def dim_of(self, labels: Iterable[str]) -> int:
        return int(np.prod([self.registers[p][1] for p in self.positions(labels)], dtype=object))

    def ordered(self, labels: Iterable[str]) -> tuple[str, ...]:
        """The given labels, sorted into layout order."""
        wanted = set(labels)
        unknown = wanted - set(self.labels)
        if unknown:
            raise ValueError(f"labels {sorted(unknown)} not in layout {self.labels}")
        return tuple(label for label in self.labels if label in wanted)

    def complement(self, labels: Iterable[str]) -> tuple[str, ...]:
        wanted = set(labels)
        unknown = wanted - set(self.labels)
        if unknown:
            raise ValueError(f"labels {sorted(unknown)} not in layout {self.labels}")
        return tuple(label for label in self.labels if label not in wanted)

    def restricted(self, labels: Iterable[str]) -> "Layout":
        keep = self.ordered(labels)
        return Layout(tuple((label, dim) for label, dim in self.registers if label in keep))


def axis_permutation(dims: Sequence[int], axes: Sequence[int]) -> np.ndarray:
    """Flat index map for transposing mixed-radix digits.

    Returns perm such that psi.reshape(dims).transpose(axes).ravel() equals
    psi[perm]; i.e. the permutation unitary P with (P psi)[i] = psi[perm[i]].
    """
    return np.arange(int(np.prod(dims))).reshape(tuple(dims)).transpose(tuple(axes)).ravel()


def _grouped_axes(layout: Layout, first: Sequence[str]) -> tuple[list[int], list[int]]:
    front = [layout.position(label) for label in layout.ordered(first)]
    back = [p for p in range(len(layout.registers)) if p not in front]
    return front, back


def assemble_ket(layout: Layout, blocks: Sequence[tuple[Sequence[str], np.ndarray]]) -> np.ndarray:
    """Build the full ket from per-block kets covering every register once.

    Each block is (labels, ket) with the ket indexed in the listed label
    order; blocks may appear in any order and may span several registers.
    """
    seen: list[str] = []
    for labels, _ in blocks:
        seen.extend(labels)
    if sorted(seen) != sorted(layout.labels):
        raise ValueError(
            f"blocks cover registers {sorted(seen)}, layout has {sorted(layout.labels)}"
        )
    kets = []
    concat_labels: list[str] = []
    for labels, ket in blocks:
        ket = as_ket(ket, where=f"block {tuple(labels)}")
        if ket.size != layout.dim_of(labels):
            raise ValueError(
                f"block {tuple(labels)} has dimension {ket.size}, "
                f"expected {layout.dim_of(labels)}"
            )
        kets.append(ket)
        concat_labels.extend(labels)
    full = kron(*kets)
    # Permute from the concatenated block order into layout order.
    concat_dims = [layout.registers[layout.position(label)][1] for label in concat_labels]
    axes = [concat_labels.index(label) for label in layout.labels]
    return full.reshape(concat_dims).transpose(axes).ravel()


def apply_operator(
    psi: np.ndarray, layout: Layout, op: np.ndarray, labels: Sequence[str]
) -> np.ndarray:
    """Apply an operator living on the given registers to a full-space ket."""
    op = as_square(op, f"operator on {tuple(labels)}")
    pos = [layout.position(label) for label in labels]
    if len(set(pos)) != len(pos):
        raise ValueError(f"repeated labels in footprint {tuple(labels)}")
    sub = [layout.registers[p][1] for p in pos]
    block = int(np.prod(sub))
    if op.shape != (block, block):
        raise ValueError(f"operator shape {op.shape} does not match footprint dimension {block}")
    dims = layout.dims
    t = np.tensordot(
        op.reshape(sub + sub),
        np.asarray(psi, dtype=complex).reshape(dims),
        axes=(list(range(len(sub), 2 * len(sub))), pos),
    )
    rest = [p for p in range(len(dims)) if p not in pos]
    inv = np.argsort(pos + rest)
    return t.transpose(inv).ravel()


def embed_operator(op: np.ndarray, layout: Layout, labels: Sequence[str]) -> np.ndarray:
    """Expand an operator on the given registers to the full space as a dense matrix."""
    op = as_square(op, f"operator on {tuple(labels)}")
    pos = [layout.position(label) for label in labels]
    sub = [layout.registers[p][1] for p in pos]
    block = int(np.prod(sub))
    if op.shape != (block, block):
        raise ValueError(f"operator shape {op.shape} does not match footprint dimension {block}")
    rest = [p for p in range(len(layout.registers)) if p not in pos]
    rest_dim = int(np.prod([layout.dims[p] for p in rest], dtype=object))
    grouped = kron(op, np.eye(rest_dim))
    if pos + rest == list(range(len(layout.registers))):
        return grouped
    perm = axis_permutation(layout.dims, pos + rest)
    full = np.empty((layout.dim, layout.dim), dtype=complex)
    full[np.ix_(perm, perm)] = grouped
    return full


def partial_trace(rho: np.ndarray, layout: Layout, keep: Iterable[str]) -> np.ndarray:
    """Reduced operator on the kept registers, in layout order.

    keep may be empty, in which case the full trace is returned as a 1x1 matrix.
    """
    rho = as_square(rho, "density operator")
    if rho.shape[0] != layout.dim:
        raise ValueError(f"operator dimension {rho.shape[0]} != layout dimension {layout.dim}")
    kept = layout.ordered(keep)
    dims = layout.dims
    n = len(dims)
    kept_pos = [layout.position(label) for label in kept]
    row = list(range(n))
    col = [n + i for i in range(n)]
    for p in range(n):
        if p not in kept_pos:
            col[p] = row[p]
    out = [row[p] for p in kept_pos] + [col[p] for p in kept_pos]
    reduced = np.einsum(rho.reshape(dims + dims), row + col, out)
    d = int(np.prod([dims[p] for p in kept_pos], dtype=object)) if kept_pos else 1
    return np.asarray(reduced, dtype=complex).reshape(d, d)


def reduced_from_ket(psi: np.ndarray, layout: Layout, keep: Iterable[str]) -> np.ndarray:
    """Reduced density matrix of a pure state without forming the full projector."""
    kept = layout.ordered(keep)
    if not kept:
        return np.array([[np.vdot(psi, psi)]], dtype=complex)
    front, back = _grouped_axes(layout, kept)
    d_keep = int(np.prod([layout.dims[p] for p in front], dtype=object))
    m = np.asarray(psi, dtype=complex).reshape(layout.dims).transpose(front + back)
    m = m.reshape(d_keep, -1)
    return m @ m.conj().T


def schmidt(
    psi: np.ndarray,
    layout: Layout,
    left: Iterable[str],
    tol: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt decomposition of a pure state across a register bipartition.

    Returns (coefficients, left_vectors, right_vectors): descending positive
    coefficients, and orthonormal vectors as matrix columns, so that
    psi = sum_k coefficients[k] * kron(left[:, k], right[:, k]).
    """
    psi = as_ket(psi, "state")
    if psi.size != layout.dim:
        raise ValueError(f"state dimension {psi.size} != layout dimension {layout.dim}")
    left_labels = layout.ordered(left)
    right_labels = layout.complement(left_labels)
    if not left_labels or not right_labels:
        raise ValueError("both sides of the cut must be non-empty")
    if tol is None:
        # Squared coefficients are reduced-state eigenvalues; align thresholds.
        tol = float(np.sqrt(DEFAULT_TOLERANCES.rank))
    front, back = _grouped_axes(layout, left_labels)
    d_left = int(np.prod([layout.dims[p] for p in front], dtype=object))
    m = psi.reshape(layout.dims).transpose(front + back).reshape(d_left, -1)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = max(1, int(np.sum(s > tol)))
    u, s, vh = u[:, :r], s[:r], vh[:r, :]
    # Fix the joint phase freedom per Schmidt pair for determinism.
    idx = np.argmax(np.abs(u), axis=0)
    lead = u[idx, np.arange(r)]
    mags = np.abs(lead)
    phases = np.where(mags > 0, lead / np.where(mags > 0, mags, 1.0), 1.0)
    return s.astype(float), u * phases.conj(), (vh.T * phases)

"""Quantum-information functionals over density operators.

Entropies are in bits.  All functions are pure; DensityOp values are
immutable and safe to share between threads.
"""

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .layout import Layout, axis_permutation, partial_trace, reduced_from_ket
from .linalg import as_ket, as_square, dagger, eig_hermitian, kron, trace_distance
from .tolerances import DEFAULT_TOLERANCES

# Marginal eigenvalues below this are treated as numerically zero support
# when projecting a product-deviation computation onto marginal supports.
_SUPPORT_CUTOFF = 1e-12
# Above this total dimension the projected route is cheaper than dense.
_DENSE_LIMIT = 64


@dataclass(frozen=True)
class DensityOp:
    """A validated density operator together with its register layout."""

    layout: Layout
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = as_square(self.matrix, "density operator")
        if m.shape[0] != self.layout.dim:
            raise ValueError(
                f"matrix dimension {m.shape[0]} != layout dimension {self.layout.dim}"
            )
        herm = float(np.max(np.abs(m - dagger(m))))
        if herm > DEFAULT_TOLERANCES.hermiticity:
            raise ValueError(f"density operator is not Hermitian (residual {herm:.3e})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density operator has trace {tr!r}, expected 1")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.layout.dim

    @classmethod
    def from_ket(cls, layout: Layout, psi: np.ndarray) -> "DensityOp":
        psi = as_ket(psi, "state")
        return cls(layout, np.outer(psi, psi.conj()))

    def reduce(self, keep: Iterable[str]) -> "DensityOp":
        kept = self.layout.ordered(keep)
        if not kept:
            raise ValueError("cannot reduce onto an empty register set")
        return DensityOp(self.layout.restricted(kept), partial_trace(self.matrix, self.layout, kept))

    @classmethod
    def reduced(cls, psi: np.ndarray, layout: Layout, keep: Iterable[str]) -> "DensityOp":
        """Reduction of a pure full-space state onto the kept registers."""
        kept = layout.ordered(keep)
        if not kept:
            raise ValueError("cannot reduce onto an empty register set")
        return cls(layout.restricted(kept), reduced_from_ket(psi, layout, kept))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


@dataclass(frozen=True)
class SupportProjector:
    layout: Layout
    projector: np.ndarray
    rank: int


def von_neumann_entropy(rho: DensityOp, rank_tol: float | None = None) -> float:
    """Entropy in bits; eigenvalues at or below the rank threshold are dropped."""
    if rank_tol is None:
        rank_tol = DEFAULT_TOLERANCES.rank
    evals = np.linalg.eigvalsh(rho.matrix)
    evals = evals[evals > rank_tol]
    s = float(-np.sum(evals * np.log2(evals)))
    return min(max(s, 0.0), float(np.log2(rho.dim)))


def mutual_information(rho: DensityOp, side_a: Iterable[str], rank_tol: float | None = None) -> float:
    """S(A) + S(B) - S(AB) across the register bipartition (side_a | rest)."""
    a = rho.layout.ordered(side_a)
    b = rho.layout.complement(a)
    if not a or not b:
        raise ValueError("mutual information needs a non-degenerate bipartition")
    return (
        von_neumann_entropy(rho.reduce(a), rank_tol)
        + von_neumann_entropy(rho.reduce(b), rank_tol)
        - von_neumann_entropy(rho, rank_tol)
    )


def support(rho: DensityOp, rank_tol: float | None = None) -> SupportProjector:
    """Projector onto the span of eigenvectors with eigenvalue above rank_tol."""
    if rank_tol is None:
        rank_tol = DEFAULT_TOLERANCES.rank
    evals, evecs = eig_hermitian(rho.matrix)
    cols = evecs[:, evals > rank_tol]
    return SupportProjector(rho.layout, cols @ dagger(cols), cols.shape[1])


def orthogonal_support(
    a: DensityOp, b: DensityOp, tol: float | None = None, rank_tol: float | None = None
) -> tuple[bool, float]:
    """(supports orthogonal?, overlap Tr(P_a P_b)) for two same-layout states."""
    if a.layout != b.layout:
        raise ValueError(f"layout mismatch: {a.layout.registers} vs {b.layout.registers}")
    if tol is None:
        tol = DEFAULT_TOLERANCES.equality
    pa = support(a, rank_tol).projector
    pb = support(b, rank_tol).projector
    overlap = float(np.real(np.trace(pa @ pb)))
    return overlap <= tol, overlap


def _grouped_matrix(rho: DensityOp, side_a: tuple[str, ...], side_b: tuple[str, ...]) -> np.ndarray:
    """rho.matrix with register axes reordered to (side_a..., side_b...)."""
    order = rho.layout.positions(side_a + side_b)
    if list(order) == list(range(len(order))):
        return rho.matrix
    perm = axis_permutation(rho.layout.dims, order)
    out = np.empty_like(rho.matrix)
    out[...] = rho.matrix[np.ix_(perm, perm)]
    return out


def product_deviation(rho: DensityOp, side_a: Iterable[str]) -> float:
    """Trace distance between rho and the tensor product of its marginals.

    Exact up to the numerical support cutoff on the marginals: the state is
    evaluated inside supp(rho_A) x supp(rho_B), which contains it, so large
    systems avoid a full-dimension eigendecomposition.
    """
    a = rho.layout.ordered(side_a)
    b = rho.layout.complement(a)
    if not a or not b:
        raise ValueError("product test needs a non-degenerate bipartition")
    rho_a = partial_trace(rho.matrix, rho.layout, a)
    rho_b = partial_trace(rho.matrix, rho.layout, b)
    grouped = _grouped_matrix(rho, a, b)
    if rho.dim <= _DENSE_LIMIT:
        return trace_distance(grouped, kron(rho_a, rho_b))

    wa, va = np.linalg.eigh(rho_a)
    wb, vb = np.linalg.eigh(rho_b)
    keep_a = wa > _SUPPORT_CUTOFF
    keep_b = wb > _SUPPORT_CUTOFF
    basis = kron(va[:, keep_a], vb[:, keep_b])
    small = dagger(basis) @ grouped @ basis
    prod_small = np.outer(wa[keep_a], wb[keep_b]).ravel()
    nuclear = float(np.sum(np.abs(np.linalg.eigvalsh(small - np.diag(prod_small)))))
    # Mass of the product state outside the kept supports still counts.
    dropped = float(
        np.sum(np.clip(wa, 0, None)) * np.sum(np.clip(wb, 0, None))
        - np.sum(wa[keep_a]) * np.sum(wb[keep_b])
    )
    return 0.5 * (nuclear + max(dropped, 0.0))


def is_product(rho: DensityOp, side_a: Iterable[str], tol: float | None = None) -> bool:
    """True iff rho is within tol trace distance of the product of its marginals."""
    if tol is None:
        tol = DEFAULT_TOLERANCES.equality
    return product_deviation(rho, side_a) <= tol


def _support_basis_of_factor(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenbasis and eigenvalues (above cutoff) of rho = m m† from its factor."""
    q, r = np.linalg.qr(m)
    evals, evecs = np.linalg.eigh(r @ r.conj().T)
    keep = evals > _SUPPORT_CUTOFF
    return q @ evecs[:, keep], evals[keep]


def product_deviation_from_ket(
    psi: np.ndarray, layout: Layout, side_a: Iterable[str], side_b: Iterable[str]
) -> float:
    """product_deviation of the (side_a + side_b) reduction of a pure state.

    Computes the same trace distance as product_deviation on the reduced
    DensityOp, but entirely in factored form: every reduced state of a pure
    state has rank at most the traced-out dimension, so no full-dimension
    matrix is ever eigendecomposed.
    """
    a = layout.ordered(side_a)
    b = layout.ordered(side_b)
    if not a or not b or set(a) & set(b):
        raise ValueError("product test needs two disjoint non-empty register sets")
    rest = layout.complement(a + b)
    pos = layout.positions(a) + layout.positions(b) + layout.positions(rest)
    da = layout.dim_of(a)
    db = layout.dim_of(b)
    dr = layout.dim_of(rest) if rest else 1
    t = np.asarray(psi, dtype=complex).reshape(layout.dims).transpose(pos).reshape(da, db, dr)

    basis_a, wa = _support_basis_of_factor(t.reshape(da, db * dr))
    basis_b, wb = _support_basis_of_factor(np.moveaxis(t, 1, 0).reshape(db, da * dr))
    joint = kron(basis_a, basis_b)
    proj = joint.conj().T @ t.reshape(da * db, dr)
    delta = proj @ proj.conj().T - np.diag(np.outer(wa, wb).ravel())
    nuclear = float(np.sum(np.abs(np.linalg.eigvalsh(delta))))
    norm = float(np.real(np.vdot(psi, psi)))
    dropped = norm * norm - float(np.sum(wa)) * float(np.sum(wb))
    return 0.5 * (nuclear + max(dropped, 0.0))

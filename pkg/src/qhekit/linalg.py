"""Dense complex linear algebra primitives used across the toolkit.

Matrices and kets are plain numpy arrays of dtype complex128.  Row-major
order everywhere; the first tensor factor is the most significant digit of
a flat index (see layout.Layout).
"""

from functools import reduce

import numpy as np

from .tolerances import DEFAULT_TOLERANCES

# Seed stream tags so that unrelated internal draws never collide.
_KET_STREAM = 0x6B65
_UNITARY_STREAM = 0x7561


def as_matrix(m, where: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"{where}: expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{where}: non-finite entries")
    return a


def as_square(m, where: str = "matrix") -> np.ndarray:
    a = as_matrix(m, where)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{where}: expected a square matrix, got shape {a.shape}")
    return a


def as_ket(v, where: str = "ket", norm_tol: float = 1e-10) -> np.ndarray:
    """Coerce to a unit-norm complex vector."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    if a.size == 0:
        raise ValueError(f"{where}: empty vector")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{where}: non-finite amplitudes")
    n = np.linalg.norm(a)
    if abs(n - 1.0) > norm_tol:
        raise ValueError(f"{where}: norm {n!r} is not 1 within {norm_tol}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def basis_ket(dim: int, index: int) -> np.ndarray:
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dimension {dim}")
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more arrays, left factor most significant."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    arrays = [np.asarray(f, dtype=complex) for f in factors]
    return reduce(np.kron, arrays)


def is_hermitian(m: np.ndarray, tol: float | None = None) -> bool:
    m = as_square(m)
    if tol is None:
        tol = DEFAULT_TOLERANCES.hermiticity
    return float(np.max(np.abs(m - dagger(m)))) <= tol


def is_unitary(u: np.ndarray, tol: float | None = None) -> bool:
    """True iff max-entry norm of U†U - I is at most tol."""
    u = as_square(u, "unitary")
    if tol is None:
        tol = DEFAULT_TOLERANCES.unitarity
    d = u.shape[0]
    return float(np.max(np.abs(dagger(u) @ u - np.eye(d)))) <= tol


def require_unitary(u: np.ndarray, tol: float | None = None, where: str = "operator") -> np.ndarray:
    u = as_square(u, where)
    if not is_unitary(u, tol):
        raise ValueError(f"{where}: not unitary within tolerance")
    return u


def unitaries_equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float | None = None) -> bool:
    """True iff U and V implement the same operation modulo a global phase.

    Criterion: |Tr(U†V)| >= d - tol, which holds exactly when V = e^{iθ}U.
    """
    u = as_square(u, "left operand")
    v = as_square(v, "right operand")
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if tol is None:
        tol = DEFAULT_TOLERANCES.equality
    d = u.shape[0]
    return abs(np.trace(dagger(u) @ v)) >= d - tol


def _phase_fix_columns(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real positive."""
    idx = np.argmax(np.abs(v), axis=0)
    lead = v[idx, np.arange(v.shape[1])]
    mags = np.abs(lead)
    phases = np.where(mags > 0, lead / np.where(mags > 0, mags, 1.0), 1.0)
    return v * phases.conj()


def eig_hermitian(h: np.ndarray, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending and
    eigenvectors as orthonormal columns.  Near-degenerate spectra get a fixed,
    deterministic basis: columns are phase-fixed, then ties are broken by
    lexicographic comparison of the rounded entries.
    """
    h = as_square(h, "hermitian input")
    if tol is None:
        tol = DEFAULT_TOLERANCES.hermiticity
    if float(np.max(np.abs(h - dagger(h)))) > tol:
        raise ValueError("input is not Hermitian within tolerance")
    w, v = np.linalg.eigh((h + dagger(h)) / 2.0)
    v = _phase_fix_columns(v)
    order = sorted(
        range(w.size),
        key=lambda k: (-round(float(w[k]), 12), np.round(v[:, k], 9).tobytes()),
    )
    return w[order].real, v[:, order]


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of a - b for Hermitian operators of equal dimension."""
    a = as_square(a, "left state")
    b = as_square(b, "right state")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    delta = a - b
    evals = np.linalg.eigvalsh((delta + dagger(delta)) / 2.0)
    return float(0.5 * np.sum(np.abs(evals)))


def fidelity_pure(psi: np.ndarray, phi: np.ndarray) -> float:
    """|<psi|phi>|^2 for unit kets of equal dimension."""
    psi = as_ket(psi, "left ket")
    phi = as_ket(phi, "right ket")
    if psi.size != phi.size:
        raise ValueError(f"dimension mismatch: {psi.size} vs {phi.size}")
    return float(abs(np.vdot(psi, phi)) ** 2)


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary drawn from an existing generator."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    # Rescaling by the phases of R's diagonal makes the QR output Haar.
    return q * (d / np.abs(d))


def random_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-distributed unitary, bit-reproducible for a fixed (dim, seed)."""
    return haar_unitary(np.random.default_rng([_UNITARY_STREAM, seed]), dim)


def haar_ket(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_ket(dim: int, seed: int) -> np.ndarray:
    """Haar-distributed unit ket, bit-reproducible for a fixed (dim, seed)."""
    return haar_ket(np.random.default_rng([_KET_STREAM, seed]), dim)

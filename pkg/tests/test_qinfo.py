import numpy as np
import pytest

from qhekit.layout import Layout, reduced_from_ket
from qhekit.linalg import basis_ket, kron, random_ket, random_unitary
from qhekit.qinfo import (
    DensityOp,
    is_product,
    mutual_information,
    orthogonal_support,
    product_deviation,
    product_deviation_from_ket,
    support,
    von_neumann_entropy,
)

QUBIT = Layout((("q", 2),))
PAIR = Layout((("a", 2), ("b", 2)))
BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)
PLUS = np.array([1, 1]) / np.sqrt(2)


def qubit_state(matrix) -> DensityOp:
    return DensityOp(QUBIT, np.asarray(matrix, dtype=complex))


def random_mixed(layout: Layout, seed: int) -> DensityOp:
    # Haar-induced mixed state: trace half of a random pure state on dim^2.
    doubled = Layout((("s", layout.dim), ("e", layout.dim)))
    psi = random_ket(layout.dim**2, seed)
    return DensityOp(layout, reduced_from_ket(psi, doubled, ["s"]))


def test_density_op_rejects_bad_trace():
    with pytest.raises(ValueError, match="trace"):
        qubit_state(np.diag([0.7, 0.7]))


def test_density_op_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        qubit_state(np.array([[0.5, 0.5], [0.1, 0.5]]))


def test_entropy_pure_state_is_zero():
    assert von_neumann_entropy(DensityOp.from_ket(QUBIT, basis_ket(2, 0))) == 0.0


def test_entropy_maximally_mixed_qubit():
    assert abs(von_neumann_entropy(qubit_state(np.eye(2) / 2)) - 1.0) < 1e-12


def test_entropy_biased_diagonal():
    # scalar formula: -(0.75 log2 0.75 + 0.25 log2 0.25)
    expected = -(0.75 * np.log2(0.75) + 0.25 * np.log2(0.25))
    assert abs(expected - 0.8112781244591328) < 1e-15
    got = von_neumann_entropy(qubit_state(np.diag([0.75, 0.25])))
    assert abs(got - expected) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_entropy_unitary_invariance(seed):
    rho = random_mixed(Layout((("q", 4),)), seed)
    u = random_unitary(4, seed + 100)
    rotated = DensityOp(rho.layout, u @ rho.matrix @ u.conj().T)
    assert abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) <= 1e-9


def test_mutual_information_product_state():
    rho = DensityOp(PAIR, kron(np.eye(2) / 2, np.outer(PLUS, PLUS.conj())))
    assert abs(mutual_information(rho, ["a"])) < 1e-12


def test_mutual_information_bell_pair():
    rho = DensityOp.from_ket(PAIR, BELL)
    assert abs(mutual_information(rho, ["a"]) - 2.0) < 1e-9


def test_mutual_information_classical_correlation():
    rho = DensityOp(PAIR, np.diag([0.5, 0, 0, 0.5]).astype(complex))
    assert abs(mutual_information(rho, ["a"]) - 1.0) < 1e-9


def test_mutual_information_rejects_degenerate_cut():
    rho = DensityOp.from_ket(PAIR, BELL)
    with pytest.raises(ValueError, match="bipartition"):
        mutual_information(rho, ["a", "b"])


@pytest.mark.parametrize("seed", range(5))
def test_mutual_information_pure_state_doubles_marginal_entropy(seed):
    psi = random_ket(4, seed)
    rho = DensityOp.from_ket(PAIR, psi)
    lhs = mutual_information(rho, ["a"])
    rhs = 2 * von_neumann_entropy(rho.reduce(["a"]))
    assert abs(lhs - rhs) <= 1e-9


def test_support_of_pure_state():
    proj = support(DensityOp.from_ket(QUBIT, basis_ket(2, 0)))
    assert proj.rank == 1
    np.testing.assert_allclose(proj.projector, np.diag([1, 0]).astype(complex), atol=1e-12)


def test_support_full_rank():
    proj = support(qubit_state(np.eye(2) / 2))
    assert proj.rank == 2
    np.testing.assert_allclose(proj.projector, np.eye(2), atol=1e-10)


def test_support_of_two_state_mixture():
    rho = qubit_state((np.outer(basis_ket(2, 0), basis_ket(2, 0)) + np.outer(PLUS, PLUS)) / 2)
    assert support(rho).rank == 2
    assert np.sum(np.linalg.eigvalsh(rho.matrix) > 1e-10) == 2


@pytest.mark.parametrize("seed", range(5))
def test_support_projector_fixes_state(seed):
    rho = random_mixed(Layout((("q", 4),)), seed)
    p = support(rho).projector
    assert np.max(np.abs(p @ rho.matrix - rho.matrix)) <= 1e-9


def test_orthogonal_support_basis_states():
    a = DensityOp.from_ket(QUBIT, basis_ket(2, 0))
    b = DensityOp.from_ket(QUBIT, basis_ket(2, 1))
    ok, overlap = orthogonal_support(a, b, 1e-10)
    assert ok and abs(overlap) < 1e-12


def test_orthogonal_support_self_full_rank():
    rho = qubit_state(np.eye(2) / 2)
    ok, overlap = orthogonal_support(rho, rho, 1e-10)
    assert not ok
    assert abs(overlap - 2.0) < 1e-9


def test_orthogonal_support_overlapping_pure_states():
    a = DensityOp.from_ket(QUBIT, basis_ket(2, 0))
    b = DensityOp.from_ket(QUBIT, PLUS)
    ok, overlap = orthogonal_support(a, b, 1e-10)
    assert not ok
    assert abs(overlap - 0.5) < 1e-9


def test_orthogonal_support_symmetric_and_nonnegative():
    for seed in range(5):
        a = random_mixed(QUBIT, seed)
        b = random_mixed(QUBIT, seed + 50)
        _, ab = orthogonal_support(a, b)
        _, ba = orthogonal_support(b, a)
        assert abs(ab - ba) <= 1e-9
        assert ab >= -1e-9


def test_orthogonal_support_rejects_layout_mismatch():
    a = DensityOp.from_ket(QUBIT, basis_ket(2, 0))
    b = DensityOp.from_ket(Layout((("r", 2),)), basis_ket(2, 0))
    with pytest.raises(ValueError, match="layout"):
        orthogonal_support(a, b)


def test_is_product_on_product_state():
    rho = DensityOp(PAIR, kron(np.diag([0.3, 0.7]), np.outer(PLUS, PLUS.conj())))
    assert is_product(rho, ["a"], 1e-9)


def test_is_product_rejects_bell_pair():
    assert not is_product(DensityOp.from_ket(PAIR, BELL), ["a"], 1e-9)


def test_product_deviation_classical_correlation():
    rho = DensityOp(PAIR, np.diag([0.5, 0, 0, 0.5]).astype(complex))
    assert abs(product_deviation(rho, ["a"]) - 0.5) < 1e-9


@pytest.mark.parametrize("seed", range(6))
def test_product_deviation_factored_matches_dense(seed):
    layout = Layout((("a", 2), ("b", 3), ("c", 2)))
    psi = random_ket(12, seed)
    rho_ab = DensityOp.reduced(psi, layout, ["a", "b"])
    dense = product_deviation(rho_ab, ["a"])
    factored = product_deviation_from_ket(psi, layout, ["a"], ["b"])
    assert abs(dense - factored) <= 1e-10


def test_product_deviation_large_dimension_path():
    # Above the dense cutoff the support-projected route must agree with a
    # directly constructed product state.
    layout = Layout((("a", 4), ("b", 32),))
    psi = kron(random_ket(4, 1), random_ket(32, 2))
    rho = DensityOp.from_ket(layout, psi)
    assert product_deviation(rho, ["a"]) <= 1e-10
    entangled = random_ket(128, 3)
    rho2 = DensityOp.from_ket(layout, entangled)
    dev_direct = product_deviation_from_ket(entangled, layout, ["a"], ["b"])
    assert abs(product_deviation(rho2, ["a"]) - dev_direct) <= 1e-9

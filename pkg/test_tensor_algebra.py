"""
Tests for dense linear algebra on composite systems: Pauli matrices, Kronecker
products, partial trace, subsystem permutation, isometries and fidelity.
"""
import numpy as np
import pytest
from hypothesis import assume, given, settings as hypothesis_settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from app.exceptions import ArgumentError, NumericalViolation
from app.services.states import ghz
from app.services.tensor_algebra import (
    DensityMatrix,
    Isometry,
    StateVector,
    apply_channel_product,
    apply_isometry,
    check_density,
    embed_operator,
    fidelity,
    kron,
    kron_all,
    maximally_mixed,
    partial_trace,
    pauli,
    permute_subsystems,
    pure_density,
    random_density_matrix,
    random_state_vector,
)

ATOL = 1e-12


def _ket(bits: str) -> StateVector:
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(amps=amps, dims=(2,) * len(bits))


def _random_isometry(rng, rows: int, cols: int) -> Isometry:
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, _ = np.linalg.qr(g)
    return Isometry(mat=q, out_dims=(rows,))


# --- pauli -----------------------------------------------------------------

def test_pauli_z_is_diagonal():
    assert np.allclose(pauli(3), np.diag([1, -1]))


def test_pauli_trace_and_orthogonality():
    for i in (1, 2, 3):
        assert abs(np.trace(pauli(i))) < ATOL
        assert np.allclose(pauli(i), pauli(i).conj().T)
        assert np.allclose(pauli(i) @ pauli(i).conj().T, np.eye(2))
        for j in (1, 2, 3):
            assert np.isclose(np.trace(pauli(i) @ pauli(j)), 2 * (i == j))


@pytest.mark.parametrize("axis", [0, 4, -1])
def test_pauli_rejects_bad_axis(axis):
    with pytest.raises(ArgumentError):
        pauli(axis)


# --- kron ------------------------------------------------------------------

def test_kron_of_identities():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_zz():
    assert np.allclose(kron(pauli(3), pauli(3)), np.diag([1, -1, -1, 1]))


def test_kron_concatenates_dims():
    rho = kron(maximally_mixed((2,)), maximally_mixed((2, 3)))
    assert rho.dims == (2, 2, 3)
    psi = kron_all(_ket("0"), _ket("1"), _ket("1"))
    assert psi.dims == (2, 2, 2)
    assert np.isclose(psi.amps[3], 1)


def test_embed_operator_places_factor():
    assert np.allclose(embed_operator(pauli(3), 2, (2, 2, 2)), kron_all(np.eye(2), pauli(3), np.eye(2)))
    assert embed_operator(np.eye(3), 1, (3, 2)).shape == (6, 6)


@pytest.mark.parametrize("slot,dims", [(0, (2, 2)), (3, (2, 2)), (1, (3, 2))])
def test_embed_operator_rejects_bad_slot(slot, dims):
    with pytest.raises(ArgumentError):
        embed_operator(pauli(1), slot, dims)


def test_check_density_residuals():
    hermiticity, trace_dev, min_eig = check_density(np.diag([0.75, 0.25]).astype(complex))
    assert hermiticity == 0 and trace_dev == 0
    assert np.isclose(min_eig, 0.25)


def test_kron_rejects_mixed_types():
    with pytest.raises(ArgumentError):
        kron(_ket("0"), maximally_mixed((2,)))


# --- partial trace ---------------------------------------------------------

def test_partial_trace_of_ghz_is_maximally_mixed():
    rho = pure_density(ghz())
    for m in (1, 2, 3):
        assert np.allclose(partial_trace(rho, [m]).mat, np.eye(2) / 2, atol=ATOL)


def test_partial_trace_of_product_recovers_factor():
    rng = np.random.default_rng(1)
    rho_a = random_density_matrix((2,), rng)
    rho_b = random_density_matrix((3,), rng)
    reduced = partial_trace(kron(rho_a, rho_b), [1])
    assert reduced.dims == (2,)
    assert np.allclose(reduced.mat, rho_a.mat, atol=ATOL)
    assert np.allclose(partial_trace(kron(rho_a, rho_b), [2]).mat, rho_b.mat, atol=ATOL)


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(2)
    for _ in range(50):
        rho = random_density_matrix((2, 2, 2), rng, rank=int(rng.integers(1, 9)))
        for keep in ([1], [2], [3], [1, 2], [1, 3], [2, 3], [1, 2, 3]):
            assert abs(np.trace(partial_trace(rho, keep).mat) - 1) < ATOL


def test_partial_trace_composes():
    rng = np.random.default_rng(3)
    for _ in range(50):
        rho = random_density_matrix((2, 2, 2), rng)
        stepwise = partial_trace(partial_trace(rho, [1, 3]), [1])
        direct = partial_trace(rho, [1])
        assert np.max(np.abs(stepwise.mat - direct.mat)) <= ATOL


def test_partial_trace_keeps_original_order():
    psi = kron_all(_ket("0"), _ket("1"), _ket("0"))
    reduced = partial_trace(psi, [2, 3])
    assert np.isclose(reduced.mat[2, 2], 1)  # |10> over (2, 3)


def test_partial_trace_of_state_vector_matches_density_path():
    rng = np.random.default_rng(4)
    psi = random_state_vector((2, 3, 2), rng)
    for keep in ([1], [2], [1, 3], [2, 3]):
        assert np.allclose(partial_trace(psi, keep).mat, partial_trace(pure_density(psi), keep).mat, atol=ATOL)


@pytest.mark.parametrize("keep", [[], [1, 1], [2, 1], [0], [4]])
def test_partial_trace_rejects_bad_keep_sets(keep):
    with pytest.raises(ArgumentError):
        partial_trace(pure_density(ghz()), keep)


# --- permute_subsystems ----------------------------------------------------

def test_identity_permutation_is_noop():
    rho = pure_density(ghz())
    assert np.allclose(permute_subsystems(rho, [1, 2, 3]).mat, rho.mat)


def test_swap_relabels_basis():
    swapped = permute_subsystems(_ket("01"), [2, 1])
    assert np.allclose(swapped.amps, _ket("10").amps)


def test_double_swap_is_identity():
    rng = np.random.default_rng(5)
    rho = random_density_matrix((2, 2), rng)
    twice = permute_subsystems(permute_subsystems(rho, [2, 1]), [2, 1])
    assert np.allclose(twice.mat, rho.mat)


def test_permutation_moves_dims():
    psi = kron_all(_ket("1"), StateVector(amps=[0, 0, 1], dims=(3,)))
    moved = permute_subsystems(psi, [2, 1])
    assert moved.dims == (3, 2)
    assert np.isclose(moved.amps[2 * 2 + 1], 1)


@pytest.mark.parametrize("perm", [[1, 1, 2], [1, 2], [0, 1, 2], [1, 2, 4]])
def test_permute_rejects_invalid_permutation(perm):
    with pytest.raises(ArgumentError):
        permute_subsystems(pure_density(ghz()), perm)


@hypothesis_settings(max_examples=40, deadline=None)
@given(
    parts=arrays(np.float64, (2, 8, 8), elements=st.floats(min_value=-1.0, max_value=1.0)),
    perm=st.permutations([1, 2, 3]),
)
def test_permutation_preserves_spectrum(parts, perm):
    g = parts[0] + 1j * parts[1]
    mat = g @ g.conj().T
    mat = (mat + mat.conj().T) / 2
    assume(np.trace(mat).real > 0.1)
    rho = DensityMatrix(mat=mat / np.trace(mat).real, dims=(2, 2, 2))
    before = np.linalg.eigvalsh(rho.mat)
    after = np.linalg.eigvalsh(permute_subsystems(rho, perm).mat)
    assert np.allclose(before, after, atol=1e-10)


# --- apply_isometry --------------------------------------------------------

def test_identity_isometry_is_noop():
    psi = ghz()
    out = apply_isometry(Isometry(mat=np.eye(8), out_dims=(2, 2, 2)), psi)
    assert np.allclose(out.amps, psi.amps)


def test_isometry_preserves_norm():
    rng = np.random.default_rng(6)
    v = _random_isometry(rng, 16, 4)
    for _ in range(1000):
        psi = random_state_vector((4,), rng)
        assert abs(np.linalg.norm(apply_isometry(v, psi).amps) - 1) <= ATOL


def test_isometry_dimension_mismatch():
    with pytest.raises(ArgumentError):
        apply_isometry(Isometry(mat=np.eye(4), out_dims=(4,)), ghz())


def test_non_isometry_is_rejected():
    with pytest.raises(NumericalViolation):
        Isometry(mat=np.ones((4, 2)), out_dims=(4,))


# --- fidelity --------------------------------------------------------------

def test_self_fidelity_is_one():
    rng = np.random.default_rng(7)
    psi = random_state_vector((2, 2, 2), rng)
    assert abs(fidelity(psi, pure_density(psi)) - 1) <= ATOL


def test_fidelity_with_maximally_mixed():
    assert abs(fidelity(ghz(), maximally_mixed((2, 2, 2))) - 1 / 8) <= ATOL


def test_fidelity_dimension_mismatch():
    with pytest.raises(ArgumentError):
        fidelity(ghz(), maximally_mixed((2, 2)))


# --- density matrix invariants and channels --------------------------------

def test_density_matrix_rejects_bad_trace():
    with pytest.raises(NumericalViolation):
        DensityMatrix(mat=np.eye(2), dims=(2,))


def test_density_matrix_rejects_negative_eigenvalue():
    with pytest.raises(NumericalViolation):
        DensityMatrix(mat=np.diag([1.5, -0.5]), dims=(2,))


def test_density_matrix_rejects_non_hermitian():
    with pytest.raises(NumericalViolation):
        DensityMatrix(mat=[[0.5, 0.1], [0.0, 0.5]], dims=(2,))


def test_density_matrix_json_round_trip():
    rng = np.random.default_rng(8)
    rho = random_density_matrix((2, 2), rng)
    parsed = DensityMatrix.model_validate_json(rho.model_dump_json())
    assert parsed.dims == rho.dims
    assert np.array_equal(parsed.mat, rho.mat)


def test_identity_channel_product_is_noop():
    rng = np.random.default_rng(9)
    rho = random_density_matrix((2, 2, 2), rng)
    assert np.allclose(apply_channel_product(np.eye(4), rho).mat, rho.mat, atol=ATOL)


def test_channel_product_acts_on_every_qubit():
    # complete dephasing on each qubit keeps only the diagonal
    dephase = np.diag([1, 0, 0, 1]).astype(complex)
    rho = pure_density(ghz())
    out = apply_channel_product(dephase, rho)
    assert np.allclose(out.mat, np.diag(np.diag(rho.mat)), atol=ATOL)

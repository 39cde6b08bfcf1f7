"""
Dense complex linear algebra on composite quantum systems.

Basis ordering: for a register |q1 q2 ... qn>, subsystem 1 is the most
significant digit of the flat index. Subsystem indices in the public API
are 1-based.
"""
import logging
import string
from functools import reduce
from typing import Dict, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from app.config import settings
from app.exceptions import ArgumentError, NumericalViolation

logger = logging.getLogger(__name__)


def _frozen_array(value, ndim: int) -> np.ndarray:
    """Coerce raw input ({"re", "im"} dict, list or array) to a read-only complex array."""
    if isinstance(value, dict):
        value = np.asarray(value["re"], dtype=float) + 1j * np.asarray(value["im"], dtype=float)
    arr = np.array(value, dtype=complex)
    if ndim == 1:
        arr = arr.reshape(-1)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _complex_payload(arr: np.ndarray) -> Dict[str, list]:
    return {"re": arr.real.tolist(), "im": arr.imag.tolist()}


class StateVector(BaseModel):
    """Pure state over a composite Hilbert space."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    amps: np.ndarray = Field(..., description="Complex amplitudes in the flat basis")
    dims: Tuple[int, ...] = Field(..., description="Subsystem dimensions, subsystem 1 first")
    normalized: bool = Field(True, description="Enforce unit norm within NORM_TOL")

    @field_validator("amps", mode="before")
    @classmethod
    def _coerce_amps(cls, value):
        return _frozen_array(value, ndim=1)

    @field_serializer("amps")
    def _serialize_amps(self, amps: np.ndarray):
        return _complex_payload(amps)

    @model_validator(mode="after")
    def _check_invariants(self):
        if len(self.amps) != int(np.prod(self.dims)):
            raise ValueError(f"length {len(self.amps)} does not match dims {list(self.dims)}")
        if self.normalized:
            deviation = abs(np.linalg.norm(self.amps) - 1.0)
            if deviation > settings.NORM_TOL:
                raise NumericalViolation(f"state norm deviates from 1 by {deviation:.3e}")
        return self

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)


class DensityMatrix(BaseModel):
    """
    Density operator over a composite Hilbert space.

    Construction checks Hermiticity, unit trace and positivity; a violation
    raises NumericalViolation.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mat: np.ndarray = Field(..., description="Complex square matrix in the flat basis")
    dims: Tuple[int, ...] = Field(..., description="Subsystem dimensions, subsystem 1 first")

    @field_validator("mat", mode="before")
    @classmethod
    def _coerce_mat(cls, value):
        return _frozen_array(value, ndim=2)

    @field_serializer("mat")
    def _serialize_mat(self, mat: np.ndarray):
        return _complex_payload(mat)

    @model_validator(mode="after")
    def _check_invariants(self):
        dim = int(np.prod(self.dims))
        if self.mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.mat.shape} does not match dims {list(self.dims)}")
        hermiticity, trace_dev, min_eig = check_density(self.mat)
        if hermiticity > settings.HERMITICITY_TOL:
            raise NumericalViolation(f"density matrix not Hermitian (residual {hermiticity:.3e})")
        if trace_dev > settings.TRACE_TOL:
            raise NumericalViolation(f"density matrix trace deviates from 1 by {trace_dev:.3e}")
        if min_eig < settings.PSD_FLOOR:
            raise NumericalViolation(f"density matrix has negative eigenvalue {min_eig:.3e}")
        return self

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)


class Isometry(BaseModel):
    """Linear map V with V^dagger V = I, stored on its input subspace only."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mat: np.ndarray = Field(..., description="Rows = product of out_dims, cols = input dimension")
    out_dims: Tuple[int, ...] = Field(..., description="Output subsystem dimensions")

    @field_validator("mat", mode="before")
    @classmethod
    def _coerce_mat(cls, value):
        return _frozen_array(value, ndim=2)

    @field_serializer("mat")
    def _serialize_mat(self, mat: np.ndarray):
        return _complex_payload(mat)

    @model_validator(mode="after")
    def _check_invariants(self):
        if self.mat.shape[0] != int(np.prod(self.out_dims)):
            raise ValueError(f"{self.mat.shape[0]} rows do not match out_dims {list(self.out_dims)}")
        gram = self.mat.conj().T @ self.mat
        residual = np.max(np.abs(gram - np.eye(self.mat.shape[1])))
        if residual > settings.NORM_TOL:
            raise NumericalViolation(f"columns are not orthonormal (residual {residual:.3e})")
        return self

    @property
    def input_dim(self) -> int:
        return self.mat.shape[1]


Operand = Union[np.ndarray, StateVector, DensityMatrix, Isometry]


_PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(axis: int) -> np.ndarray:
    """Pauli matrix for axis 1 (x), 2 (y) or 3 (z)."""
    if axis not in _PAULI:
        raise ArgumentError(f"Pauli axis must be 1, 2 or 3, got {axis!r}")
    return _PAULI[axis].copy()


def kron(a: Operand, b: Operand) -> Operand:
    """
    Kronecker product.

    Raw arrays give np.kron; two values of the same library type give that
    type with concatenated dims.
    """
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        return np.kron(a, b)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(
            amps=np.kron(a.amps, b.amps),
            dims=a.dims + b.dims,
            normalized=a.normalized and b.normalized,
        )
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(mat=np.kron(a.mat, b.mat), dims=a.dims + b.dims)
    if isinstance(a, Isometry) and isinstance(b, Isometry):
        return Isometry(mat=np.kron(a.mat, b.mat), out_dims=a.out_dims + b.out_dims)
    raise ArgumentError(f"cannot take kron of {type(a).__name__} and {type(b).__name__}")


def kron_all(*factors: Operand) -> Operand:
    """Left fold of kron over the given factors."""
    if not factors:
        raise ArgumentError("kron_all needs at least one factor")
    return reduce(kron, factors)


def pure_density(psi: StateVector) -> DensityMatrix:
    """|psi><psi| with the dims of psi."""
    return DensityMatrix(mat=np.outer(psi.amps, psi.amps.conj()), dims=psi.dims)


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    dim = int(np.prod(dims))
    return DensityMatrix(mat=np.eye(dim) / dim, dims=tuple(dims))


def check_density(mat: np.ndarray) -> Tuple[float, float, float]:
    """Return (Hermiticity residual, |trace - 1|, minimum eigenvalue)."""
    hermiticity = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    trace_dev = float(abs(np.trace(mat) - 1.0))
    min_eig = float(np.min(np.linalg.eigvalsh((mat + mat.conj().T) / 2)))
    return hermiticity, trace_dev, min_eig


def embed_operator(op: np.ndarray, slot: int, dims: Sequence[int]) -> np.ndarray:
    """Place a single-subsystem operator at a 1-based slot, identity elsewhere."""
    if not 1 <= slot <= len(dims):
        raise ArgumentError(f"slot {slot} out of range for {len(dims)} subsystems")
    if op.shape != (dims[slot - 1], dims[slot - 1]):
        raise ArgumentError(f"operator shape {op.shape} does not fit subsystem of dim {dims[slot - 1]}")
    factors = [op if k == slot else np.eye(d) for k, d in enumerate(dims, start=1)]
    return kron_all(*factors)


def _validate_keep(keep: Sequence[int], n: int) -> Tuple[int, ...]:
    keep = tuple(keep)
    if not keep:
        raise ArgumentError("keep-set must not be empty")
    if len(set(keep)) != len(keep):
        raise ArgumentError(f"keep-set {list(keep)} has duplicates")
    if any(not 1 <= k <= n for k in keep):
        raise ArgumentError(f"keep-set {list(keep)} out of range for {n} subsystems")
    if list(keep) != sorted(keep):
        raise ArgumentError(f"keep-set {list(keep)} must be strictly increasing")
    return keep


def partial_trace(rho: Union[DensityMatrix, StateVector], keep: Sequence[int]) -> DensityMatrix:
    """
    Reduced density matrix over the kept subsystems, in their original order.

    A StateVector is traced without forming its full density matrix.

    Args:
        rho: Pure or mixed state over rho.dims
        keep: 1-based subsystem indices to keep, non-empty and strictly increasing

    Returns:
        DensityMatrix over the kept subsystems, dims in the same order

    Raises:
        ArgumentError: keep is empty, out of range, repeated or unordered
    """
    n = rho.n_subsystems
    keep0 = [k - 1 for k in _validate_keep(keep, n)]
    letters = string.ascii_letters
    row = [letters[k] for k in range(n)]
    col = [letters[k] if k not in keep0 else letters[n + k] for k in range(n)]
    out = "".join(row[k] for k in keep0) + "".join(col[k] for k in keep0)
    kept_dims = tuple(rho.dims[k] for k in keep0)
    kept_dim = int(np.prod(kept_dims))

    if isinstance(rho, StateVector):
        tensor = rho.amps.reshape(rho.dims)
        reduced = np.einsum(f"{''.join(row)},{''.join(col)}->{out}", tensor, tensor.conj())
    else:
        tensor = rho.mat.reshape(rho.dims + rho.dims)
        reduced = np.einsum(f"{''.join(row)}{''.join(col)}->{out}", tensor)

    return DensityMatrix(mat=reduced.reshape(kept_dim, kept_dim), dims=kept_dims)


def _validate_perm(perm: Sequence[int], n: int) -> list:
    perm = list(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ArgumentError(f"{perm} is not a permutation of 1..{n}")
    return [p - 1 for p in perm]


def permute_subsystems(x: Union[StateVector, DensityMatrix], perm: Sequence[int]):
    """Reorder subsystems: output subsystem k is input subsystem perm[k-1]."""
    n = x.n_subsystems
    perm0 = _validate_perm(perm, n)
    new_dims = tuple(x.dims[p] for p in perm0)

    if isinstance(x, StateVector):
        amps = x.amps.reshape(x.dims).transpose(perm0).reshape(-1)
        return StateVector(amps=amps, dims=new_dims, normalized=x.normalized)
    if isinstance(x, DensityMatrix):
        axes = perm0 + [n + p for p in perm0]
        dim = x.mat.shape[0]
        mat = x.mat.reshape(x.dims + x.dims).transpose(axes).reshape(dim, dim)
        return DensityMatrix(mat=mat, dims=new_dims)
    raise ArgumentError(f"cannot permute subsystems of {type(x).__name__}")


def apply_isometry(v: Isometry, psi: StateVector) -> StateVector:
    """V psi, carrying V's output dims."""
    if v.input_dim != len(psi.amps):
        raise ArgumentError(f"isometry input dim {v.input_dim} does not match state length {len(psi.amps)}")
    return StateVector(amps=v.mat @ psi.amps, dims=v.out_dims, normalized=psi.normalized)


def fidelity(psi: StateVector, rho: DensityMatrix) -> float:
    """<psi|rho|psi> for a pure reference state."""
    if len(psi.amps) != rho.mat.shape[0]:
        raise ArgumentError(f"state length {len(psi.amps)} does not match matrix dim {rho.mat.shape[0]}")
    value = np.vdot(psi.amps, rho.mat @ psi.amps)
    if abs(value.imag) > settings.IMAG_TOL:
        raise NumericalViolation(f"fidelity has imaginary residue {value.imag:.3e}")
    return float(value.real)


def apply_channel_product(superop: np.ndarray, rho: DensityMatrix) -> DensityMatrix:
    """
    Apply the same single-subsystem channel to every subsystem of rho.

    superop acts on row-major vectorized d x d matrices: vec(E(x)) = S vec(x).
    """
    d = int(round(np.sqrt(superop.shape[0])))
    if superop.shape != (d * d, d * d):
        raise ArgumentError(f"superoperator shape {superop.shape} is not (d^2, d^2)")
    if any(dim != d for dim in rho.dims):
        raise ArgumentError(f"channel on dimension {d} does not fit dims {list(rho.dims)}")

    n = rho.n_subsystems
    s = superop.reshape(d, d, d, d)
    tensor = rho.mat.reshape(rho.dims + rho.dims)
    for k in range(n):
        tensor = np.tensordot(s, tensor, axes=([2, 3], [k, n + k]))
        tensor = np.moveaxis(tensor, [0, 1], [k, n + k])

    dim = rho.mat.shape[0]
    return DensityMatrix(mat=tensor.reshape(dim, dim), dims=rho.dims)


def random_state_vector(dims: Sequence[int], rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    dim = int(np.prod(dims))
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(amps=amps / np.linalg.norm(amps), dims=tuple(dims))


def random_density_matrix(dims: Sequence[int], rng: np.random.Generator, rank: int = None) -> DensityMatrix:
    """Random density matrix from a Ginibre matrix of the given rank (full rank by default)."""
    dim = int(np.prod(dims))
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    mat = g @ g.conj().T
    mat = (mat + mat.conj().T) / 2
    return DensityMatrix(mat=mat / np.trace(mat).real, dims=tuple(dims))

"""
Correlation-tensor entanglement measures for three qubits.

A three-qubit density operator expands in Pauli tensor products as

    rho = 1/8 [ 1x1x1 + sum_i lambda_i(1) s_i x 1 x 1 + ...      (coherence vectors)
                + sum_ij K_ij(1,2) s_i x s_j x 1 + ...            (pair correlations)
                + sum_ijk K_ijk s_i x s_j x s_k ]                 (triple correlation)

The M-tensors subtract every factorized contribution from K, so they vanish
on product states; E2 and E3 are their normalized squared norms.
"""
import logging
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from app.config import settings
from app.exceptions import ArgumentError, NumericalViolation
from app.services.tensor_algebra import DensityMatrix, embed_operator, kron_all, partial_trace, pauli

logger = logging.getLogger(__name__)

QUBITS = (1, 2, 3)
PAIRS: Tuple[Tuple[int, int], ...] = tuple(combinations(QUBITS, 2))  # (1,2), (1,3), (2,3)
AXES = (1, 2, 3)
AXIS_NAMES = {1: "x", 2: "y", 3: "z"}
QUBIT_DIMS = (2, 2, 2)

_IDENTITY = np.eye(2, dtype=complex)


def _real_array(value, shape: Tuple[int, ...]) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


class CoherenceVector(BaseModel):
    """Bloch vector lambda(m) of one qubit, indexed by Pauli axis."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    m: int = Field(..., description="Qubit index 1..3")
    v: np.ndarray = Field(..., description="Real 3-vector (x, y, z)")

    @field_validator("v", mode="before")
    @classmethod
    def _coerce(cls, value):
        return _real_array(value, (3,))

    @field_serializer("v")
    def _serialize(self, v: np.ndarray):
        return v.tolist()

    @model_validator(mode="after")
    def _check_bound(self):
        if np.linalg.norm(self.v) > 1 + settings.TOLERANCE:
            raise NumericalViolation(f"coherence vector of qubit {self.m} has norm {np.linalg.norm(self.v):.12g} > 1")
        return self


class CorrelationTensor2(BaseModel):
    """K_ij(m,n) for an ordered pair m < n."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pair: Tuple[int, int] = Field(..., description="Ordered qubit pair (m, n)")
    K: np.ndarray = Field(..., description="Real 3x3 matrix")

    @field_validator("K", mode="before")
    @classmethod
    def _coerce(cls, value):
        return _real_array(value, (3, 3))

    @field_serializer("K")
    def _serialize(self, K: np.ndarray):
        return K.tolist()

    @model_validator(mode="after")
    def _check_bound(self):
        if np.max(np.abs(self.K)) > 1 + settings.TOLERANCE:
            raise NumericalViolation(f"correlation tensor {self.pair} has entry beyond 1")
        return self


class CorrelationTensor3(BaseModel):
    """K_ijk(1,2,3)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    K: np.ndarray = Field(..., description="Real 3x3x3 array")

    @field_validator("K", mode="before")
    @classmethod
    def _coerce(cls, value):
        return _real_array(value, (3, 3, 3))

    @field_serializer("K")
    def _serialize(self, K: np.ndarray):
        return K.tolist()

    @model_validator(mode="after")
    def _check_bound(self):
        if np.max(np.abs(self.K)) > 1 + settings.TOLERANCE:
            raise NumericalViolation("three-qubit correlation tensor has entry beyond 1")
        return self


class EntanglementReport(BaseModel):
    """
    Pauli decomposition data and measures for one three-qubit state.

    Field order is the serialized key order. E-values are clamped to [0, 1];
    the raw values are kept in `unclamped`.
    """

    lambda1: List[float]
    lambda2: List[float]
    lambda3: List[float]
    K12: List[List[float]]
    K13: List[List[float]]
    K23: List[List[float]]
    K123: List[List[List[float]]]
    M12: List[List[float]]
    M13: List[List[float]]
    M23: List[List[float]]
    M123: List[List[List[float]]]
    E2_12: float
    E2_13: float
    E2_23: float
    E3: float
    unclamped: Dict[str, float] = Field(default_factory=dict, description="E-values before clamping")
    range_violations: List[str] = Field(default_factory=list, description="E-values outside [0, 1] beyond tolerance")

    def coherence(self, m: int) -> np.ndarray:
        return np.array(getattr(self, f"lambda{m}"))

    def correlation(self, m: int, n: int) -> np.ndarray:
        return _pair_field(self, "K", m, n)

    def m2(self, m: int, n: int) -> np.ndarray:
        return _pair_field(self, "M", m, n)

    def e2(self, m: int, n: int) -> float:
        m, n = sorted((m, n))
        return getattr(self, f"E2_{m}{n}")


def _pair_field(report: EntanglementReport, prefix: str, m: int, n: int) -> np.ndarray:
    if m == n:
        raise ArgumentError(f"pair needs two distinct qubits, got ({m}, {n})")
    value = np.array(getattr(report, f"{prefix}{min(m, n)}{max(m, n)}"))
    return value if m < n else value.T


def _check_three_qubits(rho: DensityMatrix) -> None:
    if tuple(rho.dims) != (2, 2, 2):
        raise ArgumentError(f"expected a three-qubit density matrix, got dims {list(rho.dims)}")


def _check_qubit(m: int) -> None:
    if m not in QUBITS:
        raise ArgumentError(f"qubit index must be 1, 2 or 3, got {m!r}")


def _check_pair(m: int, n: int) -> None:
    _check_qubit(m)
    _check_qubit(n)
    if not m < n:
        raise ArgumentError(f"pair must satisfy m < n, got ({m}, {n})")


@lru_cache(maxsize=None)
def _pauli_string(axes: Tuple[int, int, int]) -> np.ndarray:
    """Tensor product of Pauli matrices; axis 0 stands for the identity. Cached, read-only."""
    op = np.eye(8, dtype=complex)
    for slot, a in enumerate(axes, start=1):
        if a:
            op = op @ embed_operator(pauli(a), slot, QUBIT_DIMS)
    op.setflags(write=False)
    return op


def _expectation(rho: DensityMatrix, axes: Tuple[int, int, int]) -> float:
    value = np.trace(rho.mat @ _pauli_string(axes))
    if abs(value.imag) > settings.IMAG_TOL:
        raise NumericalViolation(f"Pauli expectation {axes} has imaginary residue {value.imag:.3e}")
    return float(value.real)


def coherence_vector(rho: DensityMatrix, m: int) -> CoherenceVector:
    """lambda_i(m) = tr(rho . s_i at slot m, identity elsewhere)."""
    _check_three_qubits(rho)
    _check_qubit(m)
    v = []
    for i in AXES:
        axes = [0, 0, 0]
        axes[m - 1] = i
        v.append(_expectation(rho, tuple(axes)))
    return CoherenceVector(m=m, v=v)


def correlation_tensor2(rho: DensityMatrix, m: int, n: int) -> CorrelationTensor2:
    """K_ij(m,n) = tr(rho . s_i at slot m, s_j at slot n, identity at the third)."""
    _check_three_qubits(rho)
    _check_pair(m, n)
    K = np.zeros((3, 3))
    for i in AXES:
        for j in AXES:
            axes = [0, 0, 0]
            axes[m - 1] = i
            axes[n - 1] = j
            K[i - 1, j - 1] = _expectation(rho, tuple(axes))
    return CorrelationTensor2(pair=(m, n), K=K)


def correlation_tensor3(rho: DensityMatrix) -> CorrelationTensor3:
    """K_ijk = tr(rho . s_i x s_j x s_k)."""
    _check_three_qubits(rho)
    K = np.zeros((3, 3, 3))
    for i in AXES:
        for j in AXES:
            for k in AXES:
                K[i - 1, j - 1, k - 1] = _expectation(rho, (i, j, k))
    return CorrelationTensor3(K=K)


def _m2_from(K: np.ndarray, lam_m: np.ndarray, lam_n: np.ndarray) -> np.ndarray:
    return K - np.outer(lam_m, lam_n)


def _m3_from(K: np.ndarray, lam: Dict[int, np.ndarray], m2: Dict[Tuple[int, int], np.ndarray]) -> np.ndarray:
    l1, l2, l3 = lam[1], lam[2], lam[3]
    return (
        K
        - np.einsum("i,jk->ijk", l1, m2[(2, 3)])
        - np.einsum("j,ik->ijk", l2, m2[(1, 3)])
        - np.einsum("k,ij->ijk", l3, m2[(1, 2)])
        - np.einsum("i,j,k->ijk", l1, l2, l3)
    )


def m_tensor2(rho: DensityMatrix, m: int, n: int) -> np.ndarray:
    """
    M_ij(m,n) = K_ij(m,n) - lambda_i(m) lambda_j(n).

    Asking for (n, m) with n > m returns the transpose of M(m, n).
    """
    _check_qubit(m)
    _check_qubit(n)
    if m == n:
        raise ArgumentError(f"pair needs two distinct qubits, got ({m}, {n})")
    if m > n:
        return m_tensor2(rho, n, m).T
    K = correlation_tensor2(rho, m, n).K
    return _m2_from(K, coherence_vector(rho, m).v, coherence_vector(rho, n).v)


def m_tensor3(rho: DensityMatrix) -> np.ndarray:
    """M_ijk(1,2,3): K_ijk minus all factorized lower-order contributions."""
    _check_three_qubits(rho)
    lam = {m: coherence_vector(rho, m).v for m in QUBITS}
    m2 = {(m, n): _m2_from(correlation_tensor2(rho, m, n).K, lam[m], lam[n]) for m, n in PAIRS}
    return _m3_from(correlation_tensor3(rho).K, lam, m2)


def _clamp_measure(name: str, raw: float, strict: bool = False) -> Tuple[float, bool]:
    """Clamp to [0, 1]; report whether raw left the range by more than the tolerance."""
    violated = raw < -settings.TOLERANCE or raw > 1 + settings.TOLERANCE
    if violated:
        message = f"{name} = {raw!r} outside [0, 1]"
        logger.warning(f"[MEASURE] {message}")
        if strict:
            raise NumericalViolation(message)
    return float(min(max(raw, 0.0), 1.0)), violated


def e3(rho: DensityMatrix, strict: bool = False) -> float:
    """E3 = 1/4 sum_ijk M_ijk^2, clamped to [0, 1]."""
    raw = float(np.sum(m_tensor3(rho) ** 2) / 4)
    return _clamp_measure("E3", raw, strict)[0]


def e2(rho: DensityMatrix, m: int, n: int, strict: bool = False) -> float:
    """E2(m,n) = 1/3 sum_ij M_ij(m,n)^2, clamped to [0, 1]."""
    _check_three_qubits(rho)
    _check_pair(m, n)
    raw = float(np.sum(m_tensor2(rho, m, n) ** 2) / 3)
    return _clamp_measure(f"E2({m},{n})", raw, strict)[0]


def full_report(rho: DensityMatrix) -> EntanglementReport:
    """All coherence vectors, correlation tensors, M-tensors and measures in one pass."""
    _check_three_qubits(rho)
    lam = {m: coherence_vector(rho, m).v for m in QUBITS}
    K2 = {pair: correlation_tensor2(rho, *pair).K for pair in PAIRS}
    K3 = correlation_tensor3(rho).K
    M2 = {pair: _m2_from(K2[pair], lam[pair[0]], lam[pair[1]]) for pair in PAIRS}
    M3 = _m3_from(K3, lam, M2)

    unclamped = {f"E2_{m}{n}": float(np.sum(M2[(m, n)] ** 2) / 3) for m, n in PAIRS}
    unclamped["E3"] = float(np.sum(M3 ** 2) / 4)
    clamped = {}
    violations = []
    for name, raw in unclamped.items():
        clamped[name], violated = _clamp_measure(name, raw)
        if violated:
            violations.append(name)

    logger.debug(f"[REPORT] E3={clamped['E3']:.12g} E2={[clamped[f'E2_{m}{n}'] for m, n in PAIRS]}")
    return EntanglementReport(
        lambda1=lam[1].tolist(),
        lambda2=lam[2].tolist(),
        lambda3=lam[3].tolist(),
        K12=K2[(1, 2)].tolist(),
        K13=K2[(1, 3)].tolist(),
        K23=K2[(2, 3)].tolist(),
        K123=K3.tolist(),
        M12=M2[(1, 2)].tolist(),
        M13=M2[(1, 3)].tolist(),
        M23=M2[(2, 3)].tolist(),
        M123=M3.tolist(),
        **clamped,
        unclamped=unclamped,
        range_violations=violations,
    )


def reconstruct_density(report: EntanglementReport) -> np.ndarray:
    """Rebuild rho from lambda, K(m,n) and K(1,2,3) through the Pauli expansion."""
    mat = _pauli_string((0, 0, 0)).copy()
    for m in QUBITS:
        lam = report.coherence(m)
        for i in AXES:
            axes = [0, 0, 0]
            axes[m - 1] = i
            mat += lam[i - 1] * _pauli_string(tuple(axes))
    for m, n in PAIRS:
        K = report.correlation(m, n)
        for i in AXES:
            for j in AXES:
                axes = [0, 0, 0]
                axes[m - 1] = i
                axes[n - 1] = j
                mat += K[i - 1, j - 1] * _pauli_string(tuple(axes))
    K3 = np.array(report.K123)
    for i in AXES:
        for j in AXES:
            for k in AXES:
                mat += K3[i - 1, j - 1, k - 1] * _pauli_string((i, j, k))
    return mat / 8


def reduced_from_coherence(lam: np.ndarray) -> DensityMatrix:
    """Single-qubit rho = (1 + sum_i lambda_i s_i) / 2."""
    mat = _IDENTITY + sum(lam[i - 1] * pauli(i) for i in AXES)
    return DensityMatrix(mat=mat / 2, dims=(2,))


def product_of_marginals(rho: DensityMatrix) -> DensityMatrix:
    """rho(1) x rho(2) x rho(3), the state the M-tensors measure deviations from."""
    _check_three_qubits(rho)
    return kron_all(*(partial_trace(rho, [m]) for m in QUBITS))


def nonzero_entries(tensor: np.ndarray, atol: float = None) -> Dict[str, float]:
    """Map axis-name labels ('xyy', 'zz') to entries with |value| above atol."""
    atol = settings.TOLERANCE if atol is None else atol
    entries = {}
    for index in np.ndindex(*tensor.shape):
        if abs(tensor[index]) > atol:
            entries["".join(AXIS_NAMES[i + 1] for i in index)] = float(tensor[index])
    return entries

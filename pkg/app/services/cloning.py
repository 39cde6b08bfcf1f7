"""
Universal quantum cloners and the two entanglement broadcasting pipelines.

Local broadcasting clones each GHZ qubit with its own 1->2 cloner; non-local
broadcasting clones the whole register as one 8-dimensional system. Both
trace out the cloning machines and split the six output qubits into the
"originals" (1_0, 2_0, 3_0) and the "copies" (1_1, 2_1, 3_1).
"""
import logging
from typing import Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.exceptions import ArgumentError
from app.services.entanglement import EntanglementReport, full_report
from app.services.tensor_algebra import (
    DensityMatrix,
    Isometry,
    StateVector,
    apply_channel_product,
    apply_isometry,
    fidelity,
    kron_all,
    partial_trace,
    permute_subsystems,
    pure_density,
)

logger = logging.getLogger(__name__)

Mode = Literal["local", "nonlocal"]
Which = Literal["originals", "copies"]

SIX_QUBIT_DIMS = (2,) * 6
# slots in the canonical (1_0, 1_1, 2_0, 2_1, 3_0, 3_1) order
ORIGINAL_SLOTS = (1, 3, 5)
COPY_SLOTS = (2, 4, 6)


class BroadcastResult(BaseModel):
    """Six-qubit cloner output and the two three-qubit clones extracted from it."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mode: Mode = Field(..., description="Cloner used: local (per qubit) or nonlocal (whole register)")
    input_state: StateVector = Field(..., description="Three-qubit input the fidelities refer to")
    six_qubit: DensityMatrix = Field(..., description="Output over (1_0, 1_1, 2_0, 2_1, 3_0, 3_1)")
    originals: DensityMatrix = Field(..., description="Clone over (1_0, 2_0, 3_0)")
    copies: DensityMatrix = Field(..., description="Clone over (1_1, 2_1, 3_1)")
    report_originals: EntanglementReport
    report_copies: EntanglementReport
    fidelity_originals: float
    fidelity_copies: float

    @model_validator(mode="after")
    def _check_clones(self):
        if tuple(self.six_qubit.dims) != SIX_QUBIT_DIMS:
            raise ValueError(f"six-qubit output needs dims {list(SIX_QUBIT_DIMS)}, got {list(self.six_qubit.dims)}")
        for name, slots in (("originals", ORIGINAL_SLOTS), ("copies", COPY_SLOTS)):
            expected = partial_trace(self.six_qubit, slots).mat
            if np.max(np.abs(getattr(self, name).mat - expected)) > 1e-12:
                raise ValueError(f"{name} is not the partial trace of the six-qubit output")
        return self


class BroadcastComparison(BaseModel):
    """Local vs non-local broadcasting of the same input."""

    e3_local: float
    e3_nonlocal: float
    e2_local: Tuple[float, float, float]
    e2_nonlocal: Tuple[float, float, float]
    fidelity_local: float
    fidelity_nonlocal: float

    @classmethod
    def from_results(cls, local: "BroadcastResult", nonlocal_: "BroadcastResult") -> "BroadcastComparison":
        lr, nr = local.report_originals, nonlocal_.report_originals
        return cls(
            e3_local=lr.E3,
            e3_nonlocal=nr.E3,
            e2_local=(lr.E2_12, lr.E2_13, lr.E2_23),
            e2_nonlocal=(nr.E2_12, nr.E2_13, nr.E2_23),
            fidelity_local=local.fidelity_originals,
            fidelity_nonlocal=nonlocal_.fidelity_originals,
        )

    @property
    def nonlocal_more_efficient(self) -> bool:
        return (
            self.e3_nonlocal > self.e3_local > 0
            and min(self.e2_local) > 0
            and min(self.e2_nonlocal) > 0
            and self.fidelity_nonlocal > self.fidelity_local
        )


def _ket(dim: int, index: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def local_cloner_isometry() -> Isometry:
    """
    1->2 universal cloner on one qubit, output (original, copy, machine).

        |0> -> sqrt(2/3)|00>|up>   + sqrt(1/3)|+>|down>
        |1> -> sqrt(2/3)|11>|down> + sqrt(1/3)|+>|up>

    with |+> = (|10> + |01>)/sqrt(2), |up> = index 0, |down> = index 1.
    """
    zero, one = _ket(2, 0), _ket(2, 1)
    up, down = zero, one
    plus = (np.kron(one, zero) + np.kron(zero, one)) / np.sqrt(2)
    col0 = np.sqrt(2 / 3) * kron_all(zero, zero, up) + np.sqrt(1 / 3) * np.kron(plus, down)
    col1 = np.sqrt(2 / 3) * kron_all(one, one, down) + np.sqrt(1 / 3) * np.kron(plus, up)
    return Isometry(mat=np.column_stack([col0, col1]), out_dims=(2, 2, 2))


def clone_channel(x: Union[np.ndarray, DensityMatrix]) -> Union[np.ndarray, DensityMatrix]:
    """
    Single-qubit clone channel: apply the local cloner, discard copy and machine.

    Accepts any 2x2 operator (so off-diagonal units can be probed) or a
    single-qubit DensityMatrix.
    """
    if isinstance(x, DensityMatrix):
        return DensityMatrix(mat=clone_channel(x.mat), dims=(2,))
    x = np.asarray(x, dtype=complex)
    if x.shape != (2, 2):
        raise ArgumentError(f"clone channel acts on 2x2 operators, got shape {x.shape}")
    v = local_cloner_isometry().mat
    out = (v @ x @ v.conj().T).reshape(2, 2, 2, 2, 2, 2)
    return np.einsum("abcdbc->ad", out)


def clone_channel_superoperator() -> np.ndarray:
    """4x4 matrix S with vec(E(x)) = S vec(x), row-major vectorization."""
    columns = []
    for a in range(2):
        for b in range(2):
            unit = np.outer(_ket(2, a), _ket(2, b))
            columns.append(clone_channel(unit).reshape(-1))
    return np.column_stack(columns)


def local_clone_oracle(psi: StateVector) -> DensityMatrix:
    """E x E x E applied to |psi><psi|: the expected originals of broadcast_local."""
    _check_three_qubit_input(psi)
    return apply_channel_product(clone_channel_superoperator(), pure_density(psi))


def nonlocal_cloner_constants(N: int) -> Tuple[float, float]:
    """(c, d) with c^2 = 2/(N+1) and d^2 = 1/(2(N+1))."""
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise ArgumentError(f"cloner dimension must be an integer >= 2, got {N!r}")
    return float(np.sqrt(2 / (N + 1))), float(np.sqrt(1 / (2 * (N + 1))))


def nonlocal_cloner_isometry(N: int) -> Isometry:
    """
    1->2 universal cloner on an N-dimensional system, output (original, copy, machine).

        |i> -> c|i>|i>|X_i> + d sum_{j != i} (|i>|j> + |j>|i>)|X_j>

    with machine basis |X_j> = index j.
    """
    c, d = nonlocal_cloner_constants(N)
    mat = np.zeros((N ** 3, N), dtype=complex)

    def flat(original: int, copy: int, machine: int) -> int:
        return (original * N + copy) * N + machine

    for i in range(N):
        mat[flat(i, i, i), i] = c
        for j in range(N):
            if j != i:
                mat[flat(i, j, j), i] = d
                mat[flat(j, i, j), i] = d
    return Isometry(mat=mat, out_dims=(N, N, N))


def basis_clone_fidelity(N: int, i: int) -> float:
    """Fidelity of the non-local clone of basis state |phi_i> (i = 1..N) to itself."""
    if not 1 <= i <= N:
        raise ArgumentError(f"basis index must be in 1..{N}, got {i}")
    phi = StateVector(amps=_ket(N, i - 1), dims=(N,))
    out = apply_isometry(nonlocal_cloner_isometry(N), phi)
    return fidelity(phi, partial_trace(out, [1]))


def _check_three_qubit_input(psi: StateVector) -> None:
    if len(psi.amps) != 8 or tuple(psi.dims) != (2, 2, 2):
        raise ArgumentError(f"expected a three-qubit state, got dims {list(psi.dims)}")


def extract_clone(rho6: DensityMatrix, which: Which) -> DensityMatrix:
    """Originals keep slots {1,3,5}, copies keep {2,4,6} of the canonical six-qubit order."""
    if tuple(rho6.dims) != SIX_QUBIT_DIMS:
        raise ArgumentError(f"expected six-qubit dims {list(SIX_QUBIT_DIMS)}, got {list(rho6.dims)}")
    if which == "originals":
        return partial_trace(rho6, ORIGINAL_SLOTS)
    if which == "copies":
        return partial_trace(rho6, COPY_SLOTS)
    raise ArgumentError(f"which must be 'originals' or 'copies', got {which!r}")


def _assemble(mode: Mode, psi: StateVector, six_qubit: DensityMatrix) -> BroadcastResult:
    originals = extract_clone(six_qubit, "originals")
    copies = extract_clone(six_qubit, "copies")
    result = BroadcastResult(
        mode=mode,
        input_state=psi,
        six_qubit=six_qubit,
        originals=originals,
        copies=copies,
        report_originals=full_report(originals),
        report_copies=full_report(copies),
        fidelity_originals=fidelity(psi, originals),
        fidelity_copies=fidelity(psi, copies),
    )
    logger.info(
        f"[BROADCAST-{mode.upper()}] E3={result.report_originals.E3:.12g} "
        f"F={result.fidelity_originals:.12g}"
    )
    return result


def broadcast_local(psi: StateVector) -> BroadcastResult:
    """
    Clone each qubit with its own local cloner and machine.

    The nine-subsystem output is ordered (1_0, 1_1, x_1, 2_0, 2_1, x_2, 3_0, 3_1, x_3);
    tracing the machines leaves the canonical six-qubit order.

    Args:
        psi: Three-qubit input state

    Returns:
        BroadcastResult with the six-qubit output, both clones, their reports
        and their fidelities to psi

    Raises:
        ArgumentError: psi is not a three-qubit register
    """
    _check_three_qubit_input(psi)
    v = local_cloner_isometry()
    total = apply_isometry(kron_all(v, v, v), psi)
    logger.debug(f"[BROADCAST-LOCAL] total output dims {list(total.dims)}")
    six_qubit = partial_trace(total, [1, 2, 4, 5, 7, 8])
    return _assemble("local", psi, six_qubit)


def broadcast_nonlocal(psi: StateVector) -> BroadcastResult:
    """
    Clone the register as one 8-dimensional system with the N = 8 cloner.

    Original and copy are reinterpreted as three qubits each, giving
    (1_0, 2_0, 3_0, 1_1, 2_1, 3_1, x), then reordered to the canonical order.

    Args:
        psi: Three-qubit input state, flattened to one 8-level system

    Returns:
        BroadcastResult in the same six-qubit order as broadcast_local

    Raises:
        ArgumentError: psi is not a three-qubit register
    """
    _check_three_qubit_input(psi)
    flat_input = StateVector(amps=psi.amps, dims=(8,))
    total = apply_isometry(nonlocal_cloner_isometry(8), flat_input)
    as_qubits = StateVector(amps=total.amps, dims=(2, 2, 2, 2, 2, 2, 8))
    grouped = partial_trace(as_qubits, [1, 2, 3, 4, 5, 6])
    six_qubit = permute_subsystems(grouped, [1, 4, 2, 5, 3, 6])
    return _assemble("nonlocal", psi, six_qubit)


def broadcast(psi: StateVector, mode: Mode) -> BroadcastResult:
    if mode == "local":
        return broadcast_local(psi)
    if mode == "nonlocal":
        return broadcast_nonlocal(psi)
    raise ArgumentError(f"mode must be 'local' or 'nonlocal', got {mode!r}")


def compare_broadcasts(psi: StateVector) -> BroadcastComparison:
    """Run both pipelines on the same input and compare the clones they leave."""
    comparison = BroadcastComparison.from_results(broadcast_local(psi), broadcast_nonlocal(psi))
    logger.info(f"[COMPARE] nonlocal more efficient: {comparison.nonlocal_more_efficient}")
    return comparison

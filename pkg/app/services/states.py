"""
Three-qubit pure states: construction, labels and the plain-text state file format.

State file format: exactly 8 lines, line k holds the real and imaginary part
of the amplitude at flat index k-1, separated by whitespace.
"""
import logging
import re
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np
from pydantic import model_validator

from app.config import settings
from app.exceptions import AmplitudeFormatError, LineCountError, NormError
from app.services.tensor_algebra import StateVector

logger = logging.getLogger(__name__)

N_QUBITS = 3
N_AMPLITUDES = 2 ** N_QUBITS

_NUMBER = r"(-?\d+(\.\d+)?([eE][+-]?\d+)?)"
AMPLITUDE_LINE = re.compile(rf"^\s*{_NUMBER}\s+{_NUMBER}\s*$", re.ASCII)
_LABEL = re.compile(r"^[01]{3}$")


class ThreeQubitState(StateVector):
    """Normalized pure state of three qubits."""

    dims: Tuple[int, ...] = (2, 2, 2)

    @model_validator(mode="after")
    def _check_three_qubits(self):
        if self.dims != (2, 2, 2):
            raise ValueError(f"three-qubit state needs dims (2, 2, 2), got {list(self.dims)}")
        if not self.normalized:
            raise ValueError("three-qubit state must be normalized")
        return self


def ghz() -> ThreeQubitState:
    """(|000> + |111>)/sqrt(2)."""
    amps = np.zeros(N_AMPLITUDES, dtype=complex)
    amps[0] = amps[7] = 1 / np.sqrt(2)
    return ThreeQubitState(amps=amps)


def basis_index(label: str) -> int:
    """Flat index of a bitstring label, qubit 1 most significant ("010" -> 2)."""
    if not isinstance(label, str) or not _LABEL.match(label):
        raise AmplitudeFormatError(f"basis label must be three characters of 0/1, got {label!r}")
    return int(label, 2)


def phi_label(k: int) -> str:
    """Bitstring of the k-th basis vector phi_k, k = 1..8 (phi_1 = 000, phi_8 = 111)."""
    if not 1 <= k <= N_AMPLITUDES:
        raise AmplitudeFormatError(f"phi label must be in 1..8, got {k}")
    return format(k - 1, "03b")


def basis_state(label: str) -> ThreeQubitState:
    amps = np.zeros(N_AMPLITUDES, dtype=complex)
    amps[basis_index(label)] = 1.0
    return ThreeQubitState(amps=amps)


def product_state(*qubits: Sequence[complex]) -> ThreeQubitState:
    """Normalized product of three single-qubit amplitude pairs."""
    if len(qubits) != N_QUBITS:
        raise AmplitudeFormatError(f"expected {N_QUBITS} single-qubit states, got {len(qubits)}")
    amps = np.array([1.0], dtype=complex)
    for q in qubits:
        q = np.asarray(q, dtype=complex)
        if q.shape != (2,) or np.linalg.norm(q) == 0:
            raise AmplitudeFormatError(f"single-qubit state must be a non-zero pair, got {q!r}")
        amps = np.kron(amps, q / np.linalg.norm(q))
    return ThreeQubitState(amps=amps)


def parse_state(text: str) -> ThreeQubitState:
    """
    Parse the 8-line amplitude format.

    Args:
        text: File contents, one "re im" pair per line in basis order

    Returns:
        The parsed state, renormalized when its norm is within PARSE_NORM_TOL of 1

    Raises:
        LineCountError: not exactly 8 non-trailing lines
        AmplitudeFormatError: a line is not two ASCII decimal numbers
        NormError: the norm is further than PARSE_NORM_TOL from 1
    """
    lines = text.splitlines()
    # trailing blank lines are ignored
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) != N_AMPLITUDES:
        raise LineCountError(f"expected 8 amplitude lines, got {len(lines)}")

    amps = np.zeros(N_AMPLITUDES, dtype=complex)
    for k, line in enumerate(lines):
        match = AMPLITUDE_LINE.match(line)
        if not match:
            raise AmplitudeFormatError(f"line {k + 1}: expected 're im' decimal pair, got {line!r}")
        amps[k] = complex(float(match.group(1)), float(match.group(4)))

    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > settings.PARSE_NORM_TOL:
        raise NormError(f"amplitude norm {norm:.9g} is not within {settings.PARSE_NORM_TOL:g} of 1")
    if norm != 1.0:
        logger.debug(f"Renormalizing parsed state (norm {norm!r})")
    return ThreeQubitState(amps=amps / norm)


def serialize_state(state: StateVector) -> str:
    """Inverse of parse_state; repr keeps every float bit-exact."""
    if len(state.amps) != N_AMPLITUDES:
        raise AmplitudeFormatError(f"only three-qubit states can be serialized, got length {len(state.amps)}")
    return "".join(f"{float(a.real)!r} {float(a.imag)!r}\n" for a in state.amps)


def load_state(path: Union[str, Path]) -> ThreeQubitState:
    """Read and parse a state file."""
    path = Path(path)
    logger.info(f"Loading state file {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise AmplitudeFormatError(f"{path}: not a UTF-8 text file ({e.reason})") from e
    return parse_state(text)

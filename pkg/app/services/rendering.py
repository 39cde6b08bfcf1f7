"""
Plain-text tables for reports, clone matrices and the verification suite.
"""
import logging
from fractions import Fraction
from typing import List, Optional

import numpy as np

from app.config import settings
from app.services.cloning import BroadcastResult
from app.services.entanglement import PAIRS, EntanglementReport, nonzero_entries
from app.services.tensor_algebra import DensityMatrix
from app.services.verification import VerificationReport

logger = logging.getLogger(__name__)

RULE = "=" * 60


def format_number(x: float) -> str:
    """12 significant digits; roundoff-sized values print as 0."""
    if abs(x) < settings.IMAG_TOL:
        x = 0.0
    return f"{x + 0.0:.{settings.SIGNIFICANT_DIGITS}g}"


def fraction_annotation(x: float, tolerance: Optional[float] = None) -> str:
    """' (= p/q)' when x is a small-denominator fraction within tolerance, else ''."""
    tolerance = settings.TOLERANCE if tolerance is None else tolerance
    f = Fraction(x).limit_denominator(settings.FRACTION_MAX_DENOMINATOR)
    if f.denominator == 1 or abs(float(f) - x) > tolerance:
        return ""
    return f" (= {f})"


def _labelled(x: float, tolerance: Optional[float] = None) -> str:
    return format_number(x) + fraction_annotation(x, tolerance)


def render_report(
    report: EntanglementReport,
    title: str = "Entanglement report",
    tolerance: Optional[float] = None,
) -> str:
    lines = [RULE, title, RULE]
    lines.append(f"E3        {_labelled(report.E3, tolerance)}")
    for m, n in PAIRS:
        lines.append(f"E2({m},{n})   {_labelled(report.e2(m, n), tolerance)}")
    for m in (1, 2, 3):
        lines.append(f"lambda({m}) [{', '.join(format_number(v) for v in report.coherence(m))}]")

    lines.append("Nonzero M-tensor entries:")
    for m, n in PAIRS:
        for label, value in nonzero_entries(report.m2(m, n)).items():
            lines.append(f"  M_{label}({m},{n}) = {_labelled(value, tolerance)}")
    for label, value in nonzero_entries(np.array(report.M123)).items():
        lines.append(f"  M_{label}(1,2,3) = {_labelled(value, tolerance)}")

    if report.range_violations:
        lines.append(f"Range violations (clamped): {', '.join(report.range_violations)}")
    return "\n".join(lines)


def render_matrix(rho: DensityMatrix, title: str) -> str:
    """Real and imaginary parts, one row per line."""
    lines = [f"{title} (real part)"]
    lines += ["  " + " ".join(f"{format_number(v):>15}" for v in row) for row in rho.mat.real]
    lines.append(f"{title} (imaginary part)")
    lines += ["  " + " ".join(f"{format_number(v):>15}" for v in row) for row in rho.mat.imag]
    return "\n".join(lines)


def render_broadcast(result: BroadcastResult, tolerance: Optional[float] = None) -> str:
    sections: List[str] = [
        RULE,
        f"Broadcast ({result.mode} cloning)",
        RULE,
        render_matrix(result.originals, "Clone density matrix (1_0, 2_0, 3_0)"),
        "",
        render_report(result.report_originals, "Originals (1_0, 2_0, 3_0)", tolerance),
        f"Fidelity  {_labelled(result.fidelity_originals, tolerance)}",
        "",
        render_report(result.report_copies, "Copies (1_1, 2_1, 3_1)", tolerance),
        f"Fidelity  {_labelled(result.fidelity_copies, tolerance)}",
    ]
    return "\n".join(sections)


def render_verification(report: VerificationReport) -> str:
    header = f"{'quantity':<44} {'published':>10} {'simulated':>16} {'oracle':>16} {'|delta|':>10}  status"
    lines = [RULE, f"Reproduction suite (tolerance {report.tolerance:g})", RULE, header, "-" * len(header)]
    for row in report.rows:
        oracle = format_number(row.oracle) if row.oracle is not None else "-"
        lines.append(
            f"{row.name:<44} {row.published:>10} {format_number(row.simulated):>16} "
            f"{oracle:>16} {row.delta:>10.3g}  {row.status}"
        )
    lines.append("-" * len(header))
    lines.append(f"{report.count('PASS')} PASS, {report.count('FLAG')} FLAG, {report.count('FAIL')} FAIL")
    return "\n".join(lines)

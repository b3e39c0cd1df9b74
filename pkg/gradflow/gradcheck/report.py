"""
Comparison of analytic and finite-difference gradients and its summary.
"""

# 3rd party imports
import numpy as np

RELATIVE_FLOOR = 1e-8
# below tolerance * ABSOLUTE_FACTOR an absolute error passes regardless of rel
ABSOLUTE_FACTOR = 0.1


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    """
    |a - b| / max(|a|, |b|, 1e-8), element-wise.
    """
    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), RELATIVE_FLOOR)
    return diff / scale


class GradCheckReport:
    """
    Outcome of a gradient check.

    Attributes
    ----------
    target : str
        What was checked, e.g. 'conv' or 'network:mini_conv'.
    max_rel_error : float
        Largest relative error over the checked coordinates.
    max_abs_error : float
        Largest absolute error over the checked coordinates.
    worst_coordinate : str
        Tensor name and index of the coordinate with the largest relative
        error, e.g. 'w[1, 0, 2, 2]'.
    passed : bool
        True if every checked coordinate has a relative error <= tolerance or
        an absolute error <= tolerance / 10.
    tolerance : float
    h : float
        Finite-difference step used (the best one of a step-size sweep).
    checked : int
        Number of coordinates compared.
    excluded : int
        Number of coordinates skipped at non-differentiable points.
    """

    def __init__(
        self,
        target: str,
        max_rel_error: float,
        max_abs_error: float,
        worst_coordinate: str,
        passed: bool,
        tolerance: float,
        h: float,
        checked: int,
        excluded: int = 0,
    ) -> None:
        self.target = target
        self.max_rel_error = float(max_rel_error)
        self.max_abs_error = float(max_abs_error)
        self.worst_coordinate = worst_coordinate
        self.passed = bool(passed)
        self.tolerance = float(tolerance)
        self.h = float(h)
        self.checked = int(checked)
        self.excluded = int(excluded)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "max_rel_error": self.max_rel_error,
            "max_abs_error": self.max_abs_error,
            "worst_coordinate": self.worst_coordinate,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "h": self.h,
            "checked": self.checked,
            "excluded": self.excluded,
        }

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.target:<24} {status:<5} max_rel={self.max_rel_error:.3e} "
            f"max_abs={self.max_abs_error:.3e} worst={self.worst_coordinate} "
            f"checked={self.checked} excluded={self.excluded}"
        )


def compare_gradients(
    target: str,
    analytic: dict[str, np.ndarray],
    numeric: dict[str, np.ndarray],
    tolerance: float,
    h: float,
    excluded: dict[str, np.ndarray] = None,
) -> GradCheckReport:
    """
    Compares analytic and numeric gradients tensor by tensor.

    Parameters
    ----------
    target: str
    analytic: dict[str, np.ndarray]
        Gradients from the backward rules, by tensor name.
    numeric: dict[str, np.ndarray]
        Central-difference estimates, same keys and shapes.
    tolerance: float
    h: float
    excluded: dict[str, np.ndarray]
        Optional boolean masks marking coordinates to skip.

    Returns
    -------
    GradCheckReport
    """
    excluded = excluded or {}
    max_rel, max_abs = 0.0, 0.0
    worst = "-"
    worst_key = (-1, -1.0)
    passed = True
    checked, skipped = 0, 0
    for name, a in analytic.items():
        b = numeric[name]
        mask = excluded.get(name, np.zeros(a.shape, dtype=bool))
        keep = ~mask
        skipped += int(np.sum(mask))
        checked += int(np.sum(keep))
        if not np.any(keep):
            continue
        rel = np.where(keep, relative_error(a, b), 0.0)
        err = np.where(keep, np.abs(a - b), 0.0)
        ok = (rel <= tolerance) | (err <= tolerance * ABSOLUTE_FACTOR)
        failing = keep & ~ok
        if np.any(failing):
            passed = False
        max_rel = max(max_rel, float(np.max(rel)))
        max_abs = max(max_abs, float(np.max(err)))
        # failing coordinates rank above passing ones
        candidates = np.where(failing, rel, -1.0) if np.any(failing) else rel
        idx = np.unravel_index(int(np.argmax(candidates)), a.shape)
        key = (int(np.any(failing)), float(rel[idx]))
        if key > worst_key:
            worst_key = key
            worst = f"{name}[{', '.join(str(i) for i in idx)}]"
    return GradCheckReport(
        target, max_rel, max_abs, worst, passed, tolerance, h, checked, skipped
    )


def format_table(reports: list[GradCheckReport]) -> str:
    """Renders one line per report plus a totals line."""
    lines = [str(report) for report in reports]
    failed = sum(not report.passed for report in reports)
    lines.append(f"{len(reports) - failed}/{len(reports)} checks passed")
    return "\n".join(lines)

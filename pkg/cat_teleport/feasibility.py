"""Whether a cavity-QED setup can run the Jaynes-Cummings correction before dissipation wins.

The coherent coupling √n̄·g0 has to dominate both atomic decay, √n̄·g0 ≫ γ, and cat-state
decoherence, √n̄·g0 ≫ n̄·κ. "≫" means a ratio of at least `ratio_threshold`. All rates are
angular (rad/s); presets quoted in Hz are converted on construction.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
from dataclasses import dataclass, replace
import logging
import math
from typing import NamedTuple

# Project dependencies
from cat_teleport.errors import InvalidParameter, UnknownPreset


logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CavityParams:
    g0: float
    gamma: float
    kappa: float
    nbar: float = 9.0
    ratio_threshold: float = 10.0

    def __post_init__(self) -> None:
        for name in ("g0", "gamma", "kappa", "ratio_threshold"):
            if not getattr(self, name) > 0.0:
                raise InvalidParameter(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.nbar >= 0.0:
            raise InvalidParameter(f"nbar must be >= 0, got {self.nbar}")


class FeasibilityReport(NamedTuple):
    params: CavityParams
    atom_ratio: float
    cavity_ratio: float
    atom_ok: bool
    cavity_ok: bool
    nbar_low: float
    nbar_high: float
    window_low: float
    window_high: float

    @property
    def feasible(self) -> bool:
        return self.atom_ok and self.cavity_ok


PRESETS: dict[str, CavityParams] = {
    # microwave cavity with Rydberg atoms: g0/2π = 47 kHz, 1/γ = 30 ms, 1/κ = 1 ms
    "rydberg": CavityParams(g0=TWO_PI * 47e3, gamma=1.0 / 30e-3, kappa=1.0 / 1e-3),
    # optical cavity with cesium: g0/2π = 32 MHz, γ/2π = 2.6 MHz, κ/2π = 4 MHz
    "cesium": CavityParams(g0=TWO_PI * 32e6, gamma=TWO_PI * 2.6e6, kappa=TWO_PI * 4e6),
}


def preset(
    name: str, nbar: float | None = None, ratio_threshold: float | None = None
) -> CavityParams:
    """A named parameter set, optionally with n̄ or the threshold replaced"""
    try:
        params = PRESETS[name.lower()]
    except KeyError:
        raise UnknownPreset(
            f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}"
        ) from None
    if nbar is not None:
        params = replace(params, nbar=nbar)
    if ratio_threshold is not None:
        params = replace(params, ratio_threshold=ratio_threshold)
    return params


def check_feasibility(params: CavityParams) -> FeasibilityReport:
    """Evaluate √n̄·g0/γ and √n̄·g0/(n̄·κ) and the n̄ window they imply.

    `nbar_low`/`nbar_high` are the bare bounds (γ/g0)² ≪ n̄ ≪ (g0/κ)². The window uses the
    threshold: (thr·γ/g0)² ≤ n̄ ≤ (g0/(thr·κ))².
    """
    root = math.sqrt(params.nbar)
    atom_ratio = root * params.g0 / params.gamma
    cavity_ratio = params.g0 / (root * params.kappa) if root > 0.0 else math.inf
    threshold = params.ratio_threshold
    report = FeasibilityReport(
        params=params,
        atom_ratio=atom_ratio,
        cavity_ratio=cavity_ratio,
        atom_ok=atom_ratio >= threshold,
        cavity_ok=cavity_ratio >= threshold,
        nbar_low=(params.gamma / params.g0) ** 2,
        nbar_high=(params.g0 / params.kappa) ** 2,
        window_low=(threshold * params.gamma / params.g0) ** 2,
        window_high=(params.g0 / (threshold * params.kappa)) ** 2,
    )
    logger.debug(f"feasibility: {report}")
    return report


def format_report(report: FeasibilityReport) -> str:
    params = report.params
    lines = [
        f"g0    = {params.g0:.6g} rad/s  (g0/2π = {params.g0 / TWO_PI:.6g} Hz)",
        f"gamma = {params.gamma:.6g} rad/s  (γ/2π = {params.gamma / TWO_PI:.6g} Hz)",
        f"kappa = {params.kappa:.6g} rad/s  (κ/2π = {params.kappa / TWO_PI:.6g} Hz)",
        f"nbar  = {params.nbar:.6g}, threshold = {params.ratio_threshold:.6g}",
        f"sqrt(nbar) g0 / gamma         = {report.atom_ratio:.4g}  "
        f"{'ok' if report.atom_ok else 'FAIL'}",
        f"sqrt(nbar) g0 / (nbar kappa)  = {report.cavity_ratio:.4g}  "
        f"{'ok' if report.cavity_ok else 'FAIL'}",
        f"bounds: {report.nbar_low:.2g} << nbar << {report.nbar_high:.2g}",
        f"window at threshold: {report.window_low:.4g} <= nbar <= {report.window_high:.4g}",
        f"feasible: {'yes' if report.feasible else 'no'}",
    ]
    return "\n".join(lines)

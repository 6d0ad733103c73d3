"""Resonant Jaynes-Cummings evolution of a two-level atom coupled to the cavity field, and the
field fidelities that follow from it.

The interaction-picture coupling is H = (g0/2)(a σ+ + a† σ−). An atom starting in |g⟩ with the
field in Σ c_n |n⟩ evolves into

    Σ_n c_n cos(√n g0 t/2) |g, n⟩ − i Σ_n c_n sin(√n g0 t/2) |e, n−1⟩

so only the product g0·t enters. Two fidelity paths are provided and checked against each other:
the closed-form double series (`fidelity_closed_form`) and the number-basis evolution
(`jc_evolve` + `field_fidelity`, or its batched form `FidelityKernel`).
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
from collections.abc import Callable
from dataclasses import dataclass
import logging
import math
from typing import NamedTuple

# Package dependencies
import numpy as np
import numpy.typing as npt
from scipy.linalg import expm
from scipy.optimize import minimize_scalar
from scipy.stats import poisson

# Project dependencies
from cat_teleport.errors import InvalidParameter, SeriesDiverged
from cat_teleport.fock_core import (
    DEFAULT_POLICY,
    ZERO_NORM_SQUARED,
    CoherentSuperposition,
    ComplexArray,
    FockVector,
    RealArray,
    TruncationPolicy,
    cat_amplification,
    choose_nmax,
    coherent_fock_amplitudes,
    normalized_cat_coefficients,
    to_fock,
)


logger = logging.getLogger(__name__)

SERIES_POLICY = TruncationPolicy(epsilon=1e-14)
GRID_POINTS = 200
RELATIVE_T_TOLERANCE = 1e-6
DEFAULT_WINDOW_FRACTION = 0.5
_INVERSE_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class JCParams:
    """Coupling g0 (rad/s) and interaction time t (s)"""

    g0: float
    t: float = 0.0

    def __post_init__(self) -> None:
        if not self.g0 > 0.0:
            raise InvalidParameter(f"g0 must be > 0, got {self.g0}")
        if not self.t >= 0.0:
            raise InvalidParameter(f"t must be >= 0, got {self.t}")


@dataclass(frozen=True)
class AtomFieldState:
    """Field amplitudes with the atom in |g⟩ (`g_amps`) and in |e⟩ (`e_amps`)"""

    g_amps: ComplexArray
    e_amps: ComplexArray

    def __post_init__(self) -> None:
        g_amps = np.array(self.g_amps, dtype=np.complex128).reshape(-1)
        e_amps = np.array(self.e_amps, dtype=np.complex128).reshape(-1)
        if g_amps.shape != e_amps.shape:
            raise InvalidParameter(f"g/e amplitudes differ in size: {g_amps.size} vs {e_amps.size}")
        g_amps.setflags(write=False)
        e_amps.setflags(write=False)
        object.__setattr__(self, "g_amps", g_amps)
        object.__setattr__(self, "e_amps", e_amps)

    @property
    def n_max(self) -> int:
        return int(self.g_amps.size - 1)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.g_amps) ** 2) + np.sum(np.abs(self.e_amps) ** 2))

    def reduced_density_matrix(self) -> ComplexArray:
        """Field density operator with the atom traced out"""
        return np.outer(self.g_amps, np.conj(self.g_amps)) + np.outer(
            self.e_amps, np.conj(self.e_amps)
        )


class HeraldedResult(NamedTuple):
    """Outcome of measuring the atom in |e⟩ after the interaction"""

    success_probability: float
    fidelity: float


class FmaxResult(NamedTuple):
    t_star: float
    f_max: float


def jc_evolve(field: FockVector, params: JCParams) -> AtomFieldState:
    """Evolve |g⟩ ⊗ field for time `params.t`"""
    if abs(field.norm_squared() - 1.0) > 1e-10:
        raise InvalidParameter(f"field must be normalized, norm² = {field.norm_squared():.12g}")
    angles = np.sqrt(np.arange(field.n_max + 1)) * params.g0 * params.t / 2.0
    g_amps = field.amps * np.cos(angles)
    e_amps = np.zeros_like(g_amps)
    # |g, n⟩ feeds |e, n−1⟩; |e, n_max⟩ would need n_max+1 photons and stays empty
    e_amps[:-1] = -1j * field.amps[1:] * np.sin(angles[1:])
    return AtomFieldState(g_amps, e_amps)


def jc_hamiltonian(n_max: int, g0: float) -> ComplexArray:
    """(g0/2)(a σ+ + a† σ−) on the truncated space, |g, n⟩ at index n and |e, n⟩ at
    index n_max+1+n
    """
    size = n_max + 1
    hamiltonian = np.zeros((2 * size, 2 * size), dtype=np.complex128)
    for n in range(1, size):
        coupling = 0.5 * g0 * math.sqrt(n)
        hamiltonian[size + n - 1, n] = coupling
        hamiltonian[n, size + n - 1] = coupling
    return hamiltonian


def jc_evolve_dense(field: FockVector, params: JCParams) -> AtomFieldState:
    """Brute-force `jc_evolve`: applies expm(−iHt) of the dense truncated Hamiltonian"""
    size = field.n_max + 1
    propagator = expm(-1j * jc_hamiltonian(field.n_max, params.g0) * params.t)
    initial = np.concatenate([field.amps, np.zeros(size, dtype=np.complex128)])
    final = propagator @ initial
    return AtomFieldState(final[:size], final[size:])


def excitation_probability(state: AtomFieldState) -> float:
    """P_e = Σ_n |e_n|²"""
    return float(np.sum(np.abs(state.e_amps) ** 2))


def field_fidelity(state: AtomFieldState, target: FockVector) -> float:
    """⟨target|ρ|target⟩ with ρ the atom-traced field state"""
    g_overlap = target.inner(FockVector(state.g_amps))
    e_overlap = target.inner(FockVector(state.e_amps))
    return float(abs(g_overlap) ** 2 + abs(e_overlap) ** 2)


def heralded_fidelity(state: AtomFieldState, target: FockVector) -> HeraldedResult:
    """Measure the atom, keep the |e⟩ branch. A branch with zero probability reports
    fidelity 0.
    """
    success = excitation_probability(state)
    if success < ZERO_NORM_SQUARED:
        return HeraldedResult(success, 0.0)
    overlap = target.inner(FockVector(state.e_amps))
    return HeraldedResult(success, float(abs(overlap) ** 2 / success))


def correction_fields(
    alpha: complex, x: complex, y: complex, policy: TruncationPolicy = DEFAULT_POLICY
) -> tuple[FockVector, FockVector]:
    """(initial field M(x|α⟩ − y|−α⟩), target x|α⟩ + y|−α⟩) in the number basis, with (x, y)
    first normalized so that the target has unit norm
    """
    x, y = normalized_cat_coefficients(alpha, x, y)
    n_max = choose_nmax([alpha], policy.tightened(cat_amplification(alpha)))
    initial = CoherentSuperposition.from_terms([(x, [alpha]), (-y, [-alpha])]).normalized()
    target = CoherentSuperposition.from_terms([(x, [alpha]), (y, [-alpha])])
    return to_fock(initial, n_max=n_max), to_fock(target, n_max=n_max)


def fidelity_trace(
    field: FockVector, target: FockVector, g0: float, times: npt.ArrayLike
) -> RealArray:
    """`field_fidelity(jc_evolve(field, t), target)` for an array of times"""
    times = np.asarray(times, dtype=float)
    size = min(field.amps.size, target.amps.size)
    c = field.amps[:size]
    d_conj = np.conj(target.amps[:size])
    angles = np.sqrt(np.arange(size))[None, :] * g0 * times.reshape(-1, 1) / 2.0
    ground = np.cos(angles) @ (d_conj * c)
    excited = np.sin(angles[:, 1:]) @ (d_conj[:-1] * c[1:])
    return (np.abs(ground) ** 2 + np.abs(excited) ** 2).reshape(times.shape)


def excitation_trace(field: FockVector, g0: float, times: npt.ArrayLike) -> RealArray:
    """`excitation_probability(jc_evolve(field, t))` for an array of times"""
    times = np.asarray(times, dtype=float)
    angles = np.sqrt(np.arange(field.amps.size))[None, :] * g0 * times.reshape(-1, 1) / 2.0
    return (np.sin(angles) ** 2 @ np.abs(field.amps) ** 2).reshape(times.shape)


def fidelity_closed_form_trace(
    alpha: complex,
    x: complex,
    y: complex,
    g0: float,
    times: npt.ArrayLike,
    policy: TruncationPolicy = SERIES_POLICY,
) -> RealArray:
    """The closed-form double series for F(t):

        F = |M|² e^{−2|α|²} { |Σ_n |α|^{2n}/n! (|x|²−|y|² + 2(−1)^n i Im(xy*)) cos(√n g0 t/2)|²
                            + |Σ_n |α|^{2n+1}/√(n!(n+1)!) |x+(−1)^n y|² sin(√(n+1) g0 t/2)|² }

    with |M|² = 1/(2(|x|²+|y|²) − 1). The e^{−|α|²} factors are folded into Poisson weights.
    """
    x, y = normalized_cat_coefficients(alpha, x, y)
    times = np.asarray(times, dtype=float)
    mean = abs(alpha) ** 2
    n_max = choose_nmax([alpha], policy)
    counts = np.arange(n_max + 1)
    signs = np.where(counts % 2 == 0, 1.0, -1.0)

    cos_weights = poisson.pmf(counts, mean)
    sin_weights = np.sqrt(poisson.pmf(counts, mean) * poisson.pmf(counts + 1, mean))
    if not (np.all(np.isfinite(cos_weights)) and np.all(np.isfinite(sin_weights))):
        raise SeriesDiverged(f"non-finite series weights at |α| = {abs(alpha):.6g}")
    if n_max > 0 and cos_weights[-1] > 1e-6 * cos_weights.max():
        raise SeriesDiverged(
            f"series terms still significant at cutoff n = {n_max} for |α| = {abs(alpha):.6g}"
        )

    cos_factors = abs(x) ** 2 - abs(y) ** 2 + 2j * signs * np.imag(x * np.conj(y))
    sin_factors = np.abs(x + signs * y) ** 2
    m_squared = 1.0 / (2.0 * (abs(x) ** 2 + abs(y) ** 2) - 1.0)

    gt = g0 * times.reshape(-1, 1) / 2.0
    first = np.cos(np.sqrt(counts) * gt) @ (cos_weights * cos_factors)
    second = np.sin(np.sqrt(counts + 1) * gt) @ (sin_weights * sin_factors)
    logger.debug(f"closed form: |α|={abs(alpha):.6g}, cutoff n={n_max}, {times.size} times")
    return (m_squared * (np.abs(first) ** 2 + np.abs(second) ** 2)).reshape(times.shape)


def fidelity_closed_form(alpha: complex, x: complex, y: complex, params: JCParams) -> float:
    """Closed-form fidelity at the single time `params.t`"""
    return float(fidelity_closed_form_trace(alpha, x, y, params.g0, [params.t])[0])


def fixed_time(alpha: complex, g0: float) -> float:
    """The blind interaction time π/(|α| g0)"""
    return math.pi / (abs(alpha) * g0)


def interior_peaks(values: RealArray) -> npt.NDArray[np.bool_]:
    """Mask of grid points strictly higher than both neighbours along the last axis. The first
    and last points are never peaks.
    """
    middle = values[..., 1:-1]
    inside = (middle > values[..., :-2]) & (middle > values[..., 2:])
    edge = np.zeros(values.shape[:-1] + (1,), dtype=bool)
    return np.concatenate([edge, inside, edge], axis=-1)


def search_fmax(
    fidelity: Callable[[RealArray], RealArray], t_center: float, window: float
) -> FmaxResult:
    """Maximize `fidelity(times)` over the local peaks inside
    [max(0, t_center − window), t_center + window].

    A 200-point grid locates the interior local maxima, each of which is refined by golden-section
    search to relative 1e−6 in t. Values on the window edges are not peaks and are never returned.
    `t_center` itself is always a candidate, so the result never falls below the value there and
    is exactly that value when the window holds no peak.
    """
    if not window > 0.0:
        raise InvalidParameter(f"window must be > 0, got {window}")
    grid = np.linspace(max(0.0, t_center - window), t_center + window, GRID_POINTS)
    values = fidelity(grid)
    candidates = [(t_center, float(fidelity(np.array([t_center]))[0]))]

    for peak in np.flatnonzero(interior_peaks(values)):
        candidates.append((float(grid[peak]), float(values[peak])))
        refined = minimize_scalar(
            lambda t: -float(fidelity(np.array([t]))[0]),
            bracket=(grid[peak - 1], grid[peak], grid[peak + 1]),
            method="golden",
            options={"xtol": RELATIVE_T_TOLERANCE},
        )
        if grid[peak - 1] < refined.x < grid[peak + 1]:
            candidates.append((float(refined.x), -float(refined.fun)))

    t_star, f_max = max(candidates, key=lambda candidate: candidate[1])
    logger.debug(
        f"search_fmax: t_center={t_center:.6g}, {len(candidates) - 1} peak candidates "
        f"-> t*={t_star:.9g}, F={f_max:.12g}"
    )
    return FmaxResult(t_star, f_max)


def find_fmax(
    alpha: complex,
    x: complex,
    y: complex,
    g0: float,
    window: float | None = None,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> FmaxResult:
    """Highest local peak of the number-basis fidelity near t = π/(|α| g0), see `search_fmax`.
    `window` is the search half-width, by default half of π/(|α| g0).
    """
    t_center = fixed_time(alpha, g0)
    if window is None:
        window = DEFAULT_WINDOW_FRACTION * t_center
    field, target = correction_fields(alpha, x, y, policy)
    return search_fmax(lambda times: fidelity_trace(field, target, g0, times), t_center, window)


class FidelityKernel:
    """The number-basis fidelity for one α, precomputed for batches of (x, y).

    Both the initial field M(x|α⟩ − y|−α⟩) and the target x|α⟩ + y|−α⟩ are combinations of the
    Fock vectors of |α⟩ and |−α⟩, so the fidelity is a bilinear form in (x, y) whose 2×2 kernels
    depend only on g0·t. All times here are dimensionless (g0·t).
    """

    def __init__(self, alpha: complex, policy: TruncationPolicy = DEFAULT_POLICY) -> None:
        self.__alpha = alpha
        self.__overlap = math.exp(-2.0 * abs(alpha) ** 2)
        n_max = choose_nmax([alpha], policy.tightened(cat_amplification(alpha)))
        basis = coherent_fock_amplitudes([alpha, -alpha], n_max)
        self.__pairs_cos = np.conj(basis)[:, None, :] * basis[None, :, :]
        self.__pairs_sin = np.conj(basis[:, :-1])[:, None, :] * basis[None, :, 1:]
        self.__roots_cos = np.sqrt(np.arange(n_max + 1))
        self.__roots_sin = np.sqrt(np.arange(1, n_max + 1))

    @property
    def alpha(self) -> complex:
        return self.__alpha

    def __coefficients(self, x: ComplexArray, y: ComplexArray) -> ComplexArray:
        """conj(target coeffs)_i · (field coeffs)_j per sample, shape (B, 2, 2)"""
        x = np.asarray(x, dtype=np.complex128)
        y = np.asarray(y, dtype=np.complex128)
        weight = np.abs(x) ** 2 + np.abs(y) ** 2
        cross = 2.0 * self.__overlap * np.real(np.conj(x) * y)
        target_norm = weight + cross
        field_norm = weight - cross
        target = np.stack([x, y], axis=-1) / np.sqrt(target_norm)[:, None]
        field = np.stack([x, -y], axis=-1) / np.sqrt(field_norm)[:, None]
        return np.conj(target)[:, :, None] * field[:, None, :]

    def __kernels(self, gt: RealArray) -> tuple[ComplexArray, ComplexArray]:
        half = np.asarray(gt, dtype=float)[..., None] / 2.0
        cos_part = np.einsum("...n,ijn->...ij", np.cos(self.__roots_cos * half), self.__pairs_cos)
        sin_part = np.einsum("...n,ijn->...ij", np.sin(self.__roots_sin * half), self.__pairs_sin)
        return cos_part, sin_part

    def fidelity_grid(self, x: ComplexArray, y: ComplexArray, gts: RealArray) -> RealArray:
        """F for every sample at every time of `gts`, shape (B, T)"""
        coefficients = self.__coefficients(x, y)
        cos_part, sin_part = self.__kernels(gts)
        ground = np.einsum("bij,tij->bt", coefficients, cos_part)
        excited = np.einsum("bij,tij->bt", coefficients, sin_part)
        return np.abs(ground) ** 2 + np.abs(excited) ** 2

    def fidelity_at(self, x: ComplexArray, y: ComplexArray, gts: RealArray) -> RealArray:
        """F for sample b at its own time gts[b], shape (B,)"""
        coefficients = self.__coefficients(x, y)
        cos_part, sin_part = self.__kernels(np.broadcast_to(gts, coefficients.shape[:1]))
        ground = np.einsum("bij,bij->b", coefficients, cos_part)
        excited = np.einsum("bij,bij->b", coefficients, sin_part)
        return np.abs(ground) ** 2 + np.abs(excited) ** 2

    def maximize(
        self,
        x: ComplexArray,
        y: ComplexArray,
        window_fraction: float = DEFAULT_WINDOW_FRACTION,
    ) -> tuple[RealArray, RealArray]:
        """Batched `find_fmax`: the same grid scan, run for every sample at once. The highest
        interior peak of each row is refined by golden-section search, and rows without a peak
        keep π/|α|. Returns (g0·t*, F_max), both of shape (B,).
        """
        center = math.pi / abs(self.__alpha)
        window = window_fraction * center
        grid = np.linspace(max(0.0, center - window), center + window, GRID_POINTS)
        values = self.fidelity_grid(x, y, grid)
        peaks = interior_peaks(values)
        has_peak = np.any(peaks, axis=1)
        # Rows without a peak are refined around the center and then discarded
        best = np.where(has_peak, np.argmax(np.where(peaks, values, -np.inf), axis=1), 1)
        rows = np.arange(best.size)

        low = grid[best - 1]
        high = grid[best + 1]
        width = float(grid[1] - grid[0]) * 2.0
        shrink = math.log(RELATIVE_T_TOLERANCE * center / width) / math.log(_INVERSE_GOLDEN)
        steps = max(1, math.ceil(shrink))

        inner_low = high - _INVERSE_GOLDEN * (high - low)
        inner_high = low + _INVERSE_GOLDEN * (high - low)
        f_low = self.fidelity_at(x, y, inner_low)
        f_high = self.fidelity_at(x, y, inner_high)
        for _ in range(steps):
            keep_left = f_low > f_high
            low = np.where(keep_left, low, inner_low)
            high = np.where(keep_left, inner_high, high)
            moved_low = np.where(keep_left, high - _INVERSE_GOLDEN * (high - low), inner_high)
            moved_high = np.where(keep_left, inner_low, low + _INVERSE_GOLDEN * (high - low))
            fresh = self.fidelity_at(x, y, np.where(keep_left, moved_low, moved_high))
            f_low, f_high = np.where(keep_left, fresh, f_high), np.where(keep_left, f_low, fresh)
            inner_low, inner_high = moved_low, moved_high

        refined_t = (low + high) / 2.0
        centers = np.full(best.size, center)
        stacked_t = np.stack([centers, grid[best], refined_t], axis=1)
        stacked_f = np.stack(
            [
                self.fidelity_at(x, y, centers),
                np.where(has_peak, values[rows, best], -np.inf),
                np.where(has_peak, self.fidelity_at(x, y, refined_t), -np.inf),
            ],
            axis=1,
        )
        choice = np.argmax(stacked_f, axis=1)
        return stacked_t[rows, choice], stacked_f[rows, choice]

"""State representations for single- and multi-mode fields.

`CoherentSuperposition` is the exact representation used throughout the protocol: a weighted
list of products of coherent states, closed under beam splitters, parity and photon-number
projection. `FockVector` is a truncated photon-number amplitude vector derived from it on demand,
and is what the Jaynes-Cummings dynamics and the oracle checks work with.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
from dataclasses import dataclass
import logging
from typing import Sequence

# Package dependencies
import numpy as np
import numpy.typing as npt
from scipy.special import gammaln, xlogy
from scipy.stats import poisson

# Project dependencies
from cat_teleport.errors import (
    BadMode,
    CapExceeded,
    DegenerateAlpha,
    InvalidParameter,
    MultiModeState,
    ZeroState,
)


logger = logging.getLogger(__name__)

ComplexScalar = complex
ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

ZERO_NORM_SQUARED = 1e-30
DEGENERATE_ALPHA = 1e-6


def _frozen(array: npt.ArrayLike, dtype: type = np.complex128) -> npt.NDArray:
    """Copy into a read-only array so the containing value stays immutable"""
    result = np.array(array, dtype=dtype)
    result.setflags(write=False)
    return result


@dataclass(frozen=True)
class TruncationPolicy:
    """How far Fock-space representations are truncated"""

    epsilon: float = 1e-12
    n_max_cap: int = 4096

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidParameter(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.n_max_cap < 1:
            raise InvalidParameter(f"n_max_cap must be >= 1, got {self.n_max_cap}")

    def tightened(self, amplification: float) -> TruncationPolicy:
        """The same policy with `epsilon` divided by `amplification` when that exceeds one"""
        if amplification <= 1.0:
            return self
        return TruncationPolicy(self.epsilon / amplification, self.n_max_cap)


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class CoherentSuperposition:
    """Σ_k coeffs[k] · ⊗_m |amplitudes[k, m]⟩ over `n_modes` modes.

    `amplitudes` has shape `(n_terms, n_modes)`. A state with zero modes is a plain complex
    number (the sum of the coefficients); it appears only as an intermediate result.
    """

    coeffs: ComplexArray
    amplitudes: ComplexArray

    def __post_init__(self) -> None:
        coeffs = _frozen(self.coeffs).reshape(-1)
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.ndim != 2 or amplitudes.shape[0] != coeffs.shape[0]:
            raise InvalidParameter(
                f"amplitudes must have shape (n_terms, n_modes) with n_terms={coeffs.shape[0]}, "
                f"got {amplitudes.shape}"
            )
        if not (np.all(np.isfinite(coeffs)) and np.all(np.isfinite(amplitudes))):
            raise InvalidParameter("state contains non-finite coefficients or amplitudes")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_terms(
        cls, terms: Sequence[tuple[complex, Sequence[complex]]], n_modes: int | None = None
    ) -> CoherentSuperposition:
        """Build a state from `(coeff, [amplitude per mode])` pairs"""
        if not terms:
            if n_modes is None:
                raise InvalidParameter("an empty state needs an explicit n_modes")
            return cls(np.zeros(0), np.zeros((0, n_modes)))
        widths = {len(amplitudes) for _, amplitudes in terms}
        if len(widths) != 1 or (n_modes is not None and widths != {n_modes}):
            raise InvalidParameter(f"every term must have the same number of modes, got {widths}")
        return cls(
            np.array([coeff for coeff, _ in terms], dtype=np.complex128),
            np.array([list(amplitudes) for _, amplitudes in terms], dtype=np.complex128),
        )

    @classmethod
    def coherent(cls, alpha: complex) -> CoherentSuperposition:
        """The single-mode coherent state |α⟩"""
        return cls(np.array([1.0]), np.array([[alpha]]))

    @property
    def n_modes(self) -> int:
        return int(self.amplitudes.shape[1])

    @property
    def n_terms(self) -> int:
        return int(self.amplitudes.shape[0])

    def check_mode(self, mode: int) -> None:
        """Raise `BadMode` unless `mode` indexes one of the state's modes"""
        if not 0 <= mode < self.n_modes:
            raise BadMode(f"mode {mode} is out of range for a {self.n_modes}-mode state")

    def scaled(self, factor: complex) -> CoherentSuperposition:
        return CoherentSuperposition(self.coeffs * factor, self.amplitudes)

    def gram(self, other: CoherentSuperposition | None = None) -> ComplexArray:
        """Matrix of term overlaps G[j, k] = Π_m ⟨self_j,m | other_k,m⟩"""
        other = self if other is None else other
        if other.n_modes != self.n_modes:
            raise InvalidParameter(
                f"cannot overlap a {self.n_modes}-mode state with a {other.n_modes}-mode state"
            )
        left = self.amplitudes[:, None, :]
        right = other.amplitudes[None, :, :]
        exponent = -0.5 * np.abs(left) ** 2 - 0.5 * np.abs(right) ** 2 + np.conj(left) * right
        return np.exp(exponent.sum(axis=2))

    def inner(self, other: CoherentSuperposition) -> complex:
        """⟨self|other⟩"""
        return complex(np.conj(self.coeffs) @ self.gram(other) @ other.coeffs)

    def norm_squared(self) -> float:
        return max(float(np.real(self.inner(self))), 0.0)

    def amplification(self) -> float:
        """(Σ_k |coeffs_k|)² / ‖state‖², how much larger the terms are than their sum. Near-
        cancelling terms, as in cats at small |α|, make this large.
        """
        norm_squared = self.norm_squared()
        if norm_squared < ZERO_NORM_SQUARED:
            raise ZeroState(f"a state with norm² = {norm_squared:.3e} has no amplification")
        return float(np.sum(np.abs(self.coeffs)) ** 2 / norm_squared)

    def normalized(self) -> CoherentSuperposition:
        """Rescale to unit norm. Raises `ZeroState` for a numerically zero state."""
        norm_squared = self.norm_squared()
        if norm_squared < ZERO_NORM_SQUARED:
            raise ZeroState(f"cannot normalize a state with norm² = {norm_squared:.3e}")
        return self.scaled(1.0 / np.sqrt(norm_squared))

    def tensor(self, other: CoherentSuperposition) -> CoherentSuperposition:
        """self ⊗ other; the modes of `other` follow the modes of `self`"""
        coeffs = np.outer(self.coeffs, other.coeffs).reshape(-1)
        amplitudes = np.concatenate(
            [
                np.repeat(self.amplitudes, other.n_terms, axis=0),
                np.tile(other.amplitudes, (self.n_terms, 1)),
            ],
            axis=1,
        )
        return CoherentSuperposition(coeffs, amplitudes)

    def permuted(self, order: Sequence[int]) -> CoherentSuperposition:
        """Reorder the modes: new mode i is old mode order[i]"""
        if sorted(order) != list(range(self.n_modes)):
            raise BadMode(f"{list(order)} is not a permutation of {self.n_modes} modes")
        return CoherentSuperposition(self.coeffs, self.amplitudes[:, list(order)])

    def canonical(
        self, merge_tol: float = 1e-12, drop_tol: float = 1e-15
    ) -> CoherentSuperposition:
        """Merge terms whose amplitude vectors are within `merge_tol`, drop coefficients below
        `drop_tol`, and sort the remaining terms by amplitude.
        """
        merged_coeffs: list[complex] = []
        merged_amplitudes: list[ComplexArray] = []
        for coeff, amplitudes in zip(self.coeffs, self.amplitudes):
            for index, existing in enumerate(merged_amplitudes):
                if np.max(np.abs(existing - amplitudes), initial=0.0) < merge_tol:
                    merged_coeffs[index] += coeff
                    break
            else:
                merged_coeffs.append(complex(coeff))
                merged_amplitudes.append(amplitudes)

        kept = [
            (coeff, amplitudes)
            for coeff, amplitudes in zip(merged_coeffs, merged_amplitudes)
            if abs(coeff) >= drop_tol
        ]
        # Rounded keys, so amplitudes that differ only by rounding noise sort the same way
        kept.sort(
            key=lambda term: tuple(
                round(float(value), 9) + 0.0
                for amplitude in term[1]
                for value in (amplitude.real, amplitude.imag)
            )
        )
        return CoherentSuperposition.from_terms(
            [(coeff, list(amplitudes)) for coeff, amplitudes in kept], n_modes=self.n_modes
        )

    def matches(
        self, other: CoherentSuperposition, atol: float = 1e-10, up_to_phase: bool = True
    ) -> bool:
        """Term-by-term comparison after canonicalization. With `up_to_phase` a global phase
        difference is ignored.
        """
        left, right = self.canonical(), other.canonical()
        if left.n_terms != right.n_terms or left.n_modes != right.n_modes:
            return False
        if not np.allclose(left.amplitudes, right.amplitudes, atol=1e-12, rtol=0.0):
            return False
        if left.n_terms == 0:
            return True
        if up_to_phase:
            pivot = int(np.argmax(np.abs(left.coeffs)))
            if abs(right.coeffs[pivot]) == 0.0:
                return False
            phase = left.coeffs[pivot] / right.coeffs[pivot]
            phase /= abs(phase)
            return bool(np.allclose(left.coeffs, right.coeffs * phase, atol=atol, rtol=0.0))
        return bool(np.allclose(left.coeffs, right.coeffs, atol=atol, rtol=0.0))


@dataclass(frozen=True)
class FockVector:
    """Truncated photon-number amplitudes ⟨n|ψ⟩ for n = 0..n_max"""

    amps: ComplexArray

    def __post_init__(self) -> None:
        amps = _frozen(self.amps).reshape(-1)
        if amps.size == 0:
            raise InvalidParameter("a FockVector needs at least one amplitude")
        if not np.all(np.isfinite(amps)):
            raise InvalidParameter("FockVector contains non-finite amplitudes")
        object.__setattr__(self, "amps", amps)

    @property
    def n_max(self) -> int:
        return int(self.amps.size - 1)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def truncation_loss(self) -> float:
        """1 − Σ|amps_n|², the weight lost by truncating a unit-norm state"""
        return 1.0 - self.norm_squared()

    def inner(self, other: FockVector) -> complex:
        """⟨self|other⟩ over the common truncation"""
        size = min(self.amps.size, other.amps.size)
        return complex(np.vdot(self.amps[:size], other.amps[:size]))

    def normalized(self) -> FockVector:
        norm_squared = self.norm_squared()
        if norm_squared < ZERO_NORM_SQUARED:
            raise ZeroState(f"cannot normalize a Fock vector with norm² = {norm_squared:.3e}")
        return FockVector(self.amps / np.sqrt(norm_squared))

    def parity(self) -> FockVector:
        """(−1)^{a†a} applied in the number basis"""
        signs = np.where(np.arange(self.amps.size) % 2 == 0, 1.0, -1.0)
        return FockVector(self.amps * signs)


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """⟨β|α⟩ = exp(−|α|²/2 − |β|²/2 + conj(β)·α)"""
    exponent = -0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + np.conj(beta) * alpha
    return complex(np.exp(exponent))


def choose_nmax(alphas: Sequence[complex], policy: TruncationPolicy = DEFAULT_POLICY) -> int:
    """Smallest n such that, for every amplitude, the Poisson(|α|²) weight beyond n is below
    `policy.epsilon`. The tail grows with |α|, so only the largest amplitude matters.
    """
    if len(alphas) == 0:
        raise InvalidParameter("choose_nmax needs at least one amplitude")
    mean = max(abs(alpha) for alpha in alphas) ** 2
    if mean == 0.0:
        return 0
    counts = np.arange(policy.n_max_cap + 1)
    tails = poisson.sf(counts, mean)
    below = np.flatnonzero(tails < policy.epsilon)
    if below.size == 0:
        raise CapExceeded(
            f"|α|² = {mean:.4g} needs more than {policy.n_max_cap} photons for a tail "
            f"below {policy.epsilon:g}"
        )
    n_max = int(below[0])
    logger.debug(f"choose_nmax: |α|²={mean:.6g}, epsilon={policy.epsilon:g} -> {n_max}")
    return n_max


def state_nmax(
    state: CoherentSuperposition,
    modes: Sequence[int] | None = None,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> int:
    """Smallest common cutoff for which truncating `state` on every mode of `modes` (default:
    all) loses at most `policy.epsilon` of its weight.

    The tail of Σ c_k |α_k⟩ is bounded by (Σ|c_k|)² times the largest single-term tail, so the
    per-term bound handed to `choose_nmax` is divided by the state's amplification and by the
    number of truncated modes.
    """
    modes = list(range(state.n_modes)) if modes is None else list(modes)
    if not modes:
        raise InvalidParameter("state_nmax needs at least one mode")
    for mode in modes:
        state.check_mode(mode)
    tightened = policy.tightened(state.amplification() * len(modes))
    return choose_nmax([alpha for mode in modes for alpha in state.amplitudes[:, mode]], tightened)


def coherent_fock_amplitudes(alphas: npt.ArrayLike, n_max: int) -> ComplexArray:
    """e^{−|α|²/2} α^n / √(n!) for n = 0..n_max, one row per amplitude. Magnitudes are
    evaluated in log space and the phase n·arg(α) is tracked separately.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=np.complex128))
    counts = np.arange(n_max + 1)
    moduli = np.abs(alphas)[:, None]
    # xlogy takes 0 · log 0 as 0, so the vacuum row is (1, 0, 0, ...)
    log_magnitude = xlogy(counts, moduli) - 0.5 * gammaln(counts + 1) - 0.5 * moduli**2
    phase = np.exp(1j * counts * np.angle(alphas)[:, None])
    return np.exp(log_magnitude) * phase


def to_fock(
    state: CoherentSuperposition,
    mode: int = 0,
    n_max: int | None = None,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> FockVector:
    """Number-basis amplitudes of a single-mode state, Σ_k coeff_k · ⟨n|α_k⟩.
    `n_max` defaults to `state_nmax`, so the truncation loses at most `policy.epsilon`.
    """
    if state.n_modes != 1:
        raise MultiModeState(f"to_fock needs a single-mode state, got {state.n_modes} modes")
    state.check_mode(mode)
    if n_max is None:
        n_max = state_nmax(state, [mode], policy)
    rows = coherent_fock_amplitudes(state.amplitudes[:, mode], n_max)
    return FockVector(state.coeffs @ rows)


def parity_apply(state: CoherentSuperposition, mode: int) -> CoherentSuperposition:
    """(−1)^{a†a} on one mode: negates that mode's amplitude in every term"""
    state.check_mode(mode)
    amplitudes = np.array(state.amplitudes)
    amplitudes[:, mode] = -amplitudes[:, mode]
    return CoherentSuperposition(state.coeffs, amplitudes)


def cat_norm_squared(alpha: complex, x: complex, y: complex) -> float:
    """‖x|α⟩ + y|−α⟩‖² = |x|² + |y|² + 2·e^{−2|α|²}·Re(conj(x)·y)"""
    overlap = np.exp(-2.0 * abs(alpha) ** 2)
    return float(abs(x) ** 2 + abs(y) ** 2 + 2.0 * overlap * np.real(np.conj(x) * y))


def input_cat(alpha: complex, x: complex, y: complex) -> CoherentSuperposition:
    """x|α⟩ + y|−α⟩, rescaled to unit norm"""
    norm_squared = cat_norm_squared(alpha, x, y)
    if norm_squared < ZERO_NORM_SQUARED:
        raise ZeroState(f"x|α⟩ + y|−α⟩ has norm² = {norm_squared:.3e}")
    if abs(norm_squared - 1.0) > 1e-12:
        logger.debug(f"input_cat: rescaling from norm² = {norm_squared:.15g}")
    scale = 1.0 / np.sqrt(norm_squared)
    return CoherentSuperposition.from_terms([(x * scale, [alpha]), (y * scale, [-alpha])])


def normalized_cat_coefficients(alpha: complex, x: complex, y: complex) -> tuple[complex, complex]:
    """(x, y) rescaled so that x|α⟩ + y|−α⟩ has unit norm"""
    norm_squared = cat_norm_squared(alpha, x, y)
    if norm_squared < ZERO_NORM_SQUARED:
        raise ZeroState(f"x|α⟩ + y|−α⟩ has norm² = {norm_squared:.3e}")
    scale = 1.0 / np.sqrt(norm_squared)
    return complex(x * scale), complex(y * scale)


def even_odd_normalizations(alpha: complex) -> tuple[float, float]:
    """(N_e, N_o) = (1/√(2(1+e^{−2|α|²})), 1/√(2(1−e^{−2|α|²})))"""
    if abs(alpha) < DEGENERATE_ALPHA:
        raise DegenerateAlpha(f"|α| = {abs(alpha):.3e} makes the odd cat singular")
    decay = np.exp(-2.0 * abs(alpha) ** 2)
    n_even = 1.0 / np.sqrt(2.0 * (1.0 + decay))
    n_odd = 1.0 / np.sqrt(-2.0 * np.expm1(-2.0 * abs(alpha) ** 2))
    return float(n_even), float(n_odd)


def cat_amplification(alpha: complex) -> float:
    """Largest `amplification` of a unit-norm x|α⟩ ± y|−α⟩ over all (x, y), reached by the odd
    cat: (2 N_o)² = 2/(1 − e^{−2|α|²})
    """
    _, n_odd = even_odd_normalizations(alpha)
    return 4.0 * n_odd**2


def cat_from_bloch(alpha: complex, theta: float, phi: float) -> tuple[complex, complex]:
    """(x, y) of sin(θ/2)|α_e⟩ + cos(θ/2)e^{iφ}|α_o⟩, with |α_e⟩ and |α_o⟩ the normalized even
    and odd cats. The result is normalized by construction.
    """
    if not 0.0 <= theta <= np.pi:
        raise InvalidParameter(f"theta must lie in [0, π], got {theta}")
    x, y = cats_from_bloch(alpha, np.asarray([theta]), np.asarray([phi]))
    return complex(x[0]), complex(y[0])


def cats_from_bloch(
    alpha: complex, thetas: RealArray, phis: RealArray
) -> tuple[ComplexArray, ComplexArray]:
    """Vectorized `cat_from_bloch` for arrays of angles"""
    n_even, n_odd = even_odd_normalizations(alpha)
    even = np.sin(np.asarray(thetas) / 2.0) * n_even
    odd = np.cos(np.asarray(thetas) / 2.0) * np.exp(1j * np.asarray(phis)) * n_odd
    return even + odd, even - odd


def trace_distance(a: FockVector, b: FockVector) -> float:
    """½‖ρ_a − ρ_b‖₁ for two pure states, from the eigenvalues of the difference"""
    size = max(a.amps.size, b.amps.size)
    left = np.pad(a.amps, (0, size - a.amps.size))
    right = np.pad(b.amps, (0, size - b.amps.size))
    difference = np.outer(left, np.conj(left)) - np.outer(right, np.conj(right))
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(difference))))

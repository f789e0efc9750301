"""Special functions: Bessel J_m, its positive zeros, and erf of complex argument."""
from __future__ import annotations

import logging
import threading
from typing import Union

import numpy as np
from scipy import optimize, special

from .errors import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Box on which erf_complex is documented to work.
ERF_DOMAIN = 1.0e3
# Below this modulus erf is evaluated directly; above it through w(z).
ERF_SERIES_RADIUS = 0.5

NEWTON_ITERATIONS = 50


def bessel_j(m: int, x: ArrayLike) -> ArrayLike:
    """Bessel function of the first kind J_m(x) for integer order m >= 0.

    Args:
        m: Nonnegative integer order
        x: Finite real argument (scalar or array)

    Returns:
        J_m(x) with the shape of ``x``
    """
    if m < 0 or int(m) != m:
        raise DomainError(f"Bessel order must be a nonnegative integer, got {m}")
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("Bessel argument must be finite")
    result = special.jv(int(m), values)
    if np.ndim(result) == 0:
        return float(result)
    return result


def _mcmahon(m: int, l: np.ndarray) -> np.ndarray:
    """Asymptotic (large l) estimate of the l-th positive zero of J_m."""
    beta = (l + 0.5 * m - 0.25) * np.pi
    mu = 4.0 * m * m
    eight_beta = 8.0 * beta
    return (
        beta
        - (mu - 1.0) / eight_beta
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * eight_beta**3)
    )


def _polish(m: int, guess: np.ndarray) -> np.ndarray:
    """Newton iteration on J_m, vectorized over the guesses."""
    x = guess.copy()
    for _ in range(NEWTON_ITERATIONS):
        jm = special.jv(m, x)
        derivative = m * jm / x - special.jv(m + 1, x)
        step = jm / derivative
        x -= step
        if np.all(np.abs(step) <= 4.0 * np.finfo(float).eps * np.abs(x)):
            break
    return x


def _bracketed_zero(m: int, l: int, guess: float) -> float:
    """Fallback: bisection-style root finding around the asymptotic guess."""
    width = 0.5 * np.pi
    lo, hi = max(guess - width, 1e-8), guess + width
    while special.jv(m, lo) * special.jv(m, hi) > 0:
        width *= 1.5
        lo, hi = max(guess - width, 1e-8), guess + width
    logger.debug(f"Newton failed for zero ({m}, {l}); bracketing in [{lo}, {hi}]")
    return optimize.brentq(lambda t: special.jv(m, t), lo, hi, xtol=1e-15, rtol=4e-16)


class BesselZeroTable:
    """Cache of positive zeros x_{ml} of J_m.

    Zeros are computed in blocks per order and stored as arrays; filling is
    serialized with a lock, reads of already computed entries are lock-free
    copies of immutable arrays.
    """

    def __init__(self) -> None:
        self._zeros: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def __contains__(self, key: tuple[int, int]) -> bool:
        m, l = key
        return m in self._zeros and 1 <= l <= self._zeros[m].size

    def zeros(self, m: int, count: int) -> np.ndarray:
        """First ``count`` zeros of J_m, strictly increasing."""
        if m < 0 or int(m) != m:
            raise DomainError(f"Bessel order must be a nonnegative integer, got {m}")
        if count < 1:
            raise DomainError(f"zero index must be >= 1, got {count}")
        cached = self._zeros.get(m)
        if cached is None or cached.size < count:
            with self._lock:
                cached = self._zeros.get(m)
                if cached is None or cached.size < count:
                    size = max(count, 2 * (cached.size if cached is not None else 32))
                    cached = self._compute(int(m), size)
                    self._zeros[m] = cached
        return cached[:count].copy()

    def zero(self, m: int, l: int) -> float:
        if l < 1:
            raise DomainError(f"zero index l must be >= 1, got {l}")
        return float(self.zeros(m, l)[l - 1])

    @staticmethod
    def _compute(m: int, count: int) -> np.ndarray:
        logger.debug(f"Computing {count} zeros of J_{m}")
        index = np.arange(1, count + 1, dtype=float)
        guess = _mcmahon(m, index)
        roots = _polish(m, guess)
        # A Newton step may jump to a neighbouring zero for small l at larger m.
        spacing_ok = np.abs(roots - guess) < 0.5 * np.pi
        ordered = np.concatenate(([True], np.diff(roots) > 1.0))
        residual_ok = np.abs(special.jv(m, roots)) < 1e-12
        bad = ~(spacing_ok & ordered & residual_ok)
        for i in np.flatnonzero(bad):
            roots[i] = _bracketed_zero(m, i + 1, guess[i])
        if np.any(np.diff(roots) <= 0):
            raise DomainError(f"zeros of J_{m} are not strictly increasing")
        return roots


_TABLE = BesselZeroTable()


def bessel_zeros(m: int, count: int) -> np.ndarray:
    """The first ``count`` positive zeros of J_m as an array."""
    return _TABLE.zeros(m, count)


def bessel_zero(m: int, l: int) -> float:
    """The l-th positive zero x_{ml} of J_m (l starts at 1).

    Args:
        m: Nonnegative integer order
        l: Positive zero index

    Returns:
        x_{ml}, with |J_m(x_{ml})| < 1e-12

    Raises:
        DomainError: If ``l < 1`` or ``m`` is negative
    """
    return _TABLE.zero(m, l)


def _erfc_right(z: np.ndarray) -> np.ndarray:
    # erfc(z) = exp(-z^2) w(iz); w(iz) is bounded for Re z >= 0.
    with np.errstate(over="ignore", invalid="ignore"):
        return np.exp(-z * z) * special.wofz(1j * z)


def erf_complex(z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
    """Error function of a complex argument.

    Uses the Faddeeva function w(z) = exp(-z^2) erfc(-iz) away from the
    origin, reflecting into the right half plane so that only bounded values
    of w are needed; near the origin erf is evaluated directly.

    Raises:
        DomainError: If |Re z| or |Im z| exceeds 1e3
    """
    scalar = np.ndim(z) == 0
    values = np.atleast_1d(np.asarray(z, dtype=complex))
    if not np.all(np.isfinite(values)):
        raise DomainError("erf argument must be finite")
    if np.any(np.abs(values.real) > ERF_DOMAIN) or np.any(np.abs(values.imag) > ERF_DOMAIN):
        raise DomainError(f"erf argument outside |Re z|, |Im z| <= {ERF_DOMAIN:g}")

    sign = np.where(values.real < 0, -1.0, 1.0)
    right = values * sign
    small = np.abs(values) < ERF_SERIES_RADIUS
    result = np.empty_like(values)
    result[small] = special.erf(values[small])
    result[~small] = sign[~small] * (1.0 - _erfc_right(right[~small]))
    if scalar:
        return complex(result[0])
    return result.reshape(np.shape(z))


def erf_difference(upper, lower):
    """erf(upper) - erf(lower) without the documented box of :func:`erf_complex`.

    Differences of erf at large arguments are formed from the complementary
    function so that the leading ±1 terms cancel exactly; this keeps the
    combination accurate (and finite) far outside |Re z|, |Im z| <= 1e3
    whenever exp(-z^2) itself does not overflow, e.g. on the diagonals
    z = x(1 ± i).
    """
    scalar = np.ndim(upper) == 0 and np.ndim(lower) == 0
    z1, z0 = np.broadcast_arrays(
        np.atleast_1d(np.asarray(upper, dtype=complex)),
        np.atleast_1d(np.asarray(lower, dtype=complex)),
    )
    if not (np.all(np.isfinite(z1)) and np.all(np.isfinite(z0))):
        raise DomainError("erf argument must be finite")

    result = np.empty(z1.shape, dtype=complex)
    small = (np.abs(z1) < ERF_SERIES_RADIUS) & (np.abs(z0) < ERF_SERIES_RADIUS)
    result[small] = special.erf(z1[small]) - special.erf(z0[small])

    s1 = np.where(z1.real < 0, -1.0, 1.0)
    s0 = np.where(z0.real < 0, -1.0, 1.0)
    e1 = _erfc_right(s1 * z1)
    e0 = _erfc_right(s0 * z0)
    # erf(z) = s (1 - erfc(s z)) with s the sign of Re z.
    same = ~small & (s1 == s0)
    result[same] = s1[same] * (e0[same] - e1[same])
    mixed = ~small & (s1 != s0)
    result[mixed] = s1[mixed] * (1.0 - e1[mixed]) - s0[mixed] * (1.0 - e0[mixed])
    if scalar:
        return complex(result[0])
    return result

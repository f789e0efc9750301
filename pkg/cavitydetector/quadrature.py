"""Quadrature of unit-amplitude oscillatory exponentials ∫ e^{iθ(τ)} dτ.

The interval is cut where θ'' vanishes and where θ' changes sign, so that on
every segment θ is monotone and θ' is monotone. Segments carrying little
phase, and windows around their end points, are integrated with composite
Gauss-Legendre rules whose subpanels each carry at most π/2 of phase. The
remaining stretches use Levin's method: the non-oscillatory solution of

    p'(τ) + iθ'(τ) p(τ) = 1

is found by Chebyshev collocation and the integral is p e^{iθ} evaluated
between the panel ends. Panels are refined worst-first until the summed
error estimate meets the tolerance.
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize

from .errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)

PhaseFunction = Callable[[np.ndarray], np.ndarray]

# Phase carried by one Gauss-Legendre subpanel.
PHASE_CAP = 0.5 * math.pi
GL_ORDER = 12
GL_CHECK_ORDER = 8

LEVIN_NODES = 17
# Segments must turn through at least this many cycles before Levin is used.
LEVIN_MIN_2PI_CYCLES = 10
LEVIN_MIN_PHASE = LEVIN_MIN_2PI_CYCLES * 2.0 * math.pi
# Below one cycle a collocation panel is badly conditioned.
LEVIN_PANEL_MIN_PHASE = 2.0 * math.pi

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-30
DEFAULT_MAX_PANELS = 20000

EPS = np.finfo(float).eps
ROUNDOFF_FACTOR = 64.0


@dataclass(frozen=True)
class PhasePiece:
    """The exponential e^{iθ(τ)}.

    Attributes:
        phase: θ, vectorized over τ
        rate: θ', vectorized over τ
        turning_points: Points where θ'' = 0; θ' is monotone between them
        scale: Length over which θ' changes by a factor of order e, if known
    """
    phase: PhaseFunction
    rate: PhaseFunction
    turning_points: tuple[float, ...] = ()
    scale: Optional[float] = None

    def theta(self, tau: float) -> float:
        return float(self.phase(np.asarray(tau, dtype=float)))

    def theta_prime(self, tau: float) -> float:
        return float(self.rate(np.asarray(tau, dtype=float)))


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    panels: int


@dataclass
class _Panel:
    a: float
    b: float
    levin: bool
    value: complex = 0j
    error: float = 0.0
    noise: float = 0.0
    count: int = 1

    def __lt__(self, other: "_Panel") -> bool:
        # heapq is a min-heap; the largest error must come first.
        return self.error > other.error


@lru_cache(maxsize=8)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(order)


@lru_cache(maxsize=4)
def _chebyshev(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev-Lobatto nodes (descending from 1) and differentiation matrix."""
    n = n_nodes - 1
    x = np.cos(np.pi * np.arange(n_nodes) / n)
    c = np.ones(n_nodes)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n_nodes)
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n_nodes))
    d -= np.diag(d.sum(axis=1))
    return x, d


def _phase_bound(piece: PhasePiece, a: float, b: float) -> float:
    """Upper bound of |θ(b) - θ(a)| on a panel where θ' is monotone."""
    ends = np.abs(piece.rate(np.array([a, b])))
    return float(ends.max()) * (b - a)


def _gauss_legendre_panel(piece: PhasePiece, a: float, b: float, density: float = 1.0):
    """Composite Gauss-Legendre on [a, b]; returns (value, error, noise, subpanels)."""
    count = max(1, int(math.ceil(density * _phase_bound(piece, a, b) / PHASE_CAP)))
    edges = np.linspace(a, b, count + 1)
    left, half = edges[:-1], 0.5 * np.diff(edges)

    def rule(order: int) -> tuple[complex, float]:
        x, w = _gauss_legendre(order)
        tau = (left + half)[:, None] + half[:, None] * x[None, :]
        theta = piece.phase(tau)
        value = complex(np.sum(half[:, None] * w[None, :] * np.exp(1j * theta)))
        return value, float(np.max(np.abs(theta)))

    value, theta_max = rule(GL_ORDER)
    check, _ = rule(GL_CHECK_ORDER)
    noise = ROUNDOFF_FACTOR * EPS * (b - a) * (1.0 + theta_max)
    return value, abs(value - check), noise, count


def _levin_values(piece: PhasePiece, a: np.ndarray, b: np.ndarray):
    """Batched Levin collocation; returns values and the size of p at the ends."""
    x, d = _chebyshev(LEVIN_NODES)
    half = 0.5 * (b - a)
    tau = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    rate = piece.rate(tau)
    system = d[None, :, :] / half[:, None, None] + 0j
    idx = np.arange(LEVIN_NODES)
    system[:, idx, idx] += 1j * rate
    rhs = np.ones((a.size, LEVIN_NODES, 1), dtype=complex)
    p = np.linalg.solve(system, rhs)[:, :, 0]
    theta_b, theta_a = piece.phase(b), piece.phase(a)
    value = p[:, 0] * np.exp(1j * theta_b) - p[:, -1] * np.exp(1j * theta_a)
    size = np.abs(p[:, 0]) + np.abs(p[:, -1])
    size *= 1.0 + np.maximum(np.abs(theta_a), np.abs(theta_b))
    return value, size


class OscillatoryQuadrature:
    """Adaptive integrator for ∫ e^{iθ(τ)} dτ.

    Args:
        rtol: Relative tolerance on the integral
        atol: Absolute error floor
        max_panels: Panel budget; exceeding it raises QuadratureError
    """

    def __init__(
        self,
        rtol: float = DEFAULT_RTOL,
        atol: float = DEFAULT_ATOL,
        max_panels: int = DEFAULT_MAX_PANELS,
    ) -> None:
        if not rtol > 0 or atol < 0 or max_panels < 1:
            raise DomainError("quadrature tolerances must be positive")
        self.rtol = rtol
        self.atol = atol
        self.max_panels = max_panels

    def __repr__(self) -> str:
        return (
            f"OscillatoryQuadrature(rtol={self.rtol:g}, atol={self.atol:g}, "
            f"max_panels={self.max_panels})"
        )

    def segments(self, piece: PhasePiece, t0: float, t1: float) -> list[float]:
        """Break points of [t0, t1]: turning points of θ' and stationary points of θ."""
        points = [t0] + sorted(p for p in piece.turning_points if t0 < p < t1) + [t1]
        cuts = [t0]
        for u, v in zip(points[:-1], points[1:]):
            ru, rv = piece.theta_prime(u), piece.theta_prime(v)
            if ru * rv < 0:
                stationary = optimize.brentq(piece.theta_prime, u, v, xtol=1e-14 * max(1.0, abs(v)))
                if u < stationary < v:
                    cuts.append(stationary)
            cuts.append(v)
        return cuts

    def _window_end(self, piece: PhasePiece, anchor: float, other: float) -> float:
        """Point between anchor and other where the phase has moved LEVIN_MIN_PHASE."""
        theta0 = piece.theta(anchor)
        return optimize.brentq(
            lambda s: abs(piece.theta(s) - theta0) - LEVIN_MIN_PHASE,
            min(anchor, other),
            max(anchor, other),
            xtol=1e-14 * max(1.0, abs(anchor), abs(other)),
        )

    def _initial_panels(self, piece: PhasePiece, t0: float, t1: float) -> list[_Panel]:
        panels: list[_Panel] = []
        cuts = self.segments(piece, t0, t1)
        for u, v in zip(cuts[:-1], cuts[1:]):
            if not v > u:
                continue
            swing = abs(piece.theta(v) - piece.theta(u))
            if swing <= 3.0 * LEVIN_MIN_PHASE:
                panels.append(_Panel(u, v, levin=False))
                continue
            w_left = self._window_end(piece, u, v)
            w_right = self._window_end(piece, v, u)
            panels.append(_Panel(u, w_left, levin=False))
            panels.append(_Panel(w_right, v, levin=False))
            pieces = 1
            if piece.scale:
                pieces = max(1, int(math.ceil((w_right - w_left) / (0.5 * piece.scale))))
            edges = np.linspace(w_left, w_right, pieces + 1)
            panels.extend(
                _Panel(float(p), float(q), levin=True) for p, q in zip(edges[:-1], edges[1:])
            )
        return panels

    def _evaluate(self, piece: PhasePiece, panels: list[_Panel]) -> None:
        levin = []
        for panel in panels:
            if panel.levin and _phase_bound(piece, panel.a, panel.b) < 2.0 * LEVIN_PANEL_MIN_PHASE:
                panel.levin = False
            if panel.levin:
                levin.append(panel)
            else:
                panel.value, panel.error, panel.noise, panel.count = _gauss_legendre_panel(
                    piece, panel.a, panel.b
                )
        if not levin:
            return
        a = np.array([p.a for p in levin])
        b = np.array([p.b for p in levin])
        m = 0.5 * (a + b)
        try:
            values, sizes = _levin_values(
                piece, np.concatenate((a, a, m)), np.concatenate((b, m, b))
            )
        except np.linalg.LinAlgError:
            logger.warning("Levin collocation singular; using Gauss-Legendre panels")
            for panel in levin:
                panel.levin = False
                panel.value, panel.error, panel.noise, panel.count = _gauss_legendre_panel(
                    piece, panel.a, panel.b
                )
            return
        k = len(levin)
        whole, left, right = values[:k], values[k:2 * k], values[2 * k:]
        for i, panel in enumerate(levin):
            panel.value = complex(left[i] + right[i])
            panel.error = float(abs(whole[i] - panel.value))
            panel.noise = ROUNDOFF_FACTOR * EPS * float(sizes[k + i] + sizes[2 * k + i])
            panel.count = 1

    def integrate(self, piece: PhasePiece, t0: float, t1: float) -> QuadratureResult:
        """∫_{t0}^{t1} e^{iθ(τ)} dτ with an absolute error estimate.

        Raises:
            QuadratureError: If the panel budget runs out before convergence
        """
        if not t1 >= t0:
            raise DomainError(f"integration bounds out of order: [{t0}, {t1}]")
        if t1 == t0:
            return QuadratureResult(0j, 0.0, 0)

        panels = self._initial_panels(piece, t0, t1)
        self._evaluate(piece, panels)
        heap = list(panels)
        heapq.heapify(heap)

        while True:
            total = complex(sum(p.value for p in heap))
            error = sum(p.error for p in heap)
            noise = sum(p.noise for p in heap)
            used = sum(p.count for p in heap)
            target = max(self.atol, self.rtol * abs(total), noise)
            if error <= target:
                return QuadratureResult(total, error, used)
            if used >= self.max_panels:
                logger.debug(
                    f"Quadrature budget exhausted: {used} panels, "
                    f"error {error:.3e}, target {target:.3e}"
                )
                raise QuadratureError(
                    f"no convergence within {self.max_panels} panels "
                    f"(error estimate {error:.3e}, |value| {abs(total):.3e})",
                    estimate=error,
                )

            # Split every panel whose error is above its share of the target.
            share = target / len(heap)
            worst = [heapq.heappop(heap)]
            while heap and heap[0].error > share and len(worst) < 64:
                worst.append(heapq.heappop(heap))
            children = []
            for panel in worst:
                mid = 0.5 * (panel.a + panel.b)
                children.append(_Panel(panel.a, mid, panel.levin))
                children.append(_Panel(mid, panel.b, panel.levin))
            self._evaluate(piece, children)
            for child in children:
                heapq.heappush(heap, child)

    def sine_transform(
        self, plus: PhasePiece, minus: PhasePiece, t0: float, t1: float
    ) -> QuadratureResult:
        """∫ sin(ψ) e^{iφ} dτ = (J₊ - J₋)/(2i), where J± integrate e^{i(φ ± ψ)}."""
        j_plus = self.integrate(plus, t0, t1)
        j_minus = self.integrate(minus, t0, t1)
        return QuadratureResult(
            (j_plus.value - j_minus.value) / 2j,
            0.5 * (j_plus.error + j_minus.error),
            j_plus.panels + j_minus.panels,
        )


def integrate_gauss_legendre(
    piece: PhasePiece, t0: float, t1: float, density: float = 4.0
) -> complex:
    """Non-adaptive reference: composite Gauss-Legendre with ``density`` times
    as many subpanels as the π/2 phase cap requires."""
    if not density > 0:
        raise DomainError(f"density must be positive, got {density}")
    cuts = [t0] + sorted(p for p in piece.turning_points if t0 < p < t1) + [t1]
    total = 0j
    for u, v in zip(cuts[:-1], cuts[1:]):
        if v > u:
            value, _, _, _ = _gauss_legendre_panel(piece, u, v, density=density)
            total += value
    return total

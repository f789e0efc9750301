"""Modes of a massless scalar field in a cylindrical cavity with Dirichlet walls.

    u_{mln}(r, φ, z, t) = A_{mln} e^{imφ} e^{-iωt} sin(nπz/L) J_m(x_{ml} r/ρ)
    ω_{mln} = sqrt((x_{ml}/ρ)² + (nπ/L)²)
    A_{mln} = 1 / (ρ sqrt(Lπω) |J_{m+1}(x_{ml})|)
"""
from __future__ import annotations

import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, QuadratureError
from .models import CavityGeometry, ModeData, ModeIndex
from .specfun import bessel_j, bessel_zero, bessel_zeros

logger = logging.getLogger(__name__)

KG_TOLERANCE = 1e-6
DEFAULT_RESOLUTION = 48


def mode_frequency(geom: CavityGeometry, idx: ModeIndex) -> float:
    """Angular frequency ω of mode ``idx``."""
    return math.hypot(bessel_zero(idx.m, idx.l) / geom.radius, idx.n * math.pi / geom.length)


def normalization(geom: CavityGeometry, idx: ModeIndex) -> float:
    """Delta-normalization constant A_{mln} > 0."""
    omega = mode_frequency(geom, idx)
    j_next = abs(bessel_j(idx.m + 1, bessel_zero(idx.m, idx.l)))
    return 1.0 / (geom.radius * math.sqrt(geom.length * math.pi * omega) * j_next)


def mode_data(geom: CavityGeometry, idx: ModeIndex) -> ModeData:
    return ModeData(index=idx, omega=mode_frequency(geom, idx), norm_A=normalization(geom, idx))


def frequency_grid(geom: CavityGeometry, cutoffs: tuple[int, int], m: int = 0) -> np.ndarray:
    """ω for l = 1..N_l (rows) and n = 1..N_n (columns) at azimuthal order m."""
    n_l, n_n = cutoffs
    radial = bessel_zeros(m, n_l) / geom.radius
    longitudinal = np.arange(1, n_n + 1) * np.pi / geom.length
    return np.hypot(radial[:, None], longitudinal[None, :])


def normalization_grid(
    geom: CavityGeometry, cutoffs: tuple[int, int], m: int = 0
) -> np.ndarray:
    """A_{mln} on the same grid as :func:`frequency_grid`."""
    n_l, _ = cutoffs
    j_next = np.abs(bessel_j(m + 1, bessel_zeros(m, n_l)))
    omega = frequency_grid(geom, cutoffs, m)
    return 1.0 / (geom.radius * np.sqrt(geom.length * np.pi * omega) * j_next[:, None])


def mode_function(
    geom: CavityGeometry, idx: ModeIndex, r, phi, z, t
):
    """Evaluate u_{mln}(r, φ, z, t); arguments may be numpy arrays.

    Raises:
        DomainError: If a point lies outside 0 <= r <= ρ, 0 <= z <= L
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(r < 0) or np.any(r > geom.radius):
        raise DomainError(f"radial coordinate outside [0, {geom.radius}]")
    if np.any(z < 0) or np.any(z > geom.length):
        raise DomainError(f"longitudinal coordinate outside [0, {geom.length}]")
    data = mode_data(geom, idx)
    x = bessel_zero(idx.m, idx.l)
    value = (
        data.norm_A
        * np.exp(1j * (idx.m * np.asarray(phi) - data.omega * np.asarray(t)))
        * np.sin(idx.n * np.pi * z / geom.length)
        * bessel_j(idx.m, x * r / geom.radius)
    )
    if np.ndim(value) == 0:
        return complex(value)
    return value


def _inner_product(
    geom: CavityGeometry, a: ModeIndex, b: ModeIndex, resolution: int
) -> complex:
    nodes, weights = leggauss(resolution)

    # φ over [0, 2π]
    phi = np.pi * (nodes + 1.0)
    i_phi = np.pi * np.sum(weights * np.exp(1j * (b.m - a.m) * phi))

    # z over [0, L]
    z = 0.5 * geom.length * (nodes + 1.0)
    i_z = 0.5 * geom.length * np.sum(
        weights
        * np.sin(a.n * np.pi * z / geom.length)
        * np.sin(b.n * np.pi * z / geom.length)
    )

    # r over [0, ρ]
    r = 0.5 * geom.radius * (nodes + 1.0)
    x_a = bessel_zero(a.m, a.l)
    x_b = bessel_zero(b.m, b.l)
    i_r = 0.5 * geom.radius * np.sum(
        weights
        * r
        * bessel_j(a.m, x_a * r / geom.radius)
        * bessel_j(b.m, x_b * r / geom.radius)
    )

    omega_a, omega_b = mode_frequency(geom, a), mode_frequency(geom, b)
    return complex(
        (omega_a + omega_b) * normalization(geom, a) * normalization(geom, b) * i_phi * i_z * i_r
    )


def kg_inner_product(
    geom: CavityGeometry,
    idx_a: ModeIndex,
    idx_b: ModeIndex,
    resolution: int = DEFAULT_RESOLUTION,
) -> complex:
    """Klein-Gordon inner product (u_a, u_b) on the t = 0 slice.

    At t = 0 the product reduces to (ω_a + ω_b) ∫ u_a* u_b d³x, which is
    separable in r, φ, z; each factor is integrated with ``resolution``
    Gauss-Legendre nodes and checked against twice that many.

    Raises:
        QuadratureError: If the two resolutions disagree by more than 1e-6
    """
    if resolution < 2:
        raise DomainError(f"resolution must be >= 2, got {resolution}")
    coarse = _inner_product(geom, idx_a, idx_b, resolution)
    fine = _inner_product(geom, idx_a, idx_b, 2 * resolution)
    estimate = abs(fine - coarse)
    if estimate > KG_TOLERANCE:
        logger.error(
            f"KG inner product of {idx_a} and {idx_b} unresolved at {resolution} nodes "
            f"(difference {estimate:.3e})"
        )
        raise QuadratureError(
            f"inner product not converged at resolution {resolution}", estimate=estimate
        )
    return fine

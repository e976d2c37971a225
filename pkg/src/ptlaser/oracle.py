"""
Independent numerical references for the closed-form element matrices.

``integrate_helmholtz`` solves E'' + k^2 eps(x) E = 0 directly with RK4;
``expm_coupled_mode`` exponentiates the coupled-mode generator by scaling and
squaring. Neither touches the Fresnel or cosh/sinh formulas.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .core import PTLaserError, TransferMatrix

HALVING_RTOL = 1e-6


class StepTooLargeError(PTLaserError):
    """Step-halving changed the result by more than ``HALVING_RTOL``."""


def layered_profile(layers: Sequence[tuple[float, complex]], n0: float = 1.0, x0: float = 0.0):
    """Piecewise-constant ``eps(x)`` from ``(thickness, eps)`` pairs starting at ``x0``.

    Returns ``(eps, breakpoints, (x0, x_end))``. Outside the layers eps = n0**2.
    """
    edges = [x0]
    for thickness, _ in layers:
        edges.append(edges[-1] + thickness)
    values = [complex(e) for _, e in layers]
    background = complex(n0 * n0)

    def eps(x: float) -> complex:
        for lo, hi, v in zip(edges[:-1], edges[1:], values):
            if lo <= x < hi:
                return v
        return values[-1] if x == edges[-1] and values else background

    return eps, edges, (edges[0], edges[-1])


def _rk4(eps, k, edges, step, n0):
    k2 = k * k
    # columns: right-going and left-going unit waves at the left edge
    e = [1 + 0j, 1 + 0j]
    de = [1j * k * n0, -1j * k * n0]
    for lo, hi in zip(edges[:-1], edges[1:]):
        width = hi - lo
        if width <= 0:
            continue
        n = max(1, math.ceil(width / step - 1e-12))
        h = width / n
        for i in range(n):
            x = lo + i * h
            # sample strictly inside the segment so jumps at edges are respected
            f0 = -k2 * eps(x if i else math.nextafter(lo, hi))
            fm = -k2 * eps(x + h / 2)
            f1 = -k2 * eps(x + h if i < n - 1 else math.nextafter(hi, lo))
            for j in range(2):
                y, dy = e[j], de[j]
                k1y, k1d = dy, f0 * y
                k2y, k2d = dy + h / 2 * k1d, fm * (y + h / 2 * k1y)
                k3y, k3d = dy + h / 2 * k2d, fm * (y + h / 2 * k2y)
                k4y, k4d = dy + h * k3d, f1 * (y + h * k3y)
                e[j] = y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
                de[j] = dy + h / 6 * (k1d + 2 * k2d + 2 * k3d + k4d)
    return e, de


def _integrate(eps, k, edges, step, n0):
    kn = k * n0
    e, de = _rk4(eps, k, edges, step, n0)
    # left-edge initial data: (E, E') = (1, +i k n0) and (1, -i k n0)
    cols = []
    for j in range(2):
        c = (e[j] + de[j] / (1j * kn)) / 2
        d = (e[j] - de[j] / (1j * kn)) / 2
        cols.append((c, d))
    return TransferMatrix(cols[0][0], cols[1][0], cols[0][1], cols[1][1])


def integrate_helmholtz(
    eps_profile: Callable[[float], complex],
    k: float,
    x_span: tuple[float, float],
    step: float,
    n0: float = 1.0,
    breakpoints: Sequence[float] = (),
    check: bool = True,
) -> TransferMatrix:
    """Transfer matrix of ``eps_profile`` over ``x_span`` by direct RK4 integration.

    Parameters
    ----------
    eps_profile : callable
        Complex dielectric constant as a function of position.
    k : float
        Vacuum wavenumber, in inverse units of ``x``.
    x_span : (float, float)
        Left and right boundaries; ``eps = n0**2`` is assumed beyond them.
    step : float
        Maximum integration step. Each smooth piece between ``breakpoints``
        is split into equal steps no larger than this.
    n0 : float
        Background index used to decompose the field into exp(+-i k n0 x).
    breakpoints : sequence of float
        Discontinuities of ``eps_profile`` inside ``x_span``.
    check : bool
        Repeat with half the step and raise :class:`StepTooLargeError` when the
        two results differ by more than ``HALVING_RTOL`` (relative to the
        largest entry). The half-step result is returned.

    Returns
    -------
    TransferMatrix
        Amplitudes referenced at the left boundary on the left and at the
        right boundary on the right.
    """
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step}")
    x_lo, x_hi = x_span
    if not x_hi > x_lo:
        raise ValueError("x_span must have positive length")
    edges = sorted({x_lo, x_hi, *(b for b in breakpoints if x_lo < b < x_hi)})
    coarse = _integrate(eps_profile, k, edges, step, n0)
    if not check:
        return coarse
    fine = _integrate(eps_profile, k, edges, step / 2, n0)
    diff = (fine.as_array() - coarse.as_array())
    scale = np.abs(fine.as_array()).max()
    if np.abs(diff).max() > HALVING_RTOL * scale:
        raise StepTooLargeError(
            f"step {step} too large: halving changed the matrix by {np.abs(diff).max() / scale:.2e} (relative)"
        )
    return fine


def coupled_mode_generator(q0l: float, rhol: complex) -> np.ndarray:
    """``A = [[-i rhoL, -i q0L], [i q0L, i rhoL]]``."""
    return np.array([[-1j * rhol, -1j * q0l], [1j * q0l, 1j * rhol]], dtype=complex)


def expm2(a: np.ndarray, terms: int = 20) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a Taylor core."""
    a = np.asarray(a, dtype=complex)
    norm = np.abs(a).sum(axis=1).max()
    s = max(0, math.ceil(math.log2(norm / 0.25))) if norm > 0 else 0
    b = a / 2.0**s
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for j in range(1, terms + 1):
        term = term @ b / j
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def expm_coupled_mode(q0l: float, rhol: complex) -> TransferMatrix:
    """exp(A) for the coupled-mode generator of one grating section."""
    return TransferMatrix.from_array(expm2(coupled_mode_generator(q0l, rhol)))

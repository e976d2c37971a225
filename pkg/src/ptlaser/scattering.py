"""
Scattering coefficients and the overall output/input intensity ratio Theta.

Theta = (|b|^2 + |c|^2) / (|a|^2 + |d|^2) for inputs a (left) and d (right).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LasingPoleError, TransferMatrix

MODES = ("single_left", "single_right", "coherent", "incoherent")

# |m22| at or below this fraction of the largest entry counts as a pole
POLE_RTOL = 1e-13


@dataclass(frozen=True)
class ScatteringCoefficients:
    t: complex
    r_left: complex
    r_right: complex

    @property
    def T(self):
        return np.abs(self.t) ** 2

    @property
    def R_left(self):
        return np.abs(self.r_left) ** 2

    @property
    def R_right(self):
        return np.abs(self.r_right) ** 2


@dataclass(frozen=True)
class TwoPortInput:
    """Excitation with ``d/a = sigma * exp(i*phi)``.

    ``phi`` only matters in coherent mode; incoherent mode averages over it.
    """

    mode: str = "single_left"
    sigma: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown excitation mode {self.mode!r}; expected one of {MODES}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")

    @classmethod
    def from_ratio(cls, ratio: complex, mode: str = "coherent") -> "TwoPortInput":
        ratio = complex(ratio)
        return cls(mode, abs(ratio), float(np.angle(ratio)))

    @property
    def ratio(self) -> complex:
        return self.sigma * np.exp(1j * self.phi)


def _check_pole(m: TransferMatrix):
    if np.any(np.abs(m.m22) <= POLE_RTOL * m.norm()):
        raise LasingPoleError("M22 vanishes: evaluation point sits on a lasing pole")


def s_coefficients(m: TransferMatrix) -> ScatteringCoefficients:
    """``t = 1/m22``, ``r_left = -m21/m22``, ``r_right = m12/m22``."""
    _check_pole(m)
    return ScatteringCoefficients(1 / m.m22, -m.m21 / m.m22, m.m12 / m.m22)


def outputs(m: TransferMatrix, a, d):
    """Outgoing amplitudes ``(b, c)`` for incoming ``a`` (left) and ``d`` (right)."""
    _check_pole(m)
    b = (d - m.m21 * a) / m.m22
    c = m.m11 * a + m.m12 * b
    return b, c


def theta(m: TransferMatrix, excitation: TwoPortInput):
    """Overall reflection/transmission coefficient for ``excitation``.

    The two-port formulas assume ``det m = 1``.
    """
    _check_pole(m)
    m22sq = np.abs(m.m22) ** 2
    mode = excitation.mode
    if mode == "single_left":
        return (1 + np.abs(m.m21) ** 2) / m22sq
    if mode == "single_right":
        return (1 + np.abs(m.m12) ** 2) / m22sq
    s = excitation.sigma
    if mode == "coherent":
        z = excitation.ratio
        num = np.abs(1 + z * m.m12) ** 2 + np.abs(z - m.m21) ** 2
        return num / ((1 + s * s) * m22sq)
    num = 1 + s * s + s * s * np.abs(m.m12) ** 2 + np.abs(m.m21) ** 2
    return num / ((1 + s * s) * m22sq)


def cpa_input(m: TransferMatrix):
    """Input ratio ``d/a = m21`` that cancels every outgoing wave where m11 = 0."""
    return m.m21

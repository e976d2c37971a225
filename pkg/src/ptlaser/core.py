"""
2x2 complex transfer-matrix algebra shared by every other module.

Frequencies are dimensionless detunings ``delta = (w - w_ref) * n0 * L / c0``.
A negative imaginary part marks a decaying (below-threshold) resonance.

Entries of a :class:`TransferMatrix` may be Python complex scalars or
broadcast-compatible numpy arrays, so a whole spectral grid can be evaluated
in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PTLaserError(Exception):
    """Base class for errors raised by this package."""


class LasingPoleError(PTLaserError):
    """Raised when M22 vanishes, so scattering quantities diverge."""


@dataclass(frozen=True)
class TransferMatrix:
    """Maps left-side amplitudes (a, b) to right-side amplitudes (c, d)."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return mat_mul(self, other)

    @property
    def det(self):
        return mat_det(self)

    def as_array(self) -> np.ndarray:
        """Stack entries into an array of shape ``(..., 2, 2)``."""
        m11, m12, m21, m22 = np.broadcast_arrays(
            *(np.asarray(v, dtype=complex) for v in (self.m11, self.m12, self.m21, self.m22))
        )
        return np.stack([np.stack([m11, m12], -1), np.stack([m21, m22], -1)], -2)

    @classmethod
    def from_array(cls, arr) -> "TransferMatrix":
        arr = np.asarray(arr, dtype=complex)
        return cls(arr[..., 0, 0], arr[..., 0, 1], arr[..., 1, 0], arr[..., 1, 1])

    def norm(self):
        """Largest entry modulus (elementwise over a grid)."""
        return np.maximum.reduce([np.abs(self.m11), np.abs(self.m12), np.abs(self.m21), np.abs(self.m22)])

    def conj(self) -> "TransferMatrix":
        return TransferMatrix(np.conj(self.m11), np.conj(self.m12), np.conj(self.m21), np.conj(self.m22))


IDENTITY = TransferMatrix(1 + 0j, 0j, 0j, 1 + 0j)


def mat_mul(left: TransferMatrix, right: TransferMatrix) -> TransferMatrix:
    """Matrix product ``left @ right``.

    ``right`` acts first, so in a stack it is the element further to the left.
    """
    return TransferMatrix(
        left.m11 * right.m11 + left.m12 * right.m21,
        left.m11 * right.m12 + left.m12 * right.m22,
        left.m21 * right.m11 + left.m22 * right.m21,
        left.m21 * right.m12 + left.m22 * right.m22,
    )


def mat_det(m: TransferMatrix):
    return m.m11 * m.m22 - m.m12 * m.m21


def diagonal(u, v) -> TransferMatrix:
    zero = np.zeros_like(np.asarray(u, dtype=complex))
    if zero.ndim == 0:
        zero = 0j
    return TransferMatrix(u, zero, zero, v)


@dataclass(frozen=True)
class SpectralGrid:
    """Evenly spaced real detunings from ``start`` to ``stop`` inclusive."""

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"grid count must be an integer >= 2, got {self.count!r}")
        if not self.start < self.stop:
            raise ValueError(f"grid needs start < stop, got {self.start} and {self.stop}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))

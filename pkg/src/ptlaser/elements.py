"""
Transfer matrices of the physical building blocks and their composition.

Every builder takes dimensionless products (q0*L, g*L, k*l, phases) rather
than raw lengths, indices and frequencies. Amplitudes are referenced at the
local boundaries of each element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np

from .core import TransferMatrix, diagonal, mat_mul

# |lambda*L| below which sinh(x)/x uses its Taylor series
_SERIES_CUTOFF = 1e-3


def slab_matrix(n, kl, n0: float = 1.0) -> TransferMatrix:
    """Exact matrix of a homogeneous slab of index ``n`` in background ``n0``.

    Parameters
    ----------
    n : complex
        Refractive index of the slab (imaginary part < 0 is gain for the
        exp(+i k n x) forward wave convention used here, > 0 is loss).
    kl : float or array
        Vacuum wavenumber times slab thickness.
    n0 : float
        Real background index on both sides.

    Returns
    -------
    TransferMatrix
        Interface, propagation, interface. Reduces to
        ``diag(exp(i*n0*kl), exp(-i*n0*kl))`` when ``n == n0``.
    """
    n = complex(n)
    if n == 0:
        raise ValueError("slab index must be nonzero")
    kl = np.asarray(kl, dtype=complex)
    fwd = np.exp(1j * n * kl)
    bwd = np.exp(-1j * n * kl)
    # (A, B) in the slab from (a, b) outside: E and dE/dx continuous
    p, q = (n + n0) / (2 * n), (n - n0) / (2 * n)
    # back out into the background
    u, v = (n0 + n) / (2 * n0), (n0 - n) / (2 * n0)
    m = TransferMatrix(
        u * fwd * p + v * bwd * q,
        u * fwd * q + v * bwd * p,
        v * fwd * p + u * bwd * q,
        v * fwd * q + u * bwd * p,
    )
    return _squeeze(m)


def mirror_matrix(r_m: float) -> TransferMatrix:
    """Lossless mirror with real reflection ``r_m`` and ``t_m = i*sqrt(1 - r_m**2)``."""
    r_m = float(r_m)
    if not abs(r_m) < 1:
        raise ValueError(f"mirror reflectivity must satisfy |r_M| < 1, got {r_m}")
    t_m = 1j * np.sqrt(1 - r_m * r_m)
    return TransferMatrix((t_m * t_m - r_m * r_m) / t_m, r_m / t_m, -r_m / t_m, 1 / t_m)


def gain_slab_matrix(gl, delta) -> TransferMatrix:
    """``diag(exp(gL + i*delta), exp(-gL - i*delta))``; gL > 0 is gain."""
    phase = np.asarray(gl, dtype=complex) + 1j * np.asarray(delta, dtype=complex)
    return _squeeze(diagonal(np.exp(phase), np.exp(-phase)))


def _cosh_sinhc(lam_sq):
    """Return ``cosh(lam)`` and ``sinh(lam)/lam`` given ``lam**2``.

    Both are even in ``lam``, so the square-root branch does not matter.
    """
    lam_sq = np.asarray(lam_sq, dtype=complex)
    lam = np.sqrt(lam_sq)
    small = np.abs(lam) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, lam)
    ch = np.cosh(lam)
    sc = np.where(
        small,
        1 + lam_sq / 6 + lam_sq**2 / 120 + lam_sq**3 / 5040,
        np.sinh(safe) / safe,
    )
    return ch, sc


def dfb_half_matrix(q0l, gl, delta) -> TransferMatrix:
    """Coupled-mode matrix of one uniform grating section with gain or loss.

    Uses ``rhoL = delta + i*gL`` and ``lambdaL = sqrt(q0L**2 - rhoL**2)``::

        m11 = cosh(lambdaL) - i (rhoL/lambdaL) sinh(lambdaL)
        m12 = -i (q0L/lambdaL) sinh(lambdaL)
        m21 = +i (q0L/lambdaL) sinh(lambdaL)
        m22 = cosh(lambdaL) + i (rhoL/lambdaL) sinh(lambdaL)

    ``delta`` is the coupled-mode detuning, whose forward envelope goes as
    exp(-i*delta); :class:`DfbHalf` converts from the stack convention.
    The removable singularity at ``lambdaL = 0`` is handled by a series.
    """
    q0l = np.asarray(q0l, dtype=float)
    rho = np.asarray(delta, dtype=complex) + 1j * np.asarray(gl, dtype=float)
    ch, sc = _cosh_sinhc(q0l * q0l - rho * rho)
    return _squeeze(
        TransferMatrix(
            ch - 1j * rho * sc,
            -1j * q0l * sc,
            1j * q0l * sc,
            ch + 1j * rho * sc,
        )
    )


def near_threshold_matrix(alpha: float, beta: float, eps: float, kappa: complex, detuning) -> TransferMatrix:
    """Generic PT-constrained matrix close to a lasing pole at ``-i*eps``.

    ``m21`` is derived from ``det M = 1`` rather than from its expansion.
    """
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    kappa = complex(kappa)
    d = np.asarray(detuning, dtype=complex)
    m11 = kappa * (d - 1j * eps)
    m22 = np.conj(kappa) * (d + 1j * eps)
    m12 = 1j * (alpha + beta * d)
    if np.any(m12 == 0):
        raise ValueError("singular near-threshold model: alpha + beta*detuning = 0")
    m21 = (m11 * m22 - 1) / m12
    return _squeeze(TransferMatrix(m11, m12, m21, m22))


def propagation_matrix(phase) -> TransferMatrix:
    phase = np.asarray(phase, dtype=complex)
    return _squeeze(diagonal(np.exp(1j * phase), np.exp(-1j * phase)))


def _squeeze(m: TransferMatrix) -> TransferMatrix:
    def s(v):
        v = np.asarray(v)
        return complex(v) if v.ndim == 0 else v

    return TransferMatrix(s(m.m11), s(m.m12), s(m.m21), s(m.m22))


# ---------------------------------------------------------------------------
# stack elements
#
# ``delta`` passed to ``matrix`` is the stack detuning (w - w_ref) n0 L / c0,
# with L the reference length of the whole structure. ``length`` fields are
# fractions of L.


@dataclass(frozen=True)
class Slab:
    n: complex
    kl: float
    length: float = 1.0

    def matrix(self, delta, n0: float = 1.0) -> TransferMatrix:
        return slab_matrix(self.n, self.kl + np.asarray(delta) * self.length / n0, n0)

    def spatial(self):
        return self.length, ("index", complex(self.n))


@dataclass(frozen=True)
class Mirror:
    r_m: float

    def __post_init__(self):
        if not abs(self.r_m) < 1:
            raise ValueError(f"mirror reflectivity must satisfy |r_M| < 1, got {self.r_m}")

    def matrix(self, delta, n0: float = 1.0) -> TransferMatrix:
        m = mirror_matrix(self.r_m)
        shape = np.shape(delta)
        if shape:
            m = TransferMatrix(*(np.full(shape, v) for v in (m.m11, m.m12, m.m21, m.m22)))
        return m

    def spatial(self):
        return None


@dataclass(frozen=True)
class GainSlab:
    """Homogeneous gain (gL > 0) or loss region; round-trip phase offset ``delta_g``."""

    gl: float
    delta_g: float = 0.0
    length: float = 1.0

    def matrix(self, delta, n0: float = 1.0) -> TransferMatrix:
        return gain_slab_matrix(self.gl, self.delta_g + np.asarray(delta) * self.length)

    def spatial(self):
        return self.length, ("gain", (float(self.delta_g), complex(0, float(self.gl))))


@dataclass(frozen=True)
class DfbHalf:
    """Uniform grating section; q0L and gL are per reference length L.

    The section covers ``length * L``; gL > 0 amplifies the forward wave.
    """

    q0l: float
    gl: float
    offset: float = 0.0
    length: float = 0.5

    def __post_init__(self):
        if self.q0l < 0:
            raise ValueError(f"q0L must be >= 0, got {self.q0l}")

    def matrix(self, delta, n0: float = 1.0) -> TransferMatrix:
        # coupled-mode detuning runs opposite to frequency
        d = -(np.asarray(delta) + self.offset) * self.length
        return dfb_half_matrix(self.q0l * self.length, self.gl * self.length, d)

    def spatial(self):
        return self.length, ("grating", (float(self.q0l), float(self.offset), complex(0, float(self.gl))))


@dataclass(frozen=True)
class Propagation:
    """Background gap adding ``phase + delta * length`` of forward phase."""

    phase: float
    length: float = 0.0

    def matrix(self, delta, n0: float = 1.0) -> TransferMatrix:
        return propagation_matrix(self.phase + np.asarray(delta) * self.length)

    def spatial(self):
        return self.length, ("index", complex(1.0))


@dataclass(frozen=True)
class NearThresholdModel:
    alpha: float
    beta: float
    eps: float
    kappa: complex = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")

    def matrix(self, delta, n0: float = 1.0) -> TransferMatrix:
        return near_threshold_matrix(self.alpha, self.beta, self.eps, self.kappa, delta)

    def spatial(self):
        return None


StackElement = Union[Slab, Mirror, GainSlab, DfbHalf, Propagation, NearThresholdModel]


@dataclass(frozen=True)
class StructureSpec:
    """Ordered stack, leftmost physical element first, in background ``n0``."""

    elements: tuple = field(default_factory=tuple)
    n0: float = 1.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))


def build_structure(spec: StructureSpec, freq) -> TransferMatrix:
    """Total transfer matrix of ``spec`` at complex detuning(s) ``freq``."""
    if not spec.elements:
        raise ValueError("structure has no elements")
    total = None
    for element in spec.elements:
        m = element.matrix(freq, spec.n0)
        total = m if total is None else mat_mul(m, total)
    return total


# ---------------------------------------------------------------------------
# presets


def fp_laser(r_m: float = 0.9, gl: float = 0.0, delta_g: float = 0.0) -> StructureSpec:
    """Two equal lossless mirrors around a gain slab; detuning is the slab phase."""
    mirror = Mirror(r_m)
    return StructureSpec((mirror, GainSlab(gl, delta_g), mirror), name="fp_laser")


def pt_dfb(q0l: float = 1.0, gl: float = 4.43, offset: float = 0.0) -> StructureSpec:
    """Index grating with gain in the left half and equal loss in the right half.

    ``q0l``, ``gl`` and the detuning are all referred to the full grating
    length L, each half spanning L/2.
    """
    return StructureSpec(
        (DfbHalf(q0l, gl, offset, 0.5), DfbHalf(q0l, -gl, offset, 0.5)),
        name="pt_dfb",
    )


def near_threshold(alpha: float = 3.0, beta: float = 0.3, eps: float = 0.02, kappa: complex = 1.0) -> StructureSpec:
    return StructureSpec((NearThresholdModel(alpha, beta, eps, kappa),), name="near_threshold")


PRESETS: dict[str, Callable[..., StructureSpec]] = {
    "fp_laser": fp_laser,
    "pt_dfb": pt_dfb,
    "near_threshold": near_threshold,
}


def gain_family(spec: StructureSpec) -> Callable[[float], StructureSpec]:
    """Return ``g -> spec`` with every gain/loss element rescaled to ``+-g``.

    Elements keep the sign of their current gain; zero-gain elements that are
    gain-parametrized (GainSlab) take ``+g``.
    """

    def family(g: float) -> StructureSpec:
        out = []
        for el in spec.elements:
            if isinstance(el, (GainSlab, DfbHalf)):
                sign = math.copysign(1.0, el.gl)
                out.append(replace(el, gl=sign * g))
            else:
                out.append(el)
        return replace(spec, elements=tuple(out))

    return family


def time_reversed(spec: StructureSpec) -> StructureSpec:
    """Swap gain and loss everywhere."""
    out = []
    for el in spec.elements:
        if isinstance(el, (GainSlab, DfbHalf)):
            out.append(replace(el, gl=-el.gl))
        elif isinstance(el, Slab):
            out.append(replace(el, n=complex(el.n).conjugate()))
        else:
            out.append(el)
    return replace(spec, elements=tuple(out))

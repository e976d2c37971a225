"""
Lasing poles (zeros of M22), CPA zeros (zeros of M11), gain thresholds and
PT-symmetry checks.

Zeros are located by seeding a rectangular grid with local minima of
``|entry|`` and refining each seed with damped complex Newton iteration using a
central-difference derivative.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import PTLaserError, TransferMatrix
from .elements import Mirror, NearThresholdModel, StructureSpec, build_structure

log = logging.getLogger(__name__)

TARGETS = ("M11", "M22")
DERIV_STEP = 1e-6


class ThresholdNotBracketedError(PTLaserError):
    pass


class NotCheckableError(PTLaserError):
    """The structure has elements without a spatial permittivity profile."""


@dataclass(frozen=True)
class SearchRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    density: int = 40

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate search region {self}")
        if self.density < 2:
            raise ValueError("seed density must be >= 2")

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (
            self.re_min - pad <= z.real <= self.re_max + pad
            and self.im_min - pad <= z.imag <= self.im_max + pad
        )


@dataclass(frozen=True)
class RootResult:
    freq: complex
    target: str
    residual: float
    iterations: int


@dataclass
class RootSearch:
    """Zeros found in a region plus seeds that failed to converge."""

    roots: list = field(default_factory=list)
    dropped: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    @property
    def freqs(self) -> list:
        return [r.freq for r in self.roots]


def _entry(target: str) -> Callable[[TransferMatrix], complex]:
    if target == "M11":
        return lambda m: m.m11
    if target == "M22":
        return lambda m: m.m22
    raise ValueError(f"target must be one of {TARGETS}, got {target!r}")


def _grid_seeds(values: np.ndarray, zs: np.ndarray) -> list:
    mag = np.abs(values)
    padded = np.pad(mag, 1, constant_values=np.inf)
    is_min = np.ones_like(mag, dtype=bool)
    ny, nx = mag.shape
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy or dx:
                is_min &= mag <= padded[1 + dy : 1 + dy + ny, 1 + dx : 1 + dx + nx]
    return list(zs[is_min])


def newton(f: Callable[[complex], complex], z0: complex, tol: float, max_iter: int = 100):
    """Damped Newton on a holomorphic ``f``.

    Returns ``(z, |f(z)|, iterations)``; the residual exceeds ``tol`` when the
    iteration failed.
    """
    z = complex(z0)
    fz = complex(f(z))
    h = DERIV_STEP
    it = 0
    while it < max_iter and abs(fz) > tol:
        it += 1
        df = (f(z + h) - f(z - h)) / (2 * h)
        if df == 0 or not np.isfinite(df):
            break
        step = fz / df
        lam = 1.0
        while lam > 1e-6:
            trial = z - lam * step
            ft = complex(f(trial))
            if np.isfinite(ft) and abs(ft) < abs(fz):
                break
            lam /= 2
        else:
            break
        z, fz = trial, ft
    # a couple of polishing steps once inside tolerance
    for _ in range(3):
        if abs(fz) <= tol and fz != 0:
            df = (f(z + h) - f(z - h)) / (2 * h)
            if df == 0:
                break
            trial = z - fz / df
            ft = complex(f(trial))
            if abs(ft) < abs(fz):
                z, fz = trial, ft
                continue
        break
    return z, abs(fz), it


def find_zeros(
    spec: StructureSpec,
    target: str,
    region: SearchRegion,
    tol: float = 1e-8,
    max_iter: int = 100,
) -> RootSearch:
    """All simple zeros of M11 or M22 of ``spec`` inside ``region``.

    Results are sorted by real part, then imaginary part. Seeds whose Newton
    iteration stalls above ``tol`` are listed in ``RootSearch.dropped``.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    entry = _entry(target)

    def f(z):
        return entry(build_structure(spec, z))

    n = region.density
    xs = np.linspace(region.re_min, region.re_max, n)
    ys = np.linspace(region.im_min, region.im_max, n)
    zs = xs[None, :] + 1j * ys[:, None]
    seeds = _grid_seeds(np.asarray(f(zs)), zs)

    found: list[RootResult] = []
    dropped = []
    pad = max((region.re_max - region.re_min), (region.im_max - region.im_min)) * 1e-9
    for seed in seeds:
        z, res, it = newton(f, seed, tol, max_iter)
        if res > tol or not np.isfinite(z):
            dropped.append((complex(seed), complex(z), float(res)))
            continue
        if not region.contains(z, pad):
            continue
        if any(abs(z - r.freq) <= 10 * tol for r in found):
            continue
        found.append(RootResult(z, target, float(res), it))
    if dropped:
        log.info("%d of %d seeds did not converge for %s", len(dropped), len(seeds), target)
    found.sort(key=lambda r: (round(r.freq.real, 12), r.freq.imag))
    return RootSearch(found, dropped)


@dataclass
class ThresholdResult:
    g_th: float
    freqs: list
    residuals: list
    iterations: int
    roots: list = field(default_factory=list)


def _max_imag(spec, region, tol):
    roots = find_zeros(spec, "M22", region, tol).roots
    if not roots:
        return -math.inf, roots
    return max(r.freq.imag for r in roots), roots


def lasing_threshold(
    family: Callable[[float], StructureSpec],
    g_range: tuple[float, float],
    region: SearchRegion,
    tol: float = 1e-8,
    gtol: float = 1e-4,
) -> ThresholdResult:
    """Gain at which the most unstable M22 zero reaches the real axis.

    ``family`` maps a gain value to a structure. The threshold is bracketed by
    bisection on the largest imaginary part of the M22 zeros in ``region``
    down to ``gtol``, then the crossing zero(s) are followed by Newton
    continuation and the gain is polished to where their imaginary part
    vanishes.
    """
    lo, hi = map(float, g_range)
    if not hi > lo:
        raise ValueError("g_range must be increasing")
    im_lo, _ = _max_imag(family(lo), region, tol)
    im_hi, roots_hi = _max_imag(family(hi), region, tol)
    if not (im_lo < 0 <= im_hi):
        raise ThresholdNotBracketedError(
            f"no lasing threshold in g in [{lo}, {hi}]: max Im of M22 zeros goes from {im_lo:.4g} to {im_hi:.4g}"
        )
    iterations = 0
    while hi - lo > gtol:
        iterations += 1
        mid = 0.5 * (lo + hi)
        im_mid, roots_mid = _max_imag(family(mid), region, tol)
        if im_mid < 0:
            lo = mid
        else:
            hi, im_hi, roots_hi = mid, im_mid, roots_mid

    # every zero tied with the most unstable one crosses together
    lead = [r.freq for r in roots_hi if r.freq.imag >= im_hi - 1e-6 * max(1.0, abs(im_hi))]

    def track(g, seeds):
        fam = family(g)
        out = []
        for s in seeds:
            z, res, _ = newton(lambda w: build_structure(fam, w).m22, s, tol)
            out.append((z, res))
        return out

    def crossing(g):
        return track(g, lead[:1])[0][0].imag

    g_th = hi
    if crossing(lo) < 0 <= crossing(hi):
        g_th, info = brentq(crossing, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, full_output=True)
        iterations += info.iterations
    final = track(g_th, lead)
    final.sort(key=lambda p: p[0].real)
    return ThresholdResult(
        g_th=float(g_th),
        freqs=[z.real for z, _ in final],
        residuals=[float(r) for _, r in final],
        iterations=iterations,
        roots=[z for z, _ in final],
    )


@dataclass
class PTReport:
    passed: bool
    worst_m22_m11: float
    worst_m12: float
    worst_m21: float
    samples: int
    worst_freq: complex = 0j

    @property
    def worst(self) -> float:
        return max(self.worst_m22_m11, self.worst_m12, self.worst_m21)


def verify_pt_matrix(spec: StructureSpec, freqs: Sequence[complex], tol: float = 1e-12) -> PTReport:
    """Check ``M(w) = M*(w*)^-1`` entrywise, relative to the largest entry of M(w)."""
    w = np.atleast_1d(np.asarray(freqs, dtype=complex))
    m = build_structure(spec, w)
    mc = build_structure(spec, np.conj(w))
    scale = np.asarray(m.norm(), dtype=float)
    d1 = np.abs(m.m22 - np.conj(mc.m11)) / scale
    d2 = np.abs(m.m12 + np.conj(mc.m12)) / scale
    d3 = np.abs(m.m21 + np.conj(mc.m21)) / scale
    d1, d2, d3 = (np.broadcast_to(d, w.shape) for d in (d1, d2, d3))
    total = np.maximum(np.maximum(d1, d2), d3)
    i = int(np.argmax(total))
    return PTReport(
        passed=bool(total.max() <= tol),
        worst_m22_m11=float(d1.max()),
        worst_m12=float(d2.max()),
        worst_m21=float(d3.max()),
        samples=int(w.size),
        worst_freq=complex(w.flat[i]),
    )


def _conj_descriptor(desc):
    kind, value = desc
    if isinstance(value, tuple):
        return kind, tuple(v.conjugate() if isinstance(v, complex) else v for v in value)
    return kind, value.conjugate()


def _same(a, b, rtol=1e-12):
    if a[0] != b[0]:
        return False
    va = a[1] if isinstance(a[1], tuple) else (a[1],)
    vb = b[1] if isinstance(b[1], tuple) else (b[1],)
    return all(abs(x - y) <= rtol * max(1.0, abs(x), abs(y)) for x, y in zip(va, vb))


def verify_pt_epsilon(spec: StructureSpec) -> bool:
    """True iff the layer sequence satisfies eps(-x) = eps*(x) about its midpoint."""
    layers = []
    for el in spec.elements:
        if isinstance(el, (Mirror, NearThresholdModel)):
            raise NotCheckableError(f"{type(el).__name__} has no spatial permittivity profile")
        layers.append(el.spatial())
    if not layers:
        raise NotCheckableError("empty structure")
    for (len_a, a), (len_b, b) in zip(layers, reversed(layers)):
        if not math.isclose(len_a, len_b, rel_tol=1e-12, abs_tol=1e-15):
            return False
        if not _same(a, _conj_descriptor(b)):
            return False
    return True


@dataclass
class CoincidenceReport:
    passed: bool
    pairs: list
    unmatched: list
    real_m22: list
    real_m11: list


def cpa_lasing_coincidence(
    family: Callable[[float], StructureSpec],
    g_th: float,
    region: SearchRegion,
    tol: float = 1e-6,
    root_tol: float = 1e-10,
) -> CoincidenceReport:
    """At ``g_th`` pair each real M22 zero with a real M11 zero within ``tol``.

    A zero counts as real when ``|Im| <= tol``. ``pairs`` holds
    ``(m22_zero, m11_zero, distance)``.
    """
    spec = family(g_th)
    z22 = [r.freq for r in find_zeros(spec, "M22", region, root_tol)]
    z11 = [r.freq for r in find_zeros(spec, "M11", region, root_tol)]
    real22 = [z for z in z22 if abs(z.imag) <= tol]
    real11 = [z for z in z11 if abs(z.imag) <= tol]
    pairs, unmatched = [], []
    for z in real22:
        best = min(real11, key=lambda w: abs(w - z), default=None)
        if best is not None and abs(best - z) <= tol:
            pairs.append((z, best, abs(best - z)))
        else:
            unmatched.append(z)
    return CoincidenceReport(bool(real22) and not unmatched, pairs, unmatched, real22, real11)

"""Integral cross sections: partial-wave sums, the continuous-lambda
quadrature term, per-pole resonance contributions, and background subtraction.

The working identity decomposes the PWS into a real-axis integral over
lambda = J + 1/2, an imaginary-axis piece, and one term per first-quadrant
pole. Each pole term carries the sharp energy dependence of one resonance;
subtracting a trajectory's terms from the exact PWS leaves the smooth
background.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .constants import HBAR2_OVER_2U
from .datamodel import ChannelSpec, SeriesPoint, SMatrixRecord
from .pade import PadeModel, evaluate
from .poles import PoleRecord


class IcsError(ValueError):
    pass


class QuadratureError(IcsError):
    """Adaptive quadrature ran out of subdivisions; carries its best estimate."""

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class WaveNumber:
    k: float
    energy: float
    reduced_mass: float

    def __post_init__(self):
        if self.k <= 0:
            raise IcsError(f"k must be positive, got {self.k}")


@dataclass(frozen=True)
class Decomposition:
    """Everything known about one energy after reconstruction and subtraction."""

    energy: float
    sigma_exact: float
    sigma_pade: float
    sigma_int: float
    mull_terms: Dict[str, float]
    sigma_smooth: float
    pade_error: float


def wavenumber(energy: float, reduced_mass: float) -> WaveNumber:
    if energy <= 0:
        raise IcsError(f"energy must be positive, got {energy}")
    if reduced_mass <= 0:
        raise IcsError(f"reduced_mass must be positive, got {reduced_mass}")
    k = float(np.sqrt(reduced_mass * energy / HBAR2_OVER_2U))
    return WaveNumber(k=k, energy=float(energy), reduced_mass=float(reduced_mass))


def _weight(s: complex, elastic: bool) -> float:
    return abs(s - 1.0) ** 2 if elastic else abs(s) ** 2


def pws_cross_section(record: SMatrixRecord, channel: ChannelSpec) -> float:
    """(2 pi / k^2) sum over J >= J_min of (J + 1/2) |S-1|^2 (elastic) or |S|^2."""
    j_min = channel.j_min
    if j_min >= record.nread:
        raise IcsError(f"J_min {j_min} >= nread {record.nread}: no terms in the sum")
    k = wavenumber(record.energy, channel.reduced_mass).k
    total = sum((j + 0.5) * _weight(record.s_values[j], channel.elastic)
                for j in range(j_min, record.nread))
    return (2.0 * np.pi / k ** 2) * total


def pws_from_model(model: PadeModel, record: SMatrixRecord,
                   channel: ChannelSpec) -> Tuple[float, float]:
    """The same sum with model values on the fitted range, plus the largest
    pointwise reconstruction error there. Data outside the fitted range is
    used as-is; the rational form is not trusted beyond it."""
    j_min = channel.j_min
    if j_min >= record.nread:
        raise IcsError(f"J_min {j_min} >= nread {record.nread}: no terms in the sum")
    k = wavenumber(record.energy, channel.reduced_mass).k
    total = 0.0
    worst = 0.0
    for j in range(j_min, record.nread):
        s = record.s_values[j]
        if record.jstart <= j <= record.jfin:
            s_model = evaluate(model, float(j))
            worst = max(worst, abs(s_model - s))
            s = s_model
        total += (j + 0.5) * _weight(s, channel.elastic)
    return (2.0 * np.pi / k ** 2) * total, worst


def integral_term(model: PadeModel, channel: ChannelSpec, k: WaveNumber,
                  lambda_max: float) -> float:
    """(2 pi / k^2) integral of w(lambda) lambda d lambda from J_min to
    lambda_max, with w from the model continued along the real axis.

    Near-axis poles put sharp peaks in the integrand, so the range is split
    at their real parts before handing each piece to adaptive quadrature.
    """
    lam_lo = float(channel.j_min)
    if lambda_max <= lam_lo:
        raise IcsError(f"lambda_max {lambda_max} must exceed J_min {lam_lo}")
    pref = 2.0 * np.pi / k.k ** 2
    elastic = channel.elastic

    def integrand(lam):
        s = evaluate(model, lam - 0.5)
        return _weight(s, elastic) * lam

    # near-axis poles make the integrand a narrow bump of width ~ Im J;
    # hand their locations to the quadrature as known difficult points
    lam_hi = float(lambda_max)
    points = set()
    for p in model.poles:
        if abs(p.imag) < 0.3:
            lam_p = p.real + 0.5
            half = max(1e-4, 5.0 * abs(p.imag))
            for x in (lam_p - half, lam_p, lam_p + half):
                if lam_lo < x < lam_hi:
                    points.add(x)

    # tolerances relax in steps: a near-axis bump can trip the roundoff
    # detector at the tight setting while the estimate is already far more
    # accurate than the subtraction needs
    out = None
    for epsrel in (1e-8, 1e-6):
        out = quad(integrand, lam_lo, lam_hi, limit=500,
                   points=sorted(points) if points else None,
                   epsabs=epsrel * 1e-2 * pref, epsrel=epsrel, full_output=1)
        if len(out) <= 3:
            return pref * out[0]
    raise QuadratureError(
        f"quadrature did not converge on [{lam_lo}, {lam_hi}]: {out[3]}",
        estimate=pref * out[0], error_bound=pref * out[1])


def mulholland_term(pole: PoleRecord, k: WaveNumber, elastic: bool) -> float:
    """One pole's resonance contribution:
    (8 pi^2 / k^2) Im[ lambda_n Res conj_term / (1 + exp(-2 i pi lambda_n)) ],
    where conj_term is the Schwarz-reflected model value at the pole (minus 1
    for elastic).
    """
    lam = pole.lambda_value
    if lam.imag <= 0:
        raise IcsError(f"pole {pole.position_J} must have Im lambda > 0")
    den = 1.0 + np.exp(-2j * np.pi * lam)
    if abs(den) <= 1e-12:
        raise IcsError(
            f"pole at lambda {lam} sits at a half-integer on the real axis "
            "(bound-state-like); its resonance term is undefined")
    conj_term = pole.conj_value - 1.0 if elastic else pole.conj_value
    val = lam * pole.residue * conj_term / den
    return (8.0 * np.pi ** 2 / k.k ** 2) * val.imag


def modified_mulholland_term(pole: PoleRecord, k: WaveNumber,
                             channel: ChannelSpec) -> float:
    """Unitarity-simplified pole term for single-channel elastic scattering:
    (8 pi^2 / k^2) Im[ lambda_n Res / (1 + exp(+2 i pi lambda_n)) ]."""
    if not channel.elastic:
        raise IcsError("the modified pole term applies to elastic channels only")
    lam = pole.lambda_value
    if lam.imag <= 0:
        raise IcsError(f"pole {pole.position_J} must have Im lambda > 0")
    den = 1.0 + np.exp(2j * np.pi * lam)
    if abs(den) <= 1e-12:
        raise IcsError(
            f"pole at lambda {lam} sits at a half-integer on the real axis "
            "(bound-state-like); its resonance term is undefined")
    val = lam * pole.residue / den
    return (8.0 * np.pi ** 2 / k.k ** 2) * val.imag


def imag_axis_term(model: PadeModel, k: WaveNumber, cutoff: float = 10.0) -> float:
    """Re of the integral along lambda = iy, y in [0, cutoff], of
    (4 pi / k^2) f(lambda) lambda / (1 + exp(-2 i pi lambda)) d lambda,
    with f = (S(lambda) - 1)(S(conj lambda)* - 1). The denominator kills the
    integrand like exp(-2 pi y), so cutoff 10 is spectrally converged.
    """
    if cutoff <= 0:
        raise IcsError(f"cutoff must be positive, got {cutoff}")
    for p in model.poles:
        lam = p + 0.5
        if _dist_to_segment(lam, cutoff) < 1e-6:
            raise IcsError(f"model pole at lambda {lam} touches the contour")

    pref = 4.0 * np.pi / k.k ** 2

    def f_cont(lam):
        s_here = evaluate(model, lam - 0.5)
        s_mirror = evaluate(model, np.conj(lam) - 0.5)
        return (s_here - 1.0) * (np.conj(s_mirror) - 1.0)

    def integrand(y):
        lam = 1j * y
        val = pref * f_cont(lam) / (1.0 + np.exp(-2j * np.pi * lam)) * lam * 1j
        return val.real

    out = quad(integrand, 0.0, cutoff, limit=500,
               epsabs=1e-10, epsrel=1e-8, full_output=1)
    if len(out) > 3:
        raise QuadratureError(f"imaginary-axis quadrature did not converge: {out[3]}",
                              estimate=out[0], error_bound=out[1])
    return out[0]


def subtract_trajectories(exact_series: Sequence[SeriesPoint],
                          mull_series_list: Sequence[Sequence[SeriesPoint]]
                          ) -> List[SeriesPoint]:
    """sigma_smooth(E) = sigma_exact(E) - sum of trajectory terms at E.

    Every trajectory energy must match an exact-series energy bit-for-bit;
    exact-series energies a trajectory does not cover contribute nothing for
    that trajectory.
    """
    exact_by_e = {pt.energy: pt.values[0] for pt in exact_series}
    for series in mull_series_list:
        bad = [pt.energy for pt in series if pt.energy not in exact_by_e]
        if bad:
            raise IcsError(f"trajectory energies not on the exact grid: {bad}")
    out = []
    for pt in exact_series:
        total = pt.values[0]
        for series in mull_series_list:
            for mpt in series:
                if mpt.energy == pt.energy:
                    total -= mpt.values[0]
        out.append(SeriesPoint(energy=pt.energy, values=(total,)))
    return out


def _dist_to_segment(z: complex, cutoff: float) -> float:
    """Distance from z to the segment [0, i*cutoff]."""
    y = min(max(z.imag, 0.0), cutoff)
    return abs(z - 1j * y)

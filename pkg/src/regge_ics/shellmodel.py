"""Hard sphere dressed with a square well and a delta-shell barrier.

The potential is impenetrable for r < R - d, a flat well of depth v_well on
(R - d, R), and an omega_delta * delta(r - R) shell at the outer radius. The
S matrix is closed-form: an interior Riccati-Bessel combination vanishing at
the hard core, matched at R with the derivative jump the shell imposes. Small
omega_delta supports a bound state at J = 0; large omega_delta traps
metastable states behind the shell. Both give first-quadrant complex-J poles,
which makes the model a controllable data source and an independent check on
pole positions recovered from real-axis data alone.
"""
from __future__ import annotations

import cmath
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np
from scipy.optimize import brentq
from scipy.special import spherical_jn, spherical_yn

from .constants import HBAR2_OVER_2U
from .datamodel import SMatrixRecord, format_energy_file

UNITARITY_TOL = 1e-10

# weak shell: the well's bound state moves into the first quadrant as a
# near-axis pole; strong shell: metastable states trapped behind the barrier
# give a pole descending from large Im J
_GEOMETRY = dict(R=2.045, d=0.592, v_well=165.0, mu=1.0)


class ShellModelError(ValueError):
    pass


@dataclass(frozen=True)
class ShellModelParams:
    """Geometry and strengths; lengths in Angstrom, energies in meV, mu in Da."""

    R: float
    d: float
    v_well: float
    omega_delta: float
    mu: float = 1.0

    def __post_init__(self):
        if self.R <= 0:
            raise ShellModelError(f"R must be positive, got {self.R}")
        if not (0 < self.d < self.R):
            raise ShellModelError(f"d must lie in (0, R), got {self.d}")
        if self.mu <= 0:
            raise ShellModelError(f"mu must be positive, got {self.mu}")

    @property
    def hard_radius(self) -> float:
        return self.R - self.d


DATASET_VARIANTS = {
    "bound": ShellModelParams(omega_delta=1.023, **_GEOMETRY),
    "meta": ShellModelParams(omega_delta=66.463, **_GEOMETRY),
}


def _riccati(n, x):
    """Riccati j = x*j_n, Riccati y = -x*y_n, and their x derivatives."""
    j = spherical_jn(n, x)
    jp = spherical_jn(n, x, derivative=True)
    y = spherical_yn(n, x)
    yp = spherical_yn(n, x, derivative=True)
    return x * j, j + x * jp, -x * y, -y - x * yp


def s_matrix_element(params: ShellModelParams, energy: float, j: int) -> complex:
    """S(E, J) for integer J at positive collision energy."""
    if energy <= 0:
        raise ShellModelError(f"energy must be positive, got {energy}")
    if j < 0:
        raise ShellModelError(f"J must be >= 0, got {j}")
    h2 = HBAR2_OVER_2U / params.mu
    a = params.hard_radius
    k = float(np.sqrt(energy / h2))
    q = float(np.sqrt((energy + params.v_well) / h2))

    jha, _, yha, _ = _riccati(j, q * a)
    jhr, jhrp, yhr, yhrp = _riccati(j, q * params.R)
    u = jhr * yha - yhr * jha
    up = q * (jhrp * yha - yhrp * jha) + (params.omega_delta / h2) * u
    jk, jkp, yk, ykp = _riccati(j, k * params.R)
    x = k * ykp * u - yk * up
    y = k * jkp * u - jk * up
    if x == 0 and y == 0:
        raise ShellModelError(
            f"S(E={energy}, J={j}) underflowed; reduce j_max for this energy")
    s = (x - 1j * y) / (x + 1j * y)
    if not np.isfinite(s.real) or not np.isfinite(s.imag):
        raise ShellModelError(
            f"S(E={energy}, J={j}) is not finite; reduce j_max for this energy")
    if abs(abs(s) - 1.0) > UNITARITY_TOL:
        raise ShellModelError(
            f"unitarity defect {abs(abs(s) - 1.0):.2e} at E={energy}, J={j}")
    return complex(s)


def informative_jfin(s_values: Sequence[complex], floor: float = 1e-12,
                     j_min: int = 8, guard: int = 5) -> int:
    """Last J with |S - 1| above floor, plus guard points, clamped to the data."""
    idx = [j for j, s in enumerate(s_values) if abs(s - 1.0) > floor]
    last = max(idx[-1] if idx else 0, j_min)
    return min(last + guard, len(s_values) - 1)


def generate_dataset(params: ShellModelParams, energies: Sequence[float],
                     j_max: int, data_dir: str,
                     niter: int = 2, sht: Optional[float] = None,
                     jstart: int = 0, jfin: Optional[int] = None,
                     inv: int = -1, dxl: float = 0.5) -> List[str]:
    """Write one data file per energy, named "1".."N" in data_dir.

    Each file carries S(E, J) for J = 0..j_max plus the reconstruction
    controls. jfin defaults per file to the last informative J plus a guard
    margin (an explicit value acts as a cap), and sht defaults to jfin/2.
    """
    energies = [float(e) for e in energies]
    if len(energies) == 0:
        raise ShellModelError("no energies given")
    if sorted(energies) != energies or len(set(energies)) != len(energies):
        raise ShellModelError("energies must be strictly increasing")
    if j_max < 3:
        raise ShellModelError(f"j_max must be >= 3, got {j_max}")
    os.makedirs(data_dir, exist_ok=True)
    paths = []
    for idx, energy in enumerate(energies, start=1):
        svals = [s_matrix_element(params, energy, j) for j in range(j_max + 1)]
        jf = informative_jfin(svals)
        if jfin is not None:
            jf = min(jf, jfin)
        record = SMatrixRecord(energy=energy, s_values=tuple(svals),
                               niter=niter,
                               sht=(jf / 2.0) if sht is None else sht,
                               jstart=jstart, jfin=jf, inv=inv, dxl=dxl)
        path = os.path.join(data_dir, str(idx))
        with open(path, "w") as fh:
            fh.write(format_energy_file(record))
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# complex-J continuation (software precision; the order is complex)

def _riccati_mp(nu, x):
    pref = mp.sqrt(mp.pi * x / 2)
    jh = pref * mp.besselj(nu + mp.mpf(1) / 2, x)
    yh = -pref * mp.bessely(nu + mp.mpf(1) / 2, x)
    return jh, yh


def _riccati_mp_d(nu, x):
    # u'_nu = u_{nu-1} - (nu/x) u_nu holds for both kinds
    jh, yh = _riccati_mp(nu, x)
    jm, ym = _riccati_mp(nu - 1, x)
    return jh, jm - (nu / x) * jh, yh, ym - (nu / x) * yh


def pole_determinant(params: ShellModelParams, energy: float, j: complex):
    """Outgoing-wave matching determinant; zeros are the complex-J poles."""
    h2 = mp.mpf(HBAR2_OVER_2U) / params.mu
    a = mp.mpf(params.hard_radius)
    r = mp.mpf(params.R)
    k = mp.sqrt(mp.mpf(energy) / h2)
    q = mp.sqrt((mp.mpf(energy) + params.v_well) / h2)
    nu = mp.mpc(j)
    jha, yha = _riccati_mp(nu, q * a)
    jhr, jhrp, yhr, yhrp = _riccati_mp_d(nu, q * r)
    u = jhr * yha - yhr * jha
    up = q * (jhrp * yha - yhrp * jha) + (params.omega_delta / h2) * u
    jk, jkp, yk, ykp = _riccati_mp_d(nu, k * r)
    return k * (ykp + 1j * jkp) * u - (yk + 1j * jk) * up


def complex_j_pole_oracle(params: ShellModelParams, energy: float,
                          j_guess: complex, tol: float = 1e-10,
                          max_iter: int = 200) -> complex:
    """Newton iteration on the matching determinant from j_guess.

    Converged positions are bona fide first-quadrant poles of the closed-form
    S matrix, independent of any rational fit. A lower-half-plane guess may
    either fail or converge to the mirror pole's upper-half partner; only a
    first-quadrant result is returned.
    """
    with mp.workdps(40):
        j = mp.mpc(j_guess)
        h = mp.mpf("1e-12")
        scale = max(1.0, abs(pole_determinant(params, energy, j)))
        last = j
        for _ in range(max_iter):
            f = pole_determinant(params, energy, j)
            if abs(f) / scale <= tol and abs(j - last) < mp.mpf("1e-11"):
                break
            fp = (pole_determinant(params, energy, j + h)
                  - pole_determinant(params, energy, j - h)) / (2 * h)
            if fp == 0:
                raise ShellModelError(
                    f"flat determinant at {complex(j)}; last iterate {complex(j)}")
            step = f / fp
            # damp big excursions so the iteration stays on the same branch
            if abs(step) > 0.5:
                step *= 0.5 / abs(step)
            last = j
            j = j - step
        else:
            raise ShellModelError(
                f"no convergence from {j_guess} at E={energy}; "
                f"last iterate {complex(j)}")
        result = complex(j)
    if result.real <= 0 or result.imag < 0:
        raise ShellModelError(
            f"iteration from {j_guess} left the first quadrant: {result}")
    return result


def find_bound_state_energy(params: ShellModelParams,
                            e_lo: float = -120.0, e_hi: float = -0.01) -> float:
    """J = 0 bound-state energy from the matching condition at the shell.

    Interior sin(q(r-a)) against a decaying exterior exponential, with the
    delta-shell derivative jump. Negative return value, in meV.
    """
    h2 = HBAR2_OVER_2U / params.mu

    def match(energy):
        kappa = np.sqrt(-energy / h2)
        q = np.sqrt((energy + params.v_well) / h2)
        u = np.sin(q * params.d)
        up = q * np.cos(q * params.d) + (params.omega_delta / h2) * u
        return up + kappa * u

    lo = max(e_lo, -params.v_well + 1e-9)
    grid = np.linspace(lo, e_hi, 600)
    vals = [match(e) for e in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0:
            return float(brentq(match, grid[i], grid[i + 1], xtol=1e-12))
    raise ShellModelError(
        f"no J=0 bound state in ({lo}, {e_hi}) for these parameters")


def hard_sphere_phase_s(radius: float, mu: float, energy: float, j: int) -> complex:
    """Reference S for a bare hard sphere: tan(delta) = j_hat/y_hat at ka."""
    k = float(np.sqrt(energy / (HBAR2_OVER_2U / mu)))
    delta = np.arctan2(spherical_jn(j, k * radius), spherical_yn(j, k * radius))
    return complex(cmath.exp(2j * delta))

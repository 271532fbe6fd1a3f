"""Rational interpolation of S(E,J) on integer J and continuation to complex J.

The approximant is K * exp[i(a J^2 + b J + c)] * prod(J - Z_i) / prod(J - P_i),
built from the linearized interpolation system S_j q(t_j) - p(t_j) = 0 in the
shifted variable t = (J - sht) / scale. A rank-revealing SVD supplies the
coefficient null vector; polynomial roots come from companion-matrix
eigenvalues with Newton refinement. The quadratic phase is peeled off
iteratively so the rational part only has to represent the pole structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import mpmath as mp
import numpy as np

from .datamodel import RunConfig, SMatrixRecord

INTERP_TOL = 1e-8
INTERP_TOL_EXTENDED = 1e-30
DEFAULT_DIGITS = 64
# a J value this close to a pole cannot be evaluated
POLE_EVAL_TOL = 1e-13
# second singular value at rounding level = extra null directions; S-matrix
# files bottom out near 5e-15 while exactly degenerate systems sit below 5e-17
RANK_DEGENERACY_TOL = 5e-16


class PadeError(ValueError):
    pass


class PoleEvaluationError(PadeError):
    pass


@dataclass(frozen=True)
class PhasePoly:
    """Coefficients of the quadratic phase a J^2 + b J + c, radians."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def __call__(self, z):
        return (self.a * z + self.b) * z + self.c


@dataclass(frozen=True)
class PadeModel:
    k_const: complex
    phase: PhasePoly
    zeros: tuple
    poles: tuple
    sht: float
    fit_points: tuple
    precision_digits: int = 0  # 0 means double precision
    interp_residual: float = 0.0
    # high-precision roots and constant, kept when an extended build ran
    mp_data: Optional[dict] = field(default=None, repr=False, compare=False)


def build_rational_interpolant(points: Sequence, sht: float,
                               precision_digits: int = 0) -> PadeModel:
    """Interpolate (J, S) pairs by a rational with numerator degree
    ceil((M-1)/2) and denominator degree floor((M-1)/2), M = len(points).

    Degrees may deflate for degenerate data. When the double-precision system
    cannot meet the interpolation bound, or its null space carries extra
    directions (data on a rational of lower degree), the build escalates to
    software arbitrary precision on its own; precision_digits > 0 forces that
    path.
    """
    M = len(points)
    if M < 4:
        raise PadeError(f"need at least 4 points, got {M}")
    j_values = [float(j) for j, _ in points]
    if len(set(j_values)) != M:
        raise PadeError("duplicated J values in interpolation points")

    jv = np.asarray(j_values)
    raw = [s for _, s in points]
    sv = np.asarray([complex(s) for s in raw])
    n_p = (M - 1 + 1) // 2
    n_q = (M - 1) // 2
    scale = max(np.abs(jv - sht).max(), 1.0)

    kc, zeros, poles, norm_index, degenerate = _solve_double(
        jv, sv, sht, scale, n_p, n_q)
    resid = _residual(kc, zeros, poles, jv, sv, sht)

    digits = 0
    mp_data = None
    if precision_digits > 0 or resid > INTERP_TOL or degenerate:
        digits = precision_digits if precision_digits > 0 else DEFAULT_DIGITS
        kc, zeros, poles, mp_data = _solve_extended(
            jv, raw, sht, scale, n_p, n_q, digits, norm_index)
        resid = mp_data["residual"]
        bound = INTERP_TOL_EXTENDED if digits >= 50 else INTERP_TOL
        if resid > bound:
            raise PadeError(
                f"interpolation residual {resid:.3e} at {digits} digits; "
                "increase precision_digits")

    return PadeModel(k_const=complex(kc), phase=PhasePoly(),
                     zeros=tuple(zeros), poles=tuple(poles), sht=float(sht),
                     fit_points=tuple((float(j), complex(s)) for j, s in points),
                     precision_digits=digits, interp_residual=float(resid),
                     mp_data=mp_data)


def evaluate(model: PadeModel, lambda_or_j) -> complex:
    """The approximant at a complex J (or lambda treated as the same variable)."""
    z = complex(lambda_or_j)
    for p in model.poles:
        if abs(z - p) <= POLE_EVAL_TOL:
            raise PoleEvaluationError(f"evaluation point {z} coincides with pole {p}")
    num = model.k_const
    for zr in model.zeros:
        num *= (z - model.sht) - (zr - model.sht)
    den = 1.0
    for p in model.poles:
        den *= (z - model.sht) - (p - model.sht)
    return np.exp(1j * model.phase(z)) * num / den


def extract_quadratic_phase(model: PadeModel, dxl: float, grid: Sequence) -> PhasePoly:
    """Least-squares quadratic fit to the unwrapped phase of the smoothed model.

    Smoothed means every pole and zero with |Im| < dxl divided out; what is
    left varies slowly along the real axis and its phase is representable by
    a quadratic.
    """
    if dxl <= 0:
        raise PadeError("dxl must be positive")
    grid = [float(g) for g in grid]
    if len(grid) < 3:
        raise PadeError(f"need at least 3 grid points, got {len(grid)}")
    zeros = [z for z in model.zeros if abs(z.imag) >= dxl]
    poles = [p for p in model.poles if abs(p.imag) >= dxl]
    smoothed = replace(model, zeros=tuple(zeros), poles=tuple(poles))
    angles = np.unwrap([np.angle(evaluate(smoothed, j)) for j in grid])
    a, b, c = np.polyfit(grid, angles, 2)
    return PhasePoly(float(a), float(b), float(c))


def iterate_reconstruction(record: SMatrixRecord, config: RunConfig) -> PadeModel:
    """Repeated build / phase-extraction / rebuild on one energy's data.

    Each pass fits the data with the so-far-extracted quadratic phase divided
    out, so the rational factors concentrate on poles and zeros; the returned
    model carries the accumulated phase and reproduces the original values.
    """
    niter = config.override_niter if config.override_niter is not None else record.niter
    dxl = config.override_dxl if config.override_dxl is not None else record.dxl
    if niter < 1:
        raise PadeError(f"niter must be >= 1, got {niter}")

    nread = record.nread
    if config.override_nread is not None:
        nread = config.override_nread
        if nread < 4:
            raise PadeError(f"override_nread must be >= 4, got {nread}")
        record = replace(record, s_values=record.s_values[:nread],
                         jfin=min(record.jfin, nread - 1),
                         jstart=min(record.jstart, nread - 1))

    digits = 0
    if config.use_extended_precision or nread > 40:
        digits = config.precision_digits

    points = record.fit_points()
    jv = np.asarray([j for j, _ in points])
    sv = np.asarray([s for _, s in points])

    # dividing out a phase rounds the data to double; when the run is meant
    # to hold an extended interpolation bound, a parallel copy of the values
    # and of the accumulated phase is carried in software precision
    acc = np.zeros(3)
    sv_mp = acc_mp = None
    if digits > 0:
        with mp.workdps(digits):
            sv_mp = [mp.mpc(s) for _, s in points]
            acc_mp = [mp.mpf(0), mp.mpf(0), mp.mpf(0)]

    def peel(a, b, c):
        nonlocal sv, sv_mp
        acc[:] = acc + (a, b, c)
        sv = sv * np.exp(-1j * ((a * jv + b) * jv + c))
        if sv_mp is not None:
            with mp.workdps(digits):
                for i, coeff in enumerate((a, b, c)):
                    acc_mp[i] += mp.mpf(coeff)
                sv_mp = [s * mp.exp(-1j * ((mp.mpf(a) * j + b) * j + c))
                         for j, s in zip(jv, sv_mp)]

    if config.strip_prephase:
        peel(*_prephase_guess(jv, sv))

    model = None
    for it in range(niter):
        pts = list(zip(jv, sv_mp)) if sv_mp is not None else list(zip(jv, sv))
        model = build_rational_interpolant(pts, record.sht, digits)
        if it == niter - 1:
            break
        pp = extract_quadratic_phase(model, dxl, jv)
        peel(pp.a, pp.b, pp.c)

    model = replace(model, phase=PhasePoly(*acc), fit_points=tuple(points))
    if model.mp_data is not None:
        if digits > 0:
            md = dict(model.mp_data)
            with mp.workdps(digits):
                md["fit_values"] = [mp.mpc(s) for _, s in points]
                md["phase"] = tuple(acc_mp)
            model = replace(model, mp_data=md)
        else:
            # precision escalated mid-pipeline on data that were double to
            # begin with; the result is only meaningful at double accuracy
            model = replace(model, precision_digits=0, mp_data=None)
    resid = _model_residual(model)
    bound = INTERP_TOL_EXTENDED if digits >= 50 else INTERP_TOL
    if resid > bound:
        raise PadeError(
            f"reconstruction residual {resid:.3e} exceeds {bound:.0e}; "
            "increase precision_digits or reduce nread")
    return replace(model, interp_residual=resid)


def inject_noise(record: SMatrixRecord, fac: float, seed: int) -> SMatrixRecord:
    """Perturb each S value by fac*(u + iv), u and v uniform on [-1, 1]."""
    if fac < 0:
        raise PadeError("noise magnitude must be >= 0")
    if fac == 0:
        return record
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, record.nread)
    v = rng.uniform(-1.0, 1.0, record.nread)
    perturbed = tuple(s + fac * complex(u[j], v[j])
                      for j, s in enumerate(record.s_values))
    return replace(record, s_values=perturbed)


def interpolation_residual(model: PadeModel) -> float:
    """Max relative mismatch between the model and its fit points, evaluated
    at the model's own working precision."""
    return _model_residual(model)


def interpolation_defect(model: PadeModel) -> float:
    """Max absolute mismatch |model(t_j) - S_j| over the fit points, at the
    model's own working precision."""
    return _model_residual(model, relative=False)


# ---------------------------------------------------------------------------
# internals

def _prephase_guess(jv, sv):
    """Quadratic phase through the three highest-J data phases."""
    j3 = jv[-3:]
    angles = np.unwrap([np.angle(s) for s in sv[-3:]])
    a, b, c = np.polyfit(j3, angles, 2)
    return float(a), float(b), float(c)


def _trim(coeffs, rel_tol):
    mx = max(abs(c) for c in coeffs)
    if mx == 0:
        return coeffs[:1]
    last = 0
    for i, c in enumerate(coeffs):
        if abs(c) > rel_tol * mx:
            last = i
    return coeffs[: last + 1]


def _cancel_common(zeros, poles, tol=1e-10):
    """Drop pole/zero pairs coinciding to working precision (rank-deficiency
    artifacts of deflated systems, not physics).

    The tolerance must sit below the interpolation bound of the precision in
    use: cancelling a pair separated by eps perturbs the function by O(eps)
    near the pair, so a 1e-10 doublet is removable in double precision but is
    genuine structure to an extended-precision fit.
    """
    zeros = list(zeros)
    poles = list(poles)
    for p in list(poles):
        for z in list(zeros):
            if abs(z - p) <= tol * max(1.0, abs(p)):
                zeros.remove(z)
                poles.remove(p)
                break
    return zeros, poles


def _solve_double(jv, sv, sht, scale, n_p, n_q):
    t = (jv - sht) / scale
    vq = np.vander(t, n_q + 1, increasing=True)
    vp = np.vander(t, n_p + 1, increasing=True)
    a_mat = np.hstack([sv[:, None] * vq, -vp])
    _, _, vh = np.linalg.svd(a_mat)
    z = vh[-1].conj()
    norm_index = int(np.argmax(np.abs(z)))

    # Data lying on a rational of lower degree than the fit leaves common
    # polynomial factors free: the null space gains extra directions and this
    # null vector becomes an arbitrary mix with meaningless roots. Detect via
    # the smallest singular value, in an orthogonal column basis because the
    # monomial spectrum smears null directions into genuine ones.
    cheb_q = np.polynomial.chebyshev.chebvander(t, n_q)
    cheb_p = np.polynomial.chebyshev.chebvander(t, n_p)
    sig = np.linalg.svd(np.hstack([sv[:, None] * cheb_q, -cheb_p]),
                        compute_uv=False)
    degenerate = bool(sig[-1] <= RANK_DEGENERACY_TOL * sig[0])

    qc = _trim(list(z[: n_q + 1]), 1e-12)
    pc = _trim(list(z[n_q + 1:]), 1e-12)
    t_zeros = _polish(np.roots(pc[::-1]), pc) if len(pc) > 1 else np.array([])
    t_poles = _polish(np.roots(qc[::-1]), qc) if len(qc) > 1 else np.array([])
    kc = (pc[-1] / qc[-1]) * scale ** (len(qc) - len(pc))
    zeros, poles = _cancel_common(sht + scale * t_zeros, sht + scale * t_poles)
    return kc, zeros, poles, norm_index, degenerate


def _polish(roots, coeffs):
    poly = np.array(coeffs[::-1])
    dpoly = np.polyder(poly)
    out = []
    for r in roots:
        for _ in range(3):
            fp = np.polyval(dpoly, r)
            if fp == 0:
                break
            r = r - np.polyval(poly, r) / fp
        out.append(r)
    return np.array(out)


def _residual(kc, zeros, poles, jv, sv, sht):
    worst = 0.0
    for j, s in zip(jv, sv):
        num = kc
        for zr in zeros:
            num *= j - zr
        den = 1.0
        for p in poles:
            den *= j - p
        worst = max(worst, abs(num / den - s) / max(abs(s), 1e-300))
    return worst


def _solve_extended(jv, sv, sht, scale, n_p, n_q, digits, norm_index):
    """Re-solve the interpolation system in arbitrary precision.

    The double-precision null vector fixes which coefficient to normalize;
    the remaining square system is solved by LU, falling back to an SVD null
    vector if the normalization choice turns out singular.
    """
    with mp.workdps(digits):
        t = [(mp.mpf(j) - sht) / scale for j in jv]
        s_mp = [mp.mpc(s) for s in sv]
        ncols = n_q + 1 + n_p + 1

        def row(i):
            r = [s_mp[i] * t[i] ** m for m in range(n_q + 1)]
            r += [-(t[i] ** m) for m in range(n_p + 1)]
            return r

        rows = [row(i) for i in range(len(jv))]

        def monic_solve(index):
            a_sq = mp.matrix([[rows[i][c] for c in range(ncols) if c != index]
                              for i in range(len(jv))])
            rhs = mp.matrix([-rows[i][index] for i in range(len(jv))])
            sol = mp.lu_solve(a_sq, rhs)
            vec = list(sol[:index]) + [mp.mpc(1)] + list(sol[index:])
            mag = max(abs(c) for c in vec)
            return [c / mag for c in vec]

        def system_residual(vec):
            return max(abs(sum(r[c] * vec[c] for c in range(ncols)))
                       for r in rows)

        # an ill-chosen normalization (fixing a coefficient that is actually
        # tiny) wrecks the solve, and the double-precision null vector that
        # picks it may itself be poor; re-normalize on the solution's own
        # largest coefficient, and as a last resort take the null vector from
        # a full SVD of the system squared up with a zero row
        good = mp.mpf(10) ** (-(digits // 2))
        z, best = None, mp.inf
        index, tried = norm_index, set()
        for _ in range(3):
            if index in tried:
                break
            tried.add(index)
            try:
                cand = monic_solve(index)
            except ZeroDivisionError:
                break
            resid = system_residual(cand)
            if resid < best:
                best, z = resid, cand
            if resid < good:
                break
            index = max(range(ncols), key=lambda c: abs(cand[c]))
        if z is None or best >= good:
            a_aug = mp.matrix([list(r) for r in rows] + [[mp.mpc(0)] * ncols])
            _, _, v = mp.svd_c(a_aug)
            cand = [mp.conj(v[ncols - 1, c]) for c in range(ncols)]
            if system_residual(cand) < best:
                z = cand

        rel_tol = mp.mpf(10) ** (-(digits - 10))
        qc = _trim(z[: n_q + 1], rel_tol)
        pc = _trim(z[n_q + 1:], rel_tol)
        try:
            t_zeros = mp.polyroots(pc[::-1], maxsteps=200, extraprec=2 * digits) \
                if len(pc) > 1 else []
            t_poles = mp.polyroots(qc[::-1], maxsteps=200, extraprec=2 * digits) \
                if len(qc) > 1 else []
        except mp.libmp.libhyper.NoConvergence as exc:
            raise PadeError(
                f"root extraction did not converge at {digits} digits; "
                "increase precision_digits") from exc
        kc = (pc[-1] / qc[-1]) * mp.mpf(scale) ** (len(qc) - len(pc))
        zeros = [sht + scale * r for r in t_zeros]
        poles = [sht + scale * r for r in t_poles]
        zeros, poles = _cancel_common(zeros, poles,
                                      mp.mpf(10) ** (-(digits // 2)))

        worst = mp.mpf(0)
        for j, s in zip(jv, s_mp):
            num = kc
            for zr in zeros:
                num *= j - zr
            den = mp.mpc(1)
            for p in poles:
                den *= j - p
            worst = max(worst, abs(num / den - s) / max(abs(s), mp.mpf("1e-300")))

        mp_data = {"digits": digits, "k_const": kc,
                   "zeros": list(zeros), "poles": list(poles),
                   "residual": float(worst), "fit_values": list(s_mp)}
    return complex(kc), [complex(z) for z in zeros], [complex(p) for p in poles], mp_data


def _model_residual(model: PadeModel, relative: bool = True) -> float:
    if model.mp_data is not None:
        data = model.mp_data
        fit_values = data.get("fit_values")
        with mp.workdps(data["digits"]):
            pa, pb, pc_ = data.get("phase") or (mp.mpf(model.phase.a),
                                                mp.mpf(model.phase.b),
                                                mp.mpf(model.phase.c))
            worst = mp.mpf(0)
            for idx, (j, s) in enumerate(model.fit_points):
                s_ref = fit_values[idx] if fit_values is not None else mp.mpc(s)
                num = data["k_const"]
                for zr in data["zeros"]:
                    num *= j - zr
                den = mp.mpc(1)
                for p in data["poles"]:
                    den *= j - p
                ph = mp.exp(1j * (pc_ + j * (pa * j + pb)))
                diff = abs(ph * num / den - s_ref)
                if relative:
                    diff /= max(abs(s_ref), mp.mpf("1e-300"))
                worst = max(worst, diff)
            return float(worst)
    worst = 0.0
    for j, s in model.fit_points:
        diff = abs(evaluate(model, j) - s)
        if relative:
            diff /= max(abs(s), 1e-300)
        worst = max(worst, diff)
    return worst

"""Selection and characterization of complex-J poles of a reconstructed model.

Poles in the first quadrant with moderate Im J carry the resonance physics;
everything else in the root set is either a conjugate partner, a spurious
pole/zero doublet from noise, or a far-field artifact of the rational form.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np

from .pade import PadeModel, PadeError, evaluate

# poles closer than this cannot be treated as simple
SIMPLE_POLE_TOL = 1e-10
SIMPLE_POLE_TOL_EXTENDED = 1e-40
CONJ_POLE_TOL = 1e-13


class PoleAnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class CamRegion:
    """Closed rectangle in the complex J plane used to keep physical poles."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max):
            raise PoleAnalysisError(f"x_min {self.x_min} must be < x_max {self.x_max}")
        if not (self.y_min <= self.y_max):
            raise PoleAnalysisError(f"y_min {self.y_min} must be <= y_max {self.y_max}")

    def contains(self, z: complex) -> bool:
        return (self.x_min <= z.real <= self.x_max
                and self.y_min <= z.imag <= self.y_max)


@dataclass(frozen=True)
class PoleRecord:
    """One retained pole with the quantities the cross-section terms need.

    position_J is the pole in the J plane; lambda_value = J + 1/2 is the same
    pole in the angular-momentum variable the contour integrals run over.
    conj_value is the Schwarz-reflected model value at the pole; unitary
    input drives it to zero there.
    """

    position_J: complex
    residue: complex
    conj_value: complex
    energy: float

    @property
    def lambda_value(self) -> complex:
        return self.position_J + 0.5


def select_in_region(model: PadeModel, region: CamRegion) -> List[complex]:
    """Model poles inside the closed region, sorted by real part."""
    kept = [p for p in model.poles if region.contains(p)]
    return sorted(kept, key=lambda p: (p.real, p.imag))


def remove_froissart(model: PadeModel, eps: float) -> PadeModel:
    """Delete pole/zero doublets closer than eps, nearest pairs first.

    Each pole is paired with its nearest zero; pairs are processed in order
    of increasing separation, and both members go when the separation is
    below eps. Repeating the pass changes nothing.
    """
    if eps < 0:
        raise PoleAnalysisError("eps must be >= 0")
    if eps == 0 or not model.poles or not model.zeros:
        return model
    poles = list(model.poles)
    zeros = list(model.zeros)
    while poles and zeros:
        best = None
        for p in poles:
            z = min(zeros, key=lambda z: abs(z - p))
            d = abs(z - p)
            if best is None or d < best[0]:
                best = (d, p, z)
        if best[0] >= eps:
            break
        poles.remove(best[1])
        zeros.remove(best[2])
    return replace(model, poles=tuple(poles), zeros=tuple(zeros))


def residue_at(model: PadeModel, pole: complex) -> complex:
    """Residue of the model at one of its poles, from the factored form.

    Requires the pole to be simple at working precision; a crowded root set
    should be thinned first (smaller region, or a doublet-removal pass).
    """
    tol = SIMPLE_POLE_TOL_EXTENDED if model.precision_digits >= 50 else SIMPLE_POLE_TOL
    idx = _match_pole(model, pole)
    match = model.poles[idx]
    for i, other in enumerate(model.poles):
        if i == idx:
            continue
        if abs(other - match) <= tol:
            raise PoleAnalysisError(
                f"pole {match} is not simple at working precision; shrink the "
                "region or remove pole/zero doublets first")
    num = model.k_const
    for z in model.zeros:
        num *= match - z
    den = 1.0
    for i, other in enumerate(model.poles):
        if i != idx:
            den *= match - other
    return np.exp(1j * model.phase(match)) * num / den


def conjugate_value(model: PadeModel, pole: complex) -> complex:
    """conj of the model continued to conj(pole), the Schwarz-reflected value.

    For unitary input this is 1/S at the pole, so it vanishes as the pole is
    approached; its size is a direct probe of how well the continuation holds.
    """
    match = model.poles[_match_pole(model, pole)]
    target = np.conj(match)
    for p in model.poles:
        if abs(target - p) <= CONJ_POLE_TOL:
            raise PoleAnalysisError(
                f"conjugate point {target} coincides with pole {p}")
    return complex(np.conj(evaluate(model, target)))


def make_pole_record(model: PadeModel, pole: complex, energy: float) -> PoleRecord:
    return PoleRecord(position_J=complex(pole),
                      residue=complex(residue_at(model, pole)),
                      conj_value=conjugate_value(model, pole),
                      energy=float(energy))


def pole_table_rows(energy: float, poles: Sequence[complex]) -> List[Tuple[float, ...]]:
    """Rows (E, Re J, Im J) for the per-energy pole listing."""
    return [(float(energy), p.real, p.imag) for p in poles]


def _match_pole(model: PadeModel, pole: complex) -> int:
    """Index of the model pole nearest the request; identical duplicates in a
    hand-built model must stay distinguishable, hence index not value."""
    pole = complex(pole)
    if not model.poles:
        raise PoleAnalysisError("model has no poles")
    idx = min(range(len(model.poles)), key=lambda i: abs(model.poles[i] - pole))
    if abs(model.poles[idx] - pole) > 1e-8 * max(1.0, abs(pole)):
        raise PoleAnalysisError(f"{pole} is not a pole of the model")
    return idx

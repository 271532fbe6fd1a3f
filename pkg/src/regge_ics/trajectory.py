"""Tracking one pole's identity across the energy grid.

A trajectory is the energy-ordered path of a single pole through the complex
J plane. Identity is kept by continuity: at each new energy the candidate
with the nearest real part wins (hand mode lets the user overrule). Energies
where the pole fails to appear become gaps, not errors; a poorly resolved
stretch of grid should not cut a trajectory in two.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .datamodel import RunConfig, SeriesPoint
from .ics import modified_mulholland_term, mulholland_term, wavenumber
from .poles import PoleRecord


class TrajectoryError(ValueError):
    pass


@dataclass(frozen=True)
class ReggeTrajectory:
    id: str
    entries: Tuple[PoleRecord, ...] = ()
    mull_values: Tuple[float, ...] = ()
    gaps: Tuple[float, ...] = ()

    def __post_init__(self):
        energies = [p.energy for p in self.entries]
        if energies != sorted(energies) or len(set(energies)) != len(energies):
            raise TrajectoryError("trajectory energies must be strictly increasing")
        if len(self.mull_values) != len(self.entries):
            raise TrajectoryError("one Mulholland value per trajectory entry")


@dataclass
class SessionState:
    """Single-owner mutable state of one Step-II tracking session."""

    config: RunConfig
    energies: Tuple[float, ...]
    poles_by_energy: Dict[float, List[PoleRecord]]
    current_energy_index: int = 0
    active_trajectory: Optional[ReggeTrajectory] = None
    completed_trajectories: List[ReggeTrajectory] = field(default_factory=list)

    def __post_init__(self):
        if not self.energies:
            raise TrajectoryError("no energies in session")
        if not (0 <= self.current_energy_index < len(self.energies)):
            raise TrajectoryError(
                f"energy index {self.current_energy_index} outside the grid")

    @property
    def current_energy(self) -> float:
        return self.energies[self.current_energy_index]

    def poles_here(self) -> List[PoleRecord]:
        return self.poles_by_energy.get(self.current_energy, [])


def _mull_value(config: RunConfig, pole: PoleRecord) -> float:
    channel = config.channel()
    k = wavenumber(pole.energy, config.reduced_mass)
    if config.modified_mulholland:
        return modified_mulholland_term(pole, k, channel)
    return mulholland_term(pole, k, channel.elastic)


def next_trajectory_id(state: SessionState) -> str:
    return f"t{len(state.completed_trajectories) + 1}"


def seed_trajectory(state: SessionState, pole_choice_index: int) -> SessionState:
    """Begin the active trajectory at the current energy's chosen pole."""
    if state.active_trajectory is not None and state.active_trajectory.entries:
        raise TrajectoryError("a trajectory is already active; finish it first")
    poles = state.poles_here()
    if not poles:
        raise TrajectoryError(
            f"no poles at E={state.current_energy}; widen the region or relax "
            "the doublet-removal eps")
    if not (0 <= pole_choice_index < len(poles)):
        raise TrajectoryError(
            f"choice {pole_choice_index} out of range (0..{len(poles) - 1})")
    pole = poles[pole_choice_index]
    state.active_trajectory = ReggeTrajectory(
        id=next_trajectory_id(state),
        entries=(pole,), mull_values=(_mull_value(state.config, pole),))
    return state


def _advance(state: SessionState) -> None:
    if state.active_trajectory is None or not state.active_trajectory.entries:
        raise TrajectoryError("no active trajectory; seed one first")
    if state.current_energy_index + 1 >= len(state.energies):
        raise TrajectoryError("already at the last energy")
    state.current_energy_index += 1


def _append(state: SessionState, pole: PoleRecord) -> None:
    traj = state.active_trajectory
    state.active_trajectory = replace(
        traj,
        entries=traj.entries + (pole,),
        mull_values=traj.mull_values + (_mull_value(state.config, pole),))


def _record_gap(state: SessionState) -> None:
    traj = state.active_trajectory
    state.active_trajectory = replace(
        traj, gaps=traj.gaps + (state.current_energy,))


def follow_auto(state: SessionState) -> SessionState:
    """Step to the next energy, appending the pole nearest in Re J to the
    last accepted one; no candidate leaves a gap and keeps going."""
    _advance(state)
    poles = state.poles_here()
    if not poles:
        _record_gap(state)
        return state
    prev = state.active_trajectory.entries[-1].position_J
    # nearest |dRe|, ties by |dIm|, then by menu order
    best = min(range(len(poles)),
               key=lambda i: (abs(poles[i].position_J.real - prev.real),
                              abs(poles[i].position_J.imag - prev.imag), i))
    _append(state, poles[best])
    return state


def follow_manual(state: SessionState, choice) -> SessionState:
    """Step to the next energy with a human-supplied pole index or "skip"."""
    _advance(state)
    if choice == "skip":
        _record_gap(state)
        return state
    poles = state.poles_here()
    index = int(choice)
    if not (0 <= index < len(poles)):
        raise TrajectoryError(
            f"choice {index} out of range at E={state.current_energy} "
            f"(0..{len(poles) - 1})")
    _append(state, poles[index])
    return state


def finish_trajectory(state: SessionState) -> ReggeTrajectory:
    traj = state.active_trajectory
    if traj is None or not traj.entries:
        raise TrajectoryError("no active trajectory to finish")
    state.completed_trajectories.append(traj)
    state.active_trajectory = None
    return traj


def nearest_seed_location(state: SessionState, seed: complex
                          ) -> Tuple[int, int]:
    """(energy_index, pole_index) of the pole nearest to seed over the whole
    grid; used by unattended runs to latch onto the requested trajectory."""
    best = None
    for ei, energy in enumerate(state.energies):
        for pi, pole in enumerate(state.poles_by_energy.get(energy, [])):
            d = abs(pole.position_J - seed)
            if best is None or d < best[0]:
                best = (d, ei, pi)
    if best is None:
        raise TrajectoryError(
            "no poles anywhere on the grid; widen the region or relax eps")
    return best[1], best[2]


def follow_to_end(state: SessionState) -> SessionState:
    while state.current_energy_index + 1 < len(state.energies):
        follow_auto(state)
    return state


def export_trajectory(traj: ReggeTrajectory
                      ) -> Tuple[List[SeriesPoint], List[SeriesPoint], List[SeriesPoint]]:
    """Aligned series (E, Re J, Im J), (E, Re Res, Im Res), (E, I)."""
    if not traj.entries:
        raise TrajectoryError("cannot export an empty trajectory")
    traj_series = [SeriesPoint(p.energy, (p.position_J.real, p.position_J.imag))
                   for p in traj.entries]
    resid_series = [SeriesPoint(p.energy, (p.residue.real, p.residue.imag))
                    for p in traj.entries]
    mull_series = [SeriesPoint(p.energy, (traj.mull_values[i],))
                   for i, p in enumerate(traj.entries)]
    return traj_series, resid_series, mull_series

"""Two-step batch driver and session persistence.

Step I reconstructs every energy file independently: fit, pole hunt, exact
and integral cross sections, with per-energy failures logged and skipped.
Step II follows one pole trajectory through the Step-I pole field and
subtracts the accumulated resonance terms from the exact cross section.
Everything Step II needs is persisted in session.json, so trajectories from
repeated runs pile up instead of overwriting each other.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .datamodel import (RunConfig, SeriesPoint, SMatrixRecord,
                        apply_parity_flip, parse_energy_file, write_rows,
                        write_series)
from .ics import (Decomposition, integral_term, pws_cross_section,
                  pws_from_model, subtract_trajectories, wavenumber)
from .pade import PadeModel, inject_noise, iterate_reconstruction
from .poles import (CamRegion, PoleRecord, make_pole_record, remove_froissart,
                    select_in_region)
from .trajectory import (ReggeTrajectory, SessionState, export_trajectory,
                         finish_trajectory, follow_auto, follow_manual,
                         follow_to_end, nearest_seed_location, seed_trajectory)

log = logging.getLogger("regge_ics")

SESSION_FILE = "session.json"
NOISE_SEED_BASE = 90000


class RunError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Step I

def _data_files(config: RunConfig) -> List[Tuple[int, str]]:
    try:
        names = os.listdir(config.data_dir)
    except FileNotFoundError:
        raise RunError(f"data directory {config.data_dir} does not exist")
    lo, hi = config.file_range
    found = sorted((int(n), os.path.join(config.data_dir, n))
                   for n in names if n.isdigit() and lo <= int(n) <= hi)
    if not found:
        raise RunError(f"no data files in {config.data_dir} within {config.file_range}")
    return found


def _reconstruct_one(config: RunConfig, record: SMatrixRecord,
                     noise_repeat: int = 0) -> PadeModel:
    if config.parity_flip:
        record = apply_parity_flip(record)
    if config.noise_fac > 0:
        record = inject_noise(record, config.noise_fac,
                              NOISE_SEED_BASE + 97 * int(record.energy * 8) + noise_repeat)
    return iterate_reconstruction(record, config)


def run_step_one(config: RunConfig) -> Dict:
    if not config.first_run:
        raise RunError("config says this is not a first run; use the "
                       "trajectory step instead")
    region = CamRegion(*config.region)
    channel = config.channel()
    os.makedirs(config.output_dir, exist_ok=True)

    session: Dict = {"energies": [], "records": [], "completed_trajectories": [],
                     "active_trajectory": None, "current_energy_index": 0}
    pole_rows = []
    noise_rows = []
    failures = 0

    for index, path in _data_files(config):
        try:
            with open(path) as fh:
                record = parse_energy_file(fh.read())
            if not (config.e_min <= record.energy <= config.e_max):
                continue
            model = _reconstruct_one(config, record)
            model = remove_froissart(model, config.froissart_eps)
            selected = select_in_region(model, region)

            poles = []
            for p in selected:
                try:
                    poles.append(make_pole_record(model, p, record.energy))
                except ValueError as exc:
                    log.warning("file %d: dropping pole %s: %s", index, p, exc)
            pole_rows.extend((record.energy, pr.position_J.real, pr.position_J.imag)
                             for pr in poles)

            k = wavenumber(record.energy, channel.reduced_mass)
            sigma_exact = pws_cross_section(record, channel)
            sigma_pade, pade_error = pws_from_model(model, record, channel)
            lam_max = config.lambda_max if config.lambda_max is not None \
                else record.jfin + 0.5
            sigma_int = integral_term(model, channel, k, lam_max)

            if config.noise_fac > 0 and config.noise_repeats > 0:
                for r in range(1, config.noise_repeats + 1):
                    m_r = _reconstruct_one(config, record, noise_repeat=r)
                    _, err_r = pws_from_model(m_r, record, channel)
                    noise_rows.append((record.energy, float(r), err_r))

            session["energies"].append(record.energy)
            session["records"].append({
                "energy": record.energy, "k": k.k,
                "sigma_exact": sigma_exact, "sigma_pade": sigma_pade,
                "sigma_int": sigma_int, "pade_error": pade_error,
                "poles": [[pr.position_J.real, pr.position_J.imag,
                           pr.residue.real, pr.residue.imag,
                           pr.conj_value.real, pr.conj_value.imag]
                          for pr in poles]})
        except Exception as exc:
            failures += 1
            log.warning("file %d failed: %s", index, exc)

    if not session["energies"]:
        raise RunError(f"no energies processed successfully ({failures} failures)")

    write_rows(os.path.join(config.output_dir, "ics.pole"),
               "E ReJ ImJ", pole_rows)
    write_series(os.path.join(config.output_dir, "ics.exact"),
                 "E sigma_exact sigma_pade pade_error",
                 [SeriesPoint(r["energy"], (r["sigma_exact"], r["sigma_pade"],
                                            r["pade_error"]))
                  for r in session["records"]])
    write_series(os.path.join(config.output_dir, "ics.int"),
                 "E sigma_int",
                 [SeriesPoint(r["energy"], (r["sigma_int"],))
                  for r in session["records"]])
    if noise_rows:
        write_rows(os.path.join(config.output_dir, "ics.noise"),
                   "E repeat pade_error", noise_rows)
    save_session(config, session)
    log.info("step one: %d energies, %d failures", len(session["energies"]), failures)
    return session


# ---------------------------------------------------------------------------
# session persistence

def session_path(config: RunConfig) -> str:
    return os.path.join(config.output_dir, SESSION_FILE)


def save_session(config: RunConfig, session: Dict) -> None:
    path = session_path(config)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(session, fh, indent=1)
    os.replace(tmp, path)


def load_session(config: RunConfig) -> Dict:
    path = session_path(config)
    if not os.path.exists(path):
        raise RunError(f"{path} not found; run the reconstruction step first")
    with open(path) as fh:
        return json.load(fh)


def _pole_from_row(row: Sequence[float], energy: float) -> PoleRecord:
    return PoleRecord(position_J=complex(row[0], row[1]),
                      residue=complex(row[2], row[3]),
                      conj_value=complex(row[4], row[5]),
                      energy=energy)


def _traj_to_json(traj: ReggeTrajectory) -> Dict:
    return {"id": traj.id,
            "entries": [[p.energy, p.position_J.real, p.position_J.imag,
                         p.residue.real, p.residue.imag,
                         p.conj_value.real, p.conj_value.imag]
                        for p in traj.entries],
            "mull_values": list(traj.mull_values),
            "gaps": list(traj.gaps)}


def _traj_from_json(data: Dict) -> ReggeTrajectory:
    entries = tuple(_pole_from_row(row[1:], row[0]) for row in data["entries"])
    return ReggeTrajectory(id=data["id"], entries=entries,
                           mull_values=tuple(data["mull_values"]),
                           gaps=tuple(data["gaps"]))


def build_state(config: RunConfig, session: Dict) -> SessionState:
    energies = [e for e in session["energies"]
                if config.e_min <= e <= config.e_max]
    if not energies:
        raise RunError("no session energies inside the configured range")
    by_energy = {}
    for rec in session["records"]:
        if rec["energy"] in energies:
            by_energy[rec["energy"]] = [_pole_from_row(row, rec["energy"])
                                        for row in rec["poles"]]
    state = SessionState(config=config, energies=tuple(energies),
                         poles_by_energy=by_energy)
    state.completed_trajectories = [_traj_from_json(t)
                                    for t in session["completed_trajectories"]]
    state.current_energy_index = int(session.get("current_energy_index", 0))
    if session.get("active_trajectory"):
        state.active_trajectory = _traj_from_json(session["active_trajectory"])
    return state


def persist_state(config: RunConfig, session: Dict, state: SessionState) -> None:
    session["completed_trajectories"] = [_traj_to_json(t)
                                         for t in state.completed_trajectories]
    session["active_trajectory"] = (_traj_to_json(state.active_trajectory)
                                    if state.active_trajectory else None)
    session["current_energy_index"] = state.current_energy_index
    save_session(config, session)


# ---------------------------------------------------------------------------
# Step II

def _write_trajectory_files(config: RunConfig, traj: ReggeTrajectory) -> None:
    traj_series, resid_series, mull_series = export_trajectory(traj)
    for suffix in (f".{traj.id}", ""):
        write_series(os.path.join(config.output_dir, f"ics.traj{suffix}"),
                     "E ReJ ImJ", traj_series)
        write_series(os.path.join(config.output_dir, f"ics.resid{suffix}"),
                     "E ReRes ImRes", resid_series)
        write_series(os.path.join(config.output_dir, f"ics.mull{suffix}"),
                     "E I_mull", mull_series)


def _write_smooth(config: RunConfig, session: Dict,
                  state: SessionState) -> None:
    exact = [SeriesPoint(r["energy"], (r["sigma_exact"],))
             for r in session["records"]]
    mull_list = [export_trajectory(t)[2] for t in state.completed_trajectories]
    smooth = subtract_trajectories(exact, mull_list)
    write_series(os.path.join(config.output_dir, "ics.smooth"),
                 "E sigma_smooth", smooth)


def finish_and_export(config: RunConfig, session: Dict,
                      state: SessionState) -> ReggeTrajectory:
    traj = finish_trajectory(state)
    _write_trajectory_files(config, traj)
    _write_smooth(config, session, state)
    persist_state(config, session, state)
    return traj


def run_step_two(config: RunConfig,
                 choices: Optional[Sequence[str]] = None) -> ReggeTrajectory:
    """Seed and follow one trajectory, then subtract every completed one.

    Unattended runs latch onto the pole nearest the configured seed anywhere
    on the grid; energies before the latch point are simply not part of the
    trajectory. Hand mode consumes a choice script (or prompts): a pole
    index seeds or extends, "skip" records a gap, "auto" takes one automatic
    step and "auto*" automatic steps to the end of the grid.
    """
    if config.first_run:
        raise RunError("config says this is a first run; run the "
                       "reconstruction step, then set first_run: no")
    session = load_session(config)
    state = build_state(config, session)
    state.active_trajectory = None
    state.current_energy_index = 0

    if not config.follow_by_hand:
        if config.seed_re is None or config.seed_im is None:
            raise RunError("automatic trajectory following needs seed_re and "
                           "seed_im (or set follow_by_hand: yes)")
        seed = complex(config.seed_re, config.seed_im)
        ei, pi = nearest_seed_location(state, seed)
        state.current_energy_index = ei
        seed_trajectory(state, pi)
        follow_to_end(state)
    else:
        _run_by_hand(state, choices)

    return finish_and_export(config, session, state)


def _run_by_hand(state: SessionState, choices: Optional[Sequence[str]]) -> None:
    script = list(choices) if choices is not None else None
    pos = 0

    def next_choice() -> str:
        nonlocal pos
        if script is not None:
            if pos >= len(script):
                return "auto*"
            token = script[pos]
            pos += 1
            return token
        return _prompt(state)

    while True:
        token = next_choice().strip()
        seeded = state.active_trajectory is not None and state.active_trajectory.entries
        at_end = state.current_energy_index + 1 >= len(state.energies)
        if token == "auto*":
            if not seeded:
                raise RunError("cannot auto-follow before seeding a trajectory")
            follow_to_end(state)
            return
        if token == "auto":
            follow_auto(state)
        elif token == "skip":
            if seeded:
                follow_manual(state, "skip")
            elif at_end:
                raise RunError("reached the last energy without seeding")
            else:
                state.current_energy_index += 1
        else:
            index = int(token)
            if seeded:
                follow_manual(state, index)
            else:
                seed_trajectory(state, index)
        if state.current_energy_index + 1 >= len(state.energies):
            if state.active_trajectory is None or not state.active_trajectory.entries:
                raise RunError("reached the last energy without seeding")
            return


def _prompt(state: SessionState) -> str:
    poles = state.poles_here()
    print(f"E = {state.current_energy} meV: {len(poles)} pole(s)")
    for i, p in enumerate(poles):
        print(f"  [{i}] J = {p.position_J.real:.6f} + {p.position_J.imag:.6f}i")
    return input("choice (index | skip | auto | auto*): ")


# ---------------------------------------------------------------------------
# exports for the UI and the decomposition endpoint

def session_export(config: RunConfig, session: Dict,
                   state: Optional[SessionState] = None) -> Dict:
    if state is None:
        state = build_state(config, session)
    trajs = list(state.completed_trajectories)
    if state.active_trajectory is not None:
        trajs = trajs + [state.active_trajectory]
    series = {
        "exact": [[r["energy"], r["sigma_exact"], r["sigma_pade"],
                   r["pade_error"]] for r in session["records"]],
        "int": [[r["energy"], r["sigma_int"]] for r in session["records"]],
    }
    smooth = _smooth_points(session, state.completed_trajectories)
    if smooth is not None:
        series["smooth"] = smooth
    return {
        "energies": list(state.energies),
        "current_energy_index": state.current_energy_index,
        "poles_by_energy": [
            [[p.position_J.real, p.position_J.imag,
              p.residue.real, p.residue.imag]
             for p in state.poles_by_energy.get(e, [])]
            for e in state.energies],
        "trajectories": [{
            "id": t.id,
            "active": state.active_trajectory is not None and t is state.active_trajectory,
            "energies": [p.energy for p in t.entries],
            "re_j": [p.position_J.real for p in t.entries],
            "im_j": [p.position_J.imag for p in t.entries],
            "mull": list(t.mull_values),
            "gaps": list(t.gaps)} for t in trajs],
        "series": series,
        "config": _config_echo(config),
    }


def _smooth_points(session: Dict, completed: List[ReggeTrajectory]):
    if not completed:
        return None
    exact = [SeriesPoint(r["energy"], (r["sigma_exact"],))
             for r in session["records"]]
    try:
        smooth = subtract_trajectories(exact, [export_trajectory(t)[2]
                                               for t in completed])
    except ValueError:
        return None
    return [[pt.energy, pt.values[0]] for pt in smooth]


def _config_echo(config: RunConfig) -> Dict:
    echo = asdict(config)
    echo["region"] = list(config.region)
    echo["file_range"] = list(config.file_range)
    return echo


def build_decompositions(config: RunConfig, session: Dict) -> List[Decomposition]:
    completed = [_traj_from_json(t) for t in session["completed_trajectories"]]
    out = []
    for rec in session["records"]:
        mull: Dict[str, float] = {}
        for traj in completed:
            for i, p in enumerate(traj.entries):
                if p.energy == rec["energy"]:
                    mull[traj.id] = traj.mull_values[i]
        sigma_smooth = rec["sigma_exact"]
        for v in mull.values():
            sigma_smooth -= v
        out.append(Decomposition(energy=rec["energy"],
                                 sigma_exact=rec["sigma_exact"],
                                 sigma_pade=rec["sigma_pade"],
                                 sigma_int=rec["sigma_int"],
                                 mull_terms=mull,
                                 sigma_smooth=sigma_smooth,
                                 pade_error=rec["pade_error"]))
    return out

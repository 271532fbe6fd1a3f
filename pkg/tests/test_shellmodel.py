"""Closed-form shell model: unitarity, limits, and dataset generation."""
import cmath
import os

import numpy as np
import pytest

from regge_ics.constants import HBAR2_OVER_2U
from regge_ics.datamodel import parse_energy_file
from regge_ics.shellmodel import (
    DATASET_VARIANTS,
    ShellModelError,
    ShellModelParams,
    complex_j_pole_oracle,
    find_bound_state_energy,
    generate_dataset,
    hard_sphere_phase_s,
    informative_jfin,
    s_matrix_element,
)

BOUND = DATASET_VARIANTS["bound"]
META = DATASET_VARIANTS["meta"]


def test_variants_share_geometry():
    for p in (BOUND, META):
        assert p.R == 2.045
        assert p.d == 0.592
        assert p.v_well == 165.0
        assert p.mu == 1.0
    assert BOUND.omega_delta == 1.023
    assert META.omega_delta == 66.463
    assert BOUND.hard_radius == pytest.approx(1.453)


@pytest.mark.parametrize("kwargs", [
    dict(R=-1.0, d=0.5, v_well=10.0, omega_delta=1.0),
    dict(R=2.0, d=0.0, v_well=10.0, omega_delta=1.0),
    dict(R=2.0, d=2.5, v_well=10.0, omega_delta=1.0),
    dict(R=2.0, d=0.5, v_well=10.0, omega_delta=1.0, mu=0.0),
])
def test_bad_geometry_rejected(kwargs):
    with pytest.raises(ShellModelError):
        ShellModelParams(**kwargs)


def test_s_matrix_unitary_on_grid():
    for params in (BOUND, META):
        for energy in (1.0, 7.0, 40.0, 100.0):
            for j in range(0, 31, 5):
                s = s_matrix_element(params, energy, j)
                assert abs(abs(s) - 1.0) <= 1e-10


def test_s_matrix_input_validation():
    with pytest.raises(ShellModelError, match="energy must be positive"):
        s_matrix_element(BOUND, 0.0, 3)
    with pytest.raises(ShellModelError, match="J must be"):
        s_matrix_element(BOUND, 5.0, -1)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_high_partial_wave_underflow_is_reported():
    # Riccati functions under/overflow long before J = 200 at 1 meV
    with pytest.raises(ShellModelError, match="reduce j_max"):
        s_matrix_element(BOUND, 1.0, 200)


def test_strong_shell_approaches_hard_sphere():
    # an impenetrable shell at R is a hard sphere of radius R
    wall = ShellModelParams(R=BOUND.R, d=BOUND.d, v_well=BOUND.v_well,
                            omega_delta=1e9, mu=BOUND.mu)
    for energy in (5.0, 40.0):
        for j in (0, 3, 7):
            got = s_matrix_element(wall, energy, j)
            ref = hard_sphere_phase_s(BOUND.R, BOUND.mu, energy, j)
            assert abs(got - ref) < 1e-6


def test_hard_sphere_s_wave_is_analytic():
    # delta_0 = -k a modulo pi, so S = exp(-2ika)
    radius, energy = 1.7, 17.0
    k = np.sqrt(energy / HBAR2_OVER_2U)
    got = hard_sphere_phase_s(radius, 1.0, energy, 0)
    assert abs(got - cmath.exp(-2j * k * radius)) < 1e-12


def test_s_matrix_continuous_in_energy():
    for params in (BOUND, META):
        for j in (0, 4, 9):
            a = s_matrix_element(params, 30.0, j)
            b = s_matrix_element(params, 30.0 + 1e-6, j)
            assert abs(a - b) < 1e-4


def test_bound_state_energy_location():
    eb = find_bound_state_energy(BOUND)
    assert -16.0 < eb < -12.0
    # and it really solves the matching condition: nearby energies bracket it
    h2 = HBAR2_OVER_2U / BOUND.mu

    def match(energy):
        kappa = np.sqrt(-energy / h2)
        q = np.sqrt((energy + BOUND.v_well) / h2)
        u = np.sin(q * BOUND.d)
        return q * np.cos(q * BOUND.d) + (BOUND.omega_delta / h2) * u + kappa * u

    assert match(eb - 1e-4) * match(eb + 1e-4) < 0


def test_bound_state_missing_is_an_error():
    lonely = ShellModelParams(R=2.0, d=0.5, v_well=0.5, omega_delta=50.0)
    with pytest.raises(ShellModelError, match="no J=0 bound state"):
        find_bound_state_energy(lonely)


def test_informative_jfin_rules():
    flat = [1.0 + 0j] * 25
    assert informative_jfin(flat) == 13  # j_min floor 8 plus guard 5
    tail = list(flat)
    tail[12] = 0.5 + 0j
    assert informative_jfin(tail) == 17  # last informative 12 plus guard
    assert informative_jfin([0.5 + 0j] * 6) == 5  # clamped to the data


def test_complex_j_oracle_refines_a_pole():
    z = complex_j_pole_oracle(BOUND, 40.0, 9.1 + 0.45j)
    assert abs(z - (9.111741864 + 0.446559479j)) < 1e-6


def test_complex_j_oracle_reports_failure():
    with pytest.raises(ShellModelError, match="no convergence"):
        complex_j_pole_oracle(BOUND, 40.0, 2.0 + 9.0j, max_iter=3)


def test_generate_dataset_round_trip(tmp_path):
    energies = [5.0, 10.0, 15.0]
    paths = generate_dataset(BOUND, energies, j_max=12, data_dir=str(tmp_path))
    assert [os.path.basename(p) for p in paths] == ["1", "2", "3"]
    for path, energy in zip(paths, energies):
        record = parse_energy_file(open(path).read())
        assert record.energy == energy
        assert record.nread == 13
        assert record.niter == 2
        assert record.inv == -1
        assert record.dxl == 0.5
        assert record.jfin == informative_jfin(record.s_values)
        assert record.sht == record.jfin / 2.0
        for j, s in enumerate(record.s_values):
            assert abs(s - s_matrix_element(BOUND, energy, j)) < 1e-15


def test_generate_dataset_jfin_acts_as_cap(tmp_path):
    paths = generate_dataset(BOUND, [5.0], j_max=12, data_dir=str(tmp_path),
                             jfin=9)
    record = parse_energy_file(open(paths[0]).read())
    assert record.jfin == 9
    assert record.sht == 4.5


def test_generate_dataset_input_validation(tmp_path):
    with pytest.raises(ShellModelError, match="strictly increasing"):
        generate_dataset(BOUND, [5.0, 5.0], j_max=10, data_dir=str(tmp_path))
    with pytest.raises(ShellModelError, match="strictly increasing"):
        generate_dataset(BOUND, [5.0, 2.0], j_max=10, data_dir=str(tmp_path))
    with pytest.raises(ShellModelError, match="no energies"):
        generate_dataset(BOUND, [], j_max=10, data_dir=str(tmp_path))
    with pytest.raises(ShellModelError, match="j_max"):
        generate_dataset(BOUND, [5.0], j_max=2, data_dir=str(tmp_path))

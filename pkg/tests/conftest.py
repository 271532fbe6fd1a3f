"""Shared fixtures: both closed-form datasets generated and processed once.

The session-scoped runs execute the real command-line entry points (generate,
step one, step two) into per-session temporary directories, so every test
sees the same artifacts a user would.
"""
from pathlib import Path
from types import SimpleNamespace

import pytest

from regge_ics.cli import main as cli_main
from regge_ics.datamodel import parse_energy_file, parse_run_config
from regge_ics.pade import iterate_reconstruction

BOUND_TEMPLATE = """\
first_run: yes
elastic_channel: yes
e_min: 1
e_max: 100
reduced_mass: 1.0
region: 0 20 0.0025 1
data_dir: {root}/data
output_dir: {root}/out
seed_re: 4.85
seed_im: 0.0043
"""

META_TEMPLATE = """\
first_run: yes
elastic_channel: yes
e_min: 40
e_max: 100
reduced_mass: 1.0
region: 0 20 0.0025 4
data_dir: {root}/data
output_dir: {root}/out
seed_re: 0.195
seed_im: 3.22
"""

TEMPLATES = {"bound": BOUND_TEMPLATE, "meta": META_TEMPLATE}


def _make_run(variant: str, tmp_path_factory) -> SimpleNamespace:
    root = tmp_path_factory.mktemp(variant)
    text = TEMPLATES[variant].format(root=root)
    step1_cfg = root / "INPUT.step1"
    step1_cfg.write_text(text)
    step2_cfg = root / "INPUT.step2"
    step2_cfg.write_text(text.replace("first_run: yes", "first_run: no"))

    assert cli_main(["generate", variant, "--config", str(step1_cfg)]) == 0
    assert cli_main(["step1", "--config", str(step1_cfg)]) == 0
    assert cli_main(["step2", "--config", str(step2_cfg)]) == 0

    return SimpleNamespace(
        variant=variant,
        root=root,
        data_dir=root / "data",
        out_dir=root / "out",
        config=parse_run_config(step1_cfg.read_text()),
        config_step2=parse_run_config(step2_cfg.read_text()),
        step1_cfg=step1_cfg,
        step2_cfg=step2_cfg,
    )


@pytest.fixture(scope="session")
def bound_run(tmp_path_factory):
    return _make_run("bound", tmp_path_factory)


@pytest.fixture(scope="session")
def meta_run(tmp_path_factory):
    return _make_run("meta", tmp_path_factory)


def read_record(run, file_index: int):
    return parse_energy_file((run.data_dir / str(file_index)).read_text())


def data_file_count(run) -> int:
    return len([p for p in run.data_dir.iterdir() if p.name.isdigit()])


def _fit_all(run):
    models = {}
    for index in range(1, data_file_count(run) + 1):
        record = read_record(run, index)
        models[record.energy] = (record, iterate_reconstruction(record, run.config))
    return models


@pytest.fixture(scope="session")
def bound_models(bound_run):
    """energy -> (record, fitted model) for every generated file."""
    return _fit_all(bound_run)


@pytest.fixture(scope="session")
def meta_models(meta_run):
    return _fit_all(meta_run)


SMALL_ENERGIES = [30.0, 35.0, 40.0, 45.0, 50.0]


def config_text(data_dir, out_dir, **overrides):
    base = {
        "first_run": "yes",
        "elastic_channel": "yes",
        "e_min": "1",
        "e_max": "100",
        "reduced_mass": "1.0",
        "region": "0 20 0.0025 1",
        "data_dir": str(data_dir),
        "output_dir": str(out_dir),
        "seed_re": "8.2",
        "seed_im": "0.35",
    }
    base.update({k: str(v) for k, v in overrides.items()})
    return "".join(f"{k}: {v}\n" for k, v in base.items())


@pytest.fixture(scope="session")
def small(tmp_path_factory):
    """One processed five-energy run; tests copy its outputs, never mutate."""
    from regge_ics.pipeline import run_step_one
    from regge_ics.shellmodel import DATASET_VARIANTS, generate_dataset

    root = tmp_path_factory.mktemp("small")
    data = root / "data"
    generate_dataset(DATASET_VARIANTS["bound"], SMALL_ENERGIES, j_max=30,
                     data_dir=str(data))
    out = root / "out"
    config = parse_run_config(config_text(data, out))
    session = run_step_one(config)
    return SimpleNamespace(root=root, data=data, out=out, config=config,
                           session=session)


def fresh_outputs(small, tmp_path, **overrides):
    """Copy of the processed outputs with a step-two config pointing at it."""
    import shutil

    out = tmp_path / "out"
    shutil.copytree(small.out, out)
    text = config_text(small.data, out, first_run="no", **overrides)
    return parse_run_config(text)


def random_rational(rng, max_degree=14):
    """Random K * prod(J - Z) / prod(J - P) with poles kept off the sampling
    line; returns (zeros, poles, k_const, sample_points).

    Samples run over every integer J in |J| <= 15 so they bracket the root
    region; one-sided grids turn root recovery into extrapolation, which no
    double-precision fit survives. Build these with sht = 0. Roots are kept
    pairwise separated: the samples round to double, and a clustered pair
    amplifies that rounding past any recovery tolerance at any solver
    precision."""
    deg_p = int(rng.integers(0, max_degree + 1))
    deg_q = int(rng.integers(0, max_degree + 1))
    if deg_p + deg_q == 0:
        deg_q = 1

    roots = []

    def draw(im_min):
        while True:
            c = complex(rng.uniform(-10, 10),
                        rng.choice([-1, 1]) * rng.uniform(im_min, 3))
            if all(abs(c - r) >= 1.0 for r in roots):
                roots.append(c)
                return c

    zeros = [draw(0.0) for _ in range(deg_p)]
    poles = [draw(0.3) for _ in range(deg_q)]
    k_const = complex(rng.uniform(0.5, 2.0), rng.uniform(-1, 1))

    def f(z):
        num = k_const
        for zr in zeros:
            num *= z - zr
        den = 1.0
        for p in poles:
            den *= z - p
        return num / den

    points = [(float(j), f(float(j))) for j in range(-15, 16)]
    return zeros, poles, k_const, points

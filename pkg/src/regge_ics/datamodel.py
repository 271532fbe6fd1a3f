"""Domain types and file formats.

Covers the per-energy S-matrix input files, the run configuration, and the
ASCII output series. All numbers are written with 17 significant digits so
that write -> parse round-trips are exact on doubles.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

FLOAT_FMT = "%.17g"


class EnergyFileError(ValueError):
    """Malformed per-energy input file; carries the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelSpec:
    """Scattering channel: helicities fix the lowest contributing partial wave."""

    elastic: bool
    omega_in: int
    omega_out: int
    reduced_mass: float
    energy_kind: str = "collision"

    def __post_init__(self):
        if self.reduced_mass <= 0:
            raise ValueError("reduced_mass must be positive")
        if self.elastic and self.omega_out != self.omega_in:
            raise ValueError("elastic channel requires omega_out == omega_in")
        if self.energy_kind not in ("total", "collision"):
            raise ValueError(f"unknown energy_kind {self.energy_kind!r}")

    @property
    def j_min(self) -> int:
        if self.elastic:
            return abs(self.omega_in)
        return max(abs(self.omega_in), abs(self.omega_out))


@dataclass(frozen=True)
class SMatrixRecord:
    """One energy's table of S(E,J) for J = 0..nread-1 plus fit directives."""

    energy: float
    s_values: tuple
    niter: int
    sht: float
    jstart: int
    jfin: int
    inv: int  # carried from the file, never interpreted
    dxl: float

    def __post_init__(self):
        object.__setattr__(self, "s_values", tuple(complex(s) for s in self.s_values))
        n = len(self.s_values)
        if n < 4:
            raise ValueError(f"need at least 4 partial waves, got {n}")
        if not (0 <= self.jstart <= self.jfin <= n - 1):
            raise ValueError(
                f"need 0 <= jstart <= jfin <= nread-1, got {self.jstart}, {self.jfin}, nread={n}")
        if not (self.energy > 0):
            raise ValueError(f"energy must be positive, got {self.energy}")
        for j, s in enumerate(self.s_values):
            if not (math.isfinite(s.real) and math.isfinite(s.imag)):
                raise ValueError(f"non-finite S value at J={j}")

    @property
    def nread(self) -> int:
        return len(self.s_values)

    def fit_points(self) -> list:
        """The (J, S) pairs actually fed to the reconstruction."""
        return [(float(j), self.s_values[j]) for j in range(self.jstart, self.jfin + 1)]


@dataclass(frozen=True)
class RunConfig:
    first_run: bool
    elastic_channel: bool
    e_min: float
    e_max: float
    reduced_mass: float
    region: tuple  # (x_min, x_max, y_min, y_max) bounds on Re J, Im J
    data_dir: str
    output_dir: str
    follow_by_hand: bool = False
    modified_mulholland: bool = False
    file_range: tuple = (1, 999999)
    froissart_eps: float = 0.0
    parity_flip: bool = False
    strip_prephase: bool = True
    use_extended_precision: bool = False
    noise_fac: float = 0.0
    noise_repeats: int = 0
    plot_points: int = 200
    override_nread: Optional[int] = None
    override_niter: Optional[int] = None
    override_dxl: Optional[float] = None
    omega_in: int = 0
    omega_out: int = 0
    energy_kind: str = "collision"
    seed_re: Optional[float] = None
    seed_im: Optional[float] = None
    lambda_max: Optional[float] = None
    precision_digits: int = 64

    def __post_init__(self):
        if not self.e_min < self.e_max:
            raise ValueError(f"need e_min < e_max, got {self.e_min}, {self.e_max}")
        if self.reduced_mass <= 0:
            raise ValueError("reduced_mass must be positive")
        x_min, x_max, y_min, y_max = self.region
        if not x_min < x_max:
            raise ValueError(f"need x_min < x_max, got {x_min}, {x_max}")
        if not y_min <= y_max:
            raise ValueError(f"need y_min <= y_max, got {y_min}, {y_max}")
        if self.froissart_eps < 0:
            raise ValueError("froissart_eps must be >= 0")
        if self.noise_fac < 0:
            raise ValueError("noise_fac must be >= 0")
        if self.noise_repeats < 0:
            raise ValueError("noise_repeats must be >= 0")
        lo, hi = self.file_range
        if not (1 <= lo <= hi):
            raise ValueError(f"need 1 <= lo <= hi in file_range, got {lo}, {hi}")
        if self.modified_mulholland and not self.elastic_channel:
            raise ValueError(
                "modified_mulholland applies to single-channel elastic scattering only")

    def channel(self) -> ChannelSpec:
        return ChannelSpec(
            elastic=self.elastic_channel,
            omega_in=self.omega_in,
            omega_out=self.omega_out if not self.elastic_channel else self.omega_in,
            reduced_mass=self.reduced_mass,
            energy_kind=self.energy_kind,
        )


@dataclass(frozen=True)
class SeriesPoint:
    energy: float
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


def parse_energy_file(text: str) -> SMatrixRecord:
    """Parse one per-energy input file.

    Layout: line 1 is "nread niter sht jstart jfin inv dxl", followed by
    nread lines of "ReS ImS", and a final line holding the energy in meV.
    """
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise EnergyFileError("empty file")

    def floats(lineno, tokens):
        out = []
        for tok in tokens:
            try:
                out.append(float(tok))
            except ValueError:
                raise EnergyFileError(f"malformed numeric token {tok!r}", lineno) from None
        return out

    lineno, header = lines[0]
    tokens = header.split()
    if len(tokens) != 7:
        raise EnergyFileError(f"header needs 7 fields, got {len(tokens)}", lineno)
    hv = floats(lineno, tokens)
    nread, niter, sht, jstart, jfin, inv, dxl = (
        int(hv[0]), int(hv[1]), hv[2], int(hv[3]), int(hv[4]), int(hv[5]), hv[6])

    body = lines[1:]
    if len(body) != nread + 1:
        raise EnergyFileError(
            f"expected {nread} S values plus an energy line, found {len(body)} data lines")
    s_values = []
    for lineno, ln in body[:-1]:
        tokens = ln.split()
        if len(tokens) != 2:
            raise EnergyFileError(f"expected 'ReS ImS', got {len(tokens)} fields", lineno)
        re_s, im_s = floats(lineno, tokens)
        s_values.append(complex(re_s, im_s))
    lineno, ln = body[-1]
    tokens = ln.split()
    if len(tokens) != 1:
        raise EnergyFileError("energy line must hold a single value", lineno)
    energy = floats(lineno, tokens)[0]

    try:
        return SMatrixRecord(energy=energy, s_values=tuple(s_values), niter=niter,
                             sht=sht, jstart=jstart, jfin=jfin, inv=inv, dxl=dxl)
    except ValueError as exc:
        raise EnergyFileError(str(exc)) from None


def format_energy_file(record: SMatrixRecord) -> str:
    header = "%d %d %s %d %d %d %s" % (
        record.nread, record.niter, FLOAT_FMT % record.sht,
        record.jstart, record.jfin, record.inv, FLOAT_FMT % record.dxl)
    rows = [f"{FLOAT_FMT % s.real} {FLOAT_FMT % s.imag}" for s in record.s_values]
    return "\n".join([header] + rows + [FLOAT_FMT % record.energy]) + "\n"


def apply_parity_flip(record: SMatrixRecord) -> SMatrixRecord:
    """Multiply S(J) by (-1)^J. Involution: applying twice returns the original."""
    flipped = tuple(s if j % 2 == 0 else -s for j, s in enumerate(record.s_values))
    return replace(record, s_values=flipped)


_BOOL_WORDS = {"yes": True, "true": True, "1": True, "on": True,
               "no": False, "false": False, "0": False, "off": False}

_REQUIRED_KEYS = ("first_run", "elastic_channel", "e_min", "e_max",
                  "reduced_mass", "region", "data_dir", "output_dir")

_OPTIONAL_DEFAULTS = {
    "follow_by_hand": False, "modified_mulholland": False,
    "file_range": (1, 999999), "froissart_eps": 0.0, "parity_flip": False,
    "strip_prephase": True, "use_extended_precision": False,
    "noise_fac": 0.0, "noise_repeats": 0, "plot_points": 200,
    "override_nread": None, "override_niter": None, "override_dxl": None,
    "omega_in": 0, "omega_out": 0, "energy_kind": "collision",
    "seed_re": None, "seed_im": None, "lambda_max": None,
    "precision_digits": 64,
}


def _parse_bool(key, raw):
    try:
        return _BOOL_WORDS[raw.strip().lower()]
    except KeyError:
        raise ConfigError(f"cannot read {raw!r} as yes/no for key {key!r}") from None


def _parse_scalar(key, raw, kind):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"cannot read {raw!r} as a number for key {key!r}") from None


def parse_run_config(text: str) -> RunConfig:
    """Parse a "key: value" run configuration with '#' comments."""
    seen = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ConfigError(f"line {lineno}: expected 'key: value', got {line!r}")
        key, raw = (part.strip() for part in line.split(":", 1))
        if key not in _REQUIRED_KEYS and key not in _OPTIONAL_DEFAULTS:
            raise ConfigError(f"unknown configuration key {key!r}")
        if key in seen:
            raise ConfigError(f"duplicate configuration key {key!r}")
        seen[key] = raw

    for key in _REQUIRED_KEYS:
        if key not in seen:
            raise ConfigError(f"missing required configuration key {key!r}")

    kw = dict(_OPTIONAL_DEFAULTS)
    for key, raw in seen.items():
        if key in ("first_run", "elastic_channel", "follow_by_hand",
                   "modified_mulholland", "parity_flip", "strip_prephase",
                   "use_extended_precision"):
            kw[key] = _parse_bool(key, raw)
        elif key in ("e_min", "e_max", "reduced_mass", "froissart_eps",
                     "noise_fac", "seed_re", "seed_im", "lambda_max",
                     "override_dxl"):
            kw[key] = _parse_scalar(key, raw, float)
        elif key in ("noise_repeats", "plot_points", "override_nread",
                     "override_niter", "omega_in", "omega_out",
                     "precision_digits"):
            kw[key] = _parse_scalar(key, raw, int)
        elif key == "region":
            parts = raw.split()
            if len(parts) != 4:
                raise ConfigError(f"region needs 4 values, got {len(parts)}")
            kw[key] = tuple(_parse_scalar(key, p, float) for p in parts)
        elif key == "file_range":
            parts = raw.split()
            if len(parts) != 2:
                raise ConfigError(f"file_range needs 2 values, got {len(parts)}")
            kw[key] = tuple(_parse_scalar(key, p, int) for p in parts)
        elif key == "energy_kind":
            kw[key] = raw.strip()
        else:
            kw[key] = raw.strip()

    try:
        return RunConfig(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def write_series(path, header: str, points: Sequence[SeriesPoint]) -> None:
    """Write an output series file: a '#' header line, then one row per energy."""
    last = None
    for pt in points:
        if last is not None and pt.energy <= last:
            raise ValueError(f"series energies must be strictly increasing at E={pt.energy}")
        last = pt.energy
    rows = [[pt.energy, *pt.values] for pt in points]
    write_rows(path, header, rows)


def read_series(path) -> tuple:
    header, rows = read_rows(path)
    return header, [SeriesPoint(energy=r[0], values=tuple(r[1:])) for r in rows]


def write_rows(path, header: str, rows) -> None:
    """Write whitespace-separated numeric rows; rewriting the same data is byte-identical."""
    if not header.startswith("#"):
        header = "# " + header
    lines = [header]
    for row in rows:
        lines.append(" ".join(FLOAT_FMT % v for v in row))
    tmp = os.fspath(path) + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_rows(path) -> tuple:
    header = ""
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if not header:
                    header = line.lstrip("# ").rstrip()
                continue
            rows.append([float(tok) for tok in line.split()])
    return header, rows

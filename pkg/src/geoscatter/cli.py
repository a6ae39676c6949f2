"""``geoscatter`` command-line front end.

    geoscatter <command> (--config run.json | --preset NAME) [--out data.csv]
    geoscatter validate (--config run.json | --preset NAME)

Commands: amplitude, sweep, total-xsec, perturb, lattice, validate.
Exit status: 0 on success, 2 for configuration errors, 3 for numerical errors.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .born import (
    THIN_LAYER,
    CurvatureCouplings,
    ScatteringKinematics,
    amplitude_radial,
    gaussian_amplitude_first_order,
    gaussian_total_cross_section,
)
from .exceptions import GeoScatterError
from .geometry import GaussianBump, TabulatedProfile, validate_profile
from .lattice import LatticeSpec, composite_amplitude, triangular_lattice
from .perturbation import PerturbedGaussianSpec, perturbed_cross_section, z_factors
from .quadrature import QuadratureOptions

COMMANDS = ("amplitude", "sweep", "total-xsec", "perturb", "lattice")

_FIG_THETAS = [0, "pi/6", "pi/4", "pi"]
_FIG_GRID = {"k_min": 0.01, "k_max": 4.0, "k_steps": 400, "theta": _FIG_THETAS}

PRESETS = {
    "fig1": {
        "command": "sweep",
        "surface": {"type": "gaussian", "eta": 0.1, "sigma": 1.0},
        "couplings": "thin-layer",
        "kinematics": _FIG_GRID,
    },
    "fig2": {
        "command": "total-xsec",
        "surface": {"type": "gaussian", "eta": 0.1, "sigma": 1.0},
        "couplings": [
            {"lambda1": 0.5, "lambda2": -0.5},
            {"lambda1": 0.5, "lambda2": 0.5},
            {"lambda1": 0.5, "lambda2": 0.0},
            {"lambda1": 0.0, "lambda2": -0.5},
        ],
        "kinematics": {"k_min": 0.01, "k_max": 4.0, "k_steps": 400},
    },
    "fig3": {
        "command": "perturb",
        "surface": {"type": "gaussian", "eta": 0.1, "sigma": 1.0},
        "couplings": "thin-layer",
        "kinematics": _FIG_GRID,
        "perturbation": {"epsilon": 0.01, "alpha1": 1.0, "alpha2": 1.0},
    },
    "fig5": {
        "command": "lattice",
        "surface": {"type": "gaussian", "eta": 0.01, "sigma": 1.0},
        "couplings": "thin-layer",
        "kinematics": _FIG_GRID,
        "lattice": {"a": 10.0, "basis": "triangular", "m_range": [-1, 1], "n_range": [-1, 1]},
    },
}

_TOP_KEYS = {"command", "surface", "couplings", "kinematics", "perturbation",
             "lattice", "quadrature", "method", "output"}
_SURFACE_KEYS = {"gaussian": {"type", "delta", "sigma", "eta"},
                 "tabulated": {"type", "path", "decay_scale", "sigma"}}
_KIN_KEYS = {"k_min", "k_max", "k_steps", "theta"}
_PERT_KEYS = {"epsilon", "alpha1", "alpha2", "beta1", "beta2"}
_LAT_KEYS = {"a", "basis", "m_range", "n_range"}
_QUAD_KEYS = {"abs_tol", "rel_tol", "max_panels", "truncation_radius", "envelope_threshold"}


class ConfigError(Exception):
    """Invalid run configuration; the message names the offending key."""


class NumericalError(Exception):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


_ANGLE = re.compile(r"^\s*(?:(?P<num>[0-9.]+)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>[0-9.]+))?\s*$")


def parse_angle(value, key="kinematics.theta") -> float:
    """Radians from a number or a string like "pi/6" or "2*pi/3"."""
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE.match(value)
        if m:
            num = float(m.group("num") or 1.0)
            den = float(m.group("den") or 1.0)
            return num * math.pi / den
    raise ConfigError(f"{key}: cannot read angle {value!r}")


def _number(block, key, path, positive=False, default=None, allow_inf=False):
    if key not in block:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}: missing")
    v = block[key]
    if isinstance(v, str) and allow_inf and v.lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{path}.{key}: expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{path}.{key}: must be positive, got {v!r}")
    return float(v)


def _reject_unknown(block, allowed, path):
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in block:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key" if path else f"{key}: unknown key")


class RunConfig:
    """Parsed and validated run configuration."""

    def __init__(self, raw: dict, command=None, base_dir=None):
        _reject_unknown(raw, _TOP_KEYS, "")
        self.raw = raw
        cmd = raw.get("command", command)
        if command is not None and cmd != command:
            raise ConfigError(f"command: configuration is for {cmd!r}, not {command!r}")
        if cmd not in COMMANDS:
            raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {cmd!r}")
        self.command = cmd
        self.base_dir = Path(base_dir) if base_dir else Path.cwd()
        self.surface, self.sigma, self.eta = self._surface(raw.get("surface"))
        self.couplings = self._couplings(raw.get("couplings", "thin-layer"))
        self.k_grid, self.thetas = self._kinematics(raw.get("kinematics"))
        self.options = self._quadrature(raw.get("quadrature", {}))
        self.method = raw.get("method", "quadrature" if cmd == "amplitude" else "analytic")
        if self.method not in ("analytic", "quadrature"):
            raise ConfigError(f"method: expected 'analytic' or 'quadrature', got {self.method!r}")
        if self.method == "analytic" and not isinstance(self.surface, GaussianBump):
            raise ConfigError("method: analytic formulas need a gaussian surface")
        self.perturbation = self._perturbation(raw.get("perturbation"))
        self.lattice = self._lattice(raw.get("lattice"))
        self.output = raw.get("output")

    def _surface(self, block):
        if block is None:
            raise ConfigError("surface: missing")
        if not isinstance(block, dict):
            raise ConfigError("surface: expected an object")
        kind = block.get("type", "gaussian")
        if kind not in _SURFACE_KEYS:
            raise ConfigError(f"surface.type: unknown surface {kind!r}")
        _reject_unknown(block, _SURFACE_KEYS[kind], "surface")
        if kind == "gaussian":
            sigma = _number(block, "sigma", "surface", positive=True)
            if "eta" in block and "delta" in block:
                raise ConfigError("surface.eta: give either eta or delta, not both")
            if "eta" in block:
                eta = _number(block, "eta", "surface")
                if eta < 0:
                    raise ConfigError("surface.eta: must be non-negative")
                bump = GaussianBump.from_eta(eta, sigma)
            else:
                bump = GaussianBump(_number(block, "delta", "surface"), sigma)
            return bump, sigma, bump.eta
        path = block.get("path")
        if not isinstance(path, str):
            raise ConfigError("surface.path: expected a file name")
        full = Path(path) if Path(path).is_absolute() else self.base_dir / path
        try:
            prof = TabulatedProfile.from_csv(full, block.get("decay_scale"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"surface.path: cannot read {path!r}: {exc}") from None
        sigma = _number(block, "sigma", "surface", positive=True, default=prof.decay_scale)
        return prof, sigma, None

    @staticmethod
    def _one_coupling(v, path):
        if v == "thin-layer":
            return THIN_LAYER
        if isinstance(v, dict):
            _reject_unknown(v, {"lambda1", "lambda2"}, path)
            return CurvatureCouplings(_number(v, "lambda1", path), _number(v, "lambda2", path))
        raise ConfigError(f"{path}: expected 'thin-layer' or {{lambda1, lambda2}}")

    def _couplings(self, v):
        if isinstance(v, list):
            if not v:
                raise ConfigError("couplings: empty list")
            return [self._one_coupling(c, f"couplings[{i}]") for i, c in enumerate(v)]
        return [self._one_coupling(v, "couplings")]

    def _kinematics(self, block):
        if block is None:
            raise ConfigError("kinematics: missing")
        _reject_unknown(block, _KIN_KEYS, "kinematics")
        k_min = _number(block, "k_min", "kinematics", positive=True)
        k_max = _number(block, "k_max", "kinematics", positive=True)
        steps = block.get("k_steps", 1)
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
            raise ConfigError(f"kinematics.k_steps: expected a positive integer, got {steps!r}")
        if k_max < k_min:
            raise ConfigError("kinematics.k_max: must not be smaller than k_min")
        if steps == 1:
            grid = np.array([k_min])
        else:
            grid = np.linspace(k_min, k_max, steps)
        thetas = block.get("theta", [0.0])
        if not isinstance(thetas, list):
            thetas = [thetas]
        if not thetas and self.command != "total-xsec":
            raise ConfigError("kinematics.theta: empty list")
        return grid, [parse_angle(t) for t in thetas]

    def _quadrature(self, block):
        _reject_unknown(block, _QUAD_KEYS, "quadrature")
        try:
            return QuadratureOptions(**block)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"quadrature: {exc}") from None

    def _perturbation(self, block):
        if self.command != "perturb":
            if block is not None:
                _reject_unknown(block, _PERT_KEYS, "perturbation")
            return None
        if block is None:
            raise ConfigError("perturbation: required by the perturb command")
        _reject_unknown(block, _PERT_KEYS, "perturbation")
        if not isinstance(self.surface, GaussianBump):
            raise ConfigError("surface.type: perturb needs a gaussian surface")
        return PerturbedGaussianSpec(
            self.surface,
            _number(block, "alpha1", "perturbation", allow_inf=True),
            _number(block, "alpha2", "perturbation", allow_inf=True),
            _number(block, "beta1", "perturbation", default=math.inf, allow_inf=True),
            _number(block, "beta2", "perturbation", default=math.inf, allow_inf=True),
            _number(block, "epsilon", "perturbation"),
        )

    def _lattice(self, block):
        if self.command != "lattice":
            if block is not None:
                _reject_unknown(block, _LAT_KEYS, "lattice")
            return None
        if block is None:
            raise ConfigError("lattice: required by the lattice command")
        _reject_unknown(block, _LAT_KEYS, "lattice")
        m_range = self._range(block, "m_range")
        n_range = self._range(block, "n_range")
        basis = block.get("basis", "triangular")
        if basis == "triangular":
            a = _number(block, "a", "lattice", positive=True)
            return triangular_lattice(a, m_range, n_range)
        try:
            arr = np.asarray(basis, dtype=float)
        except (TypeError, ValueError):
            arr = None
        if arr is None or arr.shape != (2, 2) or not np.all(np.isfinite(arr)):
            raise ConfigError("lattice.basis: expected 'triangular' or [[ax, ay], [bx, by]]")
        scale = float(block["a"]) if "a" in block else 1.0
        return LatticeSpec(tuple(scale * arr[0]), tuple(scale * arr[1]), m_range, n_range)

    @staticmethod
    def _range(block, key):
        v = block.get(key, [0, 0])
        if (not isinstance(v, list) or len(v) != 2
                or not all(isinstance(i, int) and not isinstance(i, bool) for i in v) or v[1] < v[0]):
            raise ConfigError(f"lattice.{key}: expected [low, high] integers with low <= high")
        return tuple(v)

    def diagnostics(self) -> list[str]:
        """Warnings about validity conditions; does not compute amplitudes."""
        out = [f"surface: {m}" for m in validate_profile(self.surface)]
        if self.perturbation is not None:
            spec = self.perturbation.to_perturbation_spec(check=False)
            out += [f"perturbation: {m}" for m in spec.diagnostics()]
        if self.lattice is not None:
            out += [f"lattice: {m}" for m in self.lattice.diagnostics(self.sigma, self.eta)]
        return out


def load_config(path=None, preset=None, command=None) -> RunConfig:
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"preset: unknown preset {preset!r}")
        raw = copy.deepcopy(PRESETS[preset])
        base = None
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path} is not valid JSON ({exc})") from None
        base = Path(path).parent
    return RunConfig(raw, command=command, base_dir=base)


# -- computations -------------------------------------------------------------


def _amplitude(cfg, couplings, k, theta):
    kin = ScatteringKinematics(k, theta)
    if cfg.method == "analytic":
        return gaussian_amplitude_first_order(cfg.surface, kin, couplings)
    return amplitude_radial(cfg.surface, kin, couplings, cfg.options)


def _guard(k, theta, fn):
    try:
        return fn()
    except (GeoScatterError, ArithmeticError) as exc:
        raise NumericalError(f"numerical failure at k = {k!r}, theta = {theta!r}: {exc}") from None


def compute_rows(cfg: RunConfig):
    """Header and rows (lists of floats) for the configured command."""
    sigma = cfg.sigma
    if cfg.command == "total-xsec":
        header = ["sigma_k", "lambda1", "lambda2", "sigma_tot_over_sigma"]
        if not isinstance(cfg.surface, GaussianBump):
            raise ConfigError("surface.type: total-xsec needs a gaussian surface")
        rows = []
        for c in cfg.couplings:
            vals = gaussian_total_cross_section(cfg.surface, cfg.k_grid, c)
            for k, v in zip(cfg.k_grid, np.atleast_1d(vals)):
                rows.append([sigma * k, c.lambda1, c.lambda2, v / sigma])
        return header, rows

    header = ["sigma_k", "theta", "re_f", "im_f", "dcs_over_sigma"]
    multi = len(cfg.couplings) > 1
    if multi:
        header[2:2] = ["lambda1", "lambda2"]
    if cfg.command == "perturb":
        header += ["z1", "z2", "perturbed_dcs_over_sigma"]
    if cfg.command == "lattice":
        header += ["c_abs2"]
    rows = []
    for c in cfg.couplings:
        for theta in cfg.thetas:
            for k in cfg.k_grid:
                k = float(k)
                f = _guard(k, theta, lambda: _amplitude(cfg, c, k, theta))
                extra = []
                if cfg.command == "perturb":
                    kin = ScatteringKinematics(k, theta)
                    z1, z2 = _guard(k, theta, lambda: z_factors(cfg.perturbation, kin, c))
                    pert = perturbed_cross_section(cfg.perturbation, kin, c)
                    extra = [z1, z2, pert / sigma]
                if cfg.command == "lattice":
                    kin = ScatteringKinematics(k, theta)
                    single = f
                    f = composite_amplitude(cfg.lattice, lambda _kin: single, kin.k_in, kin.k_out)
                    c_abs2 = abs(f) ** 2 / abs(single) ** 2 if single != 0 else math.nan
                    extra = [c_abs2]
                row = [sigma * k, theta]
                if multi:
                    row += [c.lambda1, c.lambda2]
                row += [f.real, f.imag, (f.real * f.real + f.imag * f.imag) / sigma] + extra
                rows.append(row)
    return header, rows


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def build_parser():
    p = argparse.ArgumentParser(prog="geoscatter", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS + ("validate",))
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON run configuration")
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in run configuration")
    p.add_argument("--out", help="CSV output path (default: config 'output' or stdout)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            cfg = load_config(args.config, args.preset)
            issues = cfg.diagnostics()
            if issues:
                for msg in issues:
                    print(f"warning: {msg}")
            else:
                print("ok")
            return 0
        cfg = load_config(args.config, args.preset, command=args.command)
        header, rows = compute_rows(cfg)
    except ConfigError as exc:
        print(f"geoscatter: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"geoscatter: {exc}", file=sys.stderr)
        return 3
    text = render_csv(header, rows)
    out = args.out or cfg.output
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

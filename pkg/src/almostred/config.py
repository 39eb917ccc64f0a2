"""Run configuration: a single JSON document, validated up front.

Example::

    {"schema_version": 1,
     "frequency": {"kind": "golden"},
     "potential": {"coupling": 0.5, "cos": [1.0]},
     "energies": {"start": -3.2, "stop": 3.2, "num": 65},
     "output": "out"}

The potential is ``constant + 2 coupling sum_k (cos_k cos 2 pi k x + sin_k sin 2 pi k x)``.
"""

from dataclasses import dataclass, field, fields
import hashlib
import json
import math

import numpy as np

from .analytic import trig_polynomial
from .arithmetic import frequency_from_config
from .conjugacy import ConjugacyConfig
from .errors import InvalidConfig, InvalidInput
from .schrodinger import SchrodingerConfig

SCHEMA_VERSION = 1
_TOP_KEYS = {"schema_version", "frequency", "potential", "energy", "energies", "theta", "eps",
             "eps_prime", "heights", "grid", "N", "N_max", "tol", "classification", "conjugacy",
             "ids", "cf", "output", "t"}


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(raw):
    return hashlib.sha256(canonical(raw).encode()).hexdigest()


def _pow2(n, name):
    if not isinstance(n, int) or n < 1 or n & (n - 1):
        raise InvalidConfig(f"{name} must be a power of two, got {n!r}")
    return n


def _positive(x, name):
    if not isinstance(x, (int, float)) or not x > 0 or not math.isfinite(x):
        raise InvalidConfig(f"{name} must be a positive number, got {x!r}")
    return float(x)


def _sub(cls, data, name, pow2=(), positive=()):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    extra = set(data) - known
    if extra:
        raise InvalidConfig(f"unknown keys in {name}: {sorted(extra)}")
    for k in pow2:
        if k in data:
            _pow2(data[k], f"{name}.{k}")
    for k in positive:
        if k in data and data[k] is not None:
            _positive(data[k], f"{name}.{k}")
    if "heights" in data and data["heights"] is not None:
        data["heights"] = tuple(data["heights"])
    return cls(**data)


@dataclass
class RunConfig:
    raw: dict
    frequency: object
    potential: object
    energy: object = None          # float, or {"scan_min": {...}}
    energies: list = None
    theta: float = None
    eps: float = None
    eps_prime: float = None
    t: float = 0.0
    heights: tuple = (0.0, 0.0125, 0.025, 0.0375, 0.05)
    grid: int = 1024
    N: int = 1 << 12
    N_max: int = 1 << 14
    tol: float = 1e-3
    classification: SchrodingerConfig = field(default_factory=SchrodingerConfig)
    conjugacy: ConjugacyConfig = field(default_factory=ConjugacyConfig)
    ids: dict = field(default_factory=lambda: {"method": "both", "size": 2000})
    cf: dict = field(default_factory=lambda: {"depth": 30, "window": [3, 10], "target": 35})
    output: str = "out"

    @property
    def hash(self):
        return config_hash(self.raw)


def _energy_grid(spec):
    if isinstance(spec, list):
        return [float(e) for e in spec]
    if isinstance(spec, dict) and {"start", "stop", "num"} <= set(spec):
        num = int(spec["num"])
        if num < 1:
            raise InvalidConfig("energies.num must be >= 1")
        return [float(e) for e in np.linspace(float(spec["start"]), float(spec["stop"]), num)]
    raise InvalidConfig("energies must be a list or {start, stop, num}")


def _potential(spec):
    if not isinstance(spec, dict):
        raise InvalidConfig("potential must be an object")
    extra = set(spec) - {"coupling", "cos", "sin", "constant"}
    if extra:
        raise InvalidConfig(f"unknown keys in potential: {sorted(extra)}")
    try:
        lam = float(spec.get("coupling", 1.0))
        cos = [float(a) for a in spec.get("cos", [])]
        sin = [float(b) for b in spec.get("sin", [])]
        const = float(spec.get("constant", 0.0))
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"bad potential: {exc}") from None
    if not all(math.isfinite(x) for x in [lam, const] + cos + sin):
        raise InvalidConfig("potential entries must be finite")
    return trig_polynomial(cos=cos, sin=sin, constant=const, scale=2.0 * lam)


def parse_config(raw):
    """Validate a decoded JSON document and build a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise InvalidConfig("config must be a JSON object")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise InvalidConfig(f"schema_version must be {SCHEMA_VERSION}, got {raw.get('schema_version')!r}")
    extra = set(raw) - _TOP_KEYS
    if extra:
        raise InvalidConfig(f"unknown config keys: {sorted(extra)}")
    if "frequency" not in raw:
        raise InvalidConfig("frequency is required")
    try:
        freq = frequency_from_config(raw["frequency"])
    except InvalidInput as exc:
        raise InvalidConfig(f"bad frequency: {exc}") from None
    cfg = RunConfig(raw=raw, frequency=freq, potential=_potential(raw.get("potential", {"coupling": 0.0})))
    if "energy" in raw:
        e = raw["energy"]
        if isinstance(e, dict) and "scan_min" in e:
            cfg.energy = {"scan_min": _energy_grid(e["scan_min"])}
        elif isinstance(e, (int, float)) and math.isfinite(e):
            cfg.energy = float(e)
        else:
            raise InvalidConfig("energy must be a number or {scan_min: grid}")
    if "energies" in raw:
        cfg.energies = _energy_grid(raw["energies"])
    for k in ("theta", "eps", "eps_prime", "tol"):
        if k in raw:
            setattr(cfg, k, _positive(raw[k], k))
    if "t" in raw:
        cfg.t = float(raw["t"])
    if "heights" in raw:
        hs = raw["heights"]
        if not isinstance(hs, list) or not hs:
            raise InvalidConfig("heights must be a non-empty list")
        cfg.heights = tuple(float(h) for h in hs)
    if "grid" in raw:
        cfg.grid = _pow2(raw["grid"], "grid")
    for k in ("N", "N_max"):
        if k in raw:
            if not isinstance(raw[k], int) or raw[k] < 1:
                raise InvalidConfig(f"{k} must be a positive integer")
            setattr(cfg, k, raw[k])
    cfg.classification = _sub(SchrodingerConfig, raw.get("classification"), "classification",
                              pow2=("grid",), positive=("delta", "tol_L", "quant_tol", "le_tol"))
    cfg.conjugacy = _sub(ConjugacyConfig, raw.get("conjugacy"), "conjugacy", pow2=("grid",),
                         positive=("dir_tol", "trim", "delta_min", "tol_residual", "real_tol_residual", "rot_tol",
                                   "real_rot_tol", "tol_angle", "gauge", "eps", "le_tol"))
    if "ids" in raw:
        ids = dict(cfg.ids, **raw["ids"])
        if ids["method"] not in ("rotation", "eigencount", "both"):
            raise InvalidConfig("ids.method must be rotation, eigencount or both")
        cfg.ids = ids
    if "cf" in raw:
        cfg.cf = dict(cfg.cf, **raw["cf"])
    if "output" in raw:
        cfg.output = str(raw["output"])
    return cfg


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from None
    return parse_config(raw)

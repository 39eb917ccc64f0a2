"""Energy classification, rotation number, IDS and the spectral dichotomy report.

``(H u)_n = u_{n+1} + u_{n-1} + v(x + n alpha) u_n``.  Spectrum membership
is operational: ``E`` is in a gap exactly when the Schrödinger cocycle is
certified uniformly hyperbolic.
"""

from dataclasses import dataclass, field, asdict
import math
import time

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from . import kernels
from .cocycle import grid_fixed, schrodinger_cocycle
from .errors import AlmostRedError, InvalidInput
from .hyperbolicity import uh_certificate
from .lyapunov import regularity_test, strip_profile

CLASSES = ("gap", "subcritical", "critical", "supercritical", "unresolved")


@dataclass
class SchrodingerConfig:
    delta: float = 0.05
    tol_L: float = 1e-2
    quant_tol: float = 0.05
    heights: tuple = None
    le_tol: float = 1e-3
    N_max: int = 1 << 13
    grid: int = 512
    uh_n_max: int = 1 << 14
    rotation_N: int = 20000
    phases: int = 8

    def profile_heights(self):
        if self.heights:
            return tuple(float(h) for h in self.heights)
        d = self.delta
        return (0.0, d / 4, d / 2, 3 * d / 4, d)


@dataclass
class EnergyRecord:
    E: float
    uh: bool
    L0: float
    cls: str
    accel: float = None
    quantized: bool = None
    rho: float = None
    ids: float = None
    err: float = None
    profile: object = None
    status: str = "ok"

    def to_dict(self):
        return {"E": self.E, "class": self.cls, "L0": self.L0, "accel": self.accel,
                "rho": self.rho, "ids": self.ids, "err": self.err, "uh": self.uh,
                "quantized": self.quantized, "status": self.status}


def _potential_on_orbit(frequency, v, N, x0):
    ph = kernels.orbit_phases(np.asarray([x0], dtype=np.uint64), frequency.fixed64,
                              np.arange(N, dtype=np.uint64))[0]
    vals = v.eval_strip(ph.astype(complex))
    return np.ascontiguousarray(vals.real)


def _check_potential(v):
    if v.shape != "scalar" or not v.is_real_symmetric(1e-12):
        raise InvalidInput("potential must be a real-symmetric scalar map")


def rotation_number(frequency, v, E, N=100000, phases=8, windows=10):
    """Fibered rotation number in ``[0, 1/2]`` from sign changes of the solution.

    Averaged over ``phases`` starting phases; returns ``(rho, err)`` where
    ``err`` is the standard error across windows.  ``E`` may be an array.
    """
    _check_potential(v)
    E = np.atleast_1d(np.asarray(E, dtype=float))
    if N < windows:
        raise InvalidInput("N too small")
    starts = grid_fixed(phases)
    w = N // windows
    per = np.zeros((phases, windows, E.size))
    for p, x0 in enumerate(starts):
        vv = _potential_on_orbit(frequency, v, w * windows, int(x0))
        prev = np.zeros(E.size)
        for j in range(windows):
            cnt = kernels.riccati_sign_changes(vv[:(j + 1) * w], E).astype(float)
            per[p, j] = cnt - prev
            prev = cnt
    rates = per / (2.0 * w)
    rho = rates.mean(axis=(0, 1))
    err = rates.mean(axis=0).std(axis=0) / math.sqrt(windows) + 1.0 / (2 * N)
    rho = np.clip(rho, 0.0, 0.5)
    if rho.size == 1:
        return float(rho[0]), float(err[0])
    return rho, err


def ids(frequency, v, E, method="rotation", size=None, phases=8):
    """Integrated density of states ``N(E)``.

    ``rotation``: ``1 - 2 rho``.  ``eigencount``: fraction of eigenvalues
    ``<= E`` of ``size x size`` Dirichlet truncations, averaged over phases.
    """
    _check_potential(v)
    scalar = np.ndim(E) == 0
    Ea = np.atleast_1d(np.asarray(E, dtype=float))
    if method == "rotation":
        rho, _ = rotation_number(frequency, v, Ea, size or 100000, phases)
        out = 1.0 - 2.0 * np.atleast_1d(rho)
    elif method == "eigencount":
        size = size or 1000
        if size < 100:
            raise InvalidInput("eigencount needs size >= 100")
        counts = np.zeros(Ea.size)
        for x0 in grid_fixed(phases):
            d = _potential_on_orbit(frequency, v, size, int(x0))
            ev = eigvalsh_tridiagonal(d, np.ones(size - 1))
            counts += np.searchsorted(ev, Ea, side="right")
        out = counts / (phases * size)
    else:
        raise InvalidInput(f"unknown ids method {method!r}")
    return float(out[0]) if scalar else out


def _acceleration(profile, delta):
    hs = np.array(profile.heights)
    Ls = np.array(profile.exponents)
    sel = (hs >= delta / 2 - 1e-12) & (hs <= delta + 1e-12)
    if sel.sum() < 2:
        return None
    return float(np.polyfit(hs[sel], Ls[sel], 1)[0] / (2 * math.pi))


def classify_energy(frequency, v, E, config=None):
    """Gap / subcritical / critical / supercritical / unresolved at one energy."""
    cfg = config or SchrodingerConfig()
    _check_potential(v)
    E = float(E)
    c = schrodinger_cocycle(frequency, E, v)
    vmax = float(np.abs(v.sample(max(1024, 4 * v.K + 4))).max())
    outside = abs(E) > 2 + vmax + 1e-12
    cert = uh_certificate(c, 0.0, grid=cfg.grid, n_max=cfg.uh_n_max)
    rho, rerr = rotation_number(frequency, v, E, cfg.rotation_N, cfg.phases)
    if outside or cert.verdict:
        from .lyapunov import le_estimate
        L0 = le_estimate(c, 0.0, cfg.le_tol, cfg.N_max, cfg.grid).L
        return EnergyRecord(E, True, L0, "gap", rho=rho, ids=1 - 2 * rho, err=rerr,
                            status="norm bound" if outside and not cert.verdict else "ok")
    prof = strip_profile(c, cfg.profile_heights(), cfg.le_tol, cfg.N_max, cfg.grid)
    L0 = prof.exponents[prof.heights.index(0.0)]
    accel = _acceleration(prof, cfg.delta)
    quant = None if accel is None else abs(accel - round(accel)) <= cfg.quant_tol
    if L0 > cfg.tol_L:
        cls = "supercritical"
    else:
        verdict = regularity_test(prof, cfg.delta, cfg.tol_L)
        cls = {"regular": "subcritical", "non_regular": "critical"}.get(verdict, "unresolved")
    err = max(prof.errors[prof.heights.index(0.0)], rerr)
    return EnergyRecord(E, False, L0, cls, accel, quant, rho, 1 - 2 * rho, err, prof)


@dataclass
class DichotomyReport:
    energies: list
    records: list
    summary: dict
    config: dict
    runtime: dict = field(default_factory=dict)

    def partition_ok(self):
        """Cells are disjoint and cover every non-gap record."""
        cells = self.summary["cells"]
        seen = set()
        for name in ("sigma_minus", "sigma_plus", "critical", "unresolved"):
            idx = set(cells[name])
            if idx & seen:
                return False
            seen |= idx
        nongap = {i for i, r in enumerate(self.records) if r.cls != "gap"}
        return seen == nongap

    def to_json(self):
        return {"config": self.config, "records": [r.to_dict() for r in self.records],
                "summary": self.summary}

    def rows(self):
        return [(r.E, r.cls, r.L0, r.accel, r.rho, r.ids, r.err) for r in self.records]


def _summarize(records):
    cells = {"sigma_minus": [], "sigma_plus": [], "critical": [], "unresolved": [], "gap": []}
    key = {"subcritical": "sigma_minus", "supercritical": "sigma_plus", "critical": "critical",
           "unresolved": "unresolved", "gap": "gap"}
    for i, r in enumerate(records):
        cells[key[r.cls]].append(i)
    runs = []
    for i, r in enumerate(records):
        if runs and runs[-1]["class"] == r.cls:
            runs[-1]["E_max"] = r.E
            runs[-1]["count"] += 1
        else:
            runs.append({"class": r.cls, "E_min": r.E, "E_max": r.E, "count": 1})
    counts = {k: len(v) for k, v in cells.items()}
    return {"cells": cells, "runs": runs, "counts": counts}


def dichotomy_report(frequency, v, energies, config=None, config_echo=None):
    """Classify every energy (sorted) and summarize the partition."""
    cfg = config or SchrodingerConfig()
    t0 = time.perf_counter()
    records = []
    for E in sorted(float(e) for e in energies):
        try:
            records.append(classify_energy(frequency, v, E, cfg))
        except AlmostRedError as exc:
            records.append(EnergyRecord(E, False, math.nan, "unresolved", status=f"error: {exc}"))
    echo = config_echo if config_echo is not None else {"classification": asdict(cfg)}
    rep = DichotomyReport([r.E for r in records], records, _summarize(records), echo)
    rep.runtime = {"seconds": time.perf_counter() - t0, "backend": kernels.BACKEND}
    return rep


def scan_minimal_energy(frequency, v, energies, N=512, grid=256):
    """Energy of the grid with the smallest finite-scale ``L_N`` (first one on ties)."""
    from .lyapunov import finite_le
    best = None
    for E in energies:
        L = finite_le(schrodinger_cocycle(frequency, float(E), v), N, 0.0, grid).value
        if best is None or L < best[1]:
            best = (float(E), L)
    if best is None:
        raise InvalidInput("empty energy grid")
    return best[0]

"""``almostred`` command line.

    almostred <command> CONFIG.json [--out DIR]

Each command writes ``<command>.json`` and ``<command>.csv`` into the output
directory and prints the JSON path.  Exit status: 0 success, 1 invalid
input, 2 domain verdict (JSON on stdout).
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__, kernels
from .arithmetic import beta_upper, select_scale
from .cocycle import schrodinger_cocycle
from .config import load_config
from .conjugacy import complex_conjugacy, real_conjugacy, symmetry_diagnostics
from .errors import DomainVerdict, NoConvergence, InsufficientDepth, InvalidInput, UnknownCommand
from .hyperbolicity import angle_profile, uh_certificate
from .lyapunov import le_estimate, strip_profile, acceleration
from .schrodinger import classify_energy, dichotomy_report, ids, rotation_number, scan_minimal_energy

COMMANDS = ("cf", "lyap", "accel", "uh", "conjugate", "real-conjugate", "ids", "classify", "report")


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


class Run:
    def __init__(self, command, cfg, outdir):
        self.command = command
        self.cfg = cfg
        self.outdir = outdir
        self.verdict = None       # DomainVerdict raised after the files are written
        self.meta = {"tool": "almostred", "version": __version__, "command": command,
                     "config_sha256": cfg.hash, "backend": kernels.BACKEND}

    def _path(self, ext):
        return os.path.join(self.outdir, f"{self.command}.{ext}")

    def emit(self, payload, header, rows):
        os.makedirs(self.outdir, exist_ok=True)
        doc = {"meta": self.meta, "config": self.cfg.raw, "result": payload}
        with open(self._path("json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_clean(doc), fh, indent=2, allow_nan=False)
            fh.write("\n")
        buf = io.StringIO()
        buf.write(f"# almostred {__version__} config_sha256={self.cfg.hash} command={self.command}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(x) for x in r])
        with open(self._path("csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        return self._path("json")


def _energy(cfg):
    if cfg.energy is None:
        raise InvalidInput("this command needs 'energy'")
    if isinstance(cfg.energy, dict):
        cfg.energy = scan_minimal_energy(cfg.frequency, cfg.potential, cfg.energy["scan_min"])
    return cfg.energy


def _energies(cfg):
    if cfg.energies is None:
        raise InvalidInput("this command needs 'energies'")
    return cfg.energies


def _cocycle(cfg):
    c = schrodinger_cocycle(cfg.frequency, _energy(cfg), cfg.potential)
    if cfg.theta is not None:
        c = c.perturbed(cfg.theta)
    return c


# ------------------------------------------------------------- commands

def cmd_cf(run):
    f = run.cfg.frequency
    opts = run.cfg.cf
    q = f.q
    out = {"alpha": f.alpha, "rational": f.rational, "depth": f.depth,
           "partial_quotients": list(f.partial_quotients[: int(opts["depth"])]),
           "convergents": [[str(p), str(qq)] for p, qq in f.convergents[: int(opts["depth"])]]}
    try:
        out["beta_upper"] = beta_upper(f, tuple(opts["window"]))
    except InsufficientDepth as exc:
        out["beta_upper"] = None
        out["beta_note"] = str(exc)
    qn, n = select_scale(f, int(opts["target"]))
    out["scale"] = {"target": int(opts["target"]), "q": qn, "index": n}
    rows = []
    for i in range(min(len(q), int(opts["depth"]))):
        ratio = math.log(q[i + 1]) / q[i] if i + 1 < len(q) else None
        rows.append((i, f.partial_quotients[i], f.convergents[i][0], q[i], ratio))
    return out, ("n", "a_n", "p_n", "q_n", "log_q_next_over_q"), rows


def cmd_lyap(run):
    cfg = run.cfg
    c = _cocycle(cfg)
    lines, rows = [], []
    for h in cfg.heights:
        e = le_estimate(c, h, cfg.tol, cfg.N_max, cfg.grid)
        lines.append({"t": h, "L": e.L, "gap": e.gap, "err": e.err, "converged": e.converged,
                      "sequence": [list(s) for s in e.sequence]})
        rows.extend((h, N, L) for N, L in e.sequence)
    out = {"E": _energy(cfg), "theta": cfg.theta, "lines": lines}
    return out, ("t", "N", "L_N"), rows


def cmd_accel(run):
    cfg = run.cfg
    c = _cocycle(cfg)
    p = strip_profile(c, cfg.heights, cfg.tol, cfg.N_max, cfg.grid)
    delta = max(cfg.heights)
    acc = acceleration(c, delta, cfg.tol, cfg.N_max, cfg.grid)
    q = cfg.classification.quant_tol
    out = {"E": _energy(cfg), "theta": cfg.theta, "heights": p.heights, "L": p.exponents,
           "err": p.errors, "slopes_over_2pi": p.slopes, "even_ok": p.even_ok,
           "convex_ok": p.convex_ok, "acceleration": acc,
           "quantized": abs(acc - round(acc)) <= q}
    return out, ("epsilon", "L", "err", "slope_over_2pi"), p.rows()


def cmd_uh(run):
    cfg = run.cfg
    c = _cocycle(cfg)
    cert = uh_certificate(c, cfg.t, grid=cfg.grid)
    out = {"E": _energy(cfg), "theta": cfg.theta, "t": cfg.t, "certificate": cert.to_dict()}
    rows = []
    if cert.verdict:
        prof = angle_profile(c, cfg.heights, cfg.grid)
        out["min_d"] = prof.min_d
        out["exponents"] = prof.exponents
        rows = prof.rows()
    return out, ("x", "t", "d", "rho"), rows


def _need(cfg, name):
    val = getattr(cfg, name)
    if val is None:
        raise InvalidInput(f"this command needs '{name}'")
    return val


def _residual_verdict(r, tol):
    if r.residual_ok:
        return None
    return NoConvergence("conjugacy residual above tolerance", residual=r.residual_R, tol=tol)


def cmd_conjugate(run):
    cfg = run.cfg
    c = schrodinger_cocycle(cfg.frequency, _energy(cfg), cfg.potential)
    r = complex_conjugacy(c, _need(cfg, "theta"), _need(cfg, "eps"), cfg.conjugacy)
    diag = symmetry_diagnostics(r, cfg.conjugacy.grid)
    run.verdict = _residual_verdict(r, cfg.conjugacy.tol_residual)
    out = {"E": _energy(cfg), "conjugacy": r.to_json(),
           "symmetry": {"N_theta": diag.N_theta, "identity_error": diag.identity_error,
                        "i_delta_imag": diag.i_delta_imag, "detUS_error": diag.detUS_error}}
    return out, ("x", "d_uu_prime", "abs_delta", "omega"), diag.rows()


def cmd_real_conjugate(run):
    cfg = run.cfg
    c = schrodinger_cocycle(cfg.frequency, _energy(cfg), cfg.potential)
    theta = _need(cfg, "theta")
    eps_p = _need(cfg, "eps_prime")
    eps = cfg.conjugacy.eps or cfg.eps or 4 * eps_p / 3
    cr = complex_conjugacy(c, theta, eps, cfg.conjugacy)
    r = real_conjugacy(c, theta, eps_p, cfg.conjugacy, complex_result=cr)
    diag = symmetry_diagnostics(cr, cfg.conjugacy.grid)
    out = {"E": _energy(cfg), "conjugacy": r.to_json(), "complex": cr.to_json()}
    run.verdict = _residual_verdict(r, cfg.conjugacy.real_tol_residual)
    return out, ("x", "d_uu_prime", "abs_delta", "omega"), diag.rows()


def cmd_ids(run):
    cfg = run.cfg
    E = np.array(_energies(cfg))
    method = cfg.ids["method"]
    size = cfg.ids.get("size")
    rho, err = rotation_number(cfg.frequency, cfg.potential, E, cfg.classification.rotation_N,
                               cfg.classification.phases)
    rho, err = np.atleast_1d(rho), np.atleast_1d(err)
    rot = 1 - 2 * rho if method in ("rotation", "both") else [None] * E.size
    eig = (np.atleast_1d(ids(cfg.frequency, cfg.potential, E, "eigencount", size))
           if method in ("eigencount", "both") else [None] * E.size)
    rows = list(zip(E, rho, err, rot, eig))
    out = {"method": method, "energies": E, "rho": rho, "err": err,
           "ids_rotation": list(rot), "ids_eigencount": list(eig)}
    return out, ("E", "rho", "err", "ids_rotation", "ids_eigencount"), rows


def cmd_classify(run):
    cfg = run.cfg
    rec = classify_energy(cfg.frequency, cfg.potential, _energy(cfg), cfg.classification)
    out = rec.to_dict()
    rows = rec.profile.rows() if rec.profile is not None else []
    return out, ("epsilon", "L", "err", "slope_over_2pi"), rows


def cmd_report(run):
    cfg = run.cfg
    rep = dichotomy_report(cfg.frequency, cfg.potential, _energies(cfg), cfg.classification,
                           config_echo=cfg.raw)
    out = rep.to_json()
    out.pop("config")
    out["partition_ok"] = rep.partition_ok()
    print(f"report: {len(rep.records)} energies in {rep.runtime['seconds']:.1f}s", file=sys.stderr)
    return out, ("E", "class", "L0", "accel", "rho", "ids", "err"), rep.rows()


_DISPATCH = {"cf": cmd_cf, "lyap": cmd_lyap, "accel": cmd_accel, "uh": cmd_uh,
             "conjugate": cmd_conjugate, "real-conjugate": cmd_real_conjugate,
             "ids": cmd_ids, "classify": cmd_classify, "report": cmd_report}


def run(command, config_path, outdir=None):
    """Run one command; returns the exit status."""
    try:
        if command not in _DISPATCH:
            raise UnknownCommand(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
        cfg = load_config(config_path)
        r = Run(command, cfg, outdir or cfg.output)
        payload, header, rows = _DISPATCH[command](r)
        print(r.emit(payload, header, rows))
        if r.verdict is not None:
            raise r.verdict
        return 0
    except DomainVerdict as exc:
        doc = {"verdict": type(exc).__name__, "command": command}
        doc.update(exc.to_dict())
        print(json.dumps(_clean(doc), sort_keys=True, allow_nan=False))
        return 2
    except InvalidInput as exc:
        print(f"almostred: error: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    ap = argparse.ArgumentParser(prog="almostred", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"almostred {__version__}")
    ap.add_argument("command", help=" | ".join(COMMANDS))
    ap.add_argument("config", help="JSON run configuration")
    ap.add_argument("--out", help="output directory (overrides config 'output')")
    args = ap.parse_args(argv)
    return run(args.command, args.config, args.out)


if __name__ == "__main__":
    sys.exit(main())

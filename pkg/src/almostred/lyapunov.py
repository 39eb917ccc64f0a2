"""Finite-scale Lyapunov exponents on horizontal lines and strip profiles.

All averages are equispaced-grid quadratures over ``x`` of
``ln ||A_N(x + i t)|| / N``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .cocycle import grid_fixed
from .errors import DomainError, InvalidInput, NotMultiple, OutsideStrip

DEFAULT_GRID = 1024
DEFAULT_N0 = 64


@dataclass
class LineExponent:
    N: int
    t: float
    value: float
    grid_size: int


@dataclass
class LEEstimate:
    """Doubling estimate of ``L`` on one line."""

    L: float
    gap: float
    err: float
    converged: bool
    t: float
    sequence: list      # [(N, L_N), ...] for N = N0 * 2**k
    grid_size: int

    def __iter__(self):
        return iter((self.L, self.gap))


@dataclass
class StripProfile:
    heights: list
    exponents: list
    errors: list
    slopes: list                  # finite differences / (2 pi) between consecutive heights
    converged: list
    evenness: list = field(default_factory=list)   # |L(eps) - L(-eps)| per height
    even_ok: bool = True
    convex_ok: bool = True
    kappa: float = None

    def rows(self):
        """CSV rows ``(epsilon, L, err, slope_over_2pi)``; slope is to the next height."""
        out = []
        for i, (h, L, e) in enumerate(zip(self.heights, self.exponents, self.errors)):
            s = self.slopes[i] if i < len(self.slopes) else float("nan")
            out.append((h, L, e, s))
        return out


def _check_height(c, t):
    if abs(t) > c.strip_radius + 1e-12:
        raise OutsideStrip(f"height {t} outside strip of radius {c.strip_radius}")


def line_log_norms(c, t, checkpoints, grid=DEFAULT_GRID):
    """``ln ||A_N(x_j + i t)||`` for each checkpoint ``N`` and grid point."""
    _check_height(c, t)
    x = grid_fixed(grid)
    return c.log_norms(x, np.full(grid, float(t)), checkpoints)


def finite_le(c, N, t=0.0, grid=DEFAULT_GRID):
    """``L_N`` on the line ``Im z = t``."""
    if N < 1:
        raise InvalidInput("N must be >= 1")
    ln = line_log_norms(c, t, [N], grid)[0]
    return LineExponent(N=N, t=t, value=float(ln.mean() / N), grid_size=grid)


def le_estimate(c, t=0.0, tol=1e-3, N_max=1 << 15, grid=DEFAULT_GRID, N0=DEFAULT_N0):
    """Double ``N`` until ``|L_{2N} - L_N| < tol`` or ``N_max`` is reached.

    The error bar is half the last doubling gap plus the change of the grid
    average under halving the grid.
    """
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    _check_height(c, t)
    N0 = max(1, min(N0, N_max))
    seq = []
    coarse = []
    top = N0
    while True:
        # passes up to 8x the previous top; the kernel restarts from step 0
        cks = []
        n = N0
        while n <= min(top * 8, N_max):
            cks.append(n)
            n *= 2
        ln = line_log_norms(c, t, cks, grid)
        seq = [(N, float(row.mean() / N)) for N, row in zip(cks, ln)]
        coarse = [float(row[::2].mean() / N) for N, row in zip(cks, ln)]
        for i in range(1, len(seq)):
            gap = abs(seq[i][1] - seq[i - 1][1])
            if gap < tol:
                err = 0.5 * gap + abs(seq[i][1] - coarse[i])
                return LEEstimate(seq[i][1], gap, err, True, t, seq[:i + 1], grid)
        if cks[-1] * 2 > N_max:
            break
        top = cks[-1]
    if len(seq) == 1:
        return LEEstimate(seq[0][1], math.inf, math.inf, False, t, seq, grid)
    gap = abs(seq[-1][1] - seq[-2][1])
    err = 0.5 * gap + abs(seq[-1][1] - coarse[-1])
    return LEEstimate(seq[-1][1], gap, err, False, t, seq, grid)


def strip_profile(c, heights, tol=1e-3, N_max=1 << 14, grid=DEFAULT_GRID, N0=DEFAULT_N0,
                  check_evenness=None):
    """``le_estimate`` at each height, finite-difference slopes over ``2 pi``,
    evenness and convexity checks."""
    heights = sorted(float(h) for h in heights)
    ests = [le_estimate(c, h, tol, N_max, grid, N0) for h in heights]
    L = [e.L for e in ests]
    err = [e.err for e in ests]
    slopes = [(L[i + 1] - L[i]) / (heights[i + 1] - heights[i]) / (2 * math.pi)
              for i in range(len(heights) - 1)]
    prof = StripProfile(heights=heights, exponents=L, errors=err, slopes=slopes,
                        converged=[e.converged for e in ests])
    if check_evenness is None:
        check_evenness = c.real_symmetric
    if check_evenness:
        for h, e in zip(heights, ests):
            if h == 0.0:
                prof.evenness.append(0.0)
                continue
            Nlast = e.sequence[-1][0]
            other = finite_le(c, Nlast, -h, grid).value
            prof.evenness.append(abs(other - e.L))
        prof.even_ok = all(d <= 2 * max(e, 1e-9) for d, e in zip(prof.evenness, err))
    prof.convex_ok = _convex(heights, L, err)
    return prof


def _convex(h, L, err):
    for i in range(1, len(h) - 1):
        w = (h[i] - h[i - 1]) / (h[i + 1] - h[i - 1])
        interp = (1 - w) * L[i - 1] + w * L[i + 1]
        if L[i] > interp + err[i - 1] + err[i] + err[i + 1] + 1e-9:
            return False
    return True


def acceleration(c, delta=0.05, tol=1e-3, N_max=1 << 14, grid=DEFAULT_GRID, points=5, lo=None):
    """Least-squares slope of ``L`` over heights in ``[delta/2, delta]``, divided by ``2 pi``.

    ``lo`` overrides the lower end of the window.
    """
    lo = delta / 2 if lo is None else lo
    hs = np.linspace(lo, delta, points)
    ests = [le_estimate(c, float(h), tol, N_max, grid) for h in hs]
    Ls = np.array([e.L for e in ests])
    slope = np.polyfit(hs, Ls, 1)[0]
    return float(slope / (2 * math.pi))


def regularity_test(p, delta=0.05, tol=1e-2, margin=0.1):
    """``"regular"`` / ``"non_regular"`` / ``"inconclusive"`` from a strip profile."""
    hs = p.heights
    if 0.0 not in hs or max(hs) < delta - 1e-12:
        raise InvalidInput("profile must cover [0, delta]")
    i0 = hs.index(0.0)
    L0 = p.exponents[i0]
    inside = [i for i, h in enumerate(hs) if 0 <= h <= delta + 1e-12]
    if max(abs(p.exponents[i] - L0) for i in inside) < tol:
        return "regular"
    for i in inside:
        if i + 1 in inside and i < len(p.slopes):
            rise = p.exponents[i + 1] - p.exponents[i]
            if p.slopes[i] > 0.5 + margin and rise > p.errors[i] + p.errors[i + 1]:
                return "non_regular"
    return "inconclusive"


def kappa_exponent(theta, L_theta):
    """``ln L_theta / ln theta``."""
    if not 0 < theta < 1:
        raise InvalidInput("theta must lie in (0, 1)")
    if not L_theta > 0:
        raise DomainError("kappa undefined for non-positive exponent", kappa=math.inf)
    return math.log(L_theta) / math.log(theta)


@dataclass
class BJDefect:
    defect: float
    L_N: float
    L_2N: float
    L_Nprime: float
    q: int
    kappa: float
    hypotheses: dict


def bj_defect(c, N, N_prime, q, kappa=None, t=0.0, grid=DEFAULT_GRID):
    """Telescoping defect ``|L_{N'} + L_N - 2 L_{2N}|`` with a hypothesis report.

    The constants of the underlying estimate are not evaluated; this is a diagnostic.
    """
    if N < 1 or N_prime % N:
        raise NotMultiple(f"N' = {N_prime} is not a multiple of N = {N}")
    ln = line_log_norms(c, t, sorted({N, 2 * N, N_prime}), grid)
    vals = dict(zip(sorted({N, 2 * N, N_prime}), (row.mean() for row in ln)))
    L_N = float(vals[N] / N)
    L_2N = float(vals[2 * N] / (2 * N))
    L_Np = float(vals[N_prime] / N_prime)
    if kappa is None:
        kappa = L_N / 200.0
    p = round(c.alpha * q)
    hyp = {
        "L_2N_gt_0.9_L_N": L_2N > 0.9 * L_N,
        "L_N_gt_100_kappa": L_N > 100 * kappa,
        "q_approximant": abs(c.alpha - p / q) < 1.0 / q ** 2,
    }
    return BJDefect(abs(L_Np + L_N - 2 * L_2N), L_N, L_2N, L_Np, q, kappa, hyp)


def norm_growth(c, t, ns, grid=DEFAULT_GRID):
    """Least-squares slope of ``ln sup_x ||A_n(x + i t)||`` against ``ln n``.

    Returns ``(slope, log_sups)``.
    """
    ns = sorted(int(n) for n in ns)
    ln = line_log_norms(c, t, ns, grid)
    sups = ln.max(axis=1)
    slope = np.polyfit(np.log(ns), sups, 1)[0]
    return float(slope), sups

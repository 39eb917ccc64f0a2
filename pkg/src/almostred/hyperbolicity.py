"""Invariant directions, uniform-hyperbolicity certificates and angle profiles.

Direction fields are arrays of unit homogeneous vectors ``(..., 2)`` on the
grid ``x_j + i t``.  The unstable direction at ``x`` is the top left singular
vector of ``A_n(x - n alpha)``; the stable one is the most contracted right
singular vector of ``A_n(x)``.

Derivative pairing: for columns ``(u, s)`` of a unit-determinant matrix, the
first-order change of ``L(A E_2^{lam w})`` is ``Re int Q_3 w`` and that of
``L(A E_3^{lam w})`` is ``Re int Q_2 w``.  ``derivative_check`` uses this
pairing with ``SIGMA = +1``; see the calibration test.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .analytic import FourierMap
from .arithmetic import select_scale
from .cocycle import (act_hom, disk_chart_hom, grid_fixed, hom_distance, shift_fixed)
from .errors import (CoincidentDirections, InvalidInput, NoConvergence, OutsideStrip)
from .lyapunov import finite_le

DEFAULT_GRID = 1024
SIGMA = 1
# which Q_j the derivative along E_j pairs with
Q_FOR_E = {2: 3, 3: 2}


@dataclass
class DirectionField:
    t: float
    x: np.ndarray            # real parts of the grid points
    u: np.ndarray            # (grid, 2) unit homogeneous vectors
    s: np.ndarray
    r_u: float
    r_s: float
    gap: float               # movement between the last two scales
    n: int                   # product length used
    converged: bool

    @property
    def d(self):
        return hom_distance(self.u, self.s)

    def chart(self, which="u"):
        v = self.u if which == "u" else self.s
        return v[:, 0] / v[:, 1]


@dataclass
class UHCertificate:
    verdict: bool
    margin: float
    r_u: float
    r_s: float
    smoothness: float = None
    disk_bound: float = None
    disk_ok: bool = None
    reason: str = ""
    field: DirectionField = None

    def to_dict(self):
        return {"verdict": self.verdict, "margin": self.margin, "r_u": self.r_u, "r_s": self.r_s,
                "smoothness": self.smoothness, "disk_bound": self.disk_bound,
                "disk_ok": self.disk_ok, "reason": self.reason}


def _svd_dirs(mats):
    """Top left singular vectors and bottom right singular vectors."""
    Uv, _, Vh = np.linalg.svd(mats)
    top_left = Uv[..., :, 0]
    bottom_right = np.conj(Vh[..., 1, :])
    return top_left, bottom_right


def _residuals(c, t, grid, u, s):
    """``max d(A(x) v(x), v(x + alpha))`` for both fields (second half = shifted grid)."""
    A = c.map.sample(grid, t)
    ru = hom_distance(act_hom(A, u[:grid]), u[grid:]).max()
    rs = hom_distance(act_hom(A, s[:grid]), s[grid:]).max()
    return float(ru), float(rs)


def _constant_field(c, t, grid):
    M = c.map.coefficient(0)
    ev, V = np.linalg.eig(M)
    mags = np.abs(ev)
    if abs(mags[0] - mags[1]) <= 1e-12 * max(mags.max(), 1.0):
        raise NoConvergence("constant map has eigenvalues of equal modulus", eigenvalues=[complex(e) for e in ev])
    i = int(np.argmax(mags))
    u = V[:, i] / np.linalg.norm(V[:, i])
    s = V[:, 1 - i] / np.linalg.norm(V[:, 1 - i])
    uu = np.broadcast_to(u, (2 * grid, 2)).copy()
    ss = np.broadcast_to(s, (2 * grid, 2)).copy()
    ru, rs = _residuals(c, t, grid, uu, ss)
    x = np.arange(grid) / grid
    return DirectionField(t, x, uu[:grid], ss[:grid], ru, rs, 0.0, 0, True)


def directions(c, t=0.0, tol=1e-10, grid=DEFAULT_GRID, n_max=1 << 16, min_rate=1e-4):
    """Unstable and stable direction fields on ``Im z = t``.

    Scales are ``q 2^k`` for an approximant ``q <= 200``, starting at 200.
    Converged once consecutive scales move every direction by less than
    ``tol`` and every product has ``sigma_1^2 > 1/tol``.  Gives up early
    once ``n >= 4096`` and the weakest growth rate is below ``min_rate``.
    """
    if abs(t) > c.strip_radius + 1e-12:
        raise OutsideStrip("line height outside the strip")
    if c.map.is_constant(0.0):
        return _constant_field(c, t, grid)
    a = c.frequency.fixed64
    x = grid_fixed(grid)
    pts = np.concatenate([x, shift_fixed(x, 1, a)])
    tt = np.full(pts.shape, float(t))
    q = select_scale(c.frequency, 200)[0]
    n = q
    while n < 200:
        n *= 2
    prev = None
    need = math.log(1.0 / tol)
    while n <= n_max:
        mats_u, logs_u = c.products(shift_fixed(pts, -n, a), tt, [n])
        mats_s, logs_s = c.products(pts, tt, [n])
        u, _ = _svd_dirs(mats_u[0])
        _, s = _svd_dirs(mats_s[0])
        sv_u = logs_u[0] + np.log(np.linalg.svd(mats_u[0], compute_uv=False)[:, 0])
        sv_s = logs_s[0] + np.log(np.linalg.svd(mats_s[0], compute_uv=False)[:, 0])
        growth = 2.0 * min(sv_u.min(), sv_s.min())
        if prev is not None:
            move = max(hom_distance(u, prev[0]).max(), hom_distance(s, prev[1]).max())
            if move < tol and growth > need:
                ru, rs = _residuals(c, t, grid, u, s)
                return DirectionField(t, np.arange(grid) / grid, u[:grid], s[:grid], ru, rs,
                                      float(move), n, True)
        prev = (u, s, growth)
        if n >= 4096 and growth < 2 * min_rate * n:
            break
        n *= 2
    raise NoConvergence("direction fields did not converge within the budget",
                        n_max=n_max, log_growth=float(prev[2]) if prev else None)


def smoothness(f):
    """Fourier decay ratio of the projectors onto ``u`` and ``s``.

    Invariant directions of a uniformly hyperbolic analytic cocycle are
    analytic, so the ratio is at rounding level; on the spectrum the
    singular-vector fields converge pointwise but stay rough.
    """
    out = 0.0
    for v in (f.u, f.s):
        P = v[:, :, None] * np.conj(v[:, None, :])
        out = max(out, FourierMap.fit(P).decay_ratio())
    return out


def uh_certificate(c, t=0.0, tol_angle=1e-8, tol_inv=1e-7, tol=1e-10, grid=DEFAULT_GRID,
                   n_max=1 << 16, tol_disk=1e-6, tol_smooth=1e-6):
    """Uniform-hyperbolicity verdict on one line.

    Requires converged fields, ``min d(u, s) > tol_angle``, invariance
    residuals below ``tol_inv`` and smooth fields (see :func:`smoothness`).

    For ``R_{-i theta} A`` with ``A`` real-symmetric, at ``t = 0`` the
    unstable field is also checked against ``|disk(u)| <= e^{-4 pi theta}``.
    """
    try:
        f = directions(c, t, tol, grid, n_max)
    except NoConvergence as exc:
        return UHCertificate(False, 0.0, math.inf, math.inf, reason=str(exc))
    margin = float(f.d.min())
    sm = smoothness(f)
    verdict = margin > tol_angle and f.r_u < tol_inv and f.r_s < tol_inv and sm < tol_smooth
    reason = ""
    if not verdict:
        reason = "rough direction fields" if sm >= tol_smooth else "angle or invariance tolerance not met"
    cert = UHCertificate(verdict, margin, f.r_u, f.r_s, sm, field=f, reason=reason)
    if t == 0.0 and c.theta is not None and c.base is not None and c.base.real_symmetric:
        cert.disk_bound = float(np.abs(disk_chart_hom(f.u)).max())
        cert.disk_ok = cert.disk_bound <= math.exp(-4 * math.pi * c.theta) + tol_disk
    return cert


def herman_field_le(c, theta, grid=DEFAULT_GRID, tol=1e-12, n_max=1 << 16):
    """``L(alpha, R_{-i theta} A)`` from the unstable field of the perturbed cocycle.

    ``2 pi theta + 1/2 int ln[(1 - |w|^2) / (1 - e^{8 pi theta} |w|^2)]`` with
    ``w`` the disk chart of ``u``.
    """
    if not c.real_symmetric:
        raise InvalidInput("herman_field_le needs a real-symmetric cocycle")
    if theta <= 0:
        raise InvalidInput("theta must be positive")
    f = directions(c.perturbed(theta), 0.0, tol, grid, n_max)
    w2 = np.abs(disk_chart_hom(f.u)) ** 2
    q = math.exp(8 * math.pi * theta)
    if np.any(q * w2 >= 1.0):
        raise NoConvergence("unstable direction leaves the disk of radius e^{-4 pi theta}",
                            max_disk=float(np.sqrt(w2.max())))
    return 2 * math.pi * theta + 0.5 * float(np.mean(np.log1p(-w2) - np.log1p(-q * w2)))


@dataclass
class AngleProfile:
    heights: list
    x: np.ndarray
    d: list                  # per height, grid values of d(u, s)
    min_d: list
    theta: float = None
    exponents: list = field(default_factory=list)   # log_theta(min d) when theta is known

    def rows(self):
        """CSV rows ``(x, t, d, rho)``."""
        out = []
        for h, dd in zip(self.heights, self.d):
            for xi, di in zip(self.x, dd):
                out.append((float(xi), h, float(di), float(-math.log(di))))
        return out


def angle_profile(c, heights, grid=DEFAULT_GRID, tol=1e-10, n_max=1 << 16):
    """``d(u, s)`` and ``rho = -ln d`` on each height."""
    heights = [float(h) for h in heights]
    ds = []
    x = None
    for h in heights:
        f = directions(c, h, tol, grid, n_max)
        x = f.x
        ds.append(f.d)
    prof = AngleProfile(heights, x, ds, [float(d.min()) for d in ds], c.theta)
    if c.theta is not None and 0 < c.theta < 1:
        prof.exponents = [math.log(m) / math.log(c.theta) for m in prof.min_d]
    return prof


def q_pair(mu, nu):
    """``(Q_2, Q_3, eta)`` for distinct projective points (ProjPoint or homogeneous arrays).

    With columns aligned to ``mu``, ``nu`` scaled to determinant one,
    ``Q_2 = -ab`` and ``Q_3 = cd``.
    """
    m = getattr(mu, "vec", mu)
    v = getattr(nu, "vec", nu)
    m = np.asarray(m, dtype=complex)
    v = np.asarray(v, dtype=complex)
    D = m[..., 0] * v[..., 1] - v[..., 0] * m[..., 1]
    scale = np.linalg.norm(m, axis=-1) * np.linalg.norm(v, axis=-1)
    if np.any(np.abs(D) <= 1e-15 * scale):
        raise CoincidentDirections("directions coincide")
    q2 = -m[..., 0] * v[..., 0] / D
    q3 = m[..., 1] * v[..., 1] / D
    eta = np.maximum(1.0, np.maximum(np.abs(q2), np.abs(q3)))
    if np.ndim(q2) == 0:
        return complex(q2), complex(q3), float(eta)
    return q2, q3, eta


@dataclass
class DerivativeCheck:
    fd: float
    formula: float
    gap: float
    j: int
    sigma: int


def _elementary(w, j, lam, t):
    """``E_j^{lam w}`` as a matrix map whose value at ``x + i t`` uses ``w(x)``."""
    wc = w.coeffs * np.exp(2 * np.pi * w.modes * t)
    K = w.K
    out = np.zeros((2 * K + 1, 2, 2), dtype=complex)
    out[K, 0, 0] = out[K, 1, 1] = 1.0
    if j == 2:
        out[:, 0, 1] += lam * wc
    else:
        out[:, 1, 0] += lam * wc
    return FourierMap(out)


def derivative_check(c, w, j, h=1e-4, t=0.0, N=1 << 13, grid=DEFAULT_GRID, sigma=SIGMA):
    """Central difference of ``lam -> L(A E_j^{lam w})`` against the ``Q`` quadrature."""
    from .cocycle import Cocycle

    if j not in (2, 3):
        raise InvalidInput("j must be 2 or 3")
    if w.shape != "scalar":
        raise InvalidInput("w must be scalar")

    def L(lam):
        m = (c.map @ _elementary(w, j, lam, t)).with_radius(c.strip_radius)
        return finite_le(Cocycle(c.frequency, m, check=False), N, t, grid).value

    fd = (L(h) - L(-h)) / (2 * h)
    f = directions(c, t, grid=grid)
    q2, q3, _ = q_pair(f.u, f.s)
    q = q3 if Q_FOR_E[j] == 3 else q2
    wx = w.sample(grid, 0.0)
    formula = float(np.real(np.mean(q * wx)))
    return DerivativeCheck(float(fd), formula, abs(fd - sigma * formula), j, sigma)

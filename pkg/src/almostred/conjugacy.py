"""Minimizers, holomorphic straightening and conjugacies to rotations.

Intermediate maps are handled as grid samples on ``x_j = j/n`` and fitted
back to trimmed Fourier series; band values come from the series.

Sign conventions: the cohomological equation is
``phi(x) = w(x + alpha) - w(x) + lam`` and both pipelines conjugate with
``R_{-w}`` on the left, so ``R_{-w(x+alpha)} R_{psi(x)} R_{w(x)} = R_lam``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .analytic import FourierMap
from .cocycle import ProjPoint, hom_distance
from .errors import (CoincidentDirections, DegenerateRadius, InvalidInput, NonConstantTwist,
                     NotNearRotation, SmallDivisor, WeakHyperbolicity, WeakSymmetricAngle,
                     WindingObstruction)
from .hyperbolicity import uh_certificate
from .linalg2 import U_CAYLEY, det2, inv2, opnorm2, rotation
from .lyapunov import le_estimate

_TWO64 = 1 << 64
_I_VEC = np.array([1j, 1.0])
_MI_VEC = np.array([-1j, 1.0])


# ---------------------------------------------------------------- minimizer

@dataclass
class MinimizerData:
    x: ProjPoint
    y: ProjPoint
    k: float
    eps: float
    B: np.ndarray

    def preimage_norms(self):
        Bi = inv2(self.B)
        return float(np.linalg.norm(Bi @ _I_VEC)), float(np.linalg.norm(Bi @ _MI_VEC))


def _minimizer_matrix(x, y):
    """Batched: ``U diag(g, 1/g) C^{-1}`` with ``C`` the det-one column matrix of ``(x, y)``."""
    D = x[..., 0] * y[..., 1] - y[..., 0] * x[..., 1]
    r = np.sqrt(D)
    C = np.empty(x.shape[:-1] + (2, 2), dtype=complex)
    C[..., :, 0] = x / r[..., None]
    C[..., :, 1] = y / r[..., None]
    g = np.sqrt(np.linalg.norm(C[..., :, 0], axis=-1) / np.linalg.norm(C[..., :, 1], axis=-1))
    Dg = np.zeros_like(C)
    Dg[..., 0, 0] = g
    Dg[..., 1, 1] = 1 / g
    return U_CAYLEY @ Dg @ inv2(C), hom_distance(x, y)


def k_from_distance(d):
    """``k = 1/eps`` where ``d = 2 eps / (1 + eps^2)``, ``eps <= 1``."""
    d = np.asarray(d, dtype=float)
    eps = d / (1 + np.sqrt(np.maximum(1 - d * d, 0.0)))
    return 1 / eps, eps


def minimizer(x, y):
    """The minimizing ``B`` with ``B x = i``, ``B y = -i``."""
    d = float(hom_distance(x.vec, y.vec))
    if d <= 1e-14:
        raise CoincidentDirections("minimizer needs distinct directions")
    B, _ = _minimizer_matrix(x.vec, y.vec)
    k, eps = k_from_distance(d)
    return MinimizerData(x, y, float(k), float(eps), B)


# ---------------------------------------------------------------- grid tools

def _fit(values, trim, radius=math.inf):
    return FourierMap.fit(values, radius).trim(trim)


def _chart_fit(vecs, trim):
    return _fit(vecs[:, 0] / vecs[:, 1], trim)


def _band(eps):
    return (-eps, 0.0, eps) if eps > 0 else (0.0,)


def _shift_sample(f, alpha, n, t):
    return f.shift(alpha).sample(n, t)


# ---------------------------------------------------------------- straighten

def straighten(u, s, delta, gauge=1.0, n=1024, tol_angle=1e-10, trim=1e-13):
    """Periodic unit-determinant ``B0`` with ``B0 u = i`` and ``B0 s = -i``.

    ``B0 = U [[1/(g D), -s/(g D)], [-g, g u]]`` with ``D = u - s`` and a
    constant gauge ``g`` balancing the rows (times ``gauge``).
    """
    for t in _band(delta):
        uu, ss = u.sample(n, t), s.sample(n, t)
        d = hom_distance(np.stack([uu, np.ones_like(uu)], -1), np.stack([ss, np.ones_like(ss)], -1))
        if d.min() < tol_angle:
            raise WeakHyperbolicity("u and s nearly coincide on the band", min_d=float(d.min()), t=t)
    uu, ss = u.sample(n), s.sample(n)
    D = uu - ss
    g2 = np.sqrt(1 + np.abs(ss) ** 2) / (np.abs(D) * np.sqrt(1 + np.abs(uu) ** 2))
    g = math.exp(0.5 * float(np.mean(np.log(g2)))) * gauge
    inner = np.empty((n, 2, 2), dtype=complex)
    inner[:, 0, 0] = 1 / (g * D)
    inner[:, 0, 1] = -ss / (g * D)
    inner[:, 1, 0] = -g
    inner[:, 1, 1] = g * uu
    return _fit(U_CAYLEY @ inner, trim, delta)


def boundary_ratio(B, n, t):
    """``||B^{-1}(-i,1)|| / ||B^{-1}(i,1)||`` on the line ``Im z = t``."""
    Bi = inv2(B.sample(n, t) if hasattr(B, "sample") else B)
    return np.linalg.norm(Bi @ _MI_VEC, axis=-1) / np.linalg.norm(Bi @ _I_VEC, axis=-1)


# ------------------------------------------------------------------- Hilbert

class TwistedMap:
    """``B(z) = R_{mu z} P(z)`` with ``P`` periodic."""

    def __init__(self, P, mu, nu=None, kappa=0.0):
        self.P = P
        self.mu = float(mu)
        self.nu = nu
        self.kappa = float(kappa)
        self.strip_radius = P.strip_radius

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return rotation(self.mu * z) @ self.P(z)

    def sample(self, n, t=0.0):
        z = np.arange(n) / n + 1j * t
        return rotation(self.mu * z) @ self.P.sample(n, t)


def solve_boundary(f_plus, f_minus, delta):
    """Holomorphic periodic ``nu`` (plus a linear ``-i kappa z`` term) with
    ``Re nu = f_plus`` on ``Im z = delta`` and ``f_minus`` on ``-delta``.

    Inputs are real scalar FourierMaps (boundary data as functions of ``x``).
    Returns ``(nu, kappa)``; ``Im nu_0 = 0``.
    """
    K = max(f_plus.K, f_minus.K)
    fp = f_plus._padded(K) if f_plus.K < K else f_plus.coeffs
    fm = f_minus._padded(K) if f_minus.K < K else f_minus.coeffs
    nu = np.zeros(2 * K + 1, dtype=complex)
    for k in range(1, K + 1):
        a = math.exp(-2 * math.pi * k * delta)
        b = 1.0 / a
        # a nu_k + b conj(nu_-k) = 2 F+_k ; b nu_k + a conj(nu_-k) = 2 F-_k
        M = np.array([[a, b], [b, a]])
        sol = np.linalg.solve(M, [2 * fp[K + k], 2 * fm[K + k]])
        nu[K + k] = sol[0]
        nu[K - k] = np.conj(sol[1])
    mp, mm = fp[K].real, fm[K].real
    nu[K] = 0.5 * (mp + mm)
    kappa = (mp - mm) / (2 * delta)
    return FourierMap(nu), kappa


def hilbert_minimize(B0, delta, n=1024, trim=1e-13):
    """Left-multiply by ``U D_{e^{nu/2}} U^{-1}`` so that both boundary lines are minimizing.

    The mode-0 mismatch between the lines becomes the twist ``R_{mu z}``,
    ``mu = -kappa / (4 pi)``.
    """
    data = []
    for t in (delta, -delta):
        r = boundary_ratio(B0, n, t)
        if not np.all(np.isfinite(r)) or r.min() <= 0:
            raise DegenerateRadius("boundary radius hits 0 or infinity", t=t)
        data.append(FourierMap.fit(-np.log(r)).trim(trim))
    nu, kappa = solve_boundary(data[0], data[1], delta)
    # U diag(e^{nu/2}, e^{-nu/2}) U^{-1} = R_{-i nu / (4 pi)}
    corr = rotation(-1j * nu.sample(n) / (4 * math.pi))
    P = _fit(corr @ B0.sample(n), trim, delta)
    return TwistedMap(P, -kappa / (4 * math.pi), nu, kappa)


def periodize(B1, n=1024, tol=1e-8, trim=1e-13):
    """Measure ``mu`` from ``B1(z+1) B1(z)^{-1} = R_mu`` and return ``(R_{-mu z} B1, mu)``."""
    if isinstance(B1, FourierMap):
        return B1, 0.0
    x = np.arange(n) / n
    M = B1(x + 1.0) @ inv2(B1(x))
    M0 = M.mean(axis=0)
    spread = float(np.abs(M - M0).max())
    off = abs(M0[0, 0] - M0[1, 1]) + abs(M0[0, 1] + M0[1, 0])
    if spread > tol or off > tol:
        raise NonConstantTwist("period mismatch is not a constant rotation", spread=spread, off=off)
    mu = math.atan2(M0[1, 0].real, M0[0, 0].real) / (2 * math.pi)
    vals = rotation(-mu * x) @ B1(x)
    return _fit(vals, trim, B1.strip_radius), mu


# --------------------------------------------------------- rotation extraction

@dataclass
class RotationData:
    k: int
    phi: FourierMap
    off_residual: float
    psi: np.ndarray          # unwrapped grid values of psi


def rotation_extract(Ap, n=1024, tol=1e-6, trim=1e-13):
    """Write ``A'(x) ~ R_{psi(x)}`` with ``psi = k x + phi``.

    ``Ap`` is a matrix FourierMap or an array of grid samples ``(n, 2, 2)``.
    """
    M = Ap.sample(n) if isinstance(Ap, FourierMap) else np.asarray(Ap, dtype=complex)
    n = M.shape[0]
    a, b, c, d = M[:, 0, 0], M[:, 0, 1], M[:, 1, 0], M[:, 1, 1]
    z = 0.5 * ((a + d) + 1j * (c - b))
    zp = 0.5 * ((a + d) - 1j * (c - b))
    psi = (np.log(z) - 0.5 * np.log(z * zp)) / (2j * np.pi)
    off = float(opnorm2(M - rotation(psi)).max())
    if not off <= tol:
        raise NotNearRotation("map is not close to the rotation family", off_residual=off)
    re = np.unwrap(2 * np.pi * psi.real) / (2 * np.pi)
    last = re[-1] - re[0]
    close = (re[0] - re[-1] + 0.5) % 1.0 - 0.5      # wrapped step from the last point back
    k = int(round(last + close))
    x = np.arange(n) / n
    vals = re - k * x + 1j * psi.imag
    return RotationData(k, _fit(vals, trim), off, re + 1j * psi.imag)


# ------------------------------------------------------------ cohomological

@dataclass
class CohomSolution:
    w: FourierMap
    lam: complex
    K: int
    rejected: list                 # (k, |divisor|, |phi_k|)
    residual: float
    residual_bound: float
    tail: float
    partial: bool


def divisors(frequency, ks):
    """``e^{2 pi i k alpha} - 1`` with ``k alpha mod 1`` in exact fixed point."""
    a = int(frequency.fixed64)
    ph = np.array([((int(k) * a) % _TWO64) / float(_TWO64) for k in ks])
    return np.exp(2j * np.pi * ph) - 1


def cohom_solve(phi, frequency, K=None, delta_min=1e-8, tail_tol=1e-10, tol=1e-10, n=None):
    """Solve ``phi = w(. + alpha) - w + lam`` mode by mode."""
    if phi.shape != "scalar":
        raise InvalidInput("phi must be scalar")
    K = phi.K if K is None else min(int(K), phi.K)
    head, tail = phi.truncate(K)
    ks = np.arange(-K, K + 1)
    div = divisors(frequency, ks)
    w = np.zeros(2 * K + 1, dtype=complex)
    rejected = []
    for i, k in enumerate(ks):
        if k == 0:
            continue
        ck = head.coeffs[i]
        if abs(div[i]) < delta_min:
            if ck != 0:
                rejected.append((int(k), float(abs(div[i])), float(abs(ck))))
            continue
        w[i] = ck / div[i]
    fatal = [r for r in rejected if r[2] > tail_tol]
    if fatal:
        raise SmallDivisor("small divisor at a non-negligible mode",
                           modes=[{"k": k, "divisor": dv, "coefficient": c} for k, dv, c in fatal])
    lam = complex(head.coeffs[K])
    wmap = FourierMap(w, phi.strip_radius)
    # residual on the grid: phi - (w(x+alpha) - w(x) + lam)
    n = n or max(1024, 1 << int(4 * phi.K + 1).bit_length())
    fulldiv = divisors(frequency, phi.modes)
    wfull = wmap._padded(phi.K) if phi.K > K else wmap.coeffs
    res = phi.coeffs - wfull * fulldiv
    res[phi.K] -= lam
    residual = float(np.abs(FourierMap(res).sample(n)).max())
    bound = tail + sum(r[2] for r in rejected)
    return CohomSolution(wmap, lam, K, rejected, residual, bound, tail, residual > max(tol, bound + tol))


# ------------------------------------------------------------- pipelines

@dataclass
class ConjugacyConfig:
    grid: int = 1024
    dir_tol: float = 1e-12
    trim: float = 1e-13
    delta_min: float = 1e-8
    K: int = None
    tol_residual: float = 1e-3
    real_tol_residual: float = 1e-2
    rot_tol: float = 1e-6
    real_rot_tol: float = 0.5
    tol_angle: float = 1e-8
    gauge: float = 1.0
    eps: float = None             # complex band used by real_conjugacy; default 4/3 eps'
    le_tol: float = 1e-6
    le_N_max: int = 1 << 17


@dataclass
class ConjugacyResult:
    B: FourierMap
    lam: complex
    k: int
    residual_R: float
    norm_budget: float
    theta: float
    eps: float
    L_theta: float = None
    kappa: float = None
    kappa0: float = None
    log_theta_norm: float = None
    det_error: float = None
    detUS_error: float = None
    lam_consistent: bool = None
    tilde_distance: float = None
    tilde_exponent: float = None
    real: bool = False
    branch: str = None
    real_axis_imag: float = None
    mu: float = 0.0
    cohom: CohomSolution = None
    u_map: FourierMap = None
    s_map: FourierMap = None
    source: object = None
    diagnostics: dict = field(default_factory=dict)
    residual_ok: bool = None      # residual_R below the configured tolerance

    def to_json(self):
        out = {
            "lambda": [self.lam.real, self.lam.imag], "winding": self.k,
            "residual_R": self.residual_R, "norm_budget": self.norm_budget,
            "theta": self.theta, "eps": self.eps, "L_theta": self.L_theta,
            "kappa": self.kappa, "kappa0": self.kappa0, "log_theta_norm": self.log_theta_norm,
            "det_error": self.det_error, "detUS_error": self.detUS_error,
            "lambda_consistent": self.lam_consistent, "tilde_distance": self.tilde_distance,
            "tilde_exponent": self.tilde_exponent, "real": self.real, "branch": self.branch,
            "real_axis_imag": self.real_axis_imag, "twist_mu": self.mu,
            "residual_ok": self.residual_ok,
            "rejected_modes": self.cohom.rejected if self.cohom else [],
            "diagnostics": self.diagnostics, "B": self.B.to_json(),
        }
        return out


def _conj_residual(B, M, alpha, lam, eps, n):
    """``sup ||B(x+alpha) M(x) B(x)^{-1} - R_lam||`` over the band lines."""
    R = rotation(lam)
    worst = 0.0
    for t in _band(eps):
        At = _shift_sample(B, alpha, n, t) @ M.sample(n, t) @ inv2(B.sample(n, t))
        worst = max(worst, float(opnorm2(At - R).max()))
    return worst


def _det_error(B, eps, n):
    return max(float(np.abs(det2(B.sample(n, t)) - 1).max()) for t in _band(eps))


def _preimages(B, n, t):
    Bi = inv2(B.sample(n, t))
    return Bi @ _I_VEC, Bi @ _MI_VEC


def _finish_rotation(Bp, M, c, cfg, rot_tol, n):
    """Rotation extraction and cohomological step; returns ``(B, lam, k, cohom, rot)``."""
    alpha = c.alpha
    Ap = _shift_sample(Bp, alpha, n, 0.0) @ M.sample(n) @ inv2(Bp.sample(n))
    rot = rotation_extract(Ap, n, rot_tol, cfg.trim)
    if rot.k != 0:
        raise WindingObstruction("nonzero winding of the rotation part", k=rot.k)
    sol = cohom_solve(rot.phi, c.frequency, cfg.K, cfg.delta_min, tail_tol=math.inf)
    B = _fit(rotation(-sol.w.sample(n)) @ Bp.sample(n), cfg.trim, Bp.strip_radius)
    return B, sol.lam, rot.k, sol, rot


def complex_conjugacy(c, theta, eps, config=None):
    """Conjugate ``R_{-i theta} A`` to a constant rotation ``R_lam`` on ``|Im z| <= eps``."""
    cfg = config or ConjugacyConfig()
    n = cfg.grid
    if not c.real_symmetric:
        raise InvalidInput("complex_conjugacy needs a real-symmetric cocycle")
    if c.frequency.rational:
        raise InvalidInput("the frequency must be irrational")
    if not theta > 0 or not eps > 0:
        raise InvalidInput("theta and eps must be positive")
    cp = c.perturbed(theta)
    cert = uh_certificate(cp, 0.0, cfg.tol_angle, tol=cfg.dir_tol, grid=n)
    if not cert.verdict:
        raise WeakHyperbolicity("perturbed cocycle is not certified uniformly hyperbolic",
                                reason=cert.reason, margin=cert.margin)
    f = cert.field
    u_raw = FourierMap.fit(f.u[:, 0] / f.u[:, 1])
    s_raw = FourierMap.fit(f.s[:, 0] / f.s[:, 1])
    u_map, s_map = u_raw.trim(cfg.trim), s_raw.trim(cfg.trim)
    B0 = straighten(u_map, s_map, eps, cfg.gauge, n, cfg.tol_angle, cfg.trim)
    B1 = hilbert_minimize(B0, eps, n, cfg.trim)
    ratios = [boundary_ratio(B1, n, t) for t in (eps, -eps)]
    Bp, mu = periodize(B1, n, trim=cfg.trim)
    B, lam, k, sol, rot = _finish_rotation(Bp, cp.map, c, cfg, cfg.rot_tol, n)

    res = _conj_residual(B, cp.map, c.alpha, lam, eps, n)
    le = le_estimate(cp, 0.0, cfg.le_tol, cfg.le_N_max, n)
    L = le.L
    nb = B.strip_norm(eps, n) ** 2
    radius = c.strip_radius
    kappa0 = 0.5 if math.isinf(radius) else min(0.5, 1 - eps / radius)
    try:
        kappa = math.log(L) / math.log(theta) if L > 0 and theta < 1 else None
    except ValueError:
        kappa = None
    tilde = _conj_residual(B, c.map, c.alpha, complex(lam.real), eps, n)
    U, S = _preimages(B, n, 0.0)
    detUS = float(np.abs(U[:, 0] * S[:, 1] - U[:, 1] * S[:, 0] - 2j).max())
    out = ConjugacyResult(
        B=B, lam=lam, k=k, residual_R=res, norm_budget=nb, theta=theta, eps=eps,
        L_theta=L, kappa=kappa, kappa0=kappa0,
        log_theta_norm=math.log(nb) / math.log(theta) if theta < 1 else None,
        det_error=_det_error(B, eps, n), detUS_error=detUS,
        lam_consistent=abs(lam.imag + L / (2 * math.pi)) <= 0.1 * L / (2 * math.pi),
        tilde_distance=tilde,
        tilde_exponent=math.log(tilde) / math.log(theta) if 0 < tilde and theta < 1 else None,
        mu=mu, cohom=sol, u_map=u_map, s_map=s_map, source=c, residual_ok=res < cfg.tol_residual)
    out.diagnostics = {
        "uh_margin": cert.margin, "disk_bound": cert.disk_bound,
        "u_decay": u_raw.decay_ratio(), "s_decay": s_raw.decay_ratio(),
        "u_modes": u_map.K, "s_modes": s_map.K, "B_modes": B.K,
        "boundary_ratio_dev": float(max(np.abs(r - 1).max() for r in ratios)),
        "rotation_off_residual": rot.off_residual, "cohom_residual": sol.residual,
        "U_norm0": float(np.linalg.norm(U, axis=-1).max()),
        "S_norm0": float(np.linalg.norm(S, axis=-1).max()),
        "L_theta_err": le.err, "grid": n,
    }
    return out


# ------------------------------------------------------------- symmetry

@dataclass
class SymmetryDiagnostics:
    U: tuple                  # scalar maps (U1, U2)
    S: tuple
    Up: tuple
    Sp: tuple
    Delta: FourierMap
    x: np.ndarray
    omega: dict               # t -> grid values
    d_uu: dict                # t -> grid values of d(u, u')
    d_ss: dict
    abs_delta: dict
    N_theta: int
    identity_error: float     # max | |Delta|/omega - d(u,u') |
    i_delta_imag: float       # max |Im(i Delta)| on the real axis
    detUS_error: float

    def rows(self):
        """CSV rows ``(x, d_uu', |Delta|, omega)`` on the real axis."""
        return [(float(x), float(d), float(a), float(w))
                for x, d, a, w in zip(self.x, self.d_uu[0.0], self.abs_delta[0.0], self.omega[0.0])]


def _preimage_maps(B):
    a, b, c, d = B.entry(0, 0), B.entry(0, 1), B.entry(1, 0), B.entry(1, 1)
    U = (d * 1j - b, a - c * 1j)
    S = (d * (-1j) - b, a + c * 1j)
    return U, S


def symmetry_diagnostics(r, n=None):
    """``U' = reflect(U)``, ``Delta = det(U, U')``, ``omega``, ``d(u,u')`` and ``N_theta``."""
    n = n or r.diagnostics.get("grid", 1024)
    U, S = _preimage_maps(r.B)
    Up = (U[0].reflect(), U[1].reflect())
    Sp = (S[0].reflect(), S[1].reflect())
    Delta = U[0] * Up[1] - U[1] * Up[0]
    omega, duu, dss, ad = {}, {}, {}, {}
    ident = 0.0
    for t in _band(r.eps):
        Uv = np.stack([m.sample(n, t) for m in U], -1)
        Upv = np.stack([m.sample(n, t) for m in Up], -1)
        Sv = np.stack([m.sample(n, t) for m in S], -1)
        Spv = np.stack([m.sample(n, t) for m in Sp], -1)
        omega[t] = np.linalg.norm(Uv, axis=-1) * np.linalg.norm(Upv, axis=-1)
        duu[t] = hom_distance(Uv, Upv)
        dss[t] = hom_distance(Sv, Spv)
        ad[t] = np.abs(Delta.sample(n, t))
        ident = max(ident, float(np.abs(ad[t] / omega[t] - duu[t]).max()))
    N = 0
    while Delta.tail_bound(N) >= r.theta ** 2 and N < Delta.K:
        N += 1
    iD = 1j * Delta.sample(n)
    Uv = np.stack([m.sample(n) for m in U], -1)
    Sv = np.stack([m.sample(n) for m in S], -1)
    detUS = float(np.abs(Uv[:, 0] * Sv[:, 1] - Uv[:, 1] * Sv[:, 0] - 2j).max())
    return SymmetryDiagnostics(U, S, Up, Sp, Delta, np.arange(n) / n, omega, duu, dss, ad, N,
                               ident, float(np.abs(iD.imag).max()), detUS)


def real_straighten(v, delta, n=1024, trim=1e-13):
    """Real-symmetric ``T = b^{-1/2} [[1, -a], [0, b]]`` with ``T v = i``, ``T v' = -i``.

    ``a = (v + v')/2``, ``b = (v - v')/(2i)``; ``Im v > 0`` on the axis.
    """
    vp = v.reflect()
    a = (v + vp) * 0.5
    b = (v - vp) * (-0.5j)
    av, bv = a.sample(n), b.sample(n)
    if np.any(bv.real <= 0):
        raise WeakSymmetricAngle("direction touches the real axis")
    r = np.sqrt(bv)
    T = np.empty((n, 2, 2), dtype=complex)
    T[:, 0, 0] = 1 / r
    T[:, 0, 1] = -av / r
    T[:, 1, 0] = 0.0
    T[:, 1, 1] = bv / r
    return _fit(T, trim, delta)


def real_conjugacy(c, theta, eps_prime, config=None, complex_result=None):
    """Real-symmetric ``B_r`` with ``B_r(x+alpha) A(x) B_r(x)^{-1}`` close to ``R_lam``, ``lam`` real."""
    cfg = config or ConjugacyConfig()
    n = cfg.grid
    eps = cfg.eps or 4.0 * eps_prime / 3.0
    r = complex_result or complex_conjugacy(c, theta, eps, cfg)
    diag = symmetry_diagnostics(r, n)
    U0 = float(np.max(np.abs(diag.U[0].sample(n)) ** 2 + np.abs(diag.U[1].sample(n)) ** 2))
    order = ["u", "s"] if U0 >= 2 else ["s", "u"]
    maps = {"u": _chart_from(diag.U, n, cfg.trim), "s": _chart_from(diag.S, n, cfg.trim)}
    dmin = {"u": min(float(v.min()) for v in diag.d_uu.values()),
            "s": min(float(v.min()) for v in diag.d_ss.values())}
    if max(dmin.values()) < cfg.tol_angle:
        raise WeakSymmetricAngle("both symmetric pairs nearly coincide", d_uu=dmin["u"], d_ss=dmin["s"])
    branch = order[0] if dmin[order[0]] >= cfg.tol_angle else order[1]
    v = maps[branch]
    if np.mean(v.sample(n).imag) < 0:
        v = v.reflect()
    T = real_straighten(v, eps_prime, n, cfg.trim)
    B1 = hilbert_minimize(T, eps_prime, n, cfg.trim)
    Bp, mu = periodize(B1, n, trim=cfg.trim)
    B, lam, k, sol, rot = _finish_rotation(Bp, c.map, c, cfg, cfg.real_rot_tol, n)
    lam_r = float(lam.real)
    res = _conj_residual(B, c.map, c.alpha, lam_r, eps_prime, n)
    nb = B.strip_norm(eps_prime, n) ** 2
    out = ConjugacyResult(
        B=B, lam=complex(lam_r), k=k, residual_R=res, norm_budget=nb, theta=theta, eps=eps_prime,
        L_theta=r.L_theta, kappa=r.kappa,
        kappa0=0.5 * (1 - eps_prime / c.strip_radius) if not math.isinf(c.strip_radius) else 0.5,
        log_theta_norm=math.log(nb) / math.log(theta) if theta < 1 else None,
        det_error=_det_error(B, eps_prime, n), real=True, branch=branch,
        real_axis_imag=float(np.abs(B.sample(n).imag).max()), mu=mu, cohom=sol, source=c,
        residual_ok=res < cfg.real_tol_residual)
    out.tilde_distance = res
    out.tilde_exponent = math.log(res) / math.log(theta) if 0 < res and theta < 1 else None
    out.diagnostics = {
        "U_norm0_sq": U0, "lambda_imag_dropped": float(abs(lam.imag)),
        "rotation_off_residual": rot.off_residual, "min_d_uu": dmin["u"], "min_d_ss": dmin["s"],
        "N_theta": diag.N_theta, "complex_residual_R": r.residual_R, "grid": n,
    }
    return out


def _chart_from(V, n, trim):
    v1, v2 = V[0].sample(n), V[1].sample(n)
    return _fit(v1 / v2, trim)

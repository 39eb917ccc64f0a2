"""Cocycles ``(alpha, A)``, transfer products and projective geometry.

Projective points are homogeneous pairs; the chart value ``xi1/xi2`` on the
Riemann sphere is only used for input and output.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .analytic import FourierMap, trig_polynomial
from .arithmetic import Frequency
from .errors import InvalidInput, OutsideStrip, SingularMatrix
from .linalg2 import det2, log_opnorm2, rotation as _rotation

_TWO64 = 1 << 64
DET_TOL = 1e-10


# ---------------------------------------------------------------- fixed point

def to_fixed(x):
    """Real phase(s) mod 1 as uint64 fixed-point fractions of a turn."""
    x = np.asarray(x, dtype=np.float64)
    frac = np.mod(x, 1.0)
    hi = np.floor(frac * 2.0 ** 32)
    lo = np.round((frac * 2.0 ** 32 - hi) * 2.0 ** 32)
    out = (hi.astype(np.uint64) << np.uint64(32)) + lo.astype(np.uint64)
    return out


def grid_fixed(n):
    """The grid ``j/n`` (``n`` a power of two) in fixed point, exactly."""
    if n < 1 or n & (n - 1):
        raise InvalidInput("grid size must be a power of two")
    shift = 64 - (n.bit_length() - 1)
    j = np.arange(n, dtype=np.uint64)
    if shift == 64:
        return np.zeros(n, dtype=np.uint64)
    return j << np.uint64(shift)


def shift_fixed(x_fixed, k, alpha_fixed):
    """``x + k alpha`` in fixed point for a signed integer ``k``."""
    step = (int(k) * int(alpha_fixed)) % _TWO64
    with np.errstate(over="ignore"):
        return np.asarray(x_fixed, dtype=np.uint64) + np.uint64(step)


# ------------------------------------------------------------------- types

class ProjPoint:
    """A point of the complex projective line in homogeneous coordinates."""

    __slots__ = ("vec",)

    def __init__(self, xi1, xi2=1.0):
        v = np.array([xi1, xi2], dtype=complex)
        n = np.linalg.norm(v)
        if n == 0 or not np.isfinite(n):
            raise InvalidInput("homogeneous coordinates must be finite and not both zero")
        self.vec = v / n

    @classmethod
    def from_chart(cls, z):
        if z is None or (isinstance(z, float) and math.isinf(z)) or (np.isscalar(z) and np.isinf(abs(z))):
            return cls(1.0, 0.0)
        return cls(complex(z), 1.0)

    @property
    def chart(self):
        a, b = self.vec
        if abs(b) <= 1e-300:
            return complex("inf")
        return complex(a / b)

    def is_infinite(self, tol=0.0):
        return abs(self.vec[1]) <= tol

    def __repr__(self):
        return f"ProjPoint({self.chart})"


INF = ProjPoint(1.0, 0.0)


@dataclass
class ProductResult:
    """``A_n = matrix * exp(log_scale)``."""

    matrix: np.ndarray
    log_scale: float
    n: int

    @property
    def log_norm(self):
        return float(self.log_scale + log_opnorm2(self.matrix))

    @property
    def true_product(self):
        return self.matrix * math.exp(self.log_scale)


class Cocycle:
    """``(x, y) -> (x + alpha, A(x) y)`` with ``A`` a matrix FourierMap into SL(2, C)."""

    def __init__(self, frequency, map, check=True):
        if not isinstance(frequency, Frequency):
            raise InvalidInput("frequency must be a Frequency")
        if map.shape != "matrix2":
            raise InvalidInput("cocycle map must be 2x2 matrix valued")
        self.frequency = frequency
        self.map = map
        self.strip_radius = map.strip_radius
        self.real_symmetric = map.is_real_symmetric(1e-12)
        # set by perturbed(): the real-symmetric base and theta of R_{-i theta} A
        self.base = None
        self.theta = None
        if check:
            self._check_det()

    def _check_det(self):
        h = min(self.strip_radius, 0.25)
        n = max(64, 4 * self.map.K + 4)
        n = 1 << (n - 1).bit_length()
        for t in {0.0, h, -h}:
            err = np.abs(det2(self.map.sample(n, t)) - 1).max()
            if err > DET_TOL * max(1.0, float(np.abs(self.map.coeffs).sum()) ** 2):
                raise InvalidInput(f"map is not unimodular: |det - 1| = {err:.3g} at Im z = {t}")

    @property
    def alpha(self):
        return self.frequency.alpha

    def left(self, M):
        """The cocycle ``(alpha, M A)`` for a constant matrix ``M``."""
        return Cocycle(self.frequency, FourierMap(np.matmul(np.asarray(M, complex), self.map.coeffs),
                                                  self.strip_radius), check=False)

    def perturbed(self, theta):
        """``(alpha, R_{-i theta} A)``."""
        out = self.left(rotation(-1j * theta))
        out.base, out.theta = self, float(theta)
        return out

    def products(self, x_fixed, t, checkpoints):
        """Kernel call: renormalized ``A_n(x + i t)`` for every start and checkpoint."""
        t = np.broadcast_to(np.asarray(t, dtype=float), np.shape(x_fixed))
        if np.any(np.abs(t) > self.strip_radius + 1e-12):
            raise OutsideStrip("line height outside the strip")
        ck = np.asarray(sorted(int(n) for n in checkpoints), dtype=np.int64)
        return kernels.orbit_products(self.map.coeffs, self.frequency.fixed64,
                                      np.asarray(x_fixed, dtype=np.uint64), np.ascontiguousarray(t), ck)

    def log_norms(self, x_fixed, t, checkpoints):
        mats, logs = self.products(x_fixed, t, checkpoints)
        return logs + log_opnorm2(mats)

    def __repr__(self):
        return f"Cocycle(alpha={self.alpha:.12g}, K={self.map.K}, real_symmetric={self.real_symmetric})"


# -------------------------------------------------------------- operations

def rotation(theta):
    """``R_theta`` as a 2x2 complex array (``theta`` may be complex)."""
    return _rotation(complex(theta))


def schrodinger_map(E, v):
    """``z -> ((E - v(z), -1), (1, 0))`` for a real-symmetric scalar ``v``."""
    if v.shape != "scalar":
        raise InvalidInput("potential must be scalar")
    if not v.is_real_symmetric(1e-12):
        raise InvalidInput("potential must be real-symmetric")
    K = v.K
    c = np.zeros((2 * K + 1, 2, 2), dtype=complex)
    c[:, 0, 0] = -v.coeffs
    c[K, 0, 0] += E
    c[K, 0, 1] = -1.0
    c[K, 1, 0] = 1.0
    return FourierMap(c, v.strip_radius)


def schrodinger_cocycle(frequency, E, v):
    return Cocycle(frequency, schrodinger_map(E, v))


def amo_potential(coupling):
    """``v(x) = 2 coupling cos(2 pi x)``."""
    return trig_polynomial(cos=[1.0], scale=2.0 * coupling)


def constant_cocycle(frequency, M):
    return Cocycle(frequency, FourierMap.constant(np.asarray(M, dtype=complex)))


def product(c, n, z):
    """Renormalized ``A_n(z) = A(z + (n-1) alpha) ... A(z)``."""
    if n < 0:
        raise InvalidInput("n must be >= 0")
    z = complex(z)
    if abs(z.imag) > c.strip_radius + 1e-12:
        raise OutsideStrip("z outside the strip")
    mats, logs = c.products(to_fixed([z.real]), [z.imag], [n])
    return ProductResult(mats[0, 0], float(logs[0, 0]), n)


def act(M, p):
    """Projective action of a nonsingular 2x2 matrix on a ProjPoint."""
    M = np.asarray(M, dtype=complex)
    if abs(det2(M)) <= 1e-300:
        raise SingularMatrix("matrix is singular")
    return ProjPoint(*(M @ p.vec))


def act_hom(M, vecs):
    """Batched action on homogeneous arrays ``(..., 2)``; rows renormalized."""
    w = np.einsum("...ij,...j->...i", M, vecs)
    return w / np.linalg.norm(w, axis=-1, keepdims=True)


def hom_distance(u, s):
    """``|u1 s2 - u2 s1| / (|u| |s|)`` for homogeneous arrays ``(..., 2)``."""
    num = np.abs(u[..., 0] * s[..., 1] - u[..., 1] * s[..., 0])
    return num / (np.linalg.norm(u, axis=-1) * np.linalg.norm(s, axis=-1))


def sphere_distance(u, s):
    """Absolute sine of the angle between two projective points."""
    return float(hom_distance(u.vec, s.vec))


def chart_to_hom(z):
    """Chart values (``inf`` allowed) to unit homogeneous vectors."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (2,), dtype=complex)
    inf = ~np.isfinite(z)
    out[..., 0] = np.where(inf, 1.0, z)
    out[..., 1] = np.where(inf, 0.0, 1.0)
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def hom_to_chart(v):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(v[..., 1]) > 0, v[..., 0] / np.where(v[..., 1] == 0, 1, v[..., 1]),
                        complex("inf"))


def disk_chart(z):
    """``(z - i)/(z + i)``; ``inf -> 1``."""
    if isinstance(z, ProjPoint):
        a, b = z.vec
        return complex((a - 1j * b) / (a + 1j * b))
    z = complex(z)
    if not np.isfinite(abs(z)):
        return 1 + 0j
    if z == -1j:
        return complex("inf")
    return (z - 1j) / (z + 1j)


def disk_chart_hom(v):
    """Disk chart of homogeneous arrays ``(..., 2)``."""
    return (v[..., 0] - 1j * v[..., 1]) / (v[..., 0] + 1j * v[..., 1])

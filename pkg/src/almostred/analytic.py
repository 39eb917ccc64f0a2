"""1-periodic analytic maps stored as finite Fourier series.

A :class:`FourierMap` holds coefficients ``c_k`` for ``|k| <= K`` of either a
scalar function or a 2x2 matrix function
``f(z) = sum_k c_k exp(2 pi i k z)``, valid on the strip
``|Im z| <= strip_radius``.  Strip norms are grid maxima on the two boundary
lines; they are estimates, not certified bounds.
"""

import math

import numpy as np

from .errors import NonFinite, OutsideStrip, InvalidInput
from .linalg2 import opnorm2

DEFAULT_GRID = 1024
MODE_CAP = 256
_STRIP_SLACK = 1e-12


class FourierMap:
    def __init__(self, coeffs, strip_radius=math.inf):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim not in (1, 3) or c.shape[0] % 2 != 1:
            raise InvalidInput("coefficient array must have odd length 2K+1")
        if c.ndim == 3 and c.shape[1:] != (2, 2):
            raise InvalidInput("matrix coefficients must be 2x2")
        if not np.all(np.isfinite(c)):
            raise NonFinite("non-finite Fourier coefficients")
        self.coeffs = c
        self.strip_radius = float(strip_radius)

    # ------------------------------------------------------------ builders
    @classmethod
    def constant(cls, value, strip_radius=math.inf):
        v = np.asarray(value, dtype=complex)
        return cls(v[None, ...], strip_radius)

    @classmethod
    def from_modes(cls, modes, shape="scalar", strip_radius=math.inf):
        """Build from ``{k: value}``."""
        K = max((abs(int(k)) for k in modes), default=0)
        tail = () if shape == "scalar" else (2, 2)
        c = np.zeros((2 * K + 1,) + tail, dtype=complex)
        for k, v in modes.items():
            c[int(k) + K] += np.asarray(v, dtype=complex)
        return cls(c, strip_radius)

    @classmethod
    def from_entries(cls, a, b, c, d):
        """Matrix map from four scalar maps (row-major)."""
        K = max(m.K for m in (a, b, c, d))
        out = np.zeros((2 * K + 1, 2, 2), dtype=complex)
        for (i, j), m in zip(((0, 0), (0, 1), (1, 0), (1, 1)), (a, b, c, d)):
            out[K - m.K:K + m.K + 1, i, j] = m.coeffs
        radius = min(m.strip_radius for m in (a, b, c, d))
        return cls(out, radius)

    @classmethod
    def fit(cls, samples, strip_radius=math.inf):
        """Trigonometric interpolant through samples on ``x_j = j/n``.

        ``n`` must be a power of two.  The Nyquist coefficient is split
        evenly between modes ``+-n/2`` so real data stays real-symmetric.
        """
        s = np.asarray(samples, dtype=complex)
        n = s.shape[0]
        if n < 1 or n & (n - 1):
            raise InvalidInput("grid size must be a power of two")
        if not np.all(np.isfinite(s)):
            raise NonFinite("non-finite samples")
        spec = np.fft.fft(s, axis=0) / n
        if n == 1:
            return cls(spec, strip_radius)
        K = n // 2
        c = np.zeros((2 * K + 1,) + s.shape[1:], dtype=complex)
        c[K:2 * K] = spec[:K]          # modes 0 .. K-1
        c[1:K] = spec[K + 1:]          # modes -K+1 .. -1
        c[0] = c[2 * K] = 0.5 * spec[K]
        return cls(c, strip_radius)

    @classmethod
    def fit_function(cls, func, n=DEFAULT_GRID, strip_radius=math.inf, trim=1e-15):
        """Sample ``func`` on the real grid of size ``n`` and fit."""
        x = np.arange(n) / n
        f = cls.fit(func(x.astype(complex)), strip_radius)
        return f.trim(trim) if trim else f

    # ---------------------------------------------------------- properties
    @property
    def K(self):
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def shape(self):
        return "scalar" if self.coeffs.ndim == 1 else "matrix2"

    @property
    def modes(self):
        return np.arange(-self.K, self.K + 1)

    def coefficient(self, k):
        if abs(k) > self.K:
            return np.zeros(self.coeffs.shape[1:], dtype=complex) if self.coeffs.ndim > 1 else 0j
        return self.coeffs[k + self.K]

    def entry(self, i, j):
        if self.shape != "matrix2":
            raise InvalidInput("entry() needs a matrix map")
        return FourierMap(self.coeffs[:, i, j], self.strip_radius)

    def is_constant(self, tol=0.0):
        mags = np.abs(self.coeffs).reshape(self.coeffs.shape[0], -1).max(axis=1)
        mags[self.K] = 0.0
        return bool(np.all(mags <= tol))

    def is_real_symmetric(self, tol=1e-12):
        scale = max(1.0, float(np.abs(self.coeffs).max(initial=0.0)))
        return bool(np.abs(self.coeffs - np.conj(self.coeffs[::-1])).max(initial=0.0) <= tol * scale)

    # ---------------------------------------------------------- evaluation
    def _check_strip(self, z):
        im = np.abs(np.imag(z))
        if np.any(im > self.strip_radius + _STRIP_SLACK):
            raise OutsideStrip(
                f"|Im z| = {float(np.max(im)):.6g} exceeds strip radius {self.strip_radius:.6g}")

    def __call__(self, z):
        return self.eval_strip(z)

    def eval_strip(self, z):
        """Evaluate at complex point(s) ``z``."""
        z = np.asarray(z, dtype=complex)
        self._check_strip(z)
        flat = z.reshape(-1)
        ks = self.modes
        out = np.empty((flat.size,) + self.coeffs.shape[1:], dtype=complex)
        step = max(1, 2 ** 20 // ks.size)
        for i in range(0, flat.size, step):
            e = np.exp(2j * np.pi * np.outer(flat[i:i + step], ks))
            out[i:i + step] = np.tensordot(e, self.coeffs, axes=(1, 0))
        return out.reshape(z.shape + self.coeffs.shape[1:])

    def sample(self, n, t=0.0):
        """Values on the grid ``x_j + i t``, ``x_j = j/n``, via inverse FFT.

        Folding modes modulo ``n`` is exact at grid points.
        """
        if abs(t) > self.strip_radius + _STRIP_SLACK:
            raise OutsideStrip(f"|t| = {abs(t):.6g} exceeds strip radius {self.strip_radius:.6g}")
        ks = self.modes
        weights = np.exp(-2 * np.pi * ks * t)
        folded = np.zeros((n,) + self.coeffs.shape[1:], dtype=complex)
        np.add.at(folded, ks % n, self.coeffs * weights.reshape((-1,) + (1,) * (self.coeffs.ndim - 1)))
        return np.fft.ifft(folded, axis=0) * n

    def strip_norm(self, eps, n=None):
        """Grid maximum of ``|f|`` (or operator norm) on ``Im z = +-eps``."""
        if eps > self.strip_radius + _STRIP_SLACK:
            raise OutsideStrip(f"eps = {eps:.6g} exceeds strip radius {self.strip_radius:.6g}")
        n = n or max(DEFAULT_GRID, _pow2_at_least(4 * self.K + 1))
        best = 0.0
        for t in {eps, -eps}:
            vals = self.sample(n, t)
            mags = np.abs(vals) if self.shape == "scalar" else opnorm2(vals)
            best = max(best, float(mags.max()))
        return best

    # ------------------------------------------------------------ algebra
    def _like(self, coeffs, strip_radius=None):
        return FourierMap(coeffs, self.strip_radius if strip_radius is None else strip_radius)

    def _padded(self, K):
        if K == self.K:
            return self.coeffs
        out = np.zeros((2 * K + 1,) + self.coeffs.shape[1:], dtype=complex)
        out[K - self.K:K + self.K + 1] = self.coeffs
        return out

    def __add__(self, other):
        if not isinstance(other, FourierMap):
            other = FourierMap.constant(other)
        K = max(self.K, other.K)
        return FourierMap(self._padded(K) + other._padded(K), min(self.strip_radius, other.strip_radius))

    def __neg__(self):
        return self._like(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FourierMap):
            if self.shape != "scalar" and other.shape != "scalar":
                raise InvalidInput("use @ for matrix-matrix products")
            if self.shape == "scalar" and other.shape == "scalar":
                c = np.convolve(self.coeffs, other.coeffs)
            else:
                s, m = (self, other) if self.shape == "scalar" else (other, self)
                c = np.stack([np.stack([np.convolve(s.coeffs, m.coeffs[:, i, j]) for j in range(2)], -1)
                              for i in range(2)], -2)
            return FourierMap(c, min(self.strip_radius, other.strip_radius))
        return self._like(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, FourierMap):
            other = np.asarray(other, dtype=complex)
            return self._like(self.coeffs @ other)
        K = self.K + other.K
        out = np.zeros((2 * K + 1, 2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                for m in range(2):
                    out[:, i, j] += np.convolve(self.coeffs[:, i, m], other.coeffs[:, m, j])
        return FourierMap(out, min(self.strip_radius, other.strip_radius))

    def __rmatmul__(self, other):
        other = np.asarray(other, dtype=complex)
        return self._like(np.matmul(other, self.coeffs))

    def shift(self, a):
        """The map ``z -> f(z + a)`` for real ``a``."""
        ph = np.exp(2j * np.pi * self.modes * a)
        return self._like(self.coeffs * ph.reshape((-1,) + (1,) * (self.coeffs.ndim - 1)))

    def reflect(self):
        """``f*(z) = conj(f(conj z))``: coefficient ``c_k -> conj(c_{-k})``."""
        return self._like(np.conj(self.coeffs[::-1]))

    def real_symmetric_part(self):
        return self._like(0.5 * (self.coeffs + np.conj(self.coeffs[::-1])))

    def truncate(self, K):
        """Drop modes ``|k| > K``; also return ``sum_{|k|>K} |c_k|``."""
        if K < 0:
            raise InvalidInput("K must be >= 0")
        if K >= self.K:
            return self, 0.0
        mags = np.abs(self.coeffs).reshape(self.coeffs.shape[0], -1).max(axis=1)
        tail = float(mags[:self.K - K].sum() + mags[self.K + K + 1:].sum())
        return self._like(self.coeffs[self.K - K:self.K + K + 1].copy()), tail

    def tail_bound(self, K, t=0.0):
        """``sum_{|k|>K} |c_k| exp(2 pi |k| t)``: sup bound of the tail on ``|Im z| <= t``."""
        if K >= self.K:
            return 0.0
        mags = np.abs(self.coeffs).reshape(self.coeffs.shape[0], -1).max(axis=1)
        w = mags * np.exp(2 * np.pi * np.abs(self.modes) * t)
        keep = np.abs(self.modes) > K
        return float(w[keep].sum())

    def trim(self, rtol=1e-15):
        """Truncate at the last mode above ``rtol`` times the largest one."""
        mags = np.abs(self.coeffs).reshape(self.coeffs.shape[0], -1).max(axis=1)
        top = mags.max(initial=0.0)
        if top == 0.0:
            return self.truncate(0)[0]
        big = np.nonzero(mags > rtol * top)[0]
        K = int(np.max(np.abs(big - self.K)))
        return self.truncate(K)[0]

    def decay_ratio(self):
        """Largest coefficient in the upper half of the mode range over the largest overall."""
        mags = np.abs(self.coeffs).reshape(self.coeffs.shape[0], -1).max(axis=1)
        top = mags.max(initial=0.0)
        if top == 0.0 or self.K < 2:
            return 0.0
        outer = np.abs(self.modes) > self.K // 2
        return float(mags[outer].max() / top)

    def with_radius(self, strip_radius):
        return self._like(self.coeffs, strip_radius)

    # ------------------------------------------------------ serialization
    def to_json(self):
        def triples(c):
            return [[int(k), float(v.real), float(v.imag)] for k, v in zip(self.modes, c)]

        radius = None if math.isinf(self.strip_radius) else self.strip_radius
        if self.shape == "scalar":
            return {"shape": "scalar", "strip_radius": radius, "coefficients": triples(self.coeffs)}
        return {"shape": "matrix2", "strip_radius": radius,
                "entries": [triples(self.coeffs[:, i, j]) for i in range(2) for j in range(2)]}

    @classmethod
    def from_json(cls, data):
        radius = data.get("strip_radius")
        radius = math.inf if radius is None else float(radius)

        def parse(triples):
            return {int(k): complex(re, im) for k, re, im in triples}

        if data.get("shape", "scalar") == "scalar":
            return cls.from_modes(parse(data["coefficients"]), strip_radius=radius)
        maps = [cls.from_modes(parse(t), strip_radius=radius) for t in data["entries"]]
        return cls.from_entries(*maps)

    def __repr__(self):
        return f"FourierMap(shape={self.shape}, K={self.K}, strip_radius={self.strip_radius})"


def _pow2_at_least(n):
    return 1 << max(0, int(n - 1).bit_length())


def fit(samples, strip_radius=math.inf):
    return FourierMap.fit(samples, strip_radius)


def eval_strip(f, z):
    return f.eval_strip(z)


def strip_norm(f, eps, n=None):
    return f.strip_norm(eps, n)


def reflect(f):
    return f.reflect()


def truncate(f, K):
    return f.truncate(K)


def trig_polynomial(cos=(), sin=(), constant=0.0, scale=1.0, strip_radius=math.inf):
    """Real trigonometric polynomial ``constant + scale * sum_k (a_k cos 2pi k x + b_k sin 2pi k x)``."""
    modes = {0: complex(constant)}
    for k, a in enumerate(cos, start=1):
        modes[k] = modes.get(k, 0) + 0.5 * scale * a
        modes[-k] = modes.get(-k, 0) + 0.5 * scale * a
    for k, b in enumerate(sin, start=1):
        modes[k] = modes.get(k, 0) - 0.5j * scale * b
        modes[-k] = modes.get(-k, 0) + 0.5j * scale * b
    return FourierMap.from_modes(modes, strip_radius=strip_radius)

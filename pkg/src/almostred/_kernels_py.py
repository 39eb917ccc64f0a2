"""Pure-numpy reference kernels; the compiled ``_kernels`` mirrors these signatures.

Orbit phases are unsigned 64-bit fixed-point fractions of a turn, so
``x + k alpha mod 1`` is exact integer arithmetic for every ``k``.
"""

import numpy as np

_TWO64 = float(2 ** 64)
_CHUNK_BUDGET = 1 << 18   # matrices evaluated per chunk


def orbit_phases(x_fixed, alpha_fixed, steps):
    """Phases ``(x + k alpha) mod 1`` as float64 for each start and step ``k``."""
    x = np.asarray(x_fixed, dtype=np.uint64)
    k = np.asarray(steps, dtype=np.uint64)
    with np.errstate(over="ignore"):
        ph = x[:, None] + k[None, :] * np.uint64(alpha_fixed)
    return ph.astype(np.float64) / _TWO64


def eval_map(coeffs, phases, t):
    """Matrix map with coefficients ``coeffs[(2K+1), 2, 2]`` at ``phases + i t``."""
    K = (coeffs.shape[0] - 1) // 2
    z = phases + 1j * np.asarray(t)[:, None]
    if K == 0:
        return np.broadcast_to(coeffs[0], z.shape + (2, 2)).copy()
    w = np.exp(2j * np.pi * z)
    winv = 1.0 / w
    out = np.broadcast_to(coeffs[K], z.shape + (2, 2)).astype(complex)
    pos = np.ones_like(w)
    neg = np.ones_like(w)
    for m in range(1, K + 1):
        pos = pos * w
        neg = neg * winv
        out += pos[..., None, None] * coeffs[K + m] + neg[..., None, None] * coeffs[K - m]
    return out


def _renorm(mats, logs):
    s = np.max(np.abs(mats), axis=(-2, -1))
    s = np.where(s > 0, s, 1.0)
    mats /= s[..., None, None]
    logs += np.log(s)


def _chain(mats):
    """Ordered product ``A_{C-1} ... A_0`` along axis 1, pairwise, renormalized."""
    logs = np.zeros(mats.shape[:2])
    while mats.shape[1] > 1:
        c = mats.shape[1]
        pairs = c // 2
        prod = np.matmul(mats[:, 1:2 * pairs:2], mats[:, 0:2 * pairs:2])
        lg = logs[:, 1:2 * pairs:2] + logs[:, 0:2 * pairs:2]
        if c % 2:
            prod = np.concatenate([prod, mats[:, -1:]], axis=1)
            lg = np.concatenate([lg, logs[:, -1:]], axis=1)
        mats, logs = prod, lg
        _renorm(mats, logs)
    return mats[:, 0], logs[:, 0]


def orbit_products(coeffs, alpha_fixed, x_fixed, t, checkpoints):
    """Renormalized transfer products at each checkpoint step count.

    Returns ``mats[C, M, 2, 2]`` (largest entry modulus 1) and
    ``logs[C, M]`` with ``A_n = mats * exp(logs)``.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=complex)
    x_fixed = np.asarray(x_fixed, dtype=np.uint64)
    t = np.asarray(t, dtype=np.float64)
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    M = x_fixed.shape[0]
    C = checkpoints.shape[0]
    out_m = np.empty((C, M, 2, 2), dtype=complex)
    out_l = np.empty((C, M))
    P = np.broadcast_to(np.eye(2, dtype=complex), (M, 2, 2)).copy()
    L = np.zeros(M)
    done = 0
    chunk = max(8, _CHUNK_BUDGET // max(M, 1))
    for ci, target in enumerate(checkpoints):
        while done < target:
            c = min(chunk, int(target) - done)
            steps = np.arange(done, done + c, dtype=np.uint64)
            mats = eval_map(coeffs, orbit_phases(x_fixed, alpha_fixed, steps), t)
            seg, seg_log = _chain(mats)
            P = np.matmul(seg, P)
            L += seg_log
            _renorm(P, L)
            done += c
        out_m[ci] = P
        out_l[ci] = L
    return out_m, out_l


def riccati_sign_changes(v, energies):
    """Sign changes of ``u_{n+1} = (E - v_n) u_n - u_{n-1}`` (``u_{-1}=0, u_0=1``).

    Counted over ``n = 0 .. len(v)-1`` for every energy.
    """
    v = np.asarray(v, dtype=np.float64)
    E = np.asarray(energies, dtype=np.float64)
    r = E - v[0]
    count = (r < 0).astype(np.int64)
    for vn in v[1:]:
        r = np.where(r == 0.0, 1e-300, r)
        r = (E - vn) - 1.0 / r
        count += r < 0
    return count

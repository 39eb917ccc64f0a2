"""Batched 2x2 complex matrix helpers (arrays of shape ``(..., 2, 2)``)."""

import numpy as np


def det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inv2(m):
    d = det2(m)
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out / d[..., None, None]


def opnorm2(m):
    """Largest singular value, in closed form."""
    fro2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    ad = np.abs(det2(m))
    disc = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * ad * ad, 0.0))
    return np.sqrt(0.5 * (fro2 + disc))


def log_opnorm2(m):
    """``ln`` of the operator norm, robust for nearly rank-one input."""
    scale = np.max(np.abs(m), axis=(-2, -1))
    scale = np.where(scale > 0, scale, 1.0)
    return np.log(scale) + np.log(opnorm2(m / scale[..., None, None]))


def rotation(theta):
    """``R_theta`` for real or complex (array) ``theta``."""
    theta = np.asarray(theta, dtype=complex)
    c = np.cos(2 * np.pi * theta)
    s = np.sin(2 * np.pi * theta)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def diag(mu):
    mu = np.asarray(mu, dtype=complex)
    out = np.zeros(mu.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = mu
    out[..., 1, 1] = 1 / mu
    return out


# SU(2) element sending infinity to i and 0 to -i
U_CAYLEY = np.exp(-0.25j * np.pi) / np.sqrt(2) * np.array([[1j, -1j], [1, 1]])
U_CAYLEY_INV = inv2(U_CAYLEY)

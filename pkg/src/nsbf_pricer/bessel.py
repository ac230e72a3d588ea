"""Spherical Bessel functions j_0..j_M by backward (Miller) recursion.

The downward three-term recurrence j_m = ((2m+3)/x) j_{m+1} - j_{m+2} is
stable, so a whole block of orders at one argument costs a single sweep.
The sweep is seeded with (0, tiny) far enough above the largest requested
order, run down to zero, and rescaled against the closed forms of j_0 and
j_1 (whichever is larger in magnitude; they share no zeros).  Small
arguments use the ascending series instead, where the recursion would
have to climb through astronomically small values.
"""

from __future__ import annotations

import numpy as np

_SERIES_CUTOFF = 2.0
_SERIES_TERMS = 34
_SEED = 1e-280
_RESCALE_LIMIT = 1e250
# Downward sweeps start max(20, ceil(1.2 x)) orders above the top requested
# order so the minimal solution dominates before storage begins; buckets of
# similar x share a sweep to keep the extra orders (and overflow risk) small.
_BUCKET_EDGES = (2.0, 8.0, 32.0, 128.0, 512.0, np.inf)


def _series_block(x: np.ndarray, m_max: int) -> np.ndarray:
    """Ascending series, accurate to machine precision for x < ~2."""
    out = np.zeros((m_max + 1, x.size))
    lead = np.ones_like(x)  # x^m / (2m+1)!!
    half_sq = 0.5 * x * x
    for m in range(m_max + 1):
        term = lead.copy()
        acc = term.copy()
        for k in range(1, _SERIES_TERMS):
            term *= -half_sq / (k * (2.0 * (m + k) + 1.0))
            acc += term
        out[m] = acc
        lead *= x / (2.0 * m + 3.0)
    return out


def _miller_block(x: np.ndarray, m_max: int) -> np.ndarray:
    """Backward recursion block for x >= the series cutoff."""
    extra = max(20, int(np.ceil(1.2 * float(np.max(x)))))
    m_top = m_max + extra
    out = np.zeros((m_max + 1, x.size))
    jp2 = np.zeros_like(x)  # unscaled j at order m+2
    jp1 = np.full_like(x, _SEED)  # unscaled j at order m+1
    if m_top <= m_max:  # pragma: no cover - extra >= 20 prevents this
        out[m_top + 1] = jp1
    for m in range(m_top - 1, -1, -1):
        jm = (2.0 * m + 3.0) / x * jp1 - jp2
        jp2, jp1 = jp1, jm
        if m <= m_max:
            out[m] = jm
        peak = np.max(np.abs(jp1))
        if peak > _RESCALE_LIMIT:
            jp1 *= 1.0 / _RESCALE_LIMIT
            jp2 *= 1.0 / _RESCALE_LIMIT
            out *= 1.0 / _RESCALE_LIMIT
    j0 = np.sin(x) / x
    j1 = j0 / x - np.cos(x) / x
    use_j0 = np.abs(j0) >= np.abs(j1)
    ref = np.where(use_j0, j0, j1)
    raw = np.where(use_j0, out[0], out[1] if m_max >= 1 else jp2)
    out *= ref / raw
    return out


def spherical_jn_block(x, m_max: int) -> np.ndarray:
    """j_m(x) for m = 0..m_max; returns shape (m_max+1,) + shape(x)."""
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0.0):
        raise ValueError("argument must be non-negative")
    flat = x_arr.ravel()
    out = np.empty((m_max + 1, flat.size))

    small = flat < _SERIES_CUTOFF
    if np.any(small):
        out[:, small] = _series_block(flat[small], m_max)
    lo = _SERIES_CUTOFF
    for hi in _BUCKET_EDGES[1:]:
        sel = (flat >= lo) & (flat < hi)
        if np.any(sel):
            out[:, sel] = _miller_block(flat[sel], m_max)
        lo = hi

    out = out.reshape((m_max + 1,) + x_arr.shape)
    return out if np.ndim(x) else out[:, 0]

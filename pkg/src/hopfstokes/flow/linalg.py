"""Mid-rad real interval vectors/matrices and rectangle helpers (numpy)."""

from __future__ import annotations

import numpy as np

from .taylor import ETA, R_UP, U

INF = np.inf


def up(x):
    return x * R_UP + ETA


def matmul(am, ar, bm, br):
    """Enclosure of [am ± ar] @ [bm ± br]; ``ar`` or ``br`` may be None (exact)."""
    cm = am @ bm
    aa = np.abs(am)
    ab = np.abs(bm)
    n = am.shape[-1]
    cr = (n + 2) * U * (aa @ ab)
    if br is not None:
        cr = cr + aa @ br
    if ar is not None:
        cr = cr + ar @ (ab + br if br is not None else ab)
    return cm, up(cr)


def vadd(am, ar, bm, br):
    m = am + bm
    return m, up(ar + br + U * np.abs(m))


def rect_to_midrad(lo, hi):
    mid = 0.5 * lo + 0.5 * hi
    rad = np.maximum(hi - mid, mid - lo)
    return mid, up(rad)


def midrad_to_rect(mid, rad):
    return np.nextafter(mid - rad, -INF), np.nextafter(mid + rad, INF)


def rect_add(alo, ahi, blo, bhi):
    return np.nextafter(alo + blo, -INF), np.nextafter(ahi + bhi, INF)


def rect_scale_0h(lo, hi, hpow_up):
    """[0, t] * [lo, hi] for every 0 <= t <= hpow_up (hpow_up >= 0)."""
    return (
        np.nextafter(np.minimum(lo, 0.0) * hpow_up, -INF),
        np.nextafter(np.maximum(hi, 0.0) * hpow_up, INF),
    )


def rect_scale_pos(lo, hi, a, b):
    """[a, b] * [lo, hi] for 0 <= a <= b (scalars)."""
    cands = (lo * a, lo * b, hi * a, hi * b)
    return (
        np.nextafter(np.minimum.reduce(cands), -INF),
        np.nextafter(np.maximum.reduce(cands), INF),
    )


def rect_hull(alo, ahi, blo, bhi):
    return np.minimum(alo, blo), np.maximum(ahi, bhi)


def rects_to_discs(lo, hi):
    """Real boxes (..., 2n) -> complex discs (..., n)."""
    mid, rad = rect_to_midrad(lo, hi)
    cm = mid[..., 0::2] + 1j * mid[..., 1::2]
    cr = up(np.hypot(rad[..., 0::2], rad[..., 1::2]))
    return cm, cr


def discs_to_rects(cm, cr):
    """Complex discs (..., n) -> real boxes (..., 2n) with interleaved (Re, Im)."""
    shape = cm.shape[:-1] + (2 * cm.shape[-1],)
    lo = np.empty(shape)
    hi = np.empty(shape)
    lo[..., 0::2], hi[..., 0::2] = midrad_to_rect(cm.real, cr)
    lo[..., 1::2], hi[..., 1::2] = midrad_to_rect(cm.imag, cr)
    return lo, hi


def realify(jm, jr):
    """Complex (n, n) ball matrix of a holomorphic map -> real (2n, 2n) mid-rad matrix."""
    n = jm.shape[0]
    m = np.empty((2 * n, 2 * n))
    r = np.empty((2 * n, 2 * n))
    m[0::2, 0::2] = jm.real
    m[0::2, 1::2] = -jm.imag
    m[1::2, 0::2] = jm.imag
    m[1::2, 1::2] = jm.real
    for a in (0, 1):
        for b in (0, 1):
            r[a::2, b::2] = jr
    return m, r


def ball_poly(cm, cr, h: float):
    """sum_k h^k c_k for ball coefficients along axis 0 (h >= 0 exact float)."""
    K = cm.shape[0]
    hp = np.cumprod(np.concatenate(([1.0], np.full(K - 1, h))))
    hp_r = hp * (np.arange(K) + 1) * U * R_UP  # error of the repeated products
    shape = (K,) + (1,) * (cm.ndim - 1)
    hp_b = hp.reshape(shape)
    hpr_b = hp_r.reshape(shape)
    acm = np.abs(cm)
    m = (cm * hp_b).sum(axis=0)
    r = (cr * (hp_b + hpr_b) + acm * hpr_b).sum(axis=0)
    err = (acm * hp_b).sum(axis=0)
    return m, up(r + (2 * K + 6) * U * err)


def power_upper(h: float, K: int) -> np.ndarray:
    """Upper bounds of h^k, k = 0..K-1."""
    out = np.empty(K)
    v = 1.0
    for k in range(K):
        out[k] = v
        v = np.nextafter(v * h, INF)
    return out


def power_lower(h: float, K: int) -> np.ndarray:
    out = np.empty(K)
    v = 1.0
    for k in range(K):
        out[k] = v
        v = max(0.0, np.nextafter(v * h, -INF))
    return out

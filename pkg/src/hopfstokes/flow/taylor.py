"""Taylor coefficients of a holomorphic ODE in complex ball arithmetic.

The right-hand side is recorded once as a small expression tape (add, sub,
multiply, scale by a constant, reciprocal).  The tape is then evaluated
order by order with the usual recurrences, vectorised over a batch of
initial discs.  Optionally every coefficient carries first-order jets with
respect to the initial condition (dual numbers), which yields the
derivatives DT_k needed by the Lohner step.

A ball is a pair (mid, rad): complex midpoint array and real radius array
of the same shape.  Every operation returns a radius that also absorbs the
floating-point error of computing the midpoint.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import DomainError

U = 2.0**-53
R_UP = 1.0 + 2.0**-40  # absorbs the relative rounding of radius arithmetic
ETA = 1e-300  # absorbs underflow


def _up(x: np.ndarray) -> np.ndarray:
    return x * R_UP + ETA


class _Node:
    __slots__ = ("tape", "idx")

    def __init__(self, tape: "TaylorTape", idx: int):
        self.tape = tape
        self.idx = idx

    def _emit(self, op, a, b=None, c=None) -> "_Node":
        return self.tape._push(op, a, b, c)

    def __add__(self, other):
        if isinstance(other, _Node):
            return self._emit("add", self.idx, other.idx)
        return self._emit("addc", self.idx, c=complex(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, _Node):
            return self._emit("sub", self.idx, other.idx)
        return self._emit("addc", self.idx, c=-complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._emit("scale", self.idx, c=-1.0 + 0j)

    def __mul__(self, other):
        if isinstance(other, _Node):
            return self._emit("mul", self.idx, other.idx)
        return self._emit("scale", self.idx, c=complex(other))

    __rmul__ = __mul__

    def recip(self):
        return self._emit("recip", self.idx)


class TaylorTape:
    """Recorded holomorphic vector field ``u' = sign * f(u)`` on C^n."""

    def __init__(self, rhs: Callable, nvars: int = 3, sign: float = 1.0):
        if sign not in (1.0, -1.0):
            raise ValueError("sign must be +1 or -1")
        self.nvars = nvars
        self.sign = sign
        self.ops: list[tuple] = []
        variables = [self._push("var", j) for j in range(nvars)]
        outputs = rhs(*variables)
        if len(outputs) != nvars:
            raise ValueError("rhs must return one derivative per variable")
        self.outputs = [o.idx for o in outputs]

    def _push(self, op, a, b=None, c=None) -> _Node:
        self.ops.append((op, a, b, c))
        return _Node(self, len(self.ops) - 1)

    # ------------------------------------------------------------------
    def series(self, u_mid: np.ndarray, u_rad: np.ndarray, order: int, jets: bool = False):
        """Taylor coefficients 0..order of the solutions through a batch of discs.

        ``u_mid`` has shape (B, n) complex, ``u_rad`` shape (B, n).  Returns
        ``(mid, rad)`` of shape (order+1, B, n, L) with L = 1 + n if ``jets``
        (lane 0 value, lane 1 + l derivative along u_l) and L = 1 otherwise.
        """
        u_mid = np.asarray(u_mid, dtype=complex)
        u_rad = np.asarray(u_rad, dtype=float)
        nb, n = u_mid.shape
        K = order + 1
        L = 1 + n if jets else 1
        nn = len(self.ops)
        mid = np.zeros((nn, K, nb, L), dtype=complex)
        rad = np.zeros((nn, K, nb, L))
        mag = np.zeros((nn, K, nb, L))
        for j in range(n):
            mid[j, 0, :, 0] = u_mid[:, j]
            rad[j, 0, :, 0] = u_rad[:, j]
            if jets:
                mid[j, 0, :, 1 + j] = 1.0
            mag[j, 0] = np.abs(mid[j, 0])
        out_idx = self.outputs
        sign = self.sign
        for k in range(K):
            if k > 0:
                for j in range(n):
                    o = out_idx[j]
                    m = mid[o, k - 1] * (sign / k)
                    mid[j, k] = m
                    mag[j, k] = np.abs(m)
                    rad[j, k] = _up(rad[o, k - 1] / k + 2 * U * mag[j, k])
            if k == K - 1:
                break
            for idx in range(n, nn):
                op, a, b, c = self.ops[idx]
                if op == "add" or op == "sub":
                    m = mid[a, k] + mid[b, k] if op == "add" else mid[a, k] - mid[b, k]
                    am = np.abs(m)
                    r = _up(rad[a, k] + rad[b, k] + 2 * U * am)
                elif op == "addc":
                    if k == 0:
                        m = mid[a, 0].copy()
                        m[..., 0] += c
                        am = np.abs(m)
                        r = _up(rad[a, 0] + 2 * U * am)
                    else:
                        m, am, r = mid[a, k], mag[a, k], rad[a, k]
                elif op == "scale":
                    ac = abs(c)
                    m = mid[a, k] * c
                    am = np.abs(m)
                    r = _up(ac * rad[a, k] + 4 * U * ac * mag[a, k])
                elif op == "mul":
                    m, r = _dual_conv(
                        mid[a, : k + 1], rad[a, : k + 1], mag[a, : k + 1],
                        mid[b, k::-1], rad[b, k::-1], mag[b, k::-1], jets,
                    )
                    am = np.abs(m)
                elif op == "recip":
                    m, r = self._recip_coeff(mid, rad, mag, a, idx, k, jets)
                    am = np.abs(m)
                else:  # pragma: no cover
                    raise AssertionError(op)
                mid[idx, k] = m
                rad[idx, k] = r
                mag[idx, k] = am
        cm = np.stack([mid[j] for j in range(n)], axis=2)
        cr = np.stack([rad[j] for j in range(n)], axis=2)
        return cm, cr

    @staticmethod
    def _recip_coeff(mid, rad, mag, a, idx, k, jets):
        if k == 0:
            m0 = mid[a, 0, :, 0]
            r0 = rad[a, 0, :, 0]
            am0 = mag[a, 0, :, 0]
            if np.any(~(r0 <= 0.5 * am0)):
                raise DomainError("disc passed to reciprocal is too close to 0 (s near the singularity)")
            inv = 1.0 / m0
            ainv = np.abs(inv)
            # 1/(m + e) - 1/m = -e / (m (m + e)), |e| <= r
            rinv = _up(r0 / (am0 * ((am0 - r0) * (1 - 4 * U))) + 8 * U * ainv)
            m = np.empty_like(mid[a, 0])
            r = np.empty_like(rad[a, 0])
            m[:, 0] = inv
            r[:, 0] = rinv
            if jets:
                # d(1/u) = -u'/u^2 on each lane
                sq_m, sq_r = _ball_mul(inv, rinv, ainv, inv, rinv, ainv)
                lanes_m, lanes_r = _ball_mul(
                    -sq_m[:, None], sq_r[:, None], np.abs(sq_m)[:, None],
                    mid[a, 0, :, 1:], rad[a, 0, :, 1:], mag[a, 0, :, 1:],
                )
                m[:, 1:] = lanes_m
                r[:, 1:] = lanes_r
            return m, r
        # r_k = -r_0 * sum_{j=1}^k a_j r_{k-j}
        s_m, s_r = _dual_conv(
            mid[a, 1 : k + 1], rad[a, 1 : k + 1], mag[a, 1 : k + 1],
            mid[idx, k - 1 :: -1] if k - 1 >= 0 else None,
            rad[idx, k - 1 :: -1], mag[idx, k - 1 :: -1], jets,
        )
        m, r = _dual_conv(
            mid[idx, 0:1], rad[idx, 0:1], mag[idx, 0:1],
            s_m[None], s_r[None], np.abs(s_m)[None], jets,
        )
        return -m, r


def _ball_mul(am, ar, aabs, bm, br, babs):
    m = am * bm
    r = _up(aabs * br + ar * (babs + br) + 4 * U * aabs * babs)
    return m, r


def _dual_conv(am, ar, aabs, bm, br, babs, jets):
    """sum_j a_j (x) b_j over axis 0, with (x) the dual-number product when ``jets``.

    Inputs have shape (terms, B, L); the caller passes ``b`` already reversed.
    """
    nterms = am.shape[0]
    if not jets:
        m = (am * bm).sum(axis=0)
        rad_terms = (aabs * br + ar * (babs + br)).sum(axis=0)
        err = (aabs * babs).sum(axis=0)
        nprod = nterms
    else:
        a0m, a0r, a0a = am[..., :1], ar[..., :1], aabs[..., :1]
        b0m, b0r, b0a = bm[..., :1], br[..., :1], babs[..., :1]
        prod = a0m * bm
        prod[..., 1:] += am[..., 1:] * b0m
        m = prod.sum(axis=0)
        rt = a0a * br + a0r * (babs + br)
        rt[..., 1:] += aabs[..., 1:] * b0r + ar[..., 1:] * (b0a + b0r)
        rad_terms = rt.sum(axis=0)
        e = a0a * babs
        e[..., 1:] += aabs[..., 1:] * b0a
        err = e.sum(axis=0)
        nprod = 2 * nterms
    r = _up(rad_terms + (2 * nprod + 6) * U * err)
    return m, r

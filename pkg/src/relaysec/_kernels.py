"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``RELAYSEC_DISABLE_NUMBA`` is unset (or set to ``0``).  Both paths
are always importable as ``numpy_impl`` / ``numba_impl`` so the test suite
and the benchmark can compare them directly.
"""

import math
import os
from types import SimpleNamespace

import numpy as np

_CHUNK = 1 << 15


def _flag_disabled(value):
    return value.strip().lower() not in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _np_pencil_excess(hh, zz, gram, a, b, n0, m):
    """Largest ``lambda - 1`` of the pencil (n0 I + a hh^H, n0 I + b zz^H).

    Works on the three Gram invariants ``|h|^2``, ``|z|^2`` and
    ``|h|^2 |z|^2 - |h^H z|^2``; ``a`` and ``b`` broadcast.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    den = n0 * (n0 + b * zz)
    if m == 1:
        return (a * hh - b * zz) / (n0 + b * zz)
    p = n0 * (a * hh - b * zz) + a * b * gram
    c = a * b * gram
    # hypot keeps p^2 from underflowing (tiny a, b) or overflowing
    s = np.hypot(p, 2.0 * np.sqrt(den) * np.sqrt(c))
    with np.errstate(divide="ignore", invalid="ignore"):
        pos = (p + s) / (2.0 * den)
        neg = 2.0 * c / (s - p)
    out = np.where(p >= 0.0, pos, neg)
    return np.where(np.isfinite(out), out, 0.0)


def _np_quotient_max(vectors, h, z, a, b, n0):
    best = -np.inf
    hc = h.conj()
    zc = z.conj()
    for start in range(0, vectors.shape[0], _CHUNK):
        w = vectors[start:start + _CHUNK]
        nn = n0 * np.einsum("ij,ij->i", w.real, w.real)
        nn += n0 * np.einsum("ij,ij->i", w.imag, w.imag)
        hw = np.abs(w @ hc) ** 2
        zw = np.abs(w @ zc) ** 2
        q = (nn + a * hw) / (nn + b * zw)
        best = max(best, float(q.max()))
    return best


def _np_pareto_mask(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    mask = np.zeros(n, dtype=bool)
    if n == 0:
        return mask
    # descending x, then descending y, then ascending index
    order = np.lexsort((np.arange(n), -y, -x))
    ys = y[order]
    prev_max = np.maximum.accumulate(np.concatenate(([-np.inf], ys[:-1])))
    mask[order] = ys > prev_max
    return mask


numpy_impl = SimpleNamespace(
    name="numpy",
    pencil_excess=_np_pencil_excess,
    quotient_max=_np_quotient_max,
    pareto_mask=_np_pareto_mask,
)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def _excess_scalar(hh, zz, gram, a, b, n0, m):
        if m == 1:
            return (a * hh - b * zz) / (n0 + b * zz)
        den = n0 * (n0 + b * zz)
        p = n0 * (a * hh - b * zz) + a * b * gram
        c = a * b * gram
        s = math.hypot(p, 2.0 * math.sqrt(den) * math.sqrt(c))
        if p >= 0.0:
            return (p + s) / (2.0 * den)
        if s - p == 0.0:
            return 0.0
        return 2.0 * c / (s - p)

    @njit(cache=True)
    def _excess_loop(hh, zz, gram, a, b, n0, m):
        out = np.empty(a.shape[0])
        for i in range(a.shape[0]):
            out[i] = _excess_scalar(hh, zz, gram, a[i], b[i], n0, m)
        return out

    def pencil_excess(hh, zz, gram, a, b, n0, m):
        a_arr, b_arr = np.broadcast_arrays(
            np.asarray(a, dtype=float), np.asarray(b, dtype=float))
        shape = a_arr.shape
        out = _excess_loop(float(hh), float(zz), float(gram),
                           np.ascontiguousarray(a_arr.ravel()),
                           np.ascontiguousarray(b_arr.ravel()),
                           float(n0), int(m))
        return out.reshape(shape)

    @njit(cache=True)
    def _quotient_max(vectors, h, z, a, b, n0):
        best = -np.inf
        t_count, m = vectors.shape
        for t in range(t_count):
            nn = 0.0
            hw = 0j
            zw = 0j
            for k in range(m):
                wk = vectors[t, k]
                nn += wk.real * wk.real + wk.imag * wk.imag
                hw += np.conj(h[k]) * wk
                zw += np.conj(z[k]) * wk
            num = n0 * nn + a * (hw.real * hw.real + hw.imag * hw.imag)
            den = n0 * nn + b * (zw.real * zw.real + zw.imag * zw.imag)
            q = num / den
            if q > best:
                best = q
        return best

    def quotient_max(vectors, h, z, a, b, n0):
        return float(_quotient_max(np.ascontiguousarray(vectors, dtype=np.complex128),
                                   np.ascontiguousarray(h, dtype=np.complex128),
                                   np.ascontiguousarray(z, dtype=np.complex128),
                                   float(a), float(b), float(n0)))

    @njit(cache=True)
    def _pareto(x, y):
        # two stable passes give the order (descending x, descending y, index)
        n = x.shape[0]
        mask = np.zeros(n, dtype=np.bool_)
        by_y = np.argsort(-y, kind="mergesort")
        order = by_y[np.argsort(-x[by_y], kind="mergesort")]
        best = -np.inf
        for k in range(n):
            i = order[k]
            if y[i] > best:
                mask[i] = True
                best = y[i]
        return mask

    def pareto_mask(x, y):
        return _pareto(np.ascontiguousarray(x, dtype=float),
                       np.ascontiguousarray(y, dtype=float))

    return SimpleNamespace(
        name="numba",
        pencil_excess=pencil_excess,
        quotient_max=quotient_max,
        pareto_mask=pareto_mask,
    )


try:
    numba_impl = _build_numba()
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba_impl = None

if numba_impl is not None and not _flag_disabled(
        os.environ.get("RELAYSEC_DISABLE_NUMBA", "")):
    active = numba_impl
else:
    active = numpy_impl

pencil_excess = active.pencil_excess
quotient_max = active.quotient_max
pareto_mask = active.pareto_mask
BACKEND = active.name

"""Identity-plus-rank-one matrix pencils and rank-one null-space projectors.

Every scheme in this package reduces to the largest generalized eigenvalue
of a pair ``(n0 I + a h h^H, n0 I + b z z^H)``.  Directions orthogonal to
both ``h`` and ``z`` give a quotient of exactly 1, so the problem lives on
``span{h, z}`` and is solved there in closed form from three Gram
invariants: ``|h|^2``, ``|z|^2`` and ``G = |h|^2 |z|^2 - |h^H z|^2``.
Writing ``lambda = 1 + mu``, the excess ``mu`` is the larger root of::

    n0 (n0 + b |z|^2) mu^2 - [n0 (a |h|^2 - b |z|^2) + a b G] mu - a b G = 0

which is evaluated in a cancellation-free way by the kernels.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidInputError

__all__ = [
    "PARALLEL_TOL",
    "PencilSpec",
    "EigResult",
    "gram_invariants",
    "rayleigh_quotient",
    "pencil_eigmax",
    "pencil_excess_grid",
    "pencil_eig_grid",
    "brute_force_oracle",
    "max_quotient",
    "null_projector_apply",
    "canonical_phase",
]

# |h^H z| / (|h| |z|) above 1 - PARALLEL_TOL is treated as exactly parallel
PARALLEL_TOL = 1e-12


def _as_vector(name, v):
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a nonempty 1-D vector")
    return arr


@dataclass(frozen=True, eq=False)
class PencilSpec:
    """The pair ``(n0 I + a h h^H, n0 I + b z z^H)``."""

    h: np.ndarray
    z: np.ndarray
    a: float
    b: float
    n0: float = 1.0

    def __post_init__(self):
        h = _as_vector("h", self.h)
        z = _as_vector("z", self.z)
        if h.shape != z.shape:
            raise InvalidInputError(f"h and z lengths differ: {h.shape[0]} vs {z.shape[0]}")
        if not (self.a >= 0 and self.b >= 0):
            raise InvalidInputError(f"coefficients must be nonnegative, got a={self.a}, b={self.b}")
        if not (self.n0 > 0 and math.isfinite(self.n0)):
            raise InvalidInputError(f"n0 must be positive, got {self.n0}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n0", float(self.n0))

    @property
    def m(self):
        return self.h.shape[0]

    def swapped(self):
        """The pencil with the roles of ``(h, a)`` and ``(z, b)`` exchanged."""
        return PencilSpec(self.z, self.h, self.b, self.a, self.n0)


@dataclass(frozen=True, eq=False)
class EigResult:
    """Largest generalized eigenvalue and a unit-norm maximizing direction.

    ``excess`` is ``lambda_max - 1`` computed without cancellation; rates use
    ``log1p(excess)``.
    """

    lambda_max: float
    eigvec: np.ndarray
    excess: float


def _pow2_normalize(v):
    """Return ``(e, v * 2**-e)`` with the largest entry magnitude in ``[0.5, 1)``.

    The scaling is exact and keeps subnormal or huge vectors away from
    underflow and overflow.  Zero vectors come back unchanged with ``e = 0``.
    """
    peak = float(np.max(np.abs(v))) if v.size else 0.0
    if peak == 0.0 or not math.isfinite(peak):
        return 0, v
    e = math.frexp(peak)[1]
    out = np.empty_like(v)
    out.real = np.ldexp(v.real, -e)
    out.imag = np.ldexp(v.imag, -e)
    return e, out


def gram_invariants(h, z):
    """Return ``(|h|^2, |z|^2, h^H z, G)`` with ``G`` the Gram determinant.

    ``G`` is computed as ``|h|^2 |z - (h^H z / |h|^2) h|^2`` and is set to 0
    when either vector vanishes or the pair is parallel to ``PARALLEL_TOL``.
    """
    hh = float(np.vdot(h, h).real)
    zz = float(np.vdot(z, z).real)
    hz = complex(np.vdot(h, z))
    if hh == 0.0 or zz == 0.0:
        return hh, zz, hz, 0.0
    if abs(hz) / math.sqrt(hh * zz) > 1.0 - PARALLEL_TOL:
        return hh, zz, hz, 0.0
    resid = z - (hz / hh) * h
    return hh, zz, hz, hh * float(np.vdot(resid, resid).real)


def rayleigh_quotient(w, spec):
    """``w^H (n0 I + a h h^H) w / w^H (n0 I + b z z^H) w``."""
    w = _as_vector("w", w)
    if w.shape != spec.h.shape:
        raise InvalidInputError(f"w has length {w.shape[0]}, expected {spec.m}")
    nn = float(np.vdot(w, w).real)
    if nn == 0.0:
        raise InvalidInputError("w must be nonzero")
    num = spec.n0 * nn + spec.a * abs(np.vdot(spec.h, w)) ** 2
    den = spec.n0 * nn + spec.b * abs(np.vdot(spec.z, w)) ** 2
    return float(num / den)


def canonical_phase(v):
    """Rotate ``v`` so its largest-magnitude entry is real and positive."""
    v = np.asarray(v, dtype=np.complex128)
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        return v.copy()
    pivot = _pow2_normalize(v[k:k + 1])[1][0]
    out = v * (abs(pivot) / pivot)
    out[k] = abs(v[k])  # exactly real, no rounding residue
    return out


def _orthogonal_witness(z):
    """Unit vector orthogonal to ``z`` built by projecting a standard basis vector.

    Picks the coordinate where ``z`` is smallest, which maximizes the norm of
    the projected basis vector.
    """
    m = z.shape[0]
    k = int(np.argmin(np.abs(z)))
    e = np.zeros(m, dtype=np.complex128)
    e[k] = 1.0
    if np.any(z):
        e = null_projector_apply(z, e)
    return canonical_phase(e / np.linalg.norm(e))


def _normalized_pair(h, z, a, b):
    """Rescale ``h``, ``z`` by powers of two and fold the factors into ``a``, ``b``.

    The pencil is unchanged and, for normal inputs, so is every rounding step.
    """
    eh, h = _pow2_normalize(np.asarray(h, dtype=np.complex128))
    ez, z = _pow2_normalize(np.asarray(z, dtype=np.complex128))
    a = np.ldexp(np.asarray(a, dtype=float), 2 * eh)
    b = np.ldexp(np.asarray(b, dtype=float), 2 * ez)
    return h, z, a, b


def pencil_excess_grid(h, z, a, b, n0=1.0):
    """Vectorized ``lambda_max - 1`` for many coefficient pairs on one channel."""
    h, z, a, b = _normalized_pair(h, z, a, b)
    hh, zz, _, gram = gram_invariants(h, z)
    return _kernels.pencil_excess(hh, zz, gram, a, b, float(n0), np.shape(h)[0])


def _canonical_rows(v):
    k = np.argmax(np.abs(v), axis=1)
    pivot = v[np.arange(v.shape[0]), k]
    scale = np.ones_like(pivot)
    nz = pivot != 0
    scale[nz] = np.abs(pivot[nz]) / pivot[nz]
    out = v * scale[:, None]
    out[np.arange(v.shape[0]), k] = np.abs(pivot)
    return out


def pencil_eig_grid(h, z, a, b, n0=1.0):
    """Batched ``pencil_eigmax`` over coefficient arrays ``a`` and ``b``.

    Returns ``(excess, eigvecs)`` with ``excess[k] = lambda_max - 1`` and unit
    rows ``eigvecs[k]``.  Directions come from the 2x2 problem on the
    orthonormal basis ``e1 = h/|h|``, ``e2`` along the part of ``z``
    orthogonal to ``h``.  Rows where the maximum is not unique get the
    projector-based witness orthogonal to ``z``.
    """
    h, z, a, b = _normalized_pair(h, z, a, b)
    a, b = np.broadcast_arrays(np.atleast_1d(a), np.atleast_1d(b))
    m = h.shape[0]
    hh, zz, hz, gram = gram_invariants(h, z)
    mu = np.asarray(_kernels.pencil_excess(hh, zz, gram, a, b, float(n0), m), dtype=float)
    k = mu.shape[0]
    vecs = np.empty((k, m), dtype=np.complex128)
    if m == 1:
        vecs[:] = 1.0
        return mu, vecs
    vecs[:] = _orthogonal_witness(z)
    active = mu > 0.0
    if not np.any(active):
        return mu, vecs
    if gram == 0.0:
        vecs[active] = canonical_phase(h / math.sqrt(hh))
        return mu, vecs
    eta = math.sqrt(hh)
    e1 = h / eta
    zeta1 = hz / eta
    resid = z - zeta1 * e1
    zeta2 = float(np.linalg.norm(resid))
    e2 = resid / zeta2
    aa, bb, mm = a[active], b[active], mu[active]
    z1sq = abs(zeta1) ** 2
    # (A - B) - mu B restricted to {e1, e2}; singular at the top eigenvalue
    m11 = aa * hh - bb * z1sq - mm * (n0 + bb * z1sq)
    m22 = -bb * zeta2 ** 2 - mm * (n0 + bb * zeta2 ** 2)
    m12 = -(1.0 + mm) * bb * zeta1 * zeta2
    x1 = np.stack([m12, -m11.astype(np.complex128)], axis=1)
    x2 = np.stack([m22.astype(np.complex128), -np.conj(m12)], axis=1)
    # max-abs instead of norms: squared entries underflow for tiny excesses
    size1, size2 = np.max(np.abs(x1), axis=1), np.max(np.abs(x2), axis=1)
    pick = size1 >= size2
    x = np.where(pick[:, None], x1, x2)
    size = np.where(pick, size1, size2)
    ok = size > 0.0
    # split into parts: complex division by a subnormal real overflows
    x, size = x[ok], size[ok, None]
    x = x.real / size + 1j * (x.imag / size)
    v = x[:, :1] * e1[None, :] + x[:, 1:] * e2[None, :]
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rows = np.flatnonzero(active)[ok]
    vecs[rows] = _canonical_rows(v)
    return mu, vecs


def pencil_eigmax(spec):
    """Largest generalized eigenvalue of ``spec`` and a maximizing unit vector.

    For ``m >= 2`` the result is at least 1.  For ``m == 1`` the pencil is a
    scalar ratio and may be below 1.  When the maximum is not unique the
    returned vector is the projector-based witness orthogonal to ``z``.
    """
    mu, vecs = pencil_eig_grid(spec.h, spec.z, spec.a, spec.b, spec.n0)
    mu = float(mu[0])
    return EigResult(lambda_max=1.0 + mu, eigvec=vecs[0], excess=mu)


def max_quotient(vectors, spec):
    """Largest Rayleigh quotient over the rows of ``vectors``."""
    vectors = np.asarray(vectors, dtype=np.complex128)
    if vectors.ndim != 2 or vectors.shape[1] != spec.m:
        raise InvalidInputError(f"vectors must have shape (T, {spec.m})")
    if vectors.shape[0] == 0:
        raise InvalidInputError("no trial vectors")
    if not np.all(np.any(vectors != 0, axis=1)):
        raise InvalidInputError("trial vectors must be nonzero")
    return _kernels.quotient_max(vectors, spec.h, spec.z, spec.a, spec.b, spec.n0)


def _span_basis(h, z):
    """Orthonormal basis of span{h, z} and, if it exists, a unit vector orthogonal to both."""
    m = h.shape[0]
    cols = []
    for v in (h, z):
        r = v.astype(np.complex128)
        for q in cols:
            r = r - np.vdot(q, r) * q
        norm = np.linalg.norm(r)
        if norm > 1e-12 * max(np.linalg.norm(v), 1e-300):
            cols.append(r / norm)
    if not cols:
        cols.append(np.eye(m, dtype=np.complex128)[0])
    complement = None
    if m > len(cols):
        for k in range(m):
            r = np.eye(m, dtype=np.complex128)[k]
            for q in cols:
                r = r - np.vdot(q, r) * q
            if np.linalg.norm(r) > 0.5:
                complement = r / np.linalg.norm(r)
                break
    return np.array(cols), complement


def _whiten_rows(vectors, spec):
    """Apply ``(n0 I + b z z^H)^(-1/2)`` to each row of ``vectors``."""
    zz = float(np.vdot(spec.z, spec.z).real)
    out = vectors / math.sqrt(spec.n0)
    if zz == 0.0 or spec.b == 0.0:
        return out
    kappa = 1.0 - 1.0 / math.sqrt(1.0 + spec.b * zz / spec.n0)
    return out - kappa * np.outer(out @ spec.z.conj(), spec.z) / zz


def brute_force_oracle(spec, trials, seed=0, subspace="whitened", chunk=1 << 15):
    """Best Rayleigh quotient over ``trials`` random unit vectors.

    ``subspace`` picks the sampling distribution:

    * ``"full"``: uniform on the unit sphere of C^m.
    * ``"span"``: uniform on the unit sphere of span{h, z}.
    * ``"whitened"``: uniform on the unit sphere of span{h, z} after
      whitening by the denominator ``n0 I + b z z^H``, i.e. trial vectors are
      ``(n0 I + b z z^H)^(-1/2) y``.  This keeps the search efficient when
      ``b |z|^2`` is large and the quotient is sharply peaked.

    In the two span modes, when ``m`` exceeds the span dimension the first
    trial is a fixed unit vector orthogonal to both channels, which carries
    the quotient value 1 that every such direction attains.  Every trial is
    scored with the exact quotient, so the result never exceeds the true
    maximum.  Trial vectors are drawn sequentially from
    ``numpy.random.default_rng(seed)``, so a larger ``trials`` extends the
    same stream.
    """
    if int(trials) != trials or trials < 1:
        raise InvalidInputError(f"trials must be a positive integer, got {trials}")
    if subspace not in ("whitened", "span", "full"):
        raise InvalidInputError(f"unknown subspace {subspace!r}")
    rng = np.random.default_rng(seed)
    m = spec.m
    best = -np.inf
    remaining = int(trials)
    if subspace != "full":
        basis, complement = _span_basis(spec.h, spec.z)
        if subspace == "whitened":
            basis = _whiten_rows(basis, spec)
        if complement is not None:
            best = max_quotient(complement[None, :], spec)
            remaining -= 1
        dim = basis.shape[0]
    else:
        basis, dim = None, m
    while remaining > 0:
        n = min(chunk, remaining)
        raw = rng.standard_normal((n, 2, dim))
        coords = raw[:, 0, :] + 1j * raw[:, 1, :]
        coords /= np.linalg.norm(coords, axis=1, keepdims=True)
        vectors = coords if basis is None else coords @ basis
        best = max(best, max_quotient(vectors, spec))
        remaining -= n
    return float(best)


def null_projector_apply(v, x):
    """Apply ``I - v v^H / |v|^2`` to ``x`` (projection onto the complement of ``v``)."""
    v = _as_vector("v", v)
    x = _as_vector("x", x)
    if v.shape != x.shape:
        raise InvalidInputError(f"v and x lengths differ: {v.shape[0]} vs {x.shape[0]}")
    if not np.any(v):
        raise InvalidInputError("v must be nonzero")
    v = _pow2_normalize(v)[1]  # guards |v|^2 against underflow and overflow
    return x - v * (np.vdot(v, x) / float(np.vdot(v, v).real))

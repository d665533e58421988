"""Channel realizations for the two-hop relay network and their sampling.

A realization holds the second-hop vectors ``h`` (relays to D) and ``z``
(relays to E), stored so that the signal at D from weights ``w`` is
``h^H w`` (i.e. ``h`` already carries the conjugated fading coefficients).
First-hop coefficients ``g`` and per-relay noise variances are optional and
only needed when the region is capped by the source-to-relay rate.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputFormatError, InvalidInputError
from .units import DEFAULT_UNIT, from_nats

__all__ = [
    "FadingConfig",
    "ChannelRealization",
    "sample_channel",
    "first_hop_capacity",
    "realization_to_json",
    "realization_from_json",
    "save_realization",
    "load_realization",
]


def _complex_vector(name, values):
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FadingConfig:
    """Rayleigh fading model: i.i.d. circularly symmetric complex Gaussians.

    ``sigma_*`` are standard deviations, so ``E|h_m|^2 = sigma_h**2``.
    ``noise_relay`` is the common first-hop noise variance N_m.
    """

    m: int
    sigma_h: float = 2.0
    sigma_z: float = 2.0
    sigma_g: float = 1.0
    n0: float = 1.0
    seed: int = 0
    noise_relay: float = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InvalidInputError(f"m must be a positive integer, got {self.m}")
        for name in ("sigma_h", "sigma_z", "sigma_g", "n0", "noise_relay"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive, got {value}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


class ChannelRealization:
    """One immutable draw of the relay channels.

    Parameters
    ----------
    h, z : array_like of complex, shape (m,)
        Second-hop channel vectors towards D and E.
    n0 : float
        Destination noise variance, shared by D and E.
    g : array_like of complex, optional
        Source-to-relay coefficients.
    noise_relay : array_like of float, optional
        Per-relay first-hop noise variances.
    seed_tag : str
        Free-form provenance label.
    """

    __slots__ = ("h", "z", "g", "n0", "noise_relay", "seed_tag")

    def __init__(self, h, z, n0=1.0, g=None, noise_relay=None, seed_tag=""):
        h = _complex_vector("h", h)
        z = _complex_vector("z", z)
        m = h.shape[0]
        if m < 1:
            raise InvalidInputError("at least one relay is required")
        if z.shape[0] != m:
            raise InvalidInputError(f"h has length {m} but z has length {z.shape[0]}")
        # projectors divide by |h|^2 and |z|^2
        if not np.any(h):
            raise InvalidInputError("h is identically zero")
        if not np.any(z):
            raise InvalidInputError("z is identically zero")
        n0 = float(n0)
        if not (math.isfinite(n0) and n0 > 0):
            raise InvalidInputError(f"n0 must be positive, got {n0}")
        if g is not None:
            g = _complex_vector("g", g)
            if g.shape[0] != m:
                raise InvalidInputError(f"g has length {g.shape[0]}, expected {m}")
        if noise_relay is not None:
            noise_relay = np.array(noise_relay, dtype=float)
            if noise_relay.shape != (m,):
                raise InvalidInputError(f"noise_relay must have shape ({m},)")
            if not np.all(np.isfinite(noise_relay) & (noise_relay > 0)):
                raise InvalidInputError("noise_relay entries must be positive")
            noise_relay.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "n0", n0)
        object.__setattr__(self, "noise_relay", noise_relay)
        object.__setattr__(self, "seed_tag", str(seed_tag))

    def __setattr__(self, name, value):
        raise AttributeError("ChannelRealization is immutable")

    @property
    def m(self):
        return self.h.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ChannelRealization):
            return NotImplemented

        def same(x, y):
            if x is None or y is None:
                return x is None and y is None
            return x.shape == y.shape and x.tobytes() == y.tobytes()

        return (same(self.h, other.h) and same(self.z, other.z)
                and same(self.g, other.g) and same(self.noise_relay, other.noise_relay)
                and self.n0 == other.n0 and self.seed_tag == other.seed_tag)

    __hash__ = None

    def __repr__(self):
        return f"ChannelRealization(m={self.m}, n0={self.n0}, seed_tag={self.seed_tag!r})"


def sample_channel(cfg, draw_index, first_hop=False):
    """Draw realization number ``draw_index`` of the fading model ``cfg``.

    Each draw has its own counter-based substream keyed by
    ``(cfg.seed, draw_index)``, so results do not depend on call order.
    ``g`` is always consumed from the stream so ``h`` and ``z`` do not depend
    on ``first_hop``.
    """
    if int(draw_index) != draw_index or draw_index < 0:
        raise InvalidInputError(f"draw_index must be a nonnegative integer, got {draw_index}")
    ss = np.random.SeedSequence(entropy=int(cfg.seed), spawn_key=(int(draw_index),))
    rng = np.random.default_rng(ss)
    raw = rng.standard_normal((3, 2, cfg.m))
    scale = np.array([cfg.sigma_h, cfg.sigma_z, cfg.sigma_g]) / math.sqrt(2.0)
    coeffs = (raw[:, 0, :] + 1j * raw[:, 1, :]) * scale[:, None]
    g = noise_relay = None
    if first_hop:
        g = coeffs[2]
        noise_relay = np.full(cfg.m, cfg.noise_relay)
    return ChannelRealization(coeffs[0], coeffs[1], n0=cfg.n0, g=g,
                              noise_relay=noise_relay,
                              seed_tag=f"seed={cfg.seed};draw={draw_index}")


def first_hop_capacity(g, p_s, noise_relay, unit=DEFAULT_UNIT):
    """Sum-rate limit of the first hop, ``min_m log(1 + |g_m|^2 p_s / N_m)``."""
    g = np.asarray(g, dtype=np.complex128)
    noise_relay = np.asarray(noise_relay, dtype=float)
    if noise_relay.ndim == 0:
        noise_relay = np.full(g.shape, float(noise_relay))
    if g.ndim != 1 or g.shape != noise_relay.shape:
        raise InvalidInputError(
            f"g and noise_relay lengths differ: {g.shape} vs {noise_relay.shape}")
    if g.shape[0] == 0:
        raise InvalidInputError("g is empty")
    if not p_s > 0:
        raise InvalidInputError(f"p_s must be positive, got {p_s}")
    if np.any(noise_relay <= 0):
        raise InvalidInputError("noise_relay entries must be positive")
    snr = np.abs(g) ** 2 * p_s / noise_relay
    return float(from_nats(np.min(np.log1p(snr)), unit))


# -- serialization ----------------------------------------------------------

def _fmt(x):
    x = float(x)
    if x == 0.0:
        # "-0" would come back from JSON as the integer 0
        return "-0.0" if math.copysign(1.0, x) < 0 else "0.0"
    return format(x, ".17g")


def _fmt_complex_list(values):
    return "[" + ", ".join(f"[{_fmt(v.real)}, {_fmt(v.imag)}]" for v in values) + "]"


def realization_to_json(real):
    """Serialize with 17 significant digits so the round trip is bit-exact."""
    fields = [
        ("m", str(real.m)),
        ("h", _fmt_complex_list(real.h)),
        ("z", _fmt_complex_list(real.z)),
        ("g", "null" if real.g is None else _fmt_complex_list(real.g)),
        ("n0", _fmt(real.n0)),
        ("noise_relay", "null" if real.noise_relay is None
         else "[" + ", ".join(_fmt(v) for v in real.noise_relay) + "]"),
        ("seed_tag", json.dumps(real.seed_tag)),
    ]
    body = ",\n".join(f'  "{key}": {value}' for key, value in fields)
    return "{\n" + body + "\n}\n"


def _parse_complex_list(name, raw, m):
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"field {name!r} is not a list of [re, im] pairs") from exc
    if arr.shape != (m, 2):
        raise InputFormatError(f"field {name!r} must have shape ({m}, 2), got {arr.shape}")
    out = np.empty(m, dtype=np.complex128)
    out.real = arr[:, 0]
    out.imag = arr[:, 1]
    return out


def realization_from_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputFormatError("realization must be a JSON object")
    missing = {"m", "h", "z", "n0"} - obj.keys()
    if missing:
        raise InputFormatError(f"missing fields: {sorted(missing)}")
    m = obj["m"]
    if not isinstance(m, int) or m < 1:
        raise InputFormatError(f"field 'm' must be a positive integer, got {m!r}")
    h = _parse_complex_list("h", obj["h"], m)
    z = _parse_complex_list("z", obj["z"], m)
    g = None if obj.get("g") is None else _parse_complex_list("g", obj["g"], m)
    noise_relay = obj.get("noise_relay")
    try:
        return ChannelRealization(h, z, n0=obj["n0"], g=g, noise_relay=noise_relay,
                                  seed_tag=obj.get("seed_tag", ""))
    except (InvalidInputError, TypeError, ValueError) as exc:
        raise InputFormatError(str(exc)) from exc


def save_realization(real, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(realization_to_json(real))


def load_realization(path):
    with open(path, encoding="utf-8") as fh:
        return realization_from_json(fh.read())

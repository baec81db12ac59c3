"""Network instances: channels, SNRs, random generation and file persistence.

SNRs are stored linear (``gamma = P / N0``); dB appears only at the I/O
boundary. Absolute powers are never needed, so ``N0 = 1`` is implicit.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError
from .linalg2 import ComplexPair, pair

DEFAULT_GAMMA0_DB = 5.0
DEFAULT_GAMMA_DB = 2.0


def from_db(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class RelayLink:
    h: ComplexPair  # relay -> Bob
    g: ComplexPair  # relay -> Eve
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0 or not math.isfinite(self.gamma):
            raise ValueError(f"relay SNR must be positive and finite, got {self.gamma!r}")
        if not (self.h.is_finite() and self.g.is_finite()):
            raise ValueError("relay channels must be finite")


@dataclass(frozen=True)
class SystemInstance:
    h0: complex  # Alice -> Bob
    g0: complex  # Alice -> Eve
    gamma0: float
    relays: tuple[RelayLink, ...]

    def __post_init__(self):
        object.__setattr__(self, "relays", tuple(self.relays))
        if not self.gamma0 > 0 or not math.isfinite(self.gamma0):
            raise ValueError(f"source SNR must be positive and finite, got {self.gamma0!r}")
        if not (_finite(complex(self.h0)) and _finite(complex(self.g0))):
            raise ValueError("direct channels must be finite")
        if len(self.relays) < 1:
            raise ValueError("an instance needs at least one relay")

    @property
    def n(self) -> int:
        return len(self.relays)

    def with_gamma0(self, gamma0: float) -> SystemInstance:
        return dataclasses.replace(self, gamma0=gamma0)

    def with_gammas(self, gamma: float | list[float]) -> SystemInstance:
        """Copy with relay SNRs replaced (one value for all, or one per relay)."""
        if np.isscalar(gamma):
            gamma = [gamma] * self.n
        if len(gamma) != self.n:
            raise ValueError(f"expected {self.n} relay SNRs, got {len(gamma)}")
        relays = tuple(dataclasses.replace(r, gamma=float(gm)) for r, gm in zip(self.relays, gamma))
        return dataclasses.replace(self, relays=relays)

    def with_eve_channels(self, gs: list[ComplexPair]) -> SystemInstance:
        relays = tuple(dataclasses.replace(r, g=g) for r, g in zip(self.relays, gs, strict=True))
        return dataclasses.replace(self, relays=relays)


_PAPER_H = [
    (0.76 - 0.64j, -0.10 - 0.84j),
    (-1.077 + 1.15j, -0.96 - 0.18j),
    (0.28 + 0.09j, -0.03 - 0.65j),
    (0.55 + 0.69j, -0.03 + 0.23j),
    (0.39 + 0.01j, -0.82 + 0.27j),
]
_PAPER_G = [
    (0.22 - 0.03j, 0.88 + 0.15j),
    (-0.165 - 0.29j, 0.24 + 0.77j),
    (1.10 - 0.47j, 0.77 + 0.27j),
    (0.33 + 0.79j, 0.20 - 0.24j),
    (0.88 - 0.05j, 0.52 - 0.50j),
]


def paper_instance() -> SystemInstance:
    """Five-relay worked example with SNRs (5, 2, 2, 2, 2, 2) dB."""
    gamma = from_db(DEFAULT_GAMMA_DB)
    relays = tuple(RelayLink(pair(*h), pair(*g), gamma) for h, g in zip(_PAPER_H, _PAPER_G))
    return SystemInstance(0.24 + 0.78j, 1.12 - 1.15j, from_db(DEFAULT_GAMMA0_DB), relays)


def stream_rng(seed: int, index: int | None = None) -> np.random.Generator:
    """Generator for ``seed``; with ``index``, an independent per-trial stream."""
    if index is None:
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def draw_cn(rng: np.random.Generator, size, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with total variance ``variance``."""
    parts = rng.standard_normal((*np.atleast_1d(size), 2)) * math.sqrt(variance / 2.0)
    return parts[..., 0] + 1j * parts[..., 1]


def random_instance(
    n: int,
    seed: int,
    variance: float = 1.0,
    gamma0: float | None = None,
    gamma: float | None = None,
) -> SystemInstance:
    """Instance with every channel coefficient drawn i.i.d. CN(0, variance).

    Coefficients are drawn in the order ``h0, g0, h_1, g_1, ..., h_n, g_n``.
    SNRs default to the worked example's 5 dB (source) and 2 dB (relays).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not variance > 0:
        raise ValueError("variance must be positive")
    gamma0 = from_db(DEFAULT_GAMMA0_DB) if gamma0 is None else gamma0
    gamma = from_db(DEFAULT_GAMMA_DB) if gamma is None else gamma
    c = draw_cn(stream_rng(seed), 2 + 4 * n, variance).tolist()
    relays = tuple(
        RelayLink(ComplexPair(*c[2 + 4 * i : 4 + 4 * i]), ComplexPair(*c[4 + 4 * i : 6 + 4 * i]), gamma)
        for i in range(n)
    )
    return SystemInstance(c[0], c[1], gamma0, relays)


def redraw_eve_channels(inst: SystemInstance, rng: np.random.Generator, variance: float = 1.0) -> SystemInstance:
    c = draw_cn(rng, 2 * inst.n, variance).tolist()
    return inst.with_eve_channels([ComplexPair(c[2 * i], c[2 * i + 1]) for i in range(inst.n)])


# -- persistence -------------------------------------------------------------
#
# JSON document. Complex numbers are [re, im]. ``gamma0``/``gamma`` (linear)
# are written alongside the dB fields so that loading is bit-exact; files
# written by hand may carry only the dB fields.


def _enc(z: complex) -> list[float]:
    return [z.real, z.imag]


def instance_to_dict(inst: SystemInstance) -> dict:
    return {
        "h0": _enc(inst.h0),
        "g0": _enc(inst.g0),
        "gamma0_db": to_db(inst.gamma0),
        "gamma0": inst.gamma0,
        "relays": [
            {
                "h": [_enc(r.h.c1), _enc(r.h.c2)],
                "g": [_enc(r.g.c1), _enc(r.g.c2)],
                "gamma_db": to_db(r.gamma),
                "gamma": r.gamma,
            }
            for r in inst.relays
        ],
    }


def _dec_complex(value, field) -> complex:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise ParseError("expected a [re, im] pair of numbers", field=field)
    return complex(float(value[0]), float(value[1]))


def _dec_pair(value, field) -> ComplexPair:
    if not isinstance(value, list) or len(value) != 2:
        raise ParseError("expected two complex entries", field=field)
    return ComplexPair(_dec_complex(value[0], f"{field}[0]"), _dec_complex(value[1], f"{field}[1]"))


def _dec_snr(obj: dict, linear_key: str, db_key: str, where: str) -> float:
    if linear_key in obj:
        val = obj[linear_key]
        key = linear_key
    elif db_key in obj:
        val = obj[db_key]
        key = db_key
    else:
        raise ParseError("missing SNR", field=f"{where}{db_key}")
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ParseError("expected a number", field=f"{where}{key}")
    return float(val) if key == linear_key else from_db(float(val))


def _require(obj: dict, key: str, where: str = ""):
    if key not in obj:
        raise ParseError("missing field", field=f"{where}{key}")
    return obj[key]


def instance_from_dict(doc) -> SystemInstance:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    h0 = _dec_complex(_require(doc, "h0"), "h0")
    g0 = _dec_complex(_require(doc, "g0"), "g0")
    gamma0 = _dec_snr(doc, "gamma0", "gamma0_db", "")
    relays_doc = _require(doc, "relays")
    if not isinstance(relays_doc, list):
        raise ParseError("expected an array", field="relays")
    if len(relays_doc) < 1:
        raise ParseError("at least one relay is required", field="relays")
    relays = []
    for i, r in enumerate(relays_doc):
        where = f"relays[{i}]."
        if not isinstance(r, dict):
            raise ParseError("expected an object", field=f"relays[{i}]")
        h = _dec_pair(_require(r, "h", where), f"{where}h")
        g = _dec_pair(_require(r, "g", where), f"{where}g")
        gamma = _dec_snr(r, "gamma", "gamma_db", where)
        try:
            relays.append(RelayLink(h, g, gamma))
        except ValueError as exc:
            raise ParseError(str(exc), field=f"relays[{i}]") from exc
    try:
        return SystemInstance(h0, g0, gamma0, tuple(relays))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def dumps_instance(inst: SystemInstance) -> str:
    # json writes floats with repr(), the shortest string that round-trips exactly
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def loads_instance(text: str) -> SystemInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    return instance_from_dict(doc)


def save_instance(inst: SystemInstance, path) -> None:
    Path(path).write_text(dumps_instance(inst))


def load_instance(path) -> SystemInstance:
    return loads_instance(Path(path).read_text())

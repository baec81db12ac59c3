"""Local nulling noise: each relay jams only along the null space of its link to Bob.

Rates are in bits per channel use. Secrecy rates are not clamped at zero
unless ``clamp=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .linalg2 import ComplexPair, Hermitian2, null_direction, quad_form
from .model import SystemInstance


@dataclass(frozen=True)
class NullingSolution:
    directions: list[ComplexPair]
    covariances: list[Hermitian2]
    eve_interference: float
    r1_bits: float


def secrecy_rate(inst: SystemInstance, bob_interference: float, eve_interference: float) -> float:
    """``log2(1 + SINR_Bob) - log2(1 + SINR_Eve)`` with noise power normalized to one."""
    bob = math.log2(1.0 + inst.gamma0 * abs(inst.h0) ** 2 / (bob_interference + 1.0))
    eve = math.log2(1.0 + inst.gamma0 * abs(inst.g0) ** 2 / (eve_interference + 1.0))
    return bob - eve


def nulling_directions(inst: SystemInstance) -> list[ComplexPair]:
    return [null_direction(r.h) for r in inst.relays]


def eve_interference(
    inst: SystemInstance,
    directions: Sequence[ComplexPair],
    fractions: Sequence[float] | None = None,
) -> float:
    """Jamming power at Eve, ``sum_i f_i gamma_i |g_i^T u_i|^2``."""
    if fractions is None:
        fractions = [1.0] * inst.n
    return sum(
        f * r.gamma * quad_form(Hermitian2.outer(u), r.g)
        for f, r, u in zip(fractions, inst.relays, directions, strict=True)
    )


def solve_nulling(inst: SystemInstance, clamp: bool = False) -> NullingSolution:
    """Full-power nulling noise at every relay and the resulting secrecy rate R1.

    Raises ``ZeroChannelError`` when some relay has no link to Bob.
    """
    directions = nulling_directions(inst)
    covariances = [Hermitian2.outer(u) for u in directions]
    interference = eve_interference(inst, directions)
    r1 = secrecy_rate(inst, 0.0, interference)
    if clamp:
        r1 = max(0.0, r1)
    return NullingSolution(directions, covariances, interference, r1)


def r1_of_weights(inst: SystemInstance, fractions: Sequence[float], clamp: bool = False) -> float:
    """Nulling secrecy rate when relay ``i`` spends fraction ``fractions[i]`` of its power."""
    if len(fractions) != inst.n:
        raise DomainError(f"expected {inst.n} power fractions, got {len(fractions)}")
    for i, f in enumerate(fractions):
        if not 0.0 <= f <= 1.0:
            raise DomainError(f"power fraction {i} = {f!r} is outside [0, 1]")
    r1 = secrecy_rate(inst, 0.0, eve_interference(inst, nulling_directions(inst), fractions))
    return max(0.0, r1) if clamp else r1

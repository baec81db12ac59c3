"""Outer search over the Bob-side jamming power ``z``.

For each ``z`` the inner solver gives the best Eve-side jamming power
``F(z)``, and the secrecy rate becomes

    R2(z) = log2(1 + gamma0 |h0|^2 / (z + 1)) - log2(1 + gamma0 |g0|^2 / (F(z) + 1)).

``F`` is concave, which makes ``2**R2`` quasi-concave in ``z``; a coarse grid
followed by golden-section refinement therefore finds the global maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .inner import InnerSolution, solve_inner, z_max
from .linalg2 import Hermitian2
from .model import SystemInstance
from .nulling import secrecy_rate, solve_nulling

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
MAX_GOLDEN_ITER = 300


@dataclass(frozen=True)
class OuterSolution:
    z_star: float
    r2_bits: float
    r1_bits: float
    covariances: list[Hermitian2]
    search_trace: list[tuple[float, float]] = field(repr=False)
    evaluations: int
    z_hi: float  # right end of the searched interval
    inner: InnerSolution = field(repr=False)


def _rate_at(inst: SystemInstance, z: float, sol: InnerSolution) -> float:
    return secrecy_rate(inst, z, sol.f_value)


def r2_of_z(inst: SystemInstance, z: float, clamp: bool = False, **inner_kw) -> float:
    """Secrecy rate with Bob-side jamming power fixed at ``z``."""
    r = _rate_at(inst, z, solve_inner(inst, z, **inner_kw))
    return max(0.0, r) if clamp else r


def g_of_z(inst: SystemInstance, z: float, **inner_kw) -> float:
    """SINR ratio whose base-2 logarithm is ``r2_of_z``."""
    f = solve_inner(inst, z, **inner_kw).f_value
    bob = 1.0 + inst.gamma0 * abs(inst.h0) ** 2 / (z + 1.0)
    eve = 1.0 + inst.gamma0 * abs(inst.g0) ** 2 / (f + 1.0)
    return bob / eve


def zstar_upper_bound(inst: SystemInstance, r1: float | None = None) -> float:
    """Bound on the optimal ``z`` implied by ``R2(z*) >= R1``.

    Since ``R2(z) < log2(1 + gamma0 |h0|^2 / (z + 1))``, any ``z`` beyond
    ``gamma0 |h0|^2 / (2**R1 - 1) - 1`` cannot beat nulling. With
    ``R1 <= 0`` no such bound exists and ``inf`` is returned.
    """
    if r1 is None:
        r1 = solve_nulling(inst).r1_bits
    if r1 <= 0.0:
        return math.inf
    snr = inst.gamma0 * abs(inst.h0) ** 2
    # (1 + snr)**beta with beta = R1 / log2(1 + snr) is just 2**R1
    return max(0.0, snr / math.expm1(r1 * math.log(2.0)) - 1.0)


def _golden_max(f, a, b, tol):
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(MAX_GOLDEN_ITER):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return a, b


def optimize(
    inst: SystemInstance,
    z_tol: float = 1e-6,
    coarse_points: int = 64,
    eq_tol: float | None = None,
    gap_tol: float | None = None,
    clamp: bool = False,
) -> OuterSolution:
    """Maximize the secrecy rate over the Bob-side jamming power.

    The search interval is ``[0, min(z_max, 1.1 * bound)]`` with ``bound``
    from :func:`zstar_upper_bound`. A uniform grid of ``coarse_points``
    brackets the maximum, golden-section search shrinks the bracket to
    ``z_tol * (1 + z_max)``, and the best evaluated point is returned.
    """
    if coarse_points < 8:
        raise ValueError("coarse_points must be at least 8")
    nulling = solve_nulling(inst)
    zmax = z_max(inst)
    bound = zstar_upper_bound(inst, nulling.r1_bits)
    z_hi = min(zmax, 1.1 * bound + z_tol)
    width_tol = z_tol * (1.0 + zmax)

    memo: dict[float, tuple[float, InnerSolution]] = {}
    trace: list[tuple[float, float]] = []

    def rate(z: float) -> float:
        if z not in memo:
            sol = solve_inner(inst, z, eq_tol=eq_tol, gap_tol=gap_tol)
            memo[z] = (_rate_at(inst, z, sol), sol)
            trace.append((z, memo[z][0]))
        return memo[z][0]

    grid = [z_hi * k / (coarse_points - 1) for k in range(coarse_points)]
    values = [rate(z) for z in grid]
    k = max(range(coarse_points), key=values.__getitem__)
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, coarse_points - 1)]
    _golden_max(rate, a, b, width_tol)

    z_star = max(memo, key=lambda z: (memo[z][0], -z))
    r2, sol = memo[z_star]
    r1 = nulling.r1_bits
    if clamp:
        r1, r2 = max(0.0, r1), max(0.0, r2)
    return OuterSolution(z_star, r2, r1, sol.covariances, trace, len(memo), z_hi, sol)

"""Inner problem: maximal jamming power at Eve for a fixed jamming power ``z`` at Bob.

    F(z) = max  sum_i gamma_i g_i^T S_i g_i^*
           s.t. S_i PSD, tr S_i <= 1,  sum_i gamma_i h_i^T S_i h_i^* = z

The relays are coupled only through the scalar equality constraint. Dualizing
it with multiplier ``mu`` splits the Lagrangian into per-relay problems

    max_{S PSD, tr S <= 1} tr(S A),   A = gamma (conj(g) g^T - mu conj(h) h^T)

whose solution is the top eigenvector of ``A`` (or ``S = 0`` when ``A`` is
negative semidefinite). The Bob-side power of the Lagrangian maximizer is
nonincreasing in ``mu``, so ``mu`` is found by bisection; a jump in that map
is closed by mixing the two one-sided maximizers of a single relay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, SizeError
from .linalg2 import Hermitian2, herm_eig2, null_direction, quad_form
from .model import RelayLink, SystemInstance

MAX_ITER = 200
MAX_DOUBLINGS = 200
# requests this close to an end of [0, z_max] get the closed-form endpoint solution
_ENDPOINT_RTOL = 1e-13


@dataclass(frozen=True)
class InnerSolution:
    covariances: list[Hermitian2]
    f_value: float
    z_requested: float
    z_achieved: float
    mu: float
    dual_value: float
    gap: float
    gap_tol: float
    iterations: int = 0

    @property
    def certified(self) -> bool:
        return self.gap <= self.gap_tol


def z_max(inst: SystemInstance) -> float:
    """Upper end of the Bob-side jamming power, ``sum_i gamma_i ||h_i||^2``."""
    return sum(r.gamma * r.h.norm_sq() for r in inst.relays)


def default_eq_tol(z: float) -> float:
    return 1e-8 * (1.0 + z)


def default_gap_tol(f: float) -> float:
    return 1e-6 * (1.0 + abs(f))


def _weighted_matrix(relay: RelayLink, mu: float) -> tuple[Hermitian2, float]:
    g1, g2 = relay.g
    h1, h2 = relay.h
    gam = relay.gamma
    a = gam * (abs(g1) ** 2 - mu * abs(h1) ** 2)
    d = gam * (abs(g2) ** 2 - mu * abs(h2) ** 2)
    b = gam * (g1.conjugate() * g2 - mu * h1.conjugate() * h2)
    # det(conj(g) g^T - mu conj(h) h^T) = -mu |g1 h2 - g2 h1|^2, free of cancellation
    det = -mu * gam * gam * abs(g1 * h2 - g2 * h1) ** 2
    return Hermitian2(a, d, b), det


def _per_relay(relay: RelayLink, mu: float, prefer: str | None):
    mat, det = _weighted_matrix(relay, mu)
    eig = herm_eig2(mat, det=det)
    lam = eig.lambda_hi
    if lam <= 0.0:
        return Hermitian2.zero(), 0.0, lam, False
    degenerate = eig.lambda_lo == lam
    v = eig.v_hi
    if degenerate and prefer is not None and relay.h.norm_sq() > 0:
        # whole space is optimal; pick the Bob-side extreme that keeps z(mu) monotone
        if prefer == "max_h":
            n = relay.h.norm()
            v = type(v)(relay.h.c1.conjugate() / n, relay.h.c2.conjugate() / n)
        else:
            v = null_direction(relay.h)
    return Hermitian2.outer(v), lam, lam, degenerate


def per_relay_best(relay: RelayLink, mu: float, prefer: str | None = None):
    """Maximize ``tr(S A)`` over PSD ``S`` with ``tr S <= 1``.

    Returns ``(S, value, lambda_hi)`` where ``lambda_hi`` is the top eigenvalue
    of ``A = gamma (conj(g) g^T - mu conj(h) h^T)``. ``prefer`` ("max_h" or
    "min_h") breaks ties when the top eigenvalue is repeated.
    """
    s, value, lam, _ = _per_relay(relay, mu, prefer)
    return s, value, lam


@dataclass
class _Lagrangian:
    mu: float
    covariances: list[Hermitian2]
    z_parts: list[float]
    value: float  # sum_i max(0, lambda_max(A_i))
    degenerate: bool

    @property
    def z(self) -> float:
        return math.fsum(self.z_parts)


def _lagrangian(inst: SystemInstance, mu: float, prefer: str | None = "max_h") -> _Lagrangian:
    covs, parts, total, degen = [], [], 0.0, False
    for r in inst.relays:
        s, val, _, dg = _per_relay(r, mu, prefer)
        covs.append(s)
        parts.append(r.gamma * quad_form(s, r.h))
        total += val
        degen = degen or dg
    return _Lagrangian(mu, covs, parts, total, degen)


def z_of_mu(inst: SystemInstance, mu: float, prefer: str | None = None) -> float:
    """Bob-side jamming power of the Lagrangian maximizer at multiplier ``mu``."""
    return _lagrangian(inst, mu, prefer).z


def dual_function(inst: SystemInstance, z: float, mu: float) -> float:
    """Upper bound on ``F(z)`` valid for every real ``mu``."""
    return sum(per_relay_best(r, mu)[1] for r in inst.relays) + mu * z


def objective(inst: SystemInstance, covariances) -> float:
    return sum(r.gamma * quad_form(s, r.g) for r, s in zip(inst.relays, covariances, strict=True))


def bob_power(inst: SystemInstance, covariances) -> float:
    return sum(r.gamma * quad_form(s, r.h) for r, s in zip(inst.relays, covariances, strict=True))


def _dual_near_full(inst: SystemInstance, z: float, mu: float) -> float:
    # for mu < 0: lambda_max(A) + mu gamma ||h||^2 = gamma ||g||^2 - lambda_min(A),
    # which avoids subtracting two numbers of size |mu|
    total = mu * (z - z_max(inst))
    for r in inst.relays:
        mat, det = _weighted_matrix(r, mu)
        eig = herm_eig2(mat, det=det)
        total += r.gamma * r.g.norm_sq() - eig.lambda_lo
    return total


def _endpoint_dual(inst: SystemInstance, z: float, f: float, gap_tol: float, sign: float) -> tuple[float, float]:
    # the endpoint multipliers sit at +-infinity; walk out until the bound is tight
    dual = dual_function if sign > 0 else _dual_near_full
    best_mu, best = 0.0, dual_function(inst, z, 0.0)
    mu = sign
    for _ in range(MAX_DOUBLINGS):
        val = dual(inst, z, mu)
        if val < best:
            best_mu, best = mu, val
        if best - f <= 1e-3 * gap_tol:
            break
        mu *= 2.0
    return best_mu, best


def _toward_eve(r: RelayLink) -> Hermitian2:
    # a relay with no link to Bob is unconstrained and jams Eve directly
    if r.g.norm_sq() > 0:
        return Hermitian2.outer(r.g.conj().scale(1.0 / r.g.norm()))
    return Hermitian2.zero()


def _zero_endpoint(inst: SystemInstance) -> list[Hermitian2]:
    return [
        Hermitian2.outer(null_direction(r.h)) if r.h.norm_sq() > 0 else _toward_eve(r)
        for r in inst.relays
    ]


def _full_endpoint(inst: SystemInstance) -> list[Hermitian2]:
    return [
        Hermitian2.outer(r.h.conj().scale(1.0 / r.h.norm())) if r.h.norm_sq() > 0 else _toward_eve(r)
        for r in inst.relays
    ]


def _finish(inst, z, covs, mu, dual, gap_tol, iterations) -> InnerSolution:
    f = objective(inst, covs)
    if gap_tol is None:
        gap_tol = default_gap_tol(f)
    return InnerSolution(covs, f, z, bob_power(inst, covs), mu, dual, dual - f, gap_tol, iterations)


def _mix(lo: _Lagrangian, hi: _Lagrangian, z: float) -> list[Hermitian2]:
    # start from the low-z maximizer and switch relays in index order; the
    # relay whose switch crosses z is mixed, all others stay rank one
    covs = list(hi.covariances)
    cur = hi.z
    for i, (zl, zh) in enumerate(zip(lo.z_parts, hi.z_parts)):
        step = zl - zh
        if step <= 0.0:
            continue
        if cur + step >= z:
            t = min(1.0, max(0.0, (z - cur) / step))
            covs[i] = t * lo.covariances[i] + (1.0 - t) * hi.covariances[i]
            return covs
        covs[i] = lo.covariances[i]
        cur += step
    return covs


def solve_inner(
    inst: SystemInstance,
    z: float,
    eq_tol: float | None = None,
    gap_tol: float | None = None,
    max_iter: int = MAX_ITER,
) -> InnerSolution:
    """Solve for ``F(z)`` with a primal covariance set and a dual certificate.

    ``eq_tol`` defaults to ``1e-8 (1 + z)``; ``gap_tol`` to ``1e-6 (1 + |F|)``.
    Raises ``DomainError`` for ``z`` outside ``[0, z_max]`` and
    ``ConvergenceError`` when the multiplier cannot be bracketed or the
    equality constraint is not met within ``max_iter`` bisection steps.
    """
    zmax = z_max(inst)
    if not (0.0 <= z <= zmax * (1.0 + 1e-12)):
        raise DomainError(f"z = {z!r} is outside [0, {zmax!r}]")
    z = min(float(z), zmax)
    if eq_tol is None:
        eq_tol = default_eq_tol(z)

    if all(r.g.norm_sq() == 0.0 for r in inst.relays):
        # F is identically zero; spread each trace between the h direction and its null
        s = z / zmax if zmax > 0 else 0.0
        covs = [
            s * full + (1.0 - s) * null
            for full, null in zip(_full_endpoint(inst), _zero_endpoint(inst))
        ]
        return _finish(inst, z, covs, 0.0, 0.0, gap_tol, 0)

    edge = _ENDPOINT_RTOL * (1.0 + zmax)
    if z <= edge or z >= zmax - edge:
        at_zero = z <= edge
        covs = _zero_endpoint(inst) if at_zero else _full_endpoint(inst)
        f = objective(inst, covs)
        tol = default_gap_tol(f) if gap_tol is None else gap_tol
        mu, dual = _endpoint_dual(inst, z, f, tol, 1.0 if at_zero else -1.0)
        return _finish(inst, z, covs, mu, dual, gap_tol, 0)

    lo = _lagrangian(inst, -1.0, "max_h")
    n = 0
    while lo.z < z:
        n += 1
        if n > MAX_DOUBLINGS:
            raise ConvergenceError("could not bracket the multiplier from below", z=z, bracket=(lo.mu, None))
        lo = _lagrangian(inst, 2.0 * lo.mu, "max_h")
    hi = _lagrangian(inst, 1.0, "min_h")
    n = 0
    while hi.z > z:
        n += 1
        if n > MAX_DOUBLINGS:
            raise ConvergenceError("could not bracket the multiplier from above", z=z, bracket=(lo.mu, hi.mu))
        hi = _lagrangian(inst, 2.0 * hi.mu, "min_h")

    stop = 1e-3 * eq_tol
    it = 0
    while it < max_iter and lo.z - hi.z > stop:
        mid = 0.5 * (lo.mu + hi.mu)
        if not lo.mu < mid < hi.mu:
            break
        it += 1
        cand = _lagrangian(inst, mid, "max_h")
        if cand.z >= z:
            lo = cand
        elif cand.degenerate:
            hi = _lagrangian(inst, mid, "min_h")
        else:
            hi = cand

    covs = _mix(lo, hi, z)
    achieved = bob_power(inst, covs)
    if abs(achieved - z) > eq_tol:
        raise ConvergenceError(
            f"equality residual {achieved - z:.3e} exceeds {eq_tol:.3e} after {it} steps",
            z=z,
            bracket=(lo.mu, hi.mu),
        )
    d_lo = lo.value + lo.mu * z
    d_hi = hi.value + hi.mu * z
    mu, dual = (lo.mu, d_lo) if d_lo <= d_hi else (hi.mu, d_hi)
    return _finish(inst, z, covs, mu, dual, gap_tol, it)


# -- brute-force reference -----------------------------------------------------


def _grid_covariances(step: float) -> np.ndarray:
    """Every grid point ``[[a, b], [conj b, d]]`` that is PSD with trace at most one."""
    k = int(round(1.0 / step))
    diag = np.linspace(0.0, 1.0, k + 1)
    off = np.linspace(-1.0, 1.0, 2 * k + 1)
    # |b| <= sqrt(ad) <= 1/2 under the constraints; drop the rest up front
    off = off[np.abs(off) <= 0.5 + 1e-12]
    mats = []
    for a in diag:
        d, br, bi = np.meshgrid(diag, off, off, indexing="ij")
        d, br, bi = d.ravel(), br.ravel(), bi.ravel()
        keep = (a + d <= 1.0 + 1e-12) & (a * d - br * br - bi * bi >= -1e-12)
        m = np.empty((int(keep.sum()), 2, 2), dtype=complex)
        m[:, 0, 0] = a
        m[:, 1, 1] = d[keep]
        m[:, 0, 1] = br[keep] + 1j * bi[keep]
        m[:, 1, 0] = br[keep] - 1j * bi[keep]
        mats.append(m)
    return np.concatenate(mats)


def _grid_values(mats: np.ndarray, v, gamma: float) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return gamma * np.einsum("j,njk,k->n", v, mats, v.conj()).real


def _range_max_table(x: np.ndarray) -> list[np.ndarray]:
    table = [x]
    span = 1
    while 2 * span <= len(x):
        prev = table[-1]
        table.append(np.maximum(prev[:-span], prev[span:]))
        span *= 2
    return table


def _range_max(table, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Max over ``[lo, hi)`` for each query; ``-inf`` for empty ranges."""
    out = np.full(lo.shape, -np.inf)
    ok = hi > lo
    length = np.where(ok, hi - lo, 1)
    lvl = np.floor(np.log2(length)).astype(int)
    for k in np.unique(lvl[ok]):
        sel = ok & (lvl == k)
        t = table[k]
        left = lo[sel]
        right = hi[sel] - (1 << k)
        out[sel] = np.maximum(t[left], t[right])
    return out


def oracle_inner_grid(
    inst: SystemInstance,
    z: float,
    step: float = 0.05,
    slack: float = 0.0,
    with_z: bool = False,
):
    """Brute-force lower-bound reference for ``F(z)`` on a covariance grid (N <= 2).

    Each covariance ranges over the PSD, trace-at-most-one points of the grid
    ``a, d in {0, step, ..., 1}``, ``Re b, Im b in {-1, ..., 1}``. Among joint
    assignments whose Bob-side power is within ``slack`` of ``z`` the best
    Eve-side power is returned, or ``-inf`` when none qualifies. With
    ``with_z`` the Bob-side power of the winning assignment is returned too.
    """
    if inst.n > 2:
        raise SizeError(f"grid oracle supports at most 2 relays, got {inst.n}")
    if not 0.0 < step <= 0.1:
        raise ValueError("step must lie in (0, 0.1]")
    mats = _grid_covariances(step)
    zs = [_grid_values(mats, list(r.h), r.gamma) for r in inst.relays]
    obs = [_grid_values(mats, list(r.g), r.gamma) for r in inst.relays]

    if inst.n == 1:
        ok = np.abs(zs[0] - z) <= slack
        if not ok.any():
            return (-math.inf, math.nan) if with_z else -math.inf
        idx = np.flatnonzero(ok)[np.argmax(obs[0][ok])]
        best, zbest = float(obs[0][idx]), float(zs[0][idx])
        return (best, zbest) if with_z else best

    order = np.argsort(zs[1], kind="stable")
    z2, o2 = zs[1][order], obs[1][order]
    lo = np.searchsorted(z2, z - slack - zs[0], side="left")
    hi = np.searchsorted(z2, z + slack - zs[0], side="right")
    best2 = _range_max(_range_max_table(o2), lo, hi)
    total = obs[0] + best2
    i = int(np.argmax(total))
    best = float(total[i])
    if not math.isfinite(best):
        return (-math.inf, math.nan) if with_z else -math.inf
    if not with_z:
        return best
    # recover the partner of the winning first-relay point
    window = slice(lo[i], hi[i])
    j = lo[i] + int(np.argmax(o2[window]))
    return best, float(zs[0][i] + z2[j])

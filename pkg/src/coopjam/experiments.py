"""Deterministic sweeps behind the worked example's figures, plus a sampling check.

All sweeps return lists of :class:`SweepRow`; :func:`write_rows` turns them
into CSV. Trials use per-index seed streams so a run is reproducible and
independent of ``jobs``.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .inner import z_max
from .linalg2 import Hermitian2, bilinear, herm_eig2
from .model import SystemInstance, draw_cn, from_db, redraw_eve_channels, stream_rng
from .nulling import solve_nulling
from .outer import optimize, r2_of_z

SWEEP_COLUMNS = ("x", "r1_bits", "r2_bits", "z_star", "evaluations")
INTERFERENCE_COLUMNS = ("n_samples", "bob_power", "eve_power", "bob_se", "eve_se")


@dataclass(frozen=True)
class SweepRow:
    x: float
    r1_bits: float
    r2_bits: float
    z_star: float
    evaluations: int

    def as_tuple(self):
        return (self.x, self.r1_bits, self.r2_bits, self.z_star, self.evaluations)


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def sweep_z(
    inst: SystemInstance,
    z_lo: float,
    z_hi: float,
    n_points: int,
    clamp: bool = False,
    jobs: int = 1,
    **inner_kw,
) -> list[SweepRow]:
    """``R2(z)`` on a uniform grid. ``z_star`` holds the evaluated ``z`` itself."""
    zmax = z_max(inst)
    if not 0.0 <= z_lo < z_hi <= zmax:
        raise ValueError(f"need 0 <= z_lo < z_hi <= {zmax}")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    r1 = solve_nulling(inst, clamp=clamp).r1_bits
    zs = np.linspace(z_lo, z_hi, n_points).tolist()
    r2 = _map(_R2At(inst, clamp, inner_kw), zs, jobs)
    return [SweepRow(z, r1, r, z, 1) for z, r in zip(zs, r2)]


class _R2At:
    # picklable stand-in for a closure, so process pools can run it
    def __init__(self, inst, clamp, inner_kw):
        self.inst, self.clamp, self.inner_kw = inst, clamp, inner_kw

    def __call__(self, z):
        return r2_of_z(self.inst, z, clamp=self.clamp, **self.inner_kw)


class _Optimized:
    def __init__(self, opt_kw):
        self.opt_kw = opt_kw

    def __call__(self, item) -> SweepRow:
        x, inst = item
        sol = optimize(inst, **self.opt_kw)
        return SweepRow(x, sol.r1_bits, sol.r2_bits, sol.z_star, sol.evaluations)


def sweep_gamma0(
    inst: SystemInstance,
    db_lo: float,
    db_hi: float,
    n_points: int,
    jobs: int = 1,
    **opt_kw,
) -> list[SweepRow]:
    """Nulling and optimal rates as the source SNR moves over a dB grid."""
    if not db_lo < db_hi:
        raise ValueError("db_lo must be below db_hi")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    dbs = np.linspace(db_lo, db_hi, n_points).tolist()
    items = [(db, inst.with_gamma0(from_db(db))) for db in dbs]
    return _map(_Optimized(opt_kw), items, jobs)


def random_g_trials(
    inst: SystemInstance,
    n_trials: int,
    seed: int,
    variance: float = 1.0,
    jobs: int = 1,
    **opt_kw,
) -> list[SweepRow]:
    """Redraw every relay-to-Eve channel per trial; everything else stays fixed."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    items = [(t, redraw_eve_channels(inst, stream_rng(seed, t), variance)) for t in range(n_trials)]
    return _map(_Optimized(opt_kw), items, jobs)


def nulling_gap(rows: Sequence[SweepRow]) -> tuple[float, float]:
    """Mean and max of ``r2 - r1`` over rows."""
    gaps = [r.r2_bits - r.r1_bits for r in rows]
    return float(np.mean(gaps)), float(np.max(gaps))


class InterferenceEstimate(NamedTuple):
    bob_power: float
    eve_power: float
    bob_se: float
    eve_se: float
    n_samples: int

    def as_tuple(self):
        return (self.n_samples, self.bob_power, self.eve_power, self.bob_se, self.eve_se)


def _factor(s: Hermitian2):
    # columns sqrt(lambda_k) v_k; eigenvalues at round-off level are dropped
    if s.root is not None:
        return [(1.0, s.root)]
    eig = herm_eig2(s)
    floor = 1e-12 * max(1.0, abs(s.trace))
    cols = []
    for lam, v in ((eig.lambda_hi, eig.v_hi), (eig.lambda_lo, eig.v_lo)):
        cols.append((math.sqrt(lam) if lam > floor else 0.0, v))
    return cols


def empirical_interference(
    inst: SystemInstance,
    covariances: Sequence[Hermitian2],
    n_samples: int,
    seed: int,
    chunk: int = 200_000,
) -> InterferenceEstimate:
    """Sample the relays' noise and measure the jamming power at Bob and at Eve.

    Relay ``i`` draws ``n_i ~ CN(0, S_i)``; the received jamming is
    ``sum_i sqrt(gamma_i) h_i^T n_i`` (Bob) and likewise with ``g_i`` (Eve).
    Returns the sample means of their squared magnitudes with standard errors.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    bob_coef, eve_coef = [], []
    for r, s in zip(inst.relays, covariances, strict=True):
        for scale, v in _factor(s):
            w = math.sqrt(r.gamma) * scale
            bob_coef.append(w * bilinear(r.h, v))
            eve_coef.append(w * bilinear(r.g, v))
    bob_coef = np.asarray(bob_coef)
    eve_coef = np.asarray(eve_coef)

    rng = stream_rng(seed)
    sums = np.zeros(4)  # bob, bob^2, eve, eve^2
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        w = draw_cn(rng, (m, len(bob_coef)))
        pb = np.abs(w @ bob_coef) ** 2
        pe = np.abs(w @ eve_coef) ** 2
        sums += (pb.sum(), (pb * pb).sum(), pe.sum(), (pe * pe).sum())
        done += m

    def mean_se(s1, s2):
        mean = s1 / n_samples
        if n_samples < 2:
            return mean, math.inf
        var = max(0.0, (s2 - n_samples * mean * mean) / (n_samples - 1))
        return mean, math.sqrt(var / n_samples)

    bob, bob_se = mean_se(sums[0], sums[1])
    eve, eve_se = mean_se(sums[2], sums[3])
    return InterferenceEstimate(bob, eve, bob_se, eve_se, n_samples)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{v:.12g}"


def write_rows(out, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """CSV with one header row; floats printed with 12 significant digits."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])

"""Property suites shared by the test-suite and the ``validate`` command.

Each suite returns a :class:`SuiteResult` whose ``worst`` is the most
adverse margin seen (negative means a violation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .inner import oracle_inner_grid, solve_inner, z_max
from .model import SystemInstance, paper_instance, random_instance, stream_rng
from .nulling import solve_nulling
from .outer import optimize, r2_of_z, zstar_upper_bound


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    cases: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" {self.detail}" if self.detail else ""
        return f"{status} {self.name}: cases={self.cases} worst_margin={self.worst:.3e}{extra}"


def random_instances(count: int, seed: int, n_max: int) -> list[SystemInstance]:
    """``count`` instances with relay counts cycling through ``1..n_max``."""
    return [random_instance(1 + k % n_max, seed + k) for k in range(count)]


def check_duality_gap(seeds: int = 20, z_values: int = 10, n_max: int = 10, seed: int = 0) -> SuiteResult:
    worst, cases, weak = math.inf, 0, math.inf
    for inst in random_instances(seeds, seed, n_max):
        zmax = z_max(inst)
        for k in range(z_values):
            sol = solve_inner(inst, zmax * k / (z_values - 1))
            worst = min(worst, sol.gap_tol - sol.gap)
            weak = min(weak, sol.gap + 1e-9)
            cases += 1
    return SuiteResult("duality_gap", worst >= 0 and weak >= 0, min(worst, weak), cases)


def check_concavity(tuples: int = 100, seed: int = 0, n_max: int = 6, tol: float = 1e-6) -> SuiteResult:
    rng = stream_rng(seed)
    worst = math.inf
    for k in range(tuples):
        inst = random_instance(1 + k % n_max, seed + k)
        zmax = z_max(inst)
        z1, z2 = rng.uniform(0.0, zmax, 2)
        t = float(rng.choice([0.25, 0.5, 0.75]))
        f1 = solve_inner(inst, z1).f_value
        f2 = solve_inner(inst, z2).f_value
        fm = solve_inner(inst, t * z1 + (1 - t) * z2).f_value
        worst = min(worst, fm - (t * f1 + (1 - t) * f2) + tol)
    return SuiteResult("concavity", worst >= 0, worst, tuples)


def unimodality_violation(values, tol: float = 1e-7) -> float:
    """Largest rise after the sequence has fallen by more than ``tol`` from its peak (0 if none)."""
    peak = -math.inf
    low = None
    worst = 0.0
    for v in values:
        if low is None:
            if v < peak - tol:
                low = v
            peak = max(peak, v)
        else:
            worst = max(worst, v - low)
            low = min(low, v)
    return worst


def r2_curve(inst: SystemInstance, points: int = 200) -> list[float]:
    zmax = z_max(inst)
    return [r2_of_z(inst, z) for z in np.linspace(0.0, zmax, points).tolist()]


def check_quasiconcavity(instances: int = 10, seed: int = 0, points: int = 200, tol: float = 1e-7) -> SuiteResult:
    insts = [paper_instance()] + random_instances(instances, seed, 8)
    worst = 0.0
    for inst in insts:
        worst = max(worst, unimodality_violation(r2_curve(inst, points), tol))
    margin = tol - worst
    return SuiteResult("quasi_concavity", margin >= 0, margin, len(insts))


def check_nulling_endpoint(instances: int = 30, seed: int = 0, tol: float = 1e-8) -> SuiteResult:
    insts = [paper_instance()] + random_instances(instances, seed, 8)
    worst = math.inf
    for inst in insts:
        worst = min(worst, tol - abs(r2_of_z(inst, 0.0) - solve_nulling(inst).r1_bits))
    return SuiteResult("r2_at_zero_equals_r1", worst >= 0, worst, len(insts))


def check_dominance_and_bound(instances: int = 30, seed: int = 0) -> SuiteResult:
    insts = [paper_instance()] + random_instances(instances, seed, 8)
    worst = math.inf
    for inst in insts:
        sol = optimize(inst)
        bound = zstar_upper_bound(inst, sol.r1_bits)
        worst = min(worst, sol.r2_bits - sol.r1_bits + 1e-9, bound + 1e-6 - sol.z_star)
    return SuiteResult("dominance_and_zstar_bound", worst >= 0, worst, len(insts))


ORACLE_FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)


def check_oracle(instances: int = 50, seed: int = 0, step: float = 0.05, slack_frac: float = 0.02) -> SuiteResult:
    """Compare the solver against the brute-force grid on small instances.

    Two margins must hold: the solver at the z the grid's best point actually
    attains is at least the grid value (minus 1e-6), and the grid value at the
    requested z exceeds F(z) by no more than the slack times the solver's own
    multiplier, which bounds the slope of the concave F. The largest raw
    excess of the grid over F(z) is reported in ``detail``.
    """
    worst = math.inf
    max_excess = -math.inf
    cases = 0
    for inst in random_instances(instances, seed, 2):
        zmax = z_max(inst)
        slack = slack_frac * zmax
        for frac in ORACLE_FRACTIONS:
            z = frac * zmax
            sol = solve_inner(inst, z)
            value, z_hit = oracle_inner_grid(inst, z, step, slack, with_z=True)
            cases += 1
            if not math.isfinite(value):
                continue
            at_hit = solve_inner(inst, min(max(z_hit, 0.0), zmax)).f_value
            excess = value - sol.f_value
            max_excess = max(max_excess, excess)
            worst = min(worst, at_hit - value + 1e-6, abs(sol.mu) * slack + 1e-6 - excess)
    return SuiteResult("oracle_grid", worst >= 0, worst, cases, f"max_excess={max_excess:.4f}")


def run_all(seeds: int = 20, seed: int = 0) -> list[SuiteResult]:
    """The suites run by ``validate``, scaled by ``seeds``."""
    return [
        check_duality_gap(seeds=seeds, seed=seed),
        check_concavity(tuples=5 * seeds, seed=seed),
        check_quasiconcavity(instances=max(1, seeds // 2), seed=seed),
        check_nulling_endpoint(instances=seeds, seed=seed),
        check_oracle(instances=seeds, seed=seed),
    ]

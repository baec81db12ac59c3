import csv
import io
import math

import pytest

from coopjam.experiments import (
    INTERFERENCE_COLUMNS,
    SWEEP_COLUMNS,
    empirical_interference,
    nulling_gap,
    random_g_trials,
    sweep_gamma0,
    sweep_z,
    write_rows,
)
from coopjam.inner import solve_inner, z_max
from coopjam.linalg2 import ComplexPair, Hermitian2
from coopjam.model import RelayLink, SystemInstance, random_instance
from coopjam.nulling import solve_nulling
from coopjam.outer import optimize
from coopjam.validation import unimodality_violation


def test_sweep_z_paper(paper):
    rows = sweep_z(paper, 0.0, 0.5, 51)
    assert len(rows) == 51
    assert rows[0].x == 0.0 and rows[-1].x == 0.5
    assert rows[0].r2_bits == pytest.approx(0.6332, abs=5e-4)
    assert abs(rows[0].r2_bits - rows[0].r1_bits) <= 1e-8
    best = max(rows, key=lambda r: r.r2_bits)
    assert best.r2_bits == pytest.approx(0.6439, abs=2e-3)
    assert best.x == pytest.approx(0.0091, abs=0.01)
    assert len({r.r1_bits for r in rows}) == 1
    assert unimodality_violation([r.r2_bits for r in rows]) <= 1e-7


def test_sweep_z_rejects_bad_range(paper):
    with pytest.raises(ValueError):
        sweep_z(paper, 0.5, 0.1, 10)
    with pytest.raises(ValueError):
        sweep_z(paper, 0.0, z_max(paper) + 1, 10)
    with pytest.raises(ValueError):
        sweep_z(paper, 0.0, 1.0, 1)


def test_sweep_gamma0_paper(paper):
    rows = sweep_gamma0(paper, 5.0, 10.0, 6)
    assert [r.x for r in rows] == pytest.approx([5, 6, 7, 8, 9, 10])
    assert rows[0].r1_bits == pytest.approx(0.6332, abs=5e-4)
    assert rows[0].r2_bits == pytest.approx(0.6439, abs=2e-3)
    assert all(r.r2_bits >= r.r1_bits - 1e-9 for r in rows)


def test_random_trials_deterministic(paper):
    a = random_g_trials(paper, 5, seed=9)
    b = random_g_trials(paper, 5, seed=9)
    assert a == b
    assert all(r.r2_bits >= r.r1_bits - 1e-9 for r in a)
    assert random_g_trials(paper, 5, seed=10) != a


def test_trials_independent_of_jobs(paper):
    serial = random_g_trials(paper, 4, seed=3, jobs=1)
    parallel = random_g_trials(paper, 4, seed=3, jobs=2)
    assert serial == parallel


def test_nulling_gap():
    from coopjam.experiments import SweepRow

    rows = [SweepRow(0, 1.0, 1.5, 0, 1), SweepRow(1, 1.0, 1.1, 0, 1)]
    assert nulling_gap(rows) == pytest.approx((0.3, 0.5))


def test_bob_power_vanishes_under_nulling(paper):
    covs = solve_nulling(paper).covariances
    scale = z_max(paper)
    for n in (1, 10, 1000):
        est = empirical_interference(paper, covs, n, seed=n)
        assert est.bob_power <= 1e-20 * scale


def test_eve_power_single_relay_identity():
    relay = RelayLink(ComplexPair(1 + 0j, 0j), ComplexPair(1 + 0j, 1 + 0j), 1.0)
    inst = SystemInstance(1 + 0j, 1 + 0j, 1.0, (relay,))
    est = empirical_interference(inst, [Hermitian2(0.5, 0.5, 0j)], 1_000_000, seed=1)
    assert abs(est.eve_power - 1.0) <= 3 * est.eve_se
    assert abs(est.bob_power - 0.5) <= 3 * est.bob_se


def test_eve_power_matches_optimum(paper):
    sol = optimize(paper)
    est = empirical_interference(paper, sol.covariances, 1_000_000, seed=2)
    assert abs(est.eve_power - sol.inner.f_value) <= 3 * est.eve_se
    assert abs(est.bob_power - sol.z_star) <= 3 * est.bob_se + 1e-12


def test_mixed_covariance_sampling():
    inst = random_instance(3, 77)
    sol = solve_inner(inst, 0.37 * z_max(inst))
    est = empirical_interference(inst, sol.covariances, 400_000, seed=5)
    assert abs(est.eve_power - sol.f_value) <= 3 * est.eve_se
    assert abs(est.bob_power - sol.z_achieved) <= 3 * est.bob_se


def test_sampling_deterministic(paper):
    covs = solve_nulling(paper).covariances
    assert empirical_interference(paper, covs, 1000, 4) == empirical_interference(paper, covs, 1000, 4)


def test_csv_format(paper):
    rows = sweep_z(paper, 0.0, 0.2, 3)
    buf = io.StringIO()
    write_rows(buf, SWEEP_COLUMNS, [r.as_tuple() for r in rows])
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,r1_bits,r2_bits,z_star,evaluations"
    parsed = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(parsed) == 3
    assert float(parsed[1]["x"]) == pytest.approx(0.1)
    assert parsed[0]["evaluations"] == "1"
    # 12 significant digits
    assert parsed[0]["r1_bits"] == f"{rows[0].r1_bits:.12g}"


def test_interference_csv(paper):
    est = empirical_interference(paper, solve_nulling(paper).covariances, 10, 0)
    buf = io.StringIO()
    write_rows(buf, INTERFERENCE_COLUMNS, [est.as_tuple()])
    header, row = buf.getvalue().splitlines()
    assert header == "n_samples,bob_power,eve_power,bob_se,eve_se"
    assert row.split(",")[0] == "10"
    assert all(math.isfinite(float(v)) for v in row.split(","))

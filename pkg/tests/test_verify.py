import json
import math

import numpy as np
import pytest

from sysgeo.generators import gen_flat_torus, perturb_metric
from sysgeo.verify import (
    HOLDS,
    NA,
    SOFT,
    VIOLATED,
    VerificationReport,
    pullback_monotonicity_test,
    syscat_bounds,
    verify_inequality12,
)


def make_report(**kw):
    base = dict(mesh="m", dim=2, b1=2, vol=1.0, stsys1=1.0, sys_codim1=1.0,
                sys_codim1_exact=True, sweep_min=1.0, lambda_product=1.0,
                gamma_prime=2.0 / math.sqrt(3.0), ratio=1.0)
    base.update(kw)
    return VerificationReport(**base)


def test_verdicts_all_hold():
    rep = make_report()
    v = rep.evaluate()
    assert v["chain-slice"] == HOLDS
    assert v["chain-ceiling"] == HOLDS
    assert v["hypersurface-below-sweep"] == HOLDS
    assert v["main-inequality"] == HOLDS
    assert rep.worst == HOLDS


def test_verdict_violation_detected():
    rep = make_report(sys_codim1=5.0, sweep_min=1.0)
    v = rep.evaluate()
    assert v["hypersurface-below-sweep"] == VIOLATED
    assert rep.worst == VIOLATED


def test_verdict_soft_when_not_certified():
    rep = make_report(sys_codim1_exact=False)
    v = rep.evaluate()
    assert v["hypersurface-below-sweep"] == SOFT
    assert v["main-inequality"] == SOFT
    assert rep.worst == SOFT


def test_verdict_na_without_classes():
    rep = make_report(b1=0)
    assert rep.evaluate() == {"main-inequality": NA}
    assert rep.worst == NA


def test_slack_tolerates_roundoff():
    rep = make_report(lambda_product=2.0 / math.sqrt(3.0) + 1e-12)
    assert rep.evaluate()["chain-ceiling"] == HOLDS


def test_report_json_roundtrip():
    rep = make_report()
    text = rep.to_json()
    d = json.loads(text)
    assert d["schema_version"] == rep.schema_version
    back = VerificationReport.from_json(text)
    assert back.to_json() == text


def test_verify_unit_torus(grid_t2):
    X, g = grid_t2
    rep = verify_inequality12(X, g, name="t2", exact_timeout=30,
                              samples=2000, seed=0)
    assert rep.worst == HOLDS
    assert rep.b1 == 2
    assert rep.gamma_prime == pytest.approx(2.0 / math.sqrt(3.0))
    assert rep.ratio == pytest.approx(1.0, rel=1e-6)
    assert rep.sys_codim1_exact


def test_verify_reproducible(grid_t2):
    X, g = grid_t2
    a = verify_inequality12(X, g, name="t2", exact_timeout=30,
                            samples=500, seed=7).to_json()
    b = verify_inequality12(X, g, name="t2", exact_timeout=30,
                            samples=500, seed=7).to_json()
    assert a == b


def test_verify_no_classes(sphere_s3):
    X, g = sphere_s3
    rep = verify_inequality12(X, g, name="s3", exact_timeout=5)
    assert rep.b1 == 0
    assert rep.worst == NA


def test_syscat_bounds_torus(grid_t2):
    X, g = grid_t2
    out = syscat_bounds(X, g)
    assert out["lower"] == 2
    assert out["upper"] == 2
    assert out["partition"] == (1, 1)
    assert not out["exact"]
    assert out["observed_constant"] == pytest.approx(1.0, rel=1e-6)


def test_syscat_bounds_sphere(sphere_s3):
    X, g = sphere_s3
    out = syscat_bounds(X)
    assert out["lower"] == 1
    assert out["upper"] == 3
    assert out["partition"] is None


def collapse_map(s_fine, s_coarse):
    k = s_fine // s_coarse
    return {i * s_fine + j: (i // k) * s_coarse + (j // k)
            for i in range(s_fine) for j in range(s_fine)}


def test_pullback_monotonicity_collapse():
    Xf, _, _ = gen_flat_torus(np.eye(2), 6)
    Yc, gY, _ = gen_flat_torus(np.eye(2), 3)
    out = pullback_monotonicity_test(collapse_map(6, 3), Xf, Yc, gY)
    assert out["ok"]
    for name, (got, ref, ok) in out["checks"].items():
        assert ok, name


def test_pullback_monotonicity_random_targets():
    Xf, _, _ = gen_flat_torus(np.eye(2), 6)
    Yc, gY, _ = gen_flat_torus(np.eye(2), 3)
    f = collapse_map(6, 3)
    for seed in range(5):
        gp = perturb_metric(gY, 0.2, seed=seed)
        out = pullback_monotonicity_test(f, Xf, Yc, gp)
        assert out["ok"], (seed, out["checks"])

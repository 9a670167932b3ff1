"""Bottleneck and Wasserstein diagram distances against brute force."""

import math

import numpy as np
import pytest

from phom import (
    ParameterError,
    PersistenceDiagram,
    bottleneck_distance,
    matching_cost,
    wasserstein_distance,
)
from oracles import brute_bottleneck, brute_wasserstein


def diag(points):
    return PersistenceDiagram(points=sorted(points))


def test_single_point_vs_empty():
    d1 = diag([(1, 0.0, 2.0)])
    d2 = diag([])
    b = bottleneck_distance(d1, d2, dim=1)
    assert b.value == pytest.approx(1.0)  # persistence/2
    assert b.matching == [(0, None)]
    w = wasserstein_distance(d1, d2, dim=1, p=1.0)
    assert w.value == pytest.approx(1.0)


def test_shifted_death():
    d1 = diag([(1, 0.0, 2.0)])
    d2 = diag([(1, 0.0, 3.0)])
    b = bottleneck_distance(d1, d2, dim=1)
    assert b.value == pytest.approx(1.0)
    assert b.matching == [(0, 0)]
    w2 = wasserstein_distance(d1, d2, dim=1, p=2.0)
    assert w2.value == pytest.approx(1.0)


def test_diagonal_cheaper_than_pairing():
    # Two low-persistence points far apart: drop both to the diagonal.
    d1 = diag([(1, 0.0, 0.2)])
    d2 = diag([(1, 5.0, 5.2)])
    b = bottleneck_distance(d1, d2, dim=1)
    assert b.value == pytest.approx(0.1)
    assert set(b.matching) == {(0, None), (None, 0)}


def test_identity_and_symmetry():
    rng = np.random.default_rng(0)
    for _ in range(10):
        pts = []
        for _ in range(int(rng.integers(0, 5))):
            b = float(rng.uniform(0, 2))
            pts.append((1, b, b + float(rng.uniform(0.01, 2))))
        d1 = diag(pts)
        assert bottleneck_distance(d1, d1, dim=1).value == 0.0
        assert wasserstein_distance(d1, d1, dim=1).value == pytest.approx(0.0)
        pts2 = []
        for _ in range(int(rng.integers(0, 5))):
            b = float(rng.uniform(0, 2))
            pts2.append((1, b, b + float(rng.uniform(0.01, 2))))
        d2 = diag(pts2)
        assert bottleneck_distance(d1, d2, dim=1).value == \
            pytest.approx(bottleneck_distance(d2, d1, dim=1).value)
        assert wasserstein_distance(d1, d2, dim=1, p=2.0).value == \
            pytest.approx(wasserstein_distance(d2, d1, dim=1, p=2.0).value)


def test_dimension_filter():
    d1 = diag([(0, 0.0, 1.0), (1, 0.0, 4.0)])
    d2 = diag([(0, 0.0, 1.0)])
    assert bottleneck_distance(d1, d2, dim=0).value == 0.0
    assert bottleneck_distance(d1, d2, dim=1).value == pytest.approx(2.0)


def test_essential_count_mismatch_is_inf():
    d1 = diag([(1, 0.5, math.inf)])
    d2 = diag([])
    assert bottleneck_distance(d1, d2, dim=1).value == math.inf
    assert wasserstein_distance(d1, d2, dim=1).value == math.inf


def test_essential_birth_gap():
    d1 = diag([(0, 0.0, math.inf), (0, 1.0, math.inf)])
    d2 = diag([(0, 0.2, math.inf), (0, 1.5, math.inf)])
    b = bottleneck_distance(d1, d2, dim=0)
    # Sorted births matched in order: gaps 0.2 and 0.5.
    assert b.value == pytest.approx(0.5)
    assert len(b.essential_matching) == 2
    w1 = wasserstein_distance(d1, d2, dim=0, p=1.0)
    assert w1.value == pytest.approx(0.7)


def test_mixed_finite_and_essential():
    d1 = diag([(1, 0.0, 2.0), (1, 0.5, math.inf)])
    d2 = diag([(1, 0.0, 2.6), (1, 0.9, math.inf)])
    b = bottleneck_distance(d1, d2, dim=1)
    assert b.value == pytest.approx(0.6)
    w2 = wasserstein_distance(d1, d2, dim=1, p=2.0)
    assert w2.value == pytest.approx(math.hypot(0.6, 0.4))


def test_wasserstein_order_guard():
    d = diag([])
    with pytest.raises(ParameterError):
        wasserstein_distance(d, d, dim=1, p=0.5)


def random_diagram(rng, max_pts=6, dim=1):
    pts = []
    for _ in range(int(rng.integers(0, max_pts + 1))):
        b = round(float(rng.uniform(0, 2)), 3)
        pts.append((dim, b, b + round(float(rng.uniform(0, 2)), 3) + 1e-3))
    for _ in range(int(rng.integers(0, 3))):
        if rng.random() < 0.3:
            pts.append((dim, round(float(rng.uniform(0, 2)), 3), math.inf))
    return diag(pts)


def split(d, dim=1):
    fin = [(b, dth) for k, b, dth in d.points
           if k == dim and not math.isinf(dth)]
    ess = sorted(b for k, b, dth in d.points
                 if k == dim and math.isinf(dth))
    return fin, ess


def test_matches_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(200):
        d1 = random_diagram(rng, max_pts=4)
        d2 = random_diagram(rng, max_pts=4)
        f1, e1 = split(d1)
        f2, e2 = split(d2)
        got_b = bottleneck_distance(d1, d2, dim=1).value
        want_b = brute_bottleneck(f1, f2, e1, e2)
        if math.isinf(want_b):
            assert math.isinf(got_b)
        else:
            assert got_b == pytest.approx(want_b, abs=1e-9)
        for p in (1.0, 2.0):
            got_w = wasserstein_distance(d1, d2, dim=1, p=p).value
            want_w = brute_wasserstein(f1, f2, e1, e2, p)
            if math.isinf(want_w):
                assert math.isinf(got_w)
            else:
                assert got_w == pytest.approx(want_w, abs=1e-9)


def test_matching_reproduces_value():
    rng = np.random.default_rng(23)
    for _ in range(100):
        d1 = random_diagram(rng)
        d2 = random_diagram(rng)
        for rep in (bottleneck_distance(d1, d2, dim=1),
                    wasserstein_distance(d1, d2, dim=1, p=1.0),
                    wasserstein_distance(d1, d2, dim=1, p=2.0)):
            if math.isinf(rep.value):
                continue
            assert matching_cost(rep, d1, d2) == \
                pytest.approx(rep.value, abs=1e-9)


def test_matching_covers_all_points():
    rng = np.random.default_rng(29)
    for _ in range(50):
        d1 = random_diagram(rng)
        d2 = random_diagram(rng)
        rep = bottleneck_distance(d1, d2, dim=1)
        f1, _ = split(d1)
        f2, _ = split(d2)
        lefts = [l for l, _ in rep.matching if l is not None]
        rights = [r for _, r in rep.matching if r is not None]
        assert sorted(lefts) == list(range(len(f1)))
        assert sorted(rights) == list(range(len(f2)))


def test_report_fields():
    d1 = diag([(1, 0.0, 2.0)])
    d2 = diag([(1, 0.0, 3.0)])
    b = bottleneck_distance(d1, d2, dim=1)
    assert b.metric == "bottleneck"
    assert b.dim == 1
    assert b.p is None
    w = wasserstein_distance(d1, d2, dim=1, p=2.0)
    assert w.metric == "wasserstein"
    assert w.p == 2.0

import math

import pytest
from hypothesis import given, settings, strategies as st

from mrmp.geometry import joint_config
from mrmp.metrics import ALL_KINDS, Metric, MetricKind, centroid_dist
from mrmp.nn import AlternatingStore, NnStore
from oracles import linear_scan_nearest

coord = st.floats(-15, 15)


@st.composite
def item_sets(draw, max_items=25, max_m=4):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_items))

    def config():
        return joint_config([[draw(coord), draw(coord)] for _ in range(m)])

    return [config() for _ in range(n)], config()


def test_insert_then_nearest_self(square20=None):
    store = NnStore(Metric(MetricKind.SUM_L2))
    U = joint_config([[1, 2], [3, 4]])
    store.insert(U, 0)
    assert store.nearest(U) == (0, 0.0)
    assert len(store) == 1


def test_sizes_and_duplicate_ids():
    store = NnStore(Metric(MetricKind.SUM_L2))
    for k in range(5):
        store.insert(joint_config([[k, 0]]), k)
    assert len(store) == 5
    with pytest.raises(ValueError):
        store.insert(joint_config([[9, 9]]), 3)


def test_simple_ordering():
    store = NnStore(Metric(MetricKind.SUM_L2))
    for k, x in enumerate([5.0, 3.0, 7.0]):
        store.insert(joint_config([[x, 0]]), k)
    item, dist = store.nearest(joint_config([[0, 0]]))
    assert item == 1 and abs(dist - 3.0) < 1e-12


def test_exact_tie_breaks_to_lower_id():
    store = NnStore(Metric(MetricKind.SUM_L2))
    store.insert(joint_config([[2, 0]]), 7)
    store.insert(joint_config([[-2, 0]]), 3)
    item, _ = store.nearest(joint_config([[0, 0]]))
    assert item == 3


def test_empty_store_raises():
    with pytest.raises(LookupError):
        NnStore(Metric(MetricKind.SUM_L2)).nearest(joint_config([[0, 0]]))


@pytest.mark.parametrize("kind", ALL_KINDS)
@given(data=item_sets())
@settings(max_examples=40, deadline=None)
def test_agrees_with_linear_scan(kind, data):
    items, query = data
    metric = Metric(kind)
    store = NnStore(metric)
    for i, config in enumerate(items):
        store.insert(config, i)
    got_id, got_d = store.nearest(query)
    want_id, want_d = linear_scan_nearest(metric, list(enumerate(items)), query)
    assert got_id == want_id
    assert got_d == want_d


@given(data=item_sets(max_items=15, max_m=3))
@settings(max_examples=30, deadline=None)
def test_monotone_transform_keeps_argmin(data):
    items, query = data
    dists = [centroid_dist(c, query) for c in items]
    ranked = sorted(range(len(items)), key=lambda i: (dists[i], i))
    if len(ranked) > 1 and math.isclose(dists[ranked[0]], dists[ranked[1]], rel_tol=1e-9, abs_tol=1e-12):
        return  # ties excluded from the property
    store = NnStore(Metric(MetricKind.CTD))
    for i, c in enumerate(items):
        store.insert(c, i)
    got_id, _ = store.nearest(query)
    sqrt_ranked = min(range(len(items)), key=lambda i: (math.sqrt(dists[i]), i))
    assert got_id == sqrt_ranked == ranked[0]


def test_alternating_round_robin_and_equivalence():
    metrics = [Metric(MetricKind.EPS2), Metric(MetricKind.SUM_L2)]
    alt = AlternatingStore(metrics)
    single = NnStore(Metric(MetricKind.EPS2))
    items = [joint_config([[x, 0.0], [0.0, x]]) for x in (1.0, 4.0, -3.0)]
    for i, c in enumerate(items):
        alt.insert(c, i)
        single.insert(c, i)
    assert all(len(s) == 3 for s in alt.stores)
    q = joint_config([[0.5, 0], [0, 0.5]])
    assert alt.active_metric.kind is MetricKind.EPS2
    first = alt.nearest(q)
    assert alt.active_metric.kind is MetricKind.SUM_L2
    second = alt.nearest(q)
    assert alt.active_metric.kind is MetricKind.EPS2  # wrapped around
    assert first == single.nearest(q)
    ref = NnStore(Metric(MetricKind.SUM_L2))
    for i, c in enumerate(items):
        ref.insert(c, i)
    assert second == ref.nearest(q)


@given(data=item_sets(max_items=12, max_m=3))
@settings(max_examples=25, deadline=None)
def test_single_metric_alternation_identical(data):
    items, query = data
    metric = Metric(MetricKind.MAX_L2)
    alt = AlternatingStore([metric])
    plain = NnStore(metric)
    for i, c in enumerate(items):
        alt.insert(c, i)
        plain.insert(c, i)
    for _ in range(3):
        assert alt.nearest(query) == plain.nearest(query)


def test_alternating_duplicate_id_rejected():
    alt = AlternatingStore([Metric(MetricKind.SUM_L2), Metric(MetricKind.CTD)])
    alt.insert(joint_config([[0, 0]]), 0)
    with pytest.raises(ValueError):
        alt.insert(joint_config([[1, 1]]), 0)
    assert all(len(s) == 1 for s in alt.stores)

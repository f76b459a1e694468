import json
import math

import pytest

import wmdecomp as wd

R = 1.0 / math.sqrt(2.0)


@pytest.fixture
def store():
    return wd.EmbeddingStore(["u", "v", "w"], [[1, 0], [0, 1], [R, R]])


def test_store(store):
    assert len(store) == 3
    assert store.dim == 2
    assert "w" in store and "x" not in store
    assert store.cost("u", "v") == pytest.approx(1.0)
    with pytest.raises(wd.Error):
        wd.EmbeddingStore(["a", "b"], [[1, 0], [1]])


def test_wmd_two_word_example(store):
    sa, sb = wd.vectorize([["u", "v"]], [["u", "w"]], store)
    plan = wd.wmd(sa.vectors[0], sb.vectors[0], store)
    assert plan.total_cost == pytest.approx(0.5 * (1 - R), abs=1e-12)
    assert sum(map(sum, plan.flows)) == pytest.approx(1.0)


def test_matching_and_stats():
    assert wd.gale_shapley([[0.1, 0.2], [0.1, 0.3]]) == [(0, 0), (1, 1)]
    assert wd.random_pairs(5, 5, 4, 9) == wd.random_pairs(5, 5, 4, 9)
    t, dof, p = wd.welch_t_test([1, 2, 3], [2, 3, 4])
    assert t == pytest.approx(-1.224744871391589)
    assert dof == pytest.approx(4.0)
    assert p == pytest.approx(0.2878641347266908, rel=1e-9)


def test_kmeans():
    labels, centroids, inertia = wd.kmeans([[0.0], [0.1], [10.0], [10.1]], 2, seed=1)
    assert labels[0] == labels[1] != labels[2] == labels[3]
    assert inertia == pytest.approx(0.01)
    assert wd.silhouette([[0.0], [0.1], [10.0], [10.1]], labels) == pytest.approx(0.99, abs=1e-3)


def test_compare_round_trip(store):
    docs_a = [["u", "v"], ["v", "v", "w"], ["u"]]
    docs_b = [["w", "u"], ["v"], ["u", "w", "w"]]
    sa, sb = wd.vectorize(docs_a, docs_b, store, weighting="tfidf")
    report = wd.compare(sa, sb, store, seed=3, clusters=2)
    assert len(report.pairs) == 3
    assert sum(report.word_table("a->b", differenced=False).values()) == pytest.approx(
        sum(report.distances), rel=1e-9)
    assert report.cluster_table("a->b") is not None
    parsed = wd.report_dict(report)
    assert parsed["schema_version"] == wd.SCHEMA_VERSION
    again = wd.report_from_json(report.to_json())
    assert again.to_json() == report.to_json()
    assert wd.compare(sa, sb, store, seed=3, clusters=2).to_json() == report.to_json()
    changes = wd.cost_change(report, again)
    assert all(c["change"] == 0.0 for c in changes)


def test_rwmd_bounds_wmd(store):
    sa, sb = wd.vectorize([["u", "v"], ["w"]], [["u", "w"], ["v"]], store)
    bounds = wd.rwmd_matrix(sa, sb, store, "symmetric-max")
    for i, a in enumerate(sa.vectors):
        for j, b in enumerate(sb.vectors):
            assert bounds[i][j] <= wd.wmd(a, b, store).total_cost + 1e-9

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from itn_ensemble import (
    CountryRecord,
    DataError,
    TradeSnapshot,
    binarize,
    relative_quantities,
    strengths,
    symmetrize_flows,
)
from conftest import make_snapshot

nan = np.nan


class TestSymmetrize:
    def test_identical_reports(self):
        ex = np.array([[0, 10.0], [0, 0]])
        assert symmetrize_flows(ex, ex)[0, 1] == 10

    def test_mean_of_reports(self):
        ex = np.array([[0, 8.0], [0, 0]])
        im = np.array([[0, 12.0], [0, 0]])
        assert symmetrize_flows(ex, im)[0, 1] == 10

    def test_single_report_fallback(self):
        # hand-built: 0->1 only exporter reports, 1->0 only importer reports,
        # 0->2 nobody reports, 2->1 both report
        ex = np.array([[0, 8.0, nan], [nan, 0, 0], [3.0, 4.0, 0]])
        im = np.array([[0, nan, nan], [5.0, 0, 1.0], [nan, 6.0, 0]])
        expected = np.array([[0, 8.0, 0], [5.0, 0, 0.5], [3.0, 5.0, 0]])
        np.testing.assert_array_equal(symmetrize_flows(ex, im), expected)

    @pytest.mark.parametrize("ex,im", [
        (np.zeros((2, 2)), np.zeros((3, 3))),
        (np.array([[0, -1.0], [0, 0]]), np.zeros((2, 2))),
        (np.array([[1.0, 0], [0, 0]]), np.zeros((2, 2))),
    ])
    def test_rejects(self, ex, im):
        with pytest.raises(DataError):
            symmetrize_flows(ex, im)


class TestRelative:
    def test_two_symmetric(self):
        r = relative_quantities(make_snapshot([[0, 5], [5, 0]], gdp=[1, 1]))
        np.testing.assert_array_equal(r.xi, [0.5, 0.5])
        assert r.v[0, 1] == r.v[1, 0] == 0.5
        assert r.T == 10 and r.X == 2

    def test_direct_ratio(self):
        r = relative_quantities(make_snapshot([[0, 1], [2, 0]], gdp=[3, 1]))
        np.testing.assert_array_equal(r.xi, [0.75, 0.25])

    def test_invariants_four_countries(self, snapshot4):
        r = relative_quantities(snapshot4)
        w, x = snapshot4.weights, snapshot4.gdp
        total_w = sum(w[i, j] for i in range(4) for j in range(4))
        total_x = sum(x)
        assert r.T == pytest.approx(total_w, rel=1e-15)
        assert r.X == pytest.approx(total_x, rel=1e-15)
        assert abs(sum(r.xi) - 1) < 1e-12
        assert abs(r.v.sum() - 1) < 1e-12
        assert np.all(np.diag(r.v) == 0)
        np.testing.assert_array_equal(r.sigma_out, r.v.sum(axis=1))
        np.testing.assert_array_equal(r.sigma_in, r.v.sum(axis=0))

    def test_roundtrip(self, snapshot4):
        r = relative_quantities(snapshot4)
        np.testing.assert_allclose(r.v * r.T, snapshot4.weights, rtol=1e-12)
        np.testing.assert_allclose(r.xi * r.X, snapshot4.gdp, rtol=1e-12)

    def test_zero_trade_rejected(self):
        with pytest.raises(DataError):
            relative_quantities(make_snapshot(np.zeros((2, 2))))


class TestStrengths:
    def test_single_edges(self):
        s_out, s_in = strengths(make_snapshot([[0, 7], [3, 0]]))
        np.testing.assert_array_equal(s_out, [7, 3])
        np.testing.assert_array_equal(s_in, [3, 7])

    def test_zero(self):
        s_out, s_in = strengths(make_snapshot(np.zeros((3, 3))))
        assert not s_out.any() and not s_in.any()

    def test_totals(self, rng):
        w = rng.exponential(size=(5, 5))
        np.fill_diagonal(w, 0)
        s_out, s_in = strengths(make_snapshot(w))
        total = 0.0
        for row in w:
            for v in row:
                total += v
        assert s_out.sum() == pytest.approx(total, rel=1e-14)
        assert s_in.sum() == pytest.approx(total, rel=1e-14)


class TestBinarize:
    def test_sum_against_threshold(self):
        g = binarize(make_snapshot([[0, 0.6], [0.5, 0]]), 1.0)
        assert g.adjacency[0, 1] and g.adjacency[1, 0]

    def test_zero_weights(self):
        g = binarize(make_snapshot(np.zeros((3, 3))), 0.0)
        assert g.L == 0

    def test_complete(self, rng):
        n = 7
        w = rng.uniform(0.1, 1, size=(n, n))
        np.fill_diagonal(w, 0)
        g = binarize(make_snapshot(w), 0.0)
        count = sum(1 for i in range(n) for j in range(i + 1, n) if g.adjacency[i, j])
        assert g.L == count == n * (n - 1) // 2
        assert g.threshold == 0.0

    def test_negative_threshold(self, snapshot4):
        with pytest.raises(DataError):
            binarize(snapshot4, -1)


class TestTypes:
    def test_zero_gdp_rejected_in_snapshot(self):
        with pytest.raises(DataError):
            TradeSnapshot(2000, [CountryRecord("A", 2000, 0.0), CountryRecord("B", 2000, 1.0)], np.zeros((2, 2)))

    def test_duplicate_codes(self):
        with pytest.raises(DataError):
            make_snapshot(np.zeros((2, 2)), codes=["A", "A"])

    def test_self_trade(self):
        with pytest.raises(DataError):
            make_snapshot([[1, 0], [0, 0]])

    def test_weights_immutable(self, snapshot4):
        with pytest.raises(ValueError):
            snapshot4.weights[0, 1] = 3


matrices = st.integers(2, 6).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(0, 1e6, allow_subnormal=False))
)


@settings(max_examples=60, deadline=None)
@given(matrices, st.floats(0, 1e6))
def test_binarize_always_symmetric(w, tau):
    np.fill_diagonal(w, 0)
    g = binarize(make_snapshot(w), tau)
    assert np.array_equal(g.adjacency, g.adjacency.T)
    assert not np.diag(g.adjacency).any()
    assert g.L == g.degrees.sum() // 2


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_strength_sums(w):
    np.fill_diagonal(w, 0)
    s_out, s_in = strengths(make_snapshot(w))
    assert s_out.sum() == pytest.approx(w.sum(), rel=1e-12, abs=1e-9)
    assert s_in.sum() == pytest.approx(w.sum(), rel=1e-12, abs=1e-9)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dephase_lab.interaction import distinct_couplings, final_entropies
from dephase_lab.measures import global_entanglement_batch
from dephase_lab.sampling import haar_batch, make_rng
from dephase_lab.stats import (
    Line,
    Moments,
    binned_means,
    entanglement_fraction,
    max_angle_bound,
    pearson,
    summarize,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def paired(min_size=2, max_size=60):
    return st.integers(min_size, max_size).flatmap(
        lambda k: st.tuples(st.lists(finite, min_size=k, max_size=k), st.lists(finite, min_size=k, max_size=k))
    )


class TestMoments:
    def test_matches_numpy(self):
        rng = np.random.default_rng(1)
        q, s = rng.normal(size=500), rng.normal(size=500)
        m = Moments.from_arrays(q, s)
        assert m.mean_q == pytest.approx(q.mean())
        assert m.var_s == pytest.approx(s.var())
        assert m.pearson == pytest.approx(np.corrcoef(q, s)[0, 1])

    @given(paired(min_size=3), st.integers(1, 100))
    @settings(max_examples=60)
    def test_merge_matches_whole(self, data, cut_seed):
        q, s = np.array(data[0]), np.array(data[1])
        cut = cut_seed % (len(q) - 1) + 1
        whole = Moments.from_arrays(q, s)
        merged = Moments.from_arrays(q[:cut], s[:cut]).merge(Moments.from_arrays(q[cut:], s[cut:]))
        assert merged.count == whole.count
        assert merged.mean_q == pytest.approx(whole.mean_q, rel=1e-9, abs=1e-9)
        assert merged.m2_s == pytest.approx(whole.m2_s, rel=1e-8, abs=1e-6)
        assert merged.c_qs == pytest.approx(whole.c_qs, rel=1e-8, abs=1e-6)

    def test_merge_order_independent(self):
        rng = np.random.default_rng(2)
        parts = [Moments.from_arrays(rng.normal(size=k), rng.normal(size=k)) for k in (3, 50, 7, 20)]
        a, b = Moments(), Moments()
        for p in parts:
            a = a.merge(p)
        for p in reversed(parts):
            b = b.merge(p)
        assert a.count == b.count
        for field in ("mean_q", "mean_s", "m2_q", "m2_s", "c_qs"):
            assert getattr(a, field) == pytest.approx(getattr(b, field), rel=1e-12)

    def test_empty(self):
        m = Moments.from_arrays([], [])
        assert m.count == 0 and math.isnan(m.var_q) and m.pearson is None


class TestPearson:
    def test_perfect_positive(self):
        q = np.linspace(0, 1, 20)
        assert pearson(q, 2 * q + 1) == pytest.approx(1.0)

    def test_perfect_negative(self):
        q = np.linspace(0, 1, 20)
        assert pearson(q, -q) == pytest.approx(-1.0)

    def test_constant_is_absent(self):
        assert pearson(np.zeros(5), np.arange(5.0)) is None

    @given(paired(min_size=3), st.floats(0.1, 10), finite, st.floats(0.1, 10), finite)
    @settings(max_examples=60)
    def test_affine_invariance(self, data, a, b, c, d):
        q, s = np.array(data[0]), np.array(data[1])
        r = pearson(q, s)
        if r is None or np.ptp(q) < 1e-3 or np.ptp(s) < 1e-3:
            return
        assert pearson(a * q + b, c * s + d) == pytest.approx(r, abs=1e-6)
        assert -1.0 <= r <= 1.0

    def test_three_qubit_haar(self):
        batch = haar_batch(3, 100_000, make_rng(7))
        r = pearson(global_entanglement_batch(batch), final_entropies(batch, distinct_couplings(3)))
        assert r == pytest.approx(0.30, abs=0.02)


class TestSummarize:
    def test_anchored_two_qubits(self):
        # a two-point ensemble whose mean is (0.40, 1.56)
        s = summarize([0.3, 0.5], [1.50, 1.62], separable_mean_s=1.44, q_max=1.0)
        assert s.line.slope == pytest.approx(0.30)
        assert s.line.s_at_qmax == pytest.approx(1.74)
        assert s.line.angle_degrees == pytest.approx(16.7, abs=0.05)
        assert s.entanglement_fraction == pytest.approx(0.077, abs=0.001)

    def test_anchored_six_qubits(self):
        s = summarize([2.80, 2.92], [5.35, 5.45], separable_mean_s=4.33, q_max=3.0)
        assert s.line.slope == pytest.approx((5.40 - 4.33) / 2.86)
        assert s.line.s_at_qmax == pytest.approx(5.45, abs=0.005)

    def test_identical_samples(self):
        s = summarize([0.1] * 4, [0.7] * 4)
        assert s.var_q == pytest.approx(0.0, abs=1e-30) and s.var_s == pytest.approx(0.0, abs=1e-30)
        assert s.pearson is None
        assert s.line is None

    def test_degenerate_mean_q(self):
        s = summarize([0.0, 0.0, 0.0], [1.0, 1.2, 1.4], separable_mean_s=1.0)
        assert s.line is None

    def test_least_squares_without_anchor(self):
        q = np.linspace(0, 1, 50)
        s = summarize(q, 3 * q - 1)
        assert s.line.kind == "least-squares"
        assert s.line.slope == pytest.approx(3.0)
        assert s.line.intercept == pytest.approx(-1.0)

    def test_to_dict_has_fields(self):
        d = summarize(np.linspace(0, 1, 10), np.linspace(1, 2, 10), 0.9, min_count=1).to_dict()
        for key in ("count", "mean_q", "mean_s", "var_q", "var_s", "pearson", "line", "binned_curve",
                    "entanglement_fraction"):
            assert key in d
        assert d["line"]["angle_degrees"] == pytest.approx(math.degrees(math.atan(d["line"]["slope"])))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            summarize([0.0, math.nan], [1.0, 1.0])

    def test_line_geometry(self):
        line = Line(1.0, 1.0, 2.0)
        assert line.angle_degrees == pytest.approx(45.0)
        assert line.s_at_qmax == 3.0


class TestBinned:
    def test_single_bin(self):
        rng = np.random.default_rng(3)
        q, s = rng.uniform(0, 0.04, 300), rng.normal(size=300)
        bins = binned_means(q, s, bin_width=0.05, min_count=1)
        assert len(bins) == 1
        assert bins[0][1] == pytest.approx(s.mean())
        assert bins[0][2] == 300

    def test_linear_data(self):
        q = np.linspace(0, 1, 10_001)
        s = 2 * q + 0.5
        for center, mean, _ in binned_means(q, s, bin_width=0.1, min_count=1):
            assert abs(mean - (2 * center + 0.5)) <= 0.1 * 2 / 2 + 1e-12

    def test_min_count_filters(self):
        bins = binned_means([0.01, 0.02, 0.5], [1, 1, 1], bin_width=0.1, min_count=2)
        assert [b[2] for b in bins] == [2]

    def test_haar_curve_monotone(self):
        batch = haar_batch(2, 100_000, make_rng(7))
        bins = binned_means(global_entanglement_batch(batch), final_entropies(batch, distinct_couplings(2)),
                            bin_width=0.1, min_count=1000)
        means = [m for _, m, _ in bins]
        assert len(means) >= 5
        assert all(b >= a for a, b in zip(means, means[1:]))

    def test_bad_width(self):
        with pytest.raises(ValueError):
            binned_means([0.1], [0.1], bin_width=0)


class TestFractionAndBound:
    def test_fraction(self):
        assert entanglement_fraction(1.56, 1.44) == pytest.approx(0.077, abs=0.0005)
        assert entanglement_fraction(5.40, 4.33) == pytest.approx(0.198, abs=0.0005)
        assert entanglement_fraction(2.0, 2.0) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 6, 64])
    def test_bound(self, n):
        assert max_angle_bound(n) == pytest.approx(29.25, abs=0.01)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randcycles import (
    GOLDEN_RATIO,
    ParameterError,
    SampleWord,
    build_beta_system,
    digit_limit_targets,
    digit_sequence,
    digit_stats,
    enumerate_cycles,
    golden_density,
    q_closed_form_golden,
    q_from_density,
    ulam_stationary,
    weighted_digit_averages,
)
from randcycles.beta import greedy_orbit_of_one, reconstruct

B = GOLDEN_RATIO


@pytest.fixture(scope="module")
def golden():
    return build_beta_system(B, p=(0.7, 0.3))


# ------------------------------------------------------------------- builder


def test_golden_partition_and_orbit(golden):
    assert golden.floor == 1
    pts = golden.system.maps[0].partition_points()
    assert len(pts) == 4
    assert pts == pytest.approx([0.0, 1 / B, 1.0, B], abs=1e-12)
    orbit = golden.greedy_orbit_of_1
    assert len(orbit) == 3
    assert orbit[0] == 1.0
    assert orbit[1] == pytest.approx(1 / B, abs=1e-12)
    assert orbit[2] == 0.0


def test_golden_branches_all_slope_beta(golden):
    for m in golden.system.maps:
        assert len(m.branches) == 3
        for b in m.branches:
            assert b.beta == pytest.approx(B, abs=1e-15)


def test_silver_ratio_builds():
    bs = build_beta_system(1 + math.sqrt(2.0))
    assert bs.floor == 2
    assert len(bs.greedy_orbit_of_1) == 3  # 1 -> beta-2 -> 0


def test_sqrt2_expansion_not_finite_at_small_depth():
    with pytest.raises(ParameterError, match="not finite"):
        greedy_orbit_of_one(math.sqrt(2.0), 3)
    with pytest.raises(ParameterError, match="not finite"):
        build_beta_system(math.sqrt(2.0), depth_bound=3)


def test_integer_beta_rejected():
    with pytest.raises(ParameterError):
        build_beta_system(2.0)


def test_lazy_is_reflection_conjugate(golden):
    from randcycles.maps import step_many

    hi = golden.ambient.hi
    grid = np.linspace(1e-5, hi - 1e-5, 401)
    grid = np.array(
        [g for g in grid if min(abs(g - q) for q in (0, 1 / B, 1, B)) > 1e-4]
    )
    lazy = step_many(golden.system.maps[1], grid)
    conj = hi - step_many(golden.system.maps[0], hi - grid)
    assert np.abs(lazy - conj).max() < 1e-10


# -------------------------------------------------------------------- digits


def test_digit_sequence_greedy_at_inverse_golden(golden):
    # greedy digits of 1/b are (1, 0, 0, ...): the first step lands on 0
    assert golden.digit_value(1, 1 / B) == 1
    assert golden.digit_value(1, golden.system.maps[0].evaluate(1 / B)[0]) == 0
    assert golden.digit_value(1, 0.0) == 0


def test_digit_sequence_of_neutral_greedy_cycle(golden):
    cs = enumerate_cycles(golden.system, SampleWord.constant(1, 5))
    zero = [c for c in cs.cycles if c.point == 0.0][0]
    ds = digit_sequence(golden, zero)
    assert ds.digits == (0,) * 5


def test_digit_reconstruction(golden):
    omega = SampleWord.sample(golden.system, seed=6, n=10)
    cs = enumerate_cycles(golden.system, omega)
    for c in cs.cycles:
        ds = digit_sequence(golden, c)
        tail = c.orbit[-1]
        # push the last orbit point one more step to get T^n(x)
        alphabet, _ = golden.system.scheme()
        sym = alphabet.symbols[c.word[-1] - 1]
        endpoint = (
            golden.system.maps[sym.map_index]
            .branches[sym.branch_label - 1]
            .value(c.orbit[-1])
        )
        rebuilt = reconstruct(golden, ds, tail=endpoint)
        assert rebuilt == pytest.approx(c.point, abs=1e-9)


def test_digits_match_formula_away_from_boundaries(golden):
    omega = SampleWord.sample(golden.system, seed=13, n=9)
    cs = enumerate_cycles(golden.system, omega)
    pts = (0.0, 1 / B, 1.0, B)
    for c in cs.cycles:
        ds = digit_sequence(golden, c)
        for k, (letter, y) in enumerate(zip(ds.letters, c.orbit)):
            if min(abs(y - q) for q in pts) < 1e-9:
                continue
            assert ds.digits[k] == golden.digit_value(letter, y)


# --------------------------------------------------------------- digit stats


def test_digit_stats_example():
    st_ = digit_stats((1, 0, 1))
    assert st_.freq == pytest.approx([1 / 3, 2 / 3])
    assert st_.symmetric_mean == pytest.approx(1 / 3, abs=1e-15)
    assert st_.mean_distance == pytest.approx(2 / 3, abs=1e-15)


@given(st.integers(min_value=0, max_value=5), st.integers(min_value=2, max_value=12))
@settings(max_examples=30, deadline=None)
def test_digit_stats_constant_sequences(c, n):
    st_ = digit_stats((c,) * n)
    assert st_.symmetric_mean == pytest.approx(c * c, abs=1e-12)
    assert st_.mean_distance == 0.0


def test_digit_stats_all_zero():
    st_ = digit_stats((0, 0, 0, 0))
    assert st_.symmetric_mean == 0.0
    assert st_.mean_distance == 0.0


def test_digit_stats_needs_two():
    with pytest.raises(ParameterError):
        digit_stats((1,))


@given(
    st.lists(st.integers(min_value=0, max_value=3), min_size=2, max_size=15)
)
@settings(max_examples=40, deadline=None)
def test_digit_stats_match_naive_double_sum(seq):
    st_ = digit_stats(seq)
    n = len(seq)
    s = sum(seq[i] * seq[j] for i in range(n) for j in range(i + 1, n))
    d = sum(abs(seq[i] - seq[j]) for i in range(n) for j in range(i + 1, n))
    assert st_.symmetric_mean == pytest.approx(2 * s / (n * (n - 1)), abs=1e-12)
    assert st_.mean_distance == pytest.approx(2 * d / (n * (n - 1)), abs=1e-12)


# ------------------------------------------------------------------ q values


def test_q_closed_form_examples():
    assert q_closed_form_golden(0.5) == pytest.approx((0.5, 0.5), abs=1e-15)
    q0, q1 = q_closed_form_golden(0.7)
    assert q0 == pytest.approx(0.5894427, abs=1e-7)
    assert q1 == pytest.approx(0.4105573, abs=1e-7)
    assert q0 + q1 == pytest.approx(1.0, abs=1e-15)
    # p1 = 1: q0 equals the classical greedy-density mass of [0, 1/b)
    q0_det, _ = q_closed_form_golden(1.0)
    assert q0_det == pytest.approx(0.7236068, abs=1e-7)
    assert q0_det == pytest.approx(golden_density(1.0).cdf(1 / B), abs=1e-12)


def test_q_from_density_matches_closed_form(golden):
    q = q_from_density(golden, (0.7, 0.3), golden_density(0.7))
    q0, q1 = q_closed_form_golden(0.7)
    assert q[0] == pytest.approx(q0, abs=1e-12)
    assert q[1] == pytest.approx(q1, abs=1e-12)


def test_q_from_density_symmetric(golden):
    q = q_from_density(golden, (0.5, 0.5), golden_density(0.5))
    assert q == pytest.approx([0.5, 0.5], abs=1e-12)


def test_q_sums_to_one_for_any_density(golden):
    d = ulam_stationary(golden.system, 128)
    q = q_from_density(golden, (0.7, 0.3), d)
    assert q.sum() == pytest.approx(1.0, abs=1e-10)


def test_limit_targets_from_closed_form():
    q = q_closed_form_golden(0.7)
    s_t, d_t = digit_limit_targets(q)
    assert s_t == pytest.approx(0.1685573, abs=1e-7)
    # exact: 2 q0 q1 = 2 (1/4 - ((2 p1 - 1)^2) / 20) = 0.484 at p1 = 0.7
    assert d_t == pytest.approx(0.484, abs=1e-12)


def test_digit_difference_convolution_identity(golden):
    # pair differences of digits along long random orbits distribute like the
    # convolution q * (reflected q), seed-averaged
    q = np.array(q_closed_form_golden(0.7))
    target = {}
    for i in range(2):
        for j in range(2):
            target[i - j] = target.get(i - j, 0.0) + q[i] * q[j]

    length = 1_000_000
    seeds = (1, 2, 3)
    averaged = {d: 0.0 for d in target}
    for seed in seeds:
        gen = np.random.Generator(np.random.PCG64(seed))
        us = gen.random(length)
        letters = np.where(us < 0.7, 1, 2)
        x = 0.2345
        counts = np.zeros(2)
        for letter in letters:
            counts[golden.digit_value(int(letter), x)] += 1
            x = golden.system.maps[letter - 1].evaluate(x)[0]
        counts /= length
        for d in averaged:
            total = 0.0
            for i in range(2):
                j = i - d
                if 0 <= j < 2:
                    total += counts[i] * counts[j]
            averaged[d] += total / len(seeds)
    dist = max(abs(averaged[d] - target[d]) for d in target)
    assert dist <= 0.02


# ------------------------------------------------------- weighted digit stats


def test_weighted_digit_averages_match_per_cycle(golden):
    omega = SampleWord.sample(golden.system, seed=3, n=8)
    cs = enumerate_cycles(golden.system, omega)
    batch = weighted_digit_averages(golden, cs)
    ws = cs.normalized_weights()
    s_manual = sum(
        w * digit_stats(digit_sequence(golden, c)).symmetric_mean
        for w, c in zip(ws, cs.cycles)
    )
    d_manual = sum(
        w * digit_stats(digit_sequence(golden, c)).mean_distance
        for w, c in zip(ws, cs.cycles)
    )
    f0_manual = sum(
        w * digit_stats(digit_sequence(golden, c)).freq[0]
        for w, c in zip(ws, cs.cycles)
    )
    assert batch.symmetric_mean == pytest.approx(s_manual, abs=1e-12)
    assert batch.mean_distance == pytest.approx(d_manual, abs=1e-12)
    assert batch.freq[0] == pytest.approx(f0_manual, abs=1e-12)

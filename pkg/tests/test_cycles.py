import math

import numpy as np
import pytest

from randcycles import (
    GOLDEN_RATIO,
    LsvSpec,
    NumericalError,
    RandomSystem,
    SampleWord,
    SizeGuardError,
    annealed_partition_direct,
    birkhoff_average,
    birkhoff_product,
    birkhoff_ratio,
    build_beta_system,
    build_lsv_system,
    cycle_measure_xi,
    cycle_point_measure,
    doubling_map,
    enumerate_cycles,
    enumerate_preimages,
    enumerate_skew_fixed_points,
    find_cycle_in_cylinder,
    pair_sum_statistic,
    pressure_from_cycles,
    sample_averaged_measure,
    weighted_functional_average,
)

from _oracles import brute_force_cycle_points

B = GOLDEN_RATIO


@pytest.fixture(scope="module")
def doubling():
    return RandomSystem((doubling_map(),), (1.0,))


@pytest.fixture(scope="module")
def golden():
    return build_beta_system(B, p=(0.7, 0.3)).system


@pytest.fixture(scope="module")
def lsv_pair():
    return build_lsv_system(LsvSpec((0.5, 2.0), (0.5, 0.5)))


# ---------------------------------------------------------------- find_cycle


def test_find_cycle_doubling_binary(doubling):
    c = find_cycle_in_cylinder(doubling, (1, 1, 2))
    assert c.point == pytest.approx(1 / 7, abs=1e-12)
    assert c.weight == pytest.approx(1 / 8, abs=1e-12)


def test_find_cycle_lsv_neutral():
    system = build_lsv_system(LsvSpec((1.0,), (1.0,)))
    c = find_cycle_in_cylinder(system, (1,))
    assert c.point == 0.0
    assert c.weight == 1.0


def test_find_cycle_golden_boundary(golden):
    c = find_cycle_in_cylinder(golden, (3,))
    assert c.point == pytest.approx(B, abs=1e-12)
    assert c.weight == pytest.approx(1 / B, abs=1e-12)


def test_find_cycle_rejects_uncoded_boundary(golden):
    # the word (2,1) composition fixes x=1 only through one-sided extensions
    assert find_cycle_in_cylinder(golden, (2, 1)) is None


def test_find_cycle_none_when_no_root(golden):
    assert find_cycle_in_cylinder(golden, (2,)) is None


# ---------------------------------------------------------------- enumerate


def test_enumerate_doubling_n3(doubling):
    cs = enumerate_cycles(doubling, SampleWord.constant(1, 3))
    points = sorted(c.point for c in cs.cycles)
    assert points == pytest.approx([k / 7 for k in range(7)], abs=1e-12)
    assert all(c.weight == pytest.approx(1 / 8, abs=1e-14) for c in cs.cycles)
    assert cs.Z == pytest.approx(7 / 8, abs=1e-12)
    assert cs.endpoint_dropped == 1  # x=1 is the glued twin of x=0


def test_enumerate_golden_constant_slope_identity(golden):
    for n in (4, 7, 10):
        cs = enumerate_cycles(golden, SampleWord.constant(1, n))
        assert cs.Z == pytest.approx(len(cs) * B**-n, rel=1e-12)


def test_enumerate_nonempty_at_mixing_index(golden):
    for seed in range(5):
        omega = SampleWord.sample(golden, seed, 3)
        assert len(enumerate_cycles(golden, omega)) > 0


def test_enumerate_empty_below_mixing_is_allowed(golden):
    # omega=(2,1) at n=1 -> length-1 words; lazy cells without fixed branches
    cs = enumerate_cycles(golden, (2,))
    assert len(cs) >= 1  # 0 and the top are lazy fixed points


def test_orbit_consistency(golden):
    omega = SampleWord.sample(golden, seed=9, n=8)
    cs = enumerate_cycles(golden, omega)
    alphabet, _ = golden.scheme()
    for c in cs.cycles:
        assert c.orbit[0] == pytest.approx(c.point, abs=1e-12)
        for k, sid in enumerate(c.word):
            sym = alphabet.symbols[sid - 1]
            cell = sym.cell
            assert cell.lo - 1e-9 <= c.orbit[k] <= cell.hi + 1e-9
            assert sym.map_index + 1 == omega.letters[k]


def test_weight_identity_finite_differences(golden):
    omega = SampleWord.sample(golden, seed=4, n=6)
    cs = enumerate_cycles(golden, omega)
    alphabet, _ = golden.scheme()

    def compose(word, x):
        for sid in word:
            sym = alphabet.symbols[sid - 1]
            x = golden.maps[sym.map_index].branches[sym.branch_label - 1].value(x)
        return x

    for c in cs.cycles:
        h = 1e-7
        x = c.point
        if x - h < golden.ambient.lo or x + h > golden.ambient.hi:
            continue
        fd = (compose(c.word, x + h) - compose(c.word, x - h)) / (2 * h)
        assert abs(fd) == pytest.approx(math.exp(-c.log_weight), rel=1e-5)


def test_dedupe_soundness(golden):
    cs = enumerate_cycles(golden, (1, 2))
    raw = enumerate_cycles(golden, (1, 2), dedupe=False)
    assert len(raw) - len(cs) == cs.duplicates_merged == 1


def test_threads_bit_identical(golden):
    omega = SampleWord.sample(golden, seed=12, n=12)
    base = enumerate_cycles(golden, omega, threads=1)
    for threads in (2, 4):
        other = enumerate_cycles(golden, omega, threads=threads)
        assert [(c.word, c.point, c.log_weight, c.orbit) for c in base.cycles] == [
            (c.word, c.point, c.log_weight, c.orbit) for c in other.cycles
        ]
        assert other.logZ == base.logZ


def test_size_guard(doubling):
    with pytest.raises(SizeGuardError):
        enumerate_cycles(doubling, SampleWord.constant(1, 100))


# ------------------------------------------------------------ oracle checks


@pytest.mark.parametrize("n", [2, 4, 6])
def test_oracle_equivalence_small(golden, n):
    omega = SampleWord.sample(golden, seed=42, n=n)
    cs = enumerate_cycles(golden, omega)
    mine = sorted(c.point for c in cs.cycles)
    oracle = brute_force_cycle_points(golden, omega.letters, grid_points=200_000)
    assert len(mine) == len(oracle)
    assert max(abs(a - b) for a, b in zip(mine, oracle)) < 1e-6


def test_oracle_equivalence_lsv(lsv_pair):
    omega = SampleWord.sample(lsv_pair, seed=8, n=5)
    cs = enumerate_cycles(lsv_pair, omega)
    mine = sorted(c.point for c in cs.cycles)
    oracle = brute_force_cycle_points(lsv_pair, omega.letters, grid_points=200_000)
    assert len(mine) == len(oracle)
    assert max(abs(a - b) for a, b in zip(mine, oracle)) < 1e-6


# ---------------------------------------------------------------- measures


def test_xi_measure_doubling(doubling):
    cs = enumerate_cycles(doubling, SampleWord.constant(1, 3))
    xi = cycle_measure_xi(cs)
    # the 21 orbit points coincide in triples: uniform mass on {k/7}
    assert len(xi) == 7
    assert np.allclose(xi.weights, 1 / 7)
    assert xi.total_mass == pytest.approx(1.0, abs=1e-12)


def test_xi_single_cycle_is_orbit_measure(golden):
    cs = enumerate_cycles(golden, (1, 1, 1))
    one = [c for c in cs.cycles if c.point > 0.2 and c.point < 0.4][0]
    from randcycles import CycleSet

    solo = CycleSet(cs.omega, (one,), one.log_weight)
    xi = cycle_measure_xi(solo)
    assert sorted(xi.points) == sorted(set(one.orbit))
    assert np.allclose(xi.weights, 1 / 3)


def test_xi_mass_golden_seeded(golden):
    omega = SampleWord.sample(golden, seed=1, n=12)
    xi = cycle_measure_xi(enumerate_cycles(golden, omega))
    assert xi.total_mass == pytest.approx(1.0, abs=1e-12)


def test_point_measure(doubling, golden):
    cs = enumerate_cycles(doubling, SampleWord.constant(1, 3))
    mu = cycle_point_measure(cs)
    assert np.allclose(mu.weights, 1 / 7)
    lsv = build_lsv_system(LsvSpec((1.0, 0.5), (0.5, 0.5)))
    omega = SampleWord.sample(lsv, seed=2, n=6)
    cs2 = enumerate_cycles(lsv, omega)
    mu2 = cycle_point_measure(cs2)
    assert mu2.total_mass == pytest.approx(1.0, abs=1e-12)
    neutral = mu2.weights[np.argmin(np.abs(mu2.points))]
    assert neutral == pytest.approx(1 / cs2.Z, rel=1e-12)


# ----------------------------------------------------------------- annealed


def test_skew_reduces_to_single_map(doubling):
    skew = enumerate_skew_fixed_points(doubling, 3)
    cs = enumerate_cycles(doubling, SampleWord.constant(1, 3))
    assert skew.log_partition == pytest.approx(cs.logZ, abs=1e-12)


def test_skew_q_weights(golden):
    half = build_beta_system(B, p=(0.5, 0.5)).system
    skew = enumerate_skew_fixed_points(half, 2)
    assert len(skew.per_omega) == 4
    # equiprobable letters: every word has Q_p = 1/4
    zs = [cs.Z for _, cs in skew.per_omega]
    expect = math.log(sum(0.25 * z for z in zs))
    assert skew.log_partition == pytest.approx(expect, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_annealed_two_routes_agree(golden, n):
    skew = enumerate_skew_fixed_points(golden, n)
    direct = annealed_partition_direct(golden, n)
    assert skew.log_partition == pytest.approx(direct, rel=1e-10, abs=1e-10)


def test_annealed_measure_mass(golden):
    skew = enumerate_skew_fixed_points(golden, 4)
    assert skew.measure.total_mass == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------------------ eta


def test_eta_single_seed_equals_xi(golden):
    omega = SampleWord.sample(golden, 3, 8)
    xi = cycle_measure_xi(enumerate_cycles(golden, omega))
    eta = sample_averaged_measure(golden, 8, [3])
    assert np.allclose(eta.points, xi.points)
    assert np.allclose(eta.weights, xi.weights)


def test_eta_deterministic_for_single_map(doubling):
    a = sample_averaged_measure(doubling, 5, [1, 2])
    b = sample_averaged_measure(doubling, 5, [7, 8])
    assert np.allclose(a.points, b.points) and np.allclose(a.weights, b.weights)


# ------------------------------------------------------------------ preimages


def test_preimages_doubling(doubling):
    m = enumerate_preimages(doubling, SampleWord.constant(1, 2), 2, 1 / 3,
                            spread_orbits=False)
    assert np.allclose(sorted(m.points), [1 / 12, 1 / 3, 7 / 12, 5 / 6])
    assert np.allclose(m.weights, 0.25)


def test_preimages_depth_zero(doubling):
    m = enumerate_preimages(doubling, (), 0, 1 / 3)
    assert list(m.points) == [1 / 3]
    assert list(m.weights) == [1.0]


def test_preimages_mass_and_boundary_error(golden):
    omega = SampleWord.sample(golden, 5, 8)
    m = enumerate_preimages(golden, omega, 8, 0.49)
    assert m.total_mass == pytest.approx(1.0, abs=1e-12)
    from randcycles import DomainError

    with pytest.raises(DomainError):
        enumerate_preimages(golden, omega, 8, 1.0)  # cell boundary
    with pytest.raises(DomainError):
        enumerate_preimages(golden, omega, 8, B)  # not interior


# ------------------------------------------------------------------ pressure


def test_pressure_doubling(doubling):
    res = pressure_from_cycles(doubling, SampleWord.constant(1, 3), 3)
    assert res.per_sample == pytest.approx(math.log(7 / 8) / 3, abs=1e-12)
    res10 = pressure_from_cycles(doubling, SampleWord.constant(1, 10), 10)
    assert res10.per_sample == pytest.approx(math.log(1023 / 1024) / 10, abs=1e-12)
    assert res10.per_sample == pytest.approx(-9.77e-5, abs=5e-7)


def test_pressure_constant_slope(golden):
    n = 9
    cs = enumerate_cycles(golden, SampleWord.constant(2, n))
    res = pressure_from_cycles(golden, SampleWord.constant(2, n), n)
    assert res.per_sample == pytest.approx(
        (math.log(len(cs)) - n * math.log(B)) / n, abs=1e-12
    )


def test_pressure_annealed_feasibility(golden):
    res = pressure_from_cycles(golden, SampleWord.sample(golden, 1, 4), 4)
    assert res.annealed is not None
    assert abs(res.annealed) < 0.5


# ---------------------------------------------------------------- functionals


def test_functional_constant_one(golden):
    omega = SampleWord.sample(golden, 2, 6)
    cs = enumerate_cycles(golden, omega)
    avg = weighted_functional_average(cs, lambda c, o: 1.0)
    assert avg == pytest.approx(1.0, abs=1e-12)


def test_functional_product_of_constants(golden):
    omega = SampleWord.sample(golden, 2, 6)
    cs = enumerate_cycles(golden, omega)
    c = 0.37
    fn = birkhoff_product(lambda let, x: c, lambda let, x: c)
    assert weighted_functional_average(cs, fn) == pytest.approx(c * c, abs=1e-12)


def test_functional_birkhoff_doubling(doubling):
    cs = enumerate_cycles(doubling, SampleWord.constant(1, 3))
    fn = birkhoff_average(lambda let, x: x)
    avg = weighted_functional_average(cs, fn)
    assert avg == pytest.approx(3 / 7, abs=1e-10)


def test_functional_ratio_and_pair_sum(doubling):
    cs = enumerate_cycles(doubling, SampleWord.constant(1, 3))
    ratio = birkhoff_ratio(lambda let, x: x, lambda let, x: 1.0)
    assert weighted_functional_average(cs, ratio) == pytest.approx(3 / 7, abs=1e-10)
    pair = pair_sum_statistic(abs, lambda let, x: x, lambda let, x: -x)
    val = weighted_functional_average(cs, pair)
    # mean |x_i - x_j| over each orbit, averaged: sanity bounds only
    assert 0.0 < val < 1.0


def test_functional_nonfinite_raises(golden):
    omega = SampleWord.sample(golden, 2, 4)
    cs = enumerate_cycles(golden, omega)
    with pytest.raises(NumericalError):
        weighted_functional_average(cs, lambda c, o: float("nan"))

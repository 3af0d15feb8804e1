import cmath
import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from shl_lab import asep
from shl_lab.asep import ASEPConfig, SimSpec
from shl_lab.kernel import ContourSpec


def test_config_validation():
    with pytest.raises(ValueError):
        ASEPConfig([0, 0])
    with pytest.raises(ValueError):
        ASEPConfig([])
    assert ASEPConfig([1, 3]).shifted(-2).positions == (-1, 1)


def test_psi_single_particle():
    q, z = Fr(1, 3), Fr(1, 5)
    for x in range(-3, 4):
        assert asep.psi("r", [x], [z], q) == asep.zeta(z, q) ** (-x)
        assert asep.psi("ell", [x], [z], q) == asep.zeta(z, q) ** x


def test_psi_translation():
    q, zs = Fr(1, 2), [Fr(1, 3), Fr(3, 4), Fr(-2, 5)]
    x = ASEPConfig([-1, 2, 3])
    for k in (-2, 1, 4):
        factor = 1
        for z in zs:
            factor *= asep.zeta(z, q) ** (-k)
        assert asep.psi("r", x.shifted(k), zs, q) == asep.psi("r", x, zs, q) * factor


def test_eigenvalue_example_and_additivity():
    assert asep.eigenvalue([Fr(-1)], Fr(1, 2)) == Fr(-1, 12)
    zs, q = [Fr(1, 3), Fr(-2), Fr(5, 7)], Fr(2, 5)
    assert asep.eigenvalue(zs, q) == sum(asep.eigenvalue([z], q) for z in zs)


def test_generator_examples():
    q = Fr(1, 3)
    assert asep.generator_apply(lambda x: Fr(7), [0, 2, 5], q) == 0
    z = Fr(1, 4)
    zt = asep.zeta(z, q)
    f = lambda x: zt ** (-x[0])
    assert asep.generator_apply(f, [2], q) == f(ASEPConfig([2])) * (q * (1 / zt - 1) + (zt - 1))
    # adjacent pair: only the outer moves remain
    g = lambda x: Fr(x[0] * 10 + x[1])
    fx = g(ASEPConfig([3, 4]))
    expected = q * (g(ASEPConfig([3, 5])) - fx) + (g(ASEPConfig([2, 4])) - fx)
    assert asep.generator_apply(g, [3, 4], q) == expected


def test_eigenrelations_exact():
    q = Fr(1, 3)
    zs = [Fr(1, 2), Fr(-1, 4), Fr(2, 7)]
    for x in ([0], [-1, 1], [0, 1, 2], [-2, 0, 3]):
        sub = zs[: len(x)]
        ev = asep.eigenvalue(sub, q)
        assert asep.generator_apply(lambda y: asep.psi("r", y, sub, q), x, q) == ev * asep.psi("r", x, sub, q)
        lhs = asep.generator_apply(lambda y: asep.psi("ell", y, sub, q), x, q, transpose=True)
        assert lhs == ev * asep.psi("ell", x, sub, q)


spectral = st.builds(
    lambda r, a: complex(r * math.cos(a), r * math.sin(a)),
    st.fractions(Fr(1, 5), Fr(3)).map(float),
    st.fractions(0, 6).map(float),
)


@settings(max_examples=20)
@given(
    zs=st.lists(spectral, min_size=1, max_size=3),
    q=st.sampled_from([0.2, 0.5, 0.7]),
    start=st.integers(-3, 3),
    gaps=st.lists(st.integers(1, 3), min_size=2, max_size=2),
)
def test_eigenrelations_float(zs, q, start, gaps):
    N = len(zs)
    assume(all(abs(z - 1) > 0.1 and abs(z - q) > 0.1 for z in zs))
    assume(all(abs(a - b) > 0.1 for i, a in enumerate(zs) for b in zs[i + 1:]))
    x = [start]
    for g in gaps[: N - 1]:
        x.append(x[-1] + g)
    ev = asep.eigenvalue(zs, q)
    for side, transpose in (("r", False), ("ell", True)):
        val = asep.psi(side, x, zs, q)
        lhs = asep.generator_apply(lambda y: asep.psi(side, y, zs, q), x, q, transpose=transpose)
        neighbors = [abs(asep.psi(side, ASEPConfig(x).shifted(k), zs, q)) for k in (-1, 0, 1)]
        scale = (1 + abs(ev)) * max(neighbors + [abs(val)]) * 2 ** N
        assert abs(lhs - ev * val) <= 1e-12 * scale


def test_plancherel():
    q = 0.5
    assert abs(asep.plancherel_check([0], [0], q) - 1) < 1e-8
    for d in (-3, -1, 1, 2, 3):
        assert abs(asep.plancherel_check([0], [d], q)) < 1e-8
    assert abs(asep.plancherel_check([0, 1], [0, 1], q) - 1) < 1e-6
    assert abs(asep.plancherel_check([0, 1], [0, 2], q)) < 1e-6


def test_contour_validation():
    with pytest.raises(asep.ContourError):
        asep.plancherel_check([0], [0], 0.5, ContourSpec(1.0, 0.6, 64))
    with pytest.raises(asep.ContourError):
        asep.plancherel_check([0, 1], [0, 1], 0.5, ContourSpec(1.0, 0.4, 64))
    with pytest.raises(asep.ContourError):
        asep.two_time_prob(SimSpec([0], 0.5, (0.5, 1.0), (0, 0)), radii=(0.2, 0.1))


def test_transition_at_time_zero():
    q = 0.4
    assert abs(asep.transition_prob([0, 2], [0, 2], 0.0, q) - 1) < 1e-8
    assert abs(asep.transition_prob([0, 2], [1, 2], 0.0, q)) < 1e-8


@pytest.mark.parametrize("t", [0.3, 1.0, 2.0])
def test_transition_single_particle_matches_ctmc(t):
    q = 0.5
    oracle = asep.ctmc_oracle(SimSpec([0], q, (t, t), (0, 0)))
    for y in range(-5, 6):
        d = asep.transition_prob_detail([0], [y], t, q)
        assert abs(d.value - oracle.single_time.get((y,), 0.0)) < 1e-8
        assert d.imag_residual < 1e-8


def test_transition_two_particles_matches_ctmc():
    q, t = 0.4, 0.8
    oracle = asep.ctmc_oracle(SimSpec([0, 1], q, (t, t), (0, 0)))
    for y in ([0, 1], [-1, 1], [-2, 0], [0, 3], [1, 2]):
        assert abs(asep.transition_prob([0, 1], y, t, q) - oracle.single_time.get(tuple(y), 0.0)) < 1e-8


def test_transition_row_sums_to_one():
    q, t = 0.5, 1.0
    # mass beyond 12 steps is below 1e-10 at t = 1; much further left the integral loses digits to cancellation
    values = [asep.transition_prob([0], [y], t, q) for y in range(-12, 13)]
    assert all(-1e-8 <= v <= 1 + 1e-8 for v in values)
    assert abs(sum(values) - 1) < 1e-6


def test_quadrature_doubling_is_stable():
    q, t = 0.5, 1.5
    r = asep.single_time_radius(q)
    for y in (-2, 0, 3):
        a = asep.transition_prob([0], [y], t, q, ContourSpec(1.0, r, 128))
        b = asep.transition_prob([0], [y], t, q, ContourSpec(1.0, r, 256))
        assert abs(a - b) < 1e-9


def admissible_points(N, q, seed):
    rng = np.random.default_rng(seed)
    zs = [q * (1 + 0.12 * cmath.exp(2j * math.pi * (k + rng.random()) / N)) for k in range(N)]
    ws = [1 + 0.1 * q * cmath.exp(2j * math.pi * (k + rng.random()) / N) for k in range(N)]
    return zs, ws


def test_single_geometric_sum():
    q, z = 0.5, 0.8 + 0.05j
    direct = asep.left_sum_direct([z], q, 200)
    assert abs(direct - (1 - z / q) / (z * (1 - 1 / q))) < 1e-12


@pytest.mark.parametrize("N", [1, 2, 3])
def test_sum_identities(N):
    q = 0.5
    zs, ws = admissible_points(N, q, N)
    assert asep.summability_ratio(zs, ws, q) < 0.5
    report = asep.sum_identities(zs, ws, q, max_x=60 if N < 3 else 45)
    assert report.single_direct is not None
    assert report.max_rel_err() < 1e-10


def test_summability_violation_rejected():
    with pytest.raises(asep.SummabilityError):
        asep.pair_sum_direct([0.9], [0.55], 0.5, 10)
    with pytest.raises(asep.SummabilityError):
        asep.left_sum_direct([0.55], 0.5, 10)


def test_two_time_single_particle_matches_ctmc():
    s = SimSpec([0], 0.5, (0.5, 1.0), (-1, -2))
    v = asep.two_time_prob(s)
    assert abs(v.value - asep.ctmc_oracle(s).two_time) < 1e-6 and v.imag_residual < 1e-8


def test_two_time_collapses_at_equal_times():
    q, t = 0.5, 1.0
    v = asep.two_time_prob(SimSpec([0], q, (t, t), (-3, -1))).value
    single = sum(asep.transition_prob([0], [y], t, q) for y in range(-1, 30))
    assert abs(v - single) < 1e-6


def test_two_time_monotone_in_thresholds():
    q = 0.5
    grid = {(a, b): asep.two_time_prob(SimSpec([0], q, (0.5, 1.0), (a, b)), nodes=64).value
            for a in (-2, -1, 0) for b in (-2, -1, 0)}
    for (a, b), v in grid.items():
        if a < 0:
            assert grid[(a + 1, b)] <= v + 1e-9
        if b < 0:
            assert grid[(a, b + 1)] <= v + 1e-9


def test_two_time_two_particles_matches_ctmc():
    s = SimSpec([0, 2], 0.4, (0.4, 0.9), (-1, -1))
    assert abs(asep.two_time_prob(s).value - asep.ctmc_oracle(s).two_time) < 1e-6


def test_ctmc_generator_rows():
    Q, states, _ = asep.rate_matrix(2, 0.3, -6, 6)
    sums = np.asarray(Q.sum(axis=1)).ravel()
    for s, r in zip(states, sums):
        if s[0] > -6 and s[-1] < 6:
            assert abs(r) < 1e-14
        else:
            assert r < 0


def test_ctmc_time_zero_is_point_mass():
    r = asep.ctmc_oracle(SimSpec([0, 3], 0.5, (0.0, 0.0), (0, 0)))
    assert r.single_time == {(0, 3): 1.0} and r.two_time == 1.0


def test_ctmc_rejects_small_window():
    with pytest.raises(asep.WindowTooSmallError):
        asep.ctmc_oracle(SimSpec([0], 0.5, (1.0, 3.0), (0, 0), window=(-3, 3)))
    with pytest.raises(asep.WindowTooSmallError):
        SimSpec([0, 3], 0.5, (1.0, 1.0), (0, 0), window=(0, 5)).resolved_window()


def test_mc_reproducible_and_seed_sensitive():
    s = SimSpec([0, 1], 0.5, (0.5, 1.0), (-1, -1), replicates=20_000, seed=3)
    assert asep.mc_simulate(s) == asep.mc_simulate(s)
    other = asep.mc_simulate(SimSpec([0, 1], 0.5, (0.5, 1.0), (-1, -1), replicates=20_000, seed=4))
    assert other.estimate != asep.mc_simulate(s).estimate


def test_mc_tasep_has_no_right_jumps():
    # with q = 0 the particle stays at or left of 0; staying put until t2 has probability exp(-t2)
    s = SimSpec([0], 0.0, (0.5, 1.0), (0, 0), replicates=100_000, seed=1)
    r = asep.mc_simulate(s)
    assert abs(r.estimate - math.exp(-1.0)) < 3 * r.stderr
    assert asep.mc_simulate(SimSpec([0], 0.0, (0.5, 1.0), (1, -5), replicates=1000)).estimate == 0


def test_mc_single_particle_within_three_sigma():
    s = SimSpec([0], 0.5, (0.5, 1.0), (-1, -2), replicates=100_000, seed=11)
    r = asep.mc_simulate(s)
    assert abs(r.estimate - asep.ctmc_oracle(s).two_time) < 3 * r.stderr


@pytest.mark.parametrize("sqrt_q", [Fr(1, 2), Fr(2, 3), Fr(3, 4)])
@pytest.mark.parametrize("x", [[0], [1, 3], [0, 2, 3]])
def test_shl_specialization_exact(sqrt_q, x):
    zs = [Fr(3, 2), Fr(-2, 5), Fr(7, 3)][: len(x)]
    f, f_psi, fs, fs_psi = asep.shl_specialization_sides(x, zs, sqrt_q)
    assert f == f_psi and fs == fs_psi

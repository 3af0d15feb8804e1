import random
from fractions import Fraction as Fr

import pytest

from shl_lab import identities as ids
from shl_lab.kernel import prod
from shl_lab.shl import schur
from shl_lab.signatures import ParameterSet, enumerate_signatures
from shl_lab.vertex_model import pf_Z

Q, S0, XI0 = Fr(1, 3), Fr(-2, 5), Fr(5, 4)


def distinct(rng, n, lo=-3, hi=3):
    out = []
    while len(out) < n:
        x = Fr(rng.randint(-60, 60), rng.randint(1, 20))
        if lo < x < hi and x != 0 and x not in out:
            out.append(x)
    return out


def params(gamma=Fr(2, 3)):
    return ParameterSet(Q, [S0, Fr(-1, 3)], [XI0, Fr(1)], gamma)


def test_z_entry_examples():
    u, v = Fr(1, 4), Fr(2, 3)
    assert ids.z_entry(u, v, S0, XI0, Fr(0), Q) == 1 / (1 - u * v)
    assert ids.z_entry(u, v, Fr(0), XI0, Fr(1), Q) == (1 - Q) / ((1 - u * v) * (1 - Q * u * v))
    g = Fr(3, 7)
    assert ids.z_entry(u, v, S0, XI0, g, Q) == ids.z_entry(v / XI0**2, u * XI0**2, S0, XI0, g, Q)


def test_ik_det_single_row():
    u, v = Fr(1, 4), Fr(2, 3)
    for g in (Fr(0), Fr(1), Fr(5, 7)):
        p = params(g)
        renorm = (1 - g) * (Q - g * S0**2) * (1 - u * v) + (1 - Q) * (1 - g * XI0 * S0 * u) * (1 - g * S0 * v / XI0)
        assert ids.ik_det_rhs([u], [v], p) == renorm / ((1 - S0 * XI0 * u) * (1 - S0 * v / XI0) * (1 - u * v))


@pytest.mark.parametrize("N", [2, 3])
def test_ik_det_special_gammas(N):
    rng = random.Random(N)
    us, vs = distinct(rng, N), distinct(rng, N)
    norm = prod(1 / ((1 - S0 * XI0 * u) * (1 - S0 * v / XI0)) for u, v in zip(us, vs))
    cross = prod((1 - Q * u * v) / (1 - u * v) for u in us for v in vs)
    assert ids.ik_det_rhs(us, vs, params(Fr(0))) == norm * cross
    # gamma = 1: Izergin-Korepin form
    p1 = params(Fr(1))
    ik = (1 - Q) ** N * prod(1 - Q * u * v for u in us for v in vs) / ids._vv(us, vs)
    ik *= ids.det_exact([[1 / ((1 - u * v) * (1 - Q * u * v)) for v in vs] for u in us])
    # at gamma = 1 the column-0 factors cancel against the z numerator
    z1 = [[ids.z_entry(u, v, S0, XI0, Fr(1), Q) for v in vs] for u in us]
    assert ids.ik_det_rhs(us, vs, p1) == norm * prod(1 - Q * u * v for u in us for v in vs) * ids.det_exact(z1) / ids._vv(us, vs)
    p1_free = ParameterSet(Q, Fr(0), Fr(1), Fr(1))
    assert ids.ik_det_rhs(us, vs, p1_free) == ik


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_three_determinants_agree(N):
    rng = random.Random(10 + N)
    us, vs = distinct(rng, N), distinct(rng, N)
    p = params(Fr(rng.randint(1, 9), rng.randint(1, 9)))
    m = ids.alt_det_rhs(us, vs, p, "M")
    mt = ids.alt_det_rhs(us, vs, p, "Mtilde")
    assert m == mt == ids.thm41_lhs(us, vs, p)
    left, right = ids.thm12_sides(us, vs, p)
    assert left == right


def test_refined_cauchy_closed_forms_agree():
    rng = random.Random(3)
    us, vs = distinct(rng, 3, 0, Fr(1, 2)), distinct(rng, 3, 0, Fr(1, 2))
    p = params()
    assert ids.refined_cauchy_rhs(us, vs, p) == ids.refined_cauchy_rhs_via_z(us, vs, p)


def test_refined_cauchy_truncation_converges():
    us, vs = [Fr(1, 5), Fr(1, 7)], [Fr(1, 6), Fr(2, 9)]
    p = ParameterSet(Fr(1, 2), [Fr(-1, 4), Fr(-1, 3)], [Fr(1), Fr(6, 5)], Fr(3, 4))
    rhs = float(ids.refined_cauchy_rhs(us, vs, p))
    errs = [abs(float(ids.refined_cauchy_lhs(us, vs, p, max_part=k).value) - rhs) for k in (4, 8, 16)]
    assert errs[0] > errs[1] > errs[2]
    full = ids.refined_cauchy_lhs(us, vs, p)
    assert full.converged and abs(float(full.value) - rhs) < 1e-12 * abs(rhs)


def test_refinement_factor_at_gamma_one_is_one():
    p = params(Fr(1))
    assert all(ids.refinement_factor(m, p) == 1 for m in range(5))


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_C_alternant_equals_jacobi_trudi(N):
    rng = random.Random(N)
    us = distinct(rng, N)
    p = params(Fr(4, 5))
    for lam in enumerate_signatures(N, 4 if N < 4 else 2):
        assert ids.C_coeff(lam, us, p, "alternant") == ids.C_coeff(lam, us, p, "jacobi_trudi")


def test_C_at_zero_spin_is_scaled_schur():
    rng = random.Random(5)
    us = distinct(rng, 3)
    g = Fr(3, 5)
    p = ParameterSet(Q, Fr(0), Fr(1), g)
    for lam in enumerate_signatures(3, 3):
        expected = prod(1 - g * Q * Q ** (lam[j] + 3 - 1 - j) for j in range(3)) * schur(lam, us)
        assert ids.C_coeff(lam, us, p) == expected


def test_C_reduces_to_schur():
    rng = random.Random(6)
    us = distinct(rng, 3)
    p = ParameterSet(Q, Fr(0), Fr(1), Fr(0))
    for lam in enumerate_signatures(3, 3):
        assert ids.C_coeff(lam, us, p, "jacobi_trudi") == schur(lam, us)


def test_s0_determinant_forms_agree():
    rng = random.Random(8)
    us, vs = distinct(rng, 3), distinct(rng, 3)
    a, b = ids.det_s0_forms(us, vs, Fr(2, 7), Q)
    assert a == b


def test_u0_specialization_and_lu_structure():
    rng = random.Random(9)
    p = params(Fr(5, 7))
    for N in (1, 2, 3):
        vs = distinct(rng, N)
        assert ids.u0_det_case(N, vs, p)
        assert all(x == 0 for x in ids.lu_lower_part(vs, p))


def test_recurrence_at_reciprocal_point():
    rng = random.Random(10)
    p = params(Fr(4, 9))
    for N in (1, 2, 3):
        us, vs = distinct(rng, N), distinct(rng, N)
        lhs, rhs = ids.ik_recurrence(us, vs, p)
        assert lhs == rhs


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_tridiagonal(N):
    r = ids.tridiag_case(N, Fr(3, 7), Fr(-2, 5), Fr(1, 3))
    assert r.det == r.product and r.eigen_ok


def test_hall_littlewood_determinant_identities():
    rng = random.Random(11)
    t, chi = Fr(2, 5), Fr(3, 4)
    for N in (1, 2, 3):
        us, vs = distinct(rng, N), distinct(rng, N)
        a, b = ids.hl_cauchy_det_identity(us, vs, chi, t)
        assert a == b
        a, b = ids.ihl_upgraded_det_identity(us, vs, chi, t)
        assert a == b
        a, b = ids.ihl_det_via_general_identity(us, vs, chi, t)
        assert a == b


def test_divided_difference_detects_degree():
    xs = [Fr(k) for k in range(5)]
    assert ids.divided_difference(lambda x: 3 * x**3 - x + 2, xs) == 0
    assert ids.divided_difference(lambda x: x**4, xs) == 1


def test_z_det_equals_lattice_at_generic_points():
    rng = random.Random(12)
    p = ParameterSet(Fr(2, 5), [Fr(-1, 3), Fr(-1, 2)], [Fr(3, 2), Fr(1)])
    for N in (1, 2, 3):
        for a in range(4):
            us, vs = distinct(rng, N, 0, Fr(1, 2)), distinct(rng, N, 0, Fr(1, 2))
            assert pf_Z(us, vs, p, a) == ids.ik_det_rhs(us, vs, p.with_gamma(p.q**a))


@pytest.mark.parametrize("identity", ids.IDS)
@pytest.mark.parametrize("N", [1, 2])
def test_registry_verifies(identity, N):
    case = ids.random_case(identity, N, seed=2024)
    report = ids.verify(case)
    assert report.passed, report
    if ids.REGISTRY[identity].tolerance_class == ids.EXACT:
        assert report.verdict == ids.Verdict.EXACT_MATCH and report.abs_err == 0


def test_random_case_is_deterministic():
    a = ids.random_case("REFINED_CAUCHY_T11", 2, seed=5, index=1)
    b = ids.random_case("REFINED_CAUCHY_T11", 2, seed=5, index=1)
    c = ids.random_case("REFINED_CAUCHY_T11", 2, seed=5, index=2)
    assert a == b and a != c


def test_verify_records_errors():
    case = ids.IdentityCase("DET_IDENTITY_T12", 2, {"q": Fr(1, 2)})
    report = ids.verify(case)
    assert report.verdict == ids.Verdict.FAIL and report.error


def test_tolerance_override_changes_verdict():
    case = ids.random_case("CAUCHY_HL", 1, seed=1)
    assert ids.verify(case).passed
    strict = ids.verify(case, tolerances={ids.TRUNCATED: 0.0})
    assert strict.verdict == ids.Verdict.FAIL or strict.rel_err == 0


def test_inadmissible_points_are_rejected():
    from shl_lab.vertex_model import AdmissibilityError

    p = ParameterSet(Fr(1, 2), Fr(-1, 2), Fr(1))
    with pytest.raises(AdmissibilityError):
        ids.refined_cauchy_lhs([Fr(5)], [Fr(5)], p)


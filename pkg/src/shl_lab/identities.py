"""Determinantal right-hand sides, truncated left-hand sides, and their comparison.

Column-0 data enters most formulas only through a0 = s_0 xi_0, b0 = s_0 / xi_0
and gamma; the ``*_ab`` variants take those directly so that degenerate values
such as a0 = 0 can be substituted exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .kernel import PoleError, det_exact, prod, qpoch, to_complex, vandermonde
from .shl import (
    ColumnZeroForm,
    F_cz,
    Gstar_cz,
    GstarEvaluator,
    SpinHL,
    Symmetrizer,
    h_complete,
    hl_P,
    hl_Q,
    iHL_F,
    iHL_G,
    schur,
)
from .signatures import ParameterSet, Signature, signatures_with_top
from .vertex_model import AdmissibilityError, Truncated, admissibility_ratio

DEFAULT_TOL = 1e-30


# ---------------------------------------------------------------------------
# the determinant entry


def z_numerator_ab(u, v, a0, b0, gamma, q):
    return (1 - gamma) * (q - gamma * a0 * b0) * (1 - u * v) + (1 - q) * (1 - gamma * a0 * u) * (1 - gamma * b0 * v)


def z_ab(u, v, a0, b0, gamma, q):
    den = (1 - u * v) * (1 - q * u * v)
    if den == 0:
        raise PoleError("z entry pole: uv in {1, 1/q}")
    return z_numerator_ab(u, v, a0, b0, gamma, q) / den


def z_entry(u, v, s0, xi0, gamma, q):
    """[(1-g)(q-g s0^2)(1-uv) + (1-q)(1-g xi0 s0 u)(1-g s0 v/xi0)] / ((1-uv)(1-quv))."""
    den = (1 - u * v) * (1 - q * u * v)
    if den == 0:
        raise PoleError("z entry pole: uv in {1, 1/q}")
    num = (1 - gamma) * (q - gamma * s0 * s0) * (1 - u * v) + (1 - q) * (1 - gamma * xi0 * s0 * u) * (
        1 - gamma * s0 * v / xi0
    )
    return num / den


def _vv(us, vs):
    v = vandermonde(us) * vandermonde(vs)
    if v == 0:
        raise PoleError("coincident spectral parameters")
    return v


def det_z_ab(us, vs, a0, b0, gamma, q):
    """prod(1 - q u_i v_j) / (V(u) V(v)) * det[z(u_i, v_j)]."""
    d = det_exact([[z_ab(u, v, a0, b0, gamma, q) for v in vs] for u in us])
    return prod(1 - q * u * v for u in us for v in vs) * d / _vv(us, vs)


def ik_det_rhs(us: Sequence, vs: Sequence, params: ParameterSet):
    """Determinant formula for the decorated domain-wall partition function Z^gamma_N."""
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    pre = prod(1 / ((1 - s0 * xi0 * u) * (1 - s0 * v / xi0)) for u, v in zip(us, vs))
    d = det_exact([[z_entry(u, v, s0, xi0, gamma, q) for v in vs] for u in us])
    return pre * prod(1 - q * u * v for u in us for v in vs) * d / _vv(us, vs)


def ik_normalized(us: Sequence, vs: Sequence, params: ParameterSet):
    """Renormalized Z~ = prod(1-u_i v_j)(1-q u_i v_j) / (V(u)V(v)) det[z], in polynomial form.

    Each row is multiplied through by its denominators so the value is finite at
    u_i v_j = 1.
    """
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    a0, b0 = s0 * xi0, s0 / xi0
    n = len(us)
    rows = []
    for u in us:
        row = []
        for j, v in enumerate(vs):
            rest = prod((1 - u * vs[l]) * (1 - q * u * vs[l]) for l in range(n) if l != j)
            row.append(z_numerator_ab(u, v, a0, b0, gamma, q) * rest)
        rows.append(row)
    return det_exact(rows) / _vv(us, vs)


# ---------------------------------------------------------------------------
# alternative determinants


def mtilde_ab(i: int, u, vs, a0, b0, gamma, q, N: int):
    """M~_i(u) for the column-0 data (a0, b0) taken as they stand (no gamma rescaling)."""
    ratio = prod((1 - q * u * v) / (1 - u * v) for v in vs)
    body = (1 - a0 * u) * (u - b0) * ratio - q ** (N - i) * (gamma - a0 * u) * (gamma * q * u - b0) / gamma
    return u ** (N - i - 1) * body


def M_entry(i: int, v, us, params: ParameterSet):
    """M_i(v; s_0/gamma) with its xi_0 powers, as written in the v-variables."""
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    N = len(us)
    ratio = prod((1 - q * v * u) / (1 - v * u) for u in us)
    body = (1 - s0 * v / xi0) * (v / xi0 - s0) * ratio - q ** (N - i) * (gamma - s0 * v / xi0) * (
        gamma * q * v / xi0 - s0
    ) / gamma
    return xi0 ** (2 * i - N) * v ** (N - i - 1) * body


def Mtilde_entry(i: int, u, vs, params: ParameterSet):
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    return mtilde_ab(i, u, vs, s0 * xi0, s0 / xi0, gamma, q, len(vs))


def alt_det_rhs(us: Sequence, vs: Sequence, params: ParameterSet, side: str = "Mtilde"):
    """det[M_i(v_j)] / V(v) or det[M~_i(u_j)] / V(u), both at spin s_0/gamma."""
    N = len(us)
    if side == "M":
        d = det_exact([[M_entry(i, v, us, params) for v in vs] for i in range(1, N + 1)])
        return d / vandermonde(vs)
    if side == "Mtilde":
        d = det_exact([[Mtilde_entry(i, u, vs, params) for u in us] for i in range(1, N + 1)])
        return d / vandermonde(us)
    raise ValueError("side must be 'M' or 'Mtilde'")


def mtilde_det_ab(us, vs, a0, b0, gamma, q):
    N = len(us)
    d = det_exact([[mtilde_ab(i, u, vs, a0, b0, gamma, q, N) for u in us] for i in range(1, N + 1)])
    return d / vandermonde(us)


def thm41_lhs(us: Sequence, vs: Sequence, params: ParameterSet):
    """prod(1 - q u v)/(V(u)V(v)) det[z(u_i, v_j; s_0/gamma)]."""
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    return det_z_ab(us, vs, s0 * xi0 / gamma, s0 / (xi0 * gamma), gamma, q)


def _thm12_left(us, vs, params: ParameterSet):
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q

    def entry(u, v):
        num = (1 - gamma) * (q - s0 * s0 / gamma) * (1 - u * v) + (1 - q) * (1 - xi0 * s0 * u) * (1 - s0 * v / xi0)
        return num / ((1 - u * v) * (1 - q * u * v))

    return prod(1 - q * u * v for u in us for v in vs) / vandermonde(vs) * det_exact(
        [[entry(u, v) for v in vs] for u in us]
    )


def thm12_sides(us: Sequence, vs: Sequence, params: ParameterSet):
    """Both sides of the determinant identity with only V(v) on the left."""
    N = len(us)
    rhs = det_exact([[Mtilde_entry(i, u, vs, params) for u in us] for i in range(1, N + 1)])
    return _thm12_left(us, vs, params), rhs


# ---------------------------------------------------------------------------
# truncated sums over signatures


def truncated_sum(
    term: Callable[[Signature], object],
    N: int,
    tol: float = DEFAULT_TOL,
    max_part: int | None = None,
    max_top: int = 400,
) -> Truncated:
    """Sum term(lambda) over Sign_N by increasing largest part.

    Stops after two consecutive shells whose contribution is at most ``tol``
    relative to the partial sum, or after ``max_part`` when it is given.
    """
    partial = 0
    small = 0
    top = -1
    limit = max_part if max_part is not None else max_top
    while top < limit:
        top += 1
        shell = sum((term(lam) for lam in signatures_with_top(N, top)), 0) if N > 0 else (term(Signature(())) if top == 0 else 0)
        partial = partial + shell
        if max_part is None:
            if _negligible(shell, partial, tol):
                small += 1
                if small >= 2:
                    return Truncated(partial, top, True)
            else:
                small = 0
    return Truncated(partial, top, max_part is not None)


def _negligible(inc, ref, tol) -> bool:
    if isinstance(inc, (int, Fraction)) and isinstance(ref, (int, Fraction)):
        return inc == 0 if ref == 0 else abs(inc) <= Fraction(tol) * abs(ref)
    return abs(to_complex(inc)) <= tol * abs(to_complex(ref))


def refinement_factor(m0: int, params: ParameterSet):
    """(gamma q; q)_m0 (s_0^2/gamma; q)_m0 / ((q; q)_m0 (s_0^2; q)_m0)."""
    q, gamma, s2 = params.q, params.gamma, params.s0**2
    num = qpoch(gamma * q, q, m0) * qpoch(s2 / gamma, q, m0)
    if num == 0:
        return num
    return num / (qpoch(q, q, m0) * qpoch(s2, q, m0))


def _check_admissible(us, vs, params):
    if admissibility_ratio(us, vs, params) >= 1:
        raise AdmissibilityError("spectral parameters violate the admissibility bound")


def refined_cauchy_lhs(us, vs, params: ParameterSet, max_part: int | None = None, tol: float = DEFAULT_TOL) -> Truncated:
    _check_admissible(us, vs, params)
    ev = SpinHL(params, us=us, vs=vs)

    def term(lam):
        f = refinement_factor(lam.m0, params)
        return f * ev.F(lam) * ev.Fstar(lam) if f != 0 else f

    return truncated_sum(term, len(us), tol, max_part)


def refined_cauchy_rhs(us, vs, params: ParameterSet):
    """Closed form of the refined Cauchy sum, as stated with the original s_0."""
    s0, xi0 = params.s0, params.xi0
    lhs = _thm12_left(us, vs, params)
    pre = prod(1 / ((1 - s0 * xi0 * u) * (1 - s0 * v / xi0)) for u, v in zip(us, vs))
    return pre * lhs / vandermonde(us)


def refined_cauchy_rhs_via_z(us, vs, params: ParameterSet):
    """Same quantity through Z^gamma_N at spin s_0/gamma, corrected by the column-0 normalizers."""
    s0, xi0, gamma = params.s0, params.xi0, params.gamma
    shifted = params.with_s0(s0 / gamma)
    corr = prod(
        (1 - s0 * xi0 * u / gamma) * (1 - s0 * v / (xi0 * gamma)) / ((1 - s0 * xi0 * u) * (1 - s0 * v / xi0))
        for u, v in zip(us, vs)
    )
    return corr * ik_det_rhs(us, vs, shifted)


def s_general_sum(us, vs, params: ParameterSet, max_part=None, tol=DEFAULT_TOL) -> Truncated:
    """S^gamma_N at spin s_0/gamma assembled from the refined sum at spin s_0."""
    s0, xi0, gamma = params.s0, params.xi0, params.gamma
    inner = refined_cauchy_lhs(us, vs, params, max_part, tol)
    pre = prod(
        (1 - xi0 * s0 * u) / (1 - xi0 * s0 * u / gamma) * (1 - s0 * v / xi0) / (1 - s0 * v / (gamma * xi0))
        for u, v in zip(us, vs)
    )
    return Truncated(pre * inner.value, inner.truncation, inner.converged)


# ---------------------------------------------------------------------------
# Cauchy identities


def cauchy_fg(us, vs, params: ParameterSet, max_part=None, tol=DEFAULT_TOL):
    """Truncated sum of F_lambda(u) G*_lambda(v) and its product form."""
    _check_admissible(us, vs, params)
    q, s0, xi0 = params.q, params.s0, params.xi0
    N = len(us)
    ev = SpinHL(params, us=us)
    g = GstarEvaluator(vs, ColumnZeroForm.from_params(params))
    xi0 = params.xi0
    lhs = truncated_sum(lambda lam: ev.F(lam) * g(lam) / xi0**lam.ell, N, tol, max_part)
    rhs = qpoch(q, q, N) / prod(1 - s0 * xi0 * u for u in us) * prod(
        (1 - q * u * v) / (1 - u * v) for u in us for v in vs
    )
    return lhs, rhs


def cauchy_stable(us, vs, params: ParameterSet, max_part=None, tol=DEFAULT_TOL):
    q = params.q
    n = min(len(us), len(vs))
    p0 = params.with_s0(0 * q)
    ev_u, ev_v = SpinHL(p0, us=us), SpinHL(p0, vs=vs)

    def term(lam):
        lam = lam.partition()
        return ev_u.F(lam.padded(len(us))) / qpoch(q, q, len(us) - lam.ell) * ev_v.Fstar(lam.padded(len(vs)))

    lhs = truncated_sum(term, n, tol, max_part)
    rhs = prod((1 - q * u * v) / (1 - u * v) for u in us for v in vs)
    return lhs, rhs


def cauchy_hl(us, vs, t, max_part=None, tol=DEFAULT_TOL):
    n = min(len(us), len(vs))
    lhs = truncated_sum(lambda lam: hl_P(lam, us, t) * hl_Q(lam, vs, t), n, tol, max_part)
    rhs = prod((1 - t * u * v) / (1 - u * v) for u in us for v in vs)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Schur expansion


def c_small_ab(k: int, u, a0, b0, gamma, q):
    return u**k * (
        1
        - gamma * q ** (k + 1)
        + a0 * b0 * gamma * (gamma - q**k)
        - gamma * (b0 * (1 - q**k) / u + a0 * (1 - q ** (k + 1)) * u)
    )


def C_coeff_ab(lam, us, a0, b0, gamma, q, method: str = "alternant"):
    """C_lambda(u) with column-0 data (a0, b0) by the alternant or Jacobi-Trudi formula."""
    lam = lam if isinstance(lam, Signature) else Signature(lam)
    N = len(us)
    parts = (list(lam.parts) + [0] * N)[:N]
    if method == "alternant":
        d = det_exact([[c_small_ab(parts[i] + N - 1 - i, u, a0, b0, gamma, q) for u in us] for i in range(N)])
        return d / vandermonde(us)
    if method == "jacobi_trudi":
        top = max(parts) + N + 1
        h = [h_complete(k, us) for k in range(top + 1)]

        def hh(k):
            return h[k] if 0 <= k <= top else 0

        rows = []
        for i in range(1, N + 1):
            row = []
            for j in range(1, N + 1):
                lj = parts[j - 1]
                k = lj + N - j
                row.append(
                    -gamma * b0 * (1 - q**k) * hh(lj + i - j - 1)
                    + (1 + gamma**2 * a0 * b0 - gamma * (q + a0 * b0) * q**k) * hh(lj + i - j)
                    - gamma * a0 * (1 - q ** (k + 1)) * hh(lj + i - j + 1)
                )
            rows.append(row)
        return det_exact(rows)
    raise ValueError("method must be 'alternant' or 'jacobi_trudi'")


def C_coeff(lam, us, params: ParameterSet, method: str = "alternant", spin_scale=1):
    """C_lambda(u; s_0 * spin_scale); use spin_scale = 1/gamma for the shifted spin."""
    s0, xi0 = params.s0 * spin_scale, params.xi0
    return C_coeff_ab(lam, us, s0 * xi0, s0 / xi0, params.gamma, params.q, method)


def C_another_degeneration(lam, us, chi, q):
    """The h-determinant obtained at a0 = 0, b0 = q^{1-N}, gamma = q^{-N} chi."""
    lam = lam if isinstance(lam, Signature) else Signature(lam)
    N = len(us)
    parts = (list(lam.parts) + [0] * N)[:N]
    top = max(parts) + N + 1
    h = [h_complete(k, us) for k in range(top + 1)]

    def hh(k):
        return h[k] if 0 <= k <= top else 0

    return det_exact(
        [
            [
                -(q ** (1 - N) - q ** (parts[j - 1] - j + 1)) * hh(parts[j - 1] + i - j - 1)
                + (1 - chi * q ** (parts[j - 1] - j + 1)) * hh(parts[j - 1] + i - j)
                for j in range(1, N + 1)
            ]
            for i in range(1, N + 1)
        ]
    )


def schur_expansion(us, vs, params: ParameterSet, max_part=None, tol=DEFAULT_TOL):
    """det[z(u_i, v_j; s_0)]/(V(u)V(v)) against the truncated sum of C_lambda(u) s_lambda(v)."""
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    a0, b0 = s0 * xi0, s0 / xi0
    lhs = det_exact([[z_ab(u, v, a0, b0, gamma, q) for v in vs] for u in us]) / _vv(us, vs)
    rhs = truncated_sum(lambda lam: C_coeff_ab(lam, us, a0, b0, gamma, q) * schur(lam, vs), len(us), tol, max_part)
    return lhs, rhs


def cor63(us, vs, params: ParameterSet, max_part=None, tol=DEFAULT_TOL):
    """Refined sum over prod(1 - q u v) against the Schur-side sum with spin s_0/gamma."""
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    left = refined_cauchy_lhs(us, vs, params, max_part, tol)
    lhs = Truncated(left.value / prod(1 - q * u * v for u in us for v in vs), left.truncation, left.converged)
    a0, b0 = s0 * xi0 / gamma, s0 / (xi0 * gamma)
    pre = prod(1 / ((1 - s0 * xi0 * u) * (1 - s0 * v / xi0)) for u, v in zip(us, vs))
    right = truncated_sum(lambda lam: C_coeff_ab(lam, us, a0, b0, gamma, q) * schur(lam, vs), len(us), tol, max_part)
    return lhs, Truncated(pre * right.value, right.truncation, right.converged)


def det_s0_forms(us, vs, gamma, q):
    """The two determinant expressions of the s_0 = 0 refined sum."""
    n = len(us)
    first = det_exact(
        [[(1 - q + q * (1 - gamma) * (1 - u * v)) / ((1 - u * v) * (1 - q * u * v)) for v in vs] for u in us]
    ) / _vv(us, vs)
    second = det_exact(
        [
            [
                u ** (n - i)
                * (1 / prod(1 - u * v for v in vs) - gamma * q ** (n - i + 1) / prod(1 - q * u * v for v in vs))
                for u in us
            ]
            for i in range(1, n + 1)
        ]
    ) / vandermonde(us)
    return first, second


# ---------------------------------------------------------------------------
# interpolation Hall-Littlewood identities


def ihl_refined_cauchy(us, vs, chi, t, max_part=None, tol=DEFAULT_TOL):
    N = len(us)
    lhs = truncated_sum(
        lambda lam: qpoch(chi * t ** (1 - N), t, N - lam.ell) * iHL_F(lam, us, t) * hl_Q(lam, vs, t),
        N,
        tol,
        max_part,
    )
    return lhs, ihl_refined_det(us, vs, chi, t)


def ihl_refined_det(us, vs, chi, t):
    """det[u_j^{N-i-1}{(u_j - t^{1-N}) prod (1 - t u_j v_l)/(1 - u_j v_l) + t^{1-i}(1 - chi u_j)}] / V(u)."""
    N = len(us)
    rows = []
    for i in range(1, N + 1):
        row = []
        for u in us:
            ratio = prod((1 - t * u * v) / (1 - u * v) for v in vs)
            row.append(u ** (N - i - 1) * ((u - t ** (1 - N)) * ratio + t ** (1 - i) * (1 - chi * u)))
        rows.append(row)
    return det_exact(rows) / vandermonde(us)


def hl_cauchy_det_identity(us, vs, chi, t):
    N = len(us)
    c = chi * t ** (1 - N)
    lhs = prod(1 - t * u * v for u in us for v in vs) / _vv(us, vs) * det_exact(
        [[(1 - c + (c - t) * u * v) / ((1 - u * v) * (1 - t * u * v)) for v in vs] for u in us]
    )
    rhs = det_exact(
        [
            [u ** (N - i) * (prod((1 - t * u * v) / (1 - u * v) for v in vs) - t ** (1 - i) * chi) for u in us]
            for i in range(1, N + 1)
        ]
    ) / vandermonde(us)
    return lhs, rhs


def ihl_upgraded_det_identity(us, vs, chi, t):
    N = len(us)
    g = t ** (-N) * chi
    rhs = prod(1 - t * u * v for u in us for v in vs) / _vv(us, vs) * det_exact(
        [
            [((1 - g) * t * (1 - u * v) + (1 - t) * (1 - t ** (1 - N) * v)) / ((1 - u * v) * (1 - t * u * v)) for v in vs]
            for u in us
        ]
    )
    return ihl_refined_det(us, vs, chi, t), rhs


def ihl_det_via_general_identity(us, vs, chi, t):
    """Both sides of the general determinant identity at a0 = 0, b0 = t^{1-N}, gamma = t^{-N} chi."""
    N = len(us)
    g = t ** (-N) * chi
    b0 = t ** (1 - N)
    zero = 0 * t
    # the shifted spin s_0/gamma enters z; unshifted column data enters M~
    lhs = det_z_ab(us, vs, zero, b0 / g, g, t)
    rhs = mtilde_det_ab(us, vs, zero, b0, g, t)
    return lhs, rhs


def ihl_dual_cauchy(us, ys, t, max_part=None, tol=DEFAULT_TOL):
    N, K = len(us), len(ys)
    lhs = truncated_sum(
        lambda mu: iHL_F(mu, us, t) * iHL_G(mu, ys, t) if mu.ell <= min(N, K) else 0,
        N,
        tol,
        max_part,
    )
    rhs = prod((y - t ** (1 - N)) / (y - t) for y in ys) * prod((y - t * u) / (y - u) for u in us for y in ys)
    return lhs, rhs


# ---------------------------------------------------------------------------
# degenerations to interpolation Hall-Littlewood


def hl_column_zero(N: int, t, rest: ParameterSet | None = None) -> ColumnZeroForm:
    """a0 = 0, b0 = t^{1-N}, and s_x = 0, xi_x = 1 for x >= 1."""
    zero = 0 * t
    if rest is None:
        rest = ParameterSet(t, zero, 1 + zero, 1 + zero)
    return ColumnZeroForm(zero, t ** (1 - N), rest)


def degeneration_F(lam, us, t):
    """(xi_0^{-l} F_lambda at the degenerate column 0, prod_r (t;t)_{m_r} F^HL_lambda)."""
    lam = lam if isinstance(lam, Signature) else Signature(lam)
    cz = hl_column_zero(lam.N, t)
    lhs = F_cz(lam, us, cz)
    rhs = prod(qpoch(t, t, m) for m in lam.multiplicities().values()) * iHL_F(lam, us, t)
    return lhs, rhs


def degeneration_Fstar(lam, vs, t):
    """(xi_0^{l} F*_lambda at the degenerate column 0, Q^HL / (prod_j (1 - v_j t^{1-N}) prod_{r>=1} (t;t)_{m_r}))."""
    from .shl import Fstar_cz

    lam = lam if isinstance(lam, Signature) else Signature(lam)
    N = lam.N
    cz = hl_column_zero(N, t)
    lhs = Fstar_cz(lam, vs, cz)
    rhs = hl_Q(lam, vs, t) / prod(1 - v * t ** (1 - N) for v in vs)
    rhs = rhs / prod(qpoch(t, t, m) for r, m in lam.multiplicities().items() if r >= 1)
    return lhs, rhs


def degeneration_Gstar(lam, vs, t):
    """(xi_0^{l} G*_lambda at the degenerate column 0, the explicit symmetrization it reduces to)."""
    lam = lam if isinstance(lam, Signature) else Signature(lam)
    N, K, ell = lam.N, len(vs), lam.ell
    cz = hl_column_zero(N, t)
    lhs = Gstar_cz(lam, vs, cz)
    if K < ell:
        return lhs, 0 * t
    parts = (list(lam.parts) + [0] * K)[:K]
    pref = (1 - t) ** K * qpoch(t, t, N) / qpoch(t, t, K - ell)
    pref = pref / prod(1 - v * t ** (1 - N) for v in vs)
    pref = pref / prod(qpoch(t, t, m) for m in lam.multiplicities().values())

    def factor(i, v):
        value = v ** parts[i]
        return value * (1 - v * t ** (1 - ell)) if i >= ell else value

    sym = Symmetrizer(vs, lambda a, b: (a - t * b) / (a - b))
    rhs = pref * sym([[factor(i, v) for v in vs] for i in range(K)])
    return lhs, rhs


# ---------------------------------------------------------------------------
# special evaluations


def u0_specialization(N: int, vs: Sequence, params: ParameterSet):
    """(Z~ at u_i = u_0 q^{i-1}, product formula), with u_0 = 1/(s_0 xi_0 gamma)."""
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    u0 = 1 / (s0 * xi0 * gamma)
    us = [u0 * q**i for i in range(N)]
    lhs = ik_normalized(us, vs, params)
    rhs = q ** (N * N) * prod(1 - v * q**j * u0 for v in vs for j in range(N))
    rhs = rhs * prod((1 - gamma * q ** (1 - j)) * (1 - s0 * s0 * gamma * q ** (-j)) for j in range(1, N + 1))
    return lhs, rhs


def u0_det_case(N: int, vs: Sequence, params: ParameterSet) -> bool:
    lhs, rhs = u0_specialization(N, vs, params)
    return lhs == rhs


def lu_lower_part(vs: Sequence, params: ParameterSet):
    """Entries of L^{-1} A strictly below the diagonal for A = [z(u_0 q^{j-1}, v_i)]."""
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    N = len(vs)
    u0 = 1 / (s0 * xi0 * gamma)
    A = [[z_entry(u0 * q**j, v, s0, xi0, gamma, q) for j in range(N)] for v in vs]

    def f(k, v):
        return prod(q**r * v - gamma * s0 * xi0 for r in range(1, k + 1))

    def Q(k, j, v):
        return f(k, v) / prod(v - vs[r] for r in range(k) if r != j)

    Linv = [[Fraction(int(i == j)) for j in range(N)] for i in range(N)]
    for i in range(N):
        for j in range(i):
            Linv[i][j] = -Q(i, j, vs[j]) / Q(i, j, vs[i])
    LA = [[sum(Linv[i][k] * A[k][j] for k in range(N)) for j in range(N)] for i in range(N)]
    return [LA[i][j] for i in range(N) for j in range(i)]


def ik_recurrence(us, vs, params: ParameterSet):
    """(Z~_N at u_1 = 1/v_1, frozen-vertex factor times Z~_{N-1})."""
    s0, xi0, gamma, q = params.s0, params.xi0, params.gamma, params.q
    v1 = vs[0]
    us = [1 / v1] + list(us[1:])
    lhs = ik_normalized(us, vs, params)
    factor = (1 - q) * (1 - s0 * xi0 * gamma / v1) * (1 - s0 * gamma * v1 / xi0)
    factor = factor * prod((1 - q * v / v1) * (1 - q * v1 * u) for u, v in zip(us[1:], vs[1:]))
    rest = ik_normalized(us[1:], vs[1:], params) if len(us) > 1 else 1
    return lhs, factor * rest


@dataclass(frozen=True)
class TridiagResult:
    det: object
    product: object
    eigen_ok: bool


def tridiagonal(N: int, gamma, s0, q):
    """The N x N tridiagonal matrix with a_i on, b_i above and c_i below the diagonal."""
    a = [q**N * (1 - gamma * q ** (1 - i)) + s0**2 * gamma * (gamma - q ** (N - i)) for i in range(1, N + 1)]
    b = [gamma * s0**2 * (q ** (N - i) - 1) for i in range(1, N + 1)]
    # gamma in c_i: without it neither the determinant nor the eigenvalues match
    c = [gamma * q ** (N - i) * (1 - q**i) for i in range(1, N + 1)]
    m = [[0 * q for _ in range(N)] for _ in range(N)]
    for i in range(N):
        m[i][i] = a[i]
        if i + 1 < N:
            m[i][i + 1] = b[i]
            m[i + 1][i] = c[i]
    return m, a, b, c


def krawtchouk_vector(i: int, k: int, N: int, s0, q):
    """Terminating 3phi2(q^{i-N}, q^{k-N}, s0^2 q^{-i}; q^{1-N}, 0; q, q)."""
    total = 0 * q
    for r in range(N):
        num = qpoch(q ** (i - N), q, r) * qpoch(q ** (k - N), q, r) * qpoch(s0**2 * q ** (-i), q, r)
        if num == 0:
            continue
        total += num / (qpoch(q ** (1 - N), q, r) * qpoch(q, q, r)) * q**r
    return total


def tridiag_case(N: int, gamma, s0, q) -> TridiagResult:
    m, a, b, c = tridiagonal(N, gamma, s0, q)
    det = det_exact(m)
    product = q ** (N * N) * prod((1 - gamma * q ** (1 - j)) * (1 - s0**2 * gamma * q ** (-j)) for j in range(1, N + 1))
    ok = True
    for i in range(1, N + 1):
        eig = q**N * (1 - gamma * q ** (i - N)) * (1 - gamma * s0**2 * q ** (-i))
        vec = [krawtchouk_vector(i, k, N, s0, q) for k in range(1, N + 1)]
        for k in range(N):
            lhs = a[k] * vec[k]
            if k + 1 < N:
                lhs += b[k] * vec[k + 1]
            if k > 0:
                lhs += c[k - 1] * vec[k - 1]
            ok = ok and lhs == eig * vec[k]
    return TridiagResult(det, product, ok)


def divided_difference(f: Callable, xs: Iterable):
    """Highest-order divided difference of f on the nodes xs."""
    xs = list(xs)
    vals = [f(x) for x in xs]
    for level in range(1, len(xs)):
        vals = [(vals[i + 1] - vals[i]) / (xs[i + level] - xs[i]) for i in range(len(vals) - 1)]
    return vals[0]


# ---------------------------------------------------------------------------
# registry and verification


class Verdict:
    EXACT_MATCH = "ExactMatch"
    WITHIN_TOLERANCE = "WithinTolerance"
    FAIL = "Fail"


EXACT, TRUNCATED, QUADRATURE = "Exact", "Truncated", "Quadrature"
TOLERANCES = {TRUNCATED: 1e-12, QUADRATURE: 1e-8}
REGISTRY_TRUNCATION_TOL = 1e-16
# admissibility bound used by the sampler; anything up to 0.8 keeps the required margin
MAX_SAMPLED_RATIO = 0.5


@dataclass(frozen=True)
class IdentityCase:
    id: str
    N: int
    point: dict
    seed: int | None = None
    max_part: int | None = None
    tol: float | None = None


@dataclass(frozen=True)
class VerificationReport:
    id: str
    N: int
    seed: int | None
    point: dict
    lhs: object
    rhs: object
    truncation: int
    abs_err: float
    rel_err: float
    verdict: str
    tolerance_class: str
    error: str | None = None
    runtime_ms: float | None = None

    @property
    def passed(self) -> bool:
        return self.verdict != Verdict.FAIL


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    title: str
    tolerance_class: str
    evaluate: Callable
    sample: Callable


def _params(p) -> ParameterSet:
    return ParameterSet(p["q"], p["s"], p.get("xi", Fraction(1)), p.get("gamma", Fraction(1)))


def _err(lhs, rhs):
    if isinstance(lhs, (int, Fraction)) and isinstance(rhs, (int, Fraction)):
        diff = abs(Fraction(lhs) - Fraction(rhs))
        scale = max(abs(Fraction(lhs)), abs(Fraction(rhs)))
        return float(diff), (0.0 if scale == 0 else float(diff / scale))
    a, b = to_complex(lhs), to_complex(rhs)
    scale = max(abs(a), abs(b))
    return abs(a - b), (0.0 if scale == 0 else abs(a - b) / scale)


# each evaluator returns (lhs, rhs, truncation)


def _ev_refined(p, N, mp, tol):
    us, vs, prm = p["us"], p["vs"], _params(p)
    left = refined_cauchy_lhs(us, vs, prm, mp, tol)
    return left.value, refined_cauchy_rhs(us, vs, prm), left.truncation


def _ev_det12(p, N, mp, tol):
    lhs, rhs = thm12_sides(p["us"], p["vs"], _params(p))
    return lhs, rhs, 0


def _ev_z_det(p, N, mp, tol):
    from .vertex_model import pf_Z

    prm = _params(p)
    a = p.get("a")
    if a is None:
        return pf_Z(p["us"], p["vs"], prm), ik_det_rhs(p["us"], p["vs"], prm), 0
    return pf_Z(p["us"], p["vs"], prm, a=a), ik_det_rhs(p["us"], p["vs"], prm.with_gamma(prm.q**a)), 0


def _ev_z_s(p, N, mp, tol):
    from .vertex_model import pf_S, pf_Z

    prm = _params(p)
    a = p.get("a")
    s = pf_S(p["us"], p["vs"], prm, a=a, max_part=mp, tol=tol)
    return s.value, pf_Z(p["us"], p["vs"], prm, a=a), s.truncation


def _ev_fg(p, N, mp, tol):
    left, rhs = cauchy_fg(p["us"], p["vs"], _params(p), mp, tol)
    return left.value, rhs, left.truncation


def _ev_stable(p, N, mp, tol):
    left, rhs = cauchy_stable(p["us"], p["vs"], _params(p), mp, tol)
    return left.value, rhs, left.truncation


def _ev_hl(p, N, mp, tol):
    left, rhs = cauchy_hl(p["us"], p["vs"], p["t"], mp, tol)
    return left.value, rhs, left.truncation


def _ev_torus(p, N, mp, tol):
    from .kernel import ContourSpec
    from .shl import torus_pairing

    prm = _params(p)
    c = ContourSpec(0, float(p["radius"]), int(p.get("nodes", 64)))
    lam, mu = Signature(p["lam"]), Signature(p["mu"])
    value = torus_pairing(lam, mu, prm, c)
    return value, complex(1.0 if lam == mu else 0.0), c.nodes


def _ev_schur(p, N, mp, tol):
    lhs, right = schur_expansion(p["us"], p["vs"], _params(p), mp, tol)
    return lhs, right.value, right.truncation


def _ev_cor63(p, N, mp, tol):
    left, right = cor63(p["us"], p["vs"], _params(p), mp, tol)
    return left.value, right.value, max(left.truncation, right.truncation)


def _ev_ihl(p, N, mp, tol):
    left, rhs = ihl_refined_cauchy(p["us"], p["vs"], p["chi"], p["t"], mp, tol)
    return left.value, rhs, left.truncation


def _ev_hl_det(p, N, mp, tol):
    return (*hl_cauchy_det_identity(p["us"], p["vs"], p["chi"], p["t"]), 0)


def _ev_upgrade(p, N, mp, tol):
    return (*ihl_upgraded_det_identity(p["us"], p["vs"], p["chi"], p["t"]), 0)


def _ev_ihl_dual(p, N, mp, tol):
    left, rhs = ihl_dual_cauchy(p["us"], p["ys"], p["t"], mp, tol)
    return left.value, rhs, left.truncation


def _ev_u0(p, N, mp, tol):
    return (*u0_specialization(N, p["vs"], _params(p)), 0)


def _ev_tridiag(p, N, mp, tol):
    r = tridiag_case(N, p["gamma"], p["s"][0], p["q"])
    if not r.eigen_ok:
        raise ArithmeticError("three-term eigenvector relation fails")
    return r.det, r.product, 0


def _ev_degen52(p, N, mp, tol):
    return (*degeneration_F(p["lam"], p["us"], p["t"]), 0)


def _ev_degen54(p, N, mp, tol):
    return (*degeneration_Gstar(p["lam"], p["vs"], p["t"]), 0)


# ---- random points


def _rat(rng, lo, hi, max_den: int = 16) -> Fraction:
    """Uniform-ish rational in the open interval (lo, hi) with denominator at most max_den."""
    while True:
        den = rng.randint(1, max_den)
        num = rng.randint(-16, 16)
        x = Fraction(num, den)
        if lo < x < hi and x != 0:
            return x


def _distinct(rng, n, lo, hi, avoid=()):
    out: list = []
    while len(out) < n:
        x = _rat(rng, lo, hi)
        if x not in out and x not in avoid:
            out.append(x)
    return out


def _spin_base(rng, N, admissible: bool):
    if admissible:
        while True:
            q = _rat(rng, 0.1, 0.9)
            s = [_rat(rng, -0.6, -0.05) for _ in range(4)]
            xi = [_rat(rng, 0.5, 2.0) for _ in range(4)]
            gamma = _rat(rng, 0.1, 2.0)
            us = _distinct(rng, N, 0.0, 0.4)
            vs = _distinct(rng, N, 0.0, 0.4)
            prm = ParameterSet(q, s, xi, gamma)
            if admissibility_ratio(us, vs, prm, range(4)) <= MAX_SAMPLED_RATIO:
                break
    else:
        q = _rat(rng, -4, 4)
        s = [_rat(rng, -4, 4) for _ in range(4)]
        xi = [_rat(rng, -4, 4) for _ in range(4)]
        gamma = _rat(rng, -4, 4)
        us = _distinct(rng, N, -4, 4)
        vs = _distinct(rng, N, -4, 4)
    return {"q": q, "s": s, "xi": xi, "gamma": gamma, "us": us, "vs": vs}


def _sample_generic(rng, N):
    return _spin_base(rng, N, False)


def _sample_admissible(rng, N):
    return _spin_base(rng, N, True)


def _sample_z(rng, N):
    p = _spin_base(rng, N, False)
    p["a"] = rng.randint(0, 3)
    return p


def _sample_z_s(rng, N):
    p = _spin_base(rng, N, True)
    p["a"] = rng.randint(0, 3)
    return p


def _sample_hl(rng, N):
    return {"t": _rat(rng, 0.1, 0.9), "us": _distinct(rng, N, 0.0, 0.5), "vs": _distinct(rng, N, 0.0, 0.5)}


def _sample_ihl(rng, N):
    p = _sample_hl(rng, N)
    p["chi"] = _rat(rng, -2, 2)
    return p


def _sample_ihl_exact(rng, N):
    return {
        "t": _rat(rng, -4, 4),
        "chi": _rat(rng, -4, 4),
        "us": _distinct(rng, N, -4, 4),
        "vs": _distinct(rng, N, -4, 4),
    }


def _sample_ihl_dual(rng, N):
    t = _rat(rng, 0.1, 0.9)
    # y = t^{1-N} zeroes the product side, where relative error means nothing
    ys = _distinct(rng, max(1, N), 3.0, 12.0, avoid=(t ** (1 - N),))
    return {"t": t, "us": _distinct(rng, N, 0.0, 0.5), "ys": ys}


def torus_nodes(q, target: float = 1e-14) -> int:
    """Nodes per axis: the pole at u_i = q u_j makes the trapezoid error decay like q^M."""
    need = math.log(target) / math.log(float(q))
    return max(64, 16 * math.ceil(need / 16))


def _sample_torus(rng, N):
    q = _rat(rng, 0.1, 0.8)
    s = [_rat(rng, -0.5, -0.1) for _ in range(3)]
    xi = [_rat(rng, 0.8, 1.25) for _ in range(3)]
    lam = sorted((rng.randint(0, 3) for _ in range(N)), reverse=True)
    mu = lam if rng.random() < 0.5 else sorted((rng.randint(0, 3) for _ in range(N)), reverse=True)
    return {"q": q, "s": s, "xi": xi, "lam": lam, "mu": mu, "radius": Fraction(1), "nodes": torus_nodes(q)}


def _sample_tridiag(rng, N):
    return {"q": _rat(rng, -4, 4), "s": [_rat(rng, -4, 4)], "gamma": _rat(rng, -4, 4)}


def _sample_degen52(rng, N):
    return {
        "t": _rat(rng, -4, 4),
        "us": _distinct(rng, N, -4, 4),
        "lam": sorted((rng.randint(0, 4) for _ in range(N)), reverse=True),
    }


def _sample_degen54(rng, N):
    K = N + rng.randint(0, 1)
    return {
        "t": _rat(rng, -4, 4),
        "vs": _distinct(rng, K, -4, 4),
        "lam": sorted((rng.randint(0, 4) for _ in range(N)), reverse=True),
    }


REGISTRY: dict[str, IdentitySpec] = {}


def _register(id, title, cls, evaluate, sample):
    REGISTRY[id] = IdentitySpec(id, title, cls, evaluate, sample)


_register(
    "REFINED_CAUCHY_T11", "refined Cauchy identity for spin Hall-Littlewood functions",
    TRUNCATED, _ev_refined, _sample_admissible,
)
_register(
    "DET_IDENTITY_T12", "determinant identity with V(v) only on the left",
    EXACT, _ev_det12, _sample_generic,
)
_register(
    "Z_EQUALS_DET_P36", "decorated domain-wall partition function equals the determinant",
    EXACT, _ev_z_det, _sample_z,
)
_register(
    "Z_EQUALS_S_P35", "cross-vertex square equals the two-layer lattice sum",
    TRUNCATED, _ev_z_s, _sample_z_s,
)
_register("CAUCHY_FG", "Cauchy identity for F and G*", TRUNCATED, _ev_fg, _sample_admissible)
_register("CAUCHY_STABLE", "Cauchy identity for stable functions", TRUNCATED, _ev_stable, _sample_admissible)
_register("CAUCHY_HL", "Hall-Littlewood Cauchy identity", TRUNCATED, _ev_hl, _sample_hl)
_register("TORUS_ORTH", "torus orthogonality of F and F*", QUADRATURE, _ev_torus, _sample_torus)
_register(
    "SCHUR_EXPANSION_T62", "Schur expansion of the determinant",
    TRUNCATED, _ev_schur, _sample_admissible,
)
_register("COR_63", "refined sum against the Schur-side sum", TRUNCATED, _ev_cor63, _sample_admissible)
_register(
    "IHL_REFINED_CAUCHY", "refined Cauchy identity for interpolation Hall-Littlewood",
    TRUNCATED, _ev_ihl, _sample_ihl,
)
_register(
    "WZJ_CUENCA", "determinant identity for the Hall-Littlewood case",
    EXACT, _ev_hl_det, _sample_ihl_exact,
)
_register("CUENCA_UPGRADE_P51", "upgraded determinant form", EXACT, _ev_upgrade, _sample_ihl_exact)
_register(
    "OLSHANSKI_CAUCHY", "Cauchy identity for interpolation and dual functions",
    TRUNCATED, _ev_ihl_dual, _sample_ihl_dual,
)
_register("U0_DET_L37", "specialization u_i = u_0 q^{i-1}", EXACT, _ev_u0, _sample_generic)
_register("TRIDIAG_L44", "tridiagonal determinant and eigenvectors", EXACT, _ev_tridiag, _sample_tridiag)
_register(
    "DEGEN_P52", "degeneration of F to interpolation Hall-Littlewood",
    EXACT, _ev_degen52, _sample_degen52,
)
_register("DEGEN_L54", "degeneration of G*", EXACT, _ev_degen54, _sample_degen54)

IDS = tuple(REGISTRY)

# N for which a registry case is meaningful and affordable
N_LIMITS = {
    "TORUS_ORTH": 2,
    "REFINED_CAUCHY_T11": 3,
    "Z_EQUALS_S_P35": 3,
    "CAUCHY_FG": 3,
    "CAUCHY_STABLE": 3,
    "COR_63": 3,
    "SCHUR_EXPANSION_T62": 3,
    "IHL_REFINED_CAUCHY": 3,
    "OLSHANSKI_CAUCHY": 3,
    "CAUCHY_HL": 3,
}


def random_case(id: str, N: int, seed: int, index: int = 0) -> IdentityCase:
    """Deterministic random case for (id, N, seed, index), rejection-sampled until both sides evaluate."""
    import random

    spec = REGISTRY[id]
    rng = random.Random(f"{seed}:{id}:{N}:{index}")
    for _ in range(200):
        point = spec.sample(rng, N)
        if spec.tolerance_class != EXACT:
            return IdentityCase(id, N, point, seed)
        try:
            spec.evaluate(point, N, None, REGISTRY_TRUNCATION_TOL)
        except (ZeroDivisionError, ArithmeticError):
            continue
        return IdentityCase(id, N, point, seed)
    raise RuntimeError(f"could not sample a generic point for {id}")


def verify(case: IdentityCase, timings: bool = False, tolerances: dict | None = None) -> VerificationReport:
    import time

    bounds = {**TOLERANCES, **(tolerances or {})}

    spec = REGISTRY[case.id]
    tol_sum = case.tol if case.tol is not None else REGISTRY_TRUNCATION_TOL
    start = time.perf_counter()
    try:
        lhs, rhs, truncation = spec.evaluate(case.point, case.N, case.max_part, tol_sum)
    except Exception as exc:  # recorded per case, the caller decides the exit code
        return VerificationReport(case.id, case.N, case.seed, case.point, None, None, 0, float("nan"),
                                  float("nan"), Verdict.FAIL, spec.tolerance_class,
                                  error=f"{type(exc).__name__}: {exc}")
    elapsed = (time.perf_counter() - start) * 1000 if timings else None
    abs_err, rel = _err(lhs, rhs)
    cls = spec.tolerance_class
    if cls == EXACT:
        verdict = Verdict.EXACT_MATCH if lhs == rhs else Verdict.FAIL
    elif cls == TRUNCATED:
        verdict = Verdict.WITHIN_TOLERANCE if rel < bounds[TRUNCATED] else Verdict.FAIL
    else:
        verdict = Verdict.WITHIN_TOLERANCE if abs_err < bounds[QUADRATURE] else Verdict.FAIL
    return VerificationReport(case.id, case.N, case.seed, case.point, lhs, rhs, truncation, abs_err, rel,
                              verdict, cls, runtime_ms=elapsed)

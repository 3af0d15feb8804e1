"""Symmetrization formulas for spin Hall-Littlewood functions and their relatives.

Every family here is a sum over permutations of a cross factor times a product
of one-variable factors. :class:`Symmetrizer` precomputes the permutation
weights once per variable set so that sweeping many signatures is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .kernel import ContourSpec, PoleError, det_exact, permutations, prod, qpoch
from .signatures import ParameterSet, Signature


def _sig(lam) -> Signature:
    return lam if isinstance(lam, Signature) else Signature(lam)


def _require_distinct(xs: Sequence, what: str):
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if xs[i] == xs[j]:
                raise PoleError(f"coincident {what}: position {i} and {j}")


class Symmetrizer:
    """Sum over sigma of prod_{i<j} cross(x_si, x_sj) * prod_i factor_i(x_si)."""

    def __init__(self, xs: Sequence, cross: Callable):
        _require_distinct(xs, "variables")
        self.xs = list(xs)
        n = len(xs)
        table = [[cross(xs[a], xs[b]) if a != b else None for b in range(n)] for a in range(n)]
        self.perms = []
        for sigma in permutations(n):
            c = prod(table[sigma[i]][sigma[j]] for i in range(n) for j in range(i + 1, n))
            if c != 0:
                self.perms.append((sigma, c))

    def __call__(self, factor_table) -> object:
        """``factor_table[i][a]`` is the i-th factor evaluated at variable a."""
        total = 0
        for sigma, c in self.perms:
            term = c
            for i, a in enumerate(sigma):
                term = term * factor_table[i][a]
                if term == 0:
                    break
            total += term
        return total


def hl_cross(t):
    return lambda a, b: (a - t * b) / (a - b)


# ---------------------------------------------------------------------------
# spin Hall-Littlewood functions


def phi(k: int, u, params: ParameterSet):
    """phi_k(u) = (1 - q)/(1 - s_k xi_k u) * prod_{j<k} (xi_j u - s_j)/(1 - s_j xi_j u)."""
    q = params.q
    den = 1 - params.s[k] * params.xi[k] * u
    if den == 0:
        raise PoleError(f"phi_{k} pole")
    value = (1 - q) / den
    for j in range(k):
        s, xi = params.s[j], params.xi[j]
        d = 1 - s * xi * u
        if d == 0:
            raise PoleError(f"phi_{k} pole at column {j}")
        value = value * (xi * u - s) / d
    return value


class _PhiTable:
    """Cached phi_k(x) values for a fixed variable list, extended on demand."""

    def __init__(self, xs, fn):
        self.xs = xs
        self.fn = fn
        self.rows: dict[int, list] = {}

    def row(self, k: int):
        if k not in self.rows:
            self.rows[k] = [self.fn(k, x) for x in self.xs]
        return self.rows[k]


def multiplicity_prefactor(lam: Signature, params: ParameterSet, s0_squared=None):
    """prod_{r>=0} (s_r^2; q)_{m_r} / (q; q)_{m_r}."""
    q = params.q
    value = Fraction(1) if isinstance(q, (int, Fraction)) else 1.0
    for r, m in lam.multiplicities().items():
        s2 = s0_squared if (r == 0 and s0_squared is not None) else params.s[r] ** 2
        value = value * qpoch(s2, q, m) / qpoch(q, q, m)
    return value


class SpinHL:
    """Evaluator for F_lambda and F*_lambda at fixed spectral parameters.

    Reuses permutation weights and phi values across signatures, which is what
    truncated Cauchy sums need.
    """

    def __init__(self, params: ParameterSet, us: Sequence | None = None, vs: Sequence | None = None):
        self.params = params
        q = params.q
        dual = params.inverted_xi()
        if us is not None:
            self._fsym = Symmetrizer(us, hl_cross(q))
            self._fphi = _PhiTable(list(us), lambda k, u: phi(k, u, params))
        if vs is not None:
            self._gsym = Symmetrizer(vs, hl_cross(q))
            self._gphi = _PhiTable(list(vs), lambda k, v: phi(k, v, dual))

    def F(self, lam) -> object:
        lam = _sig(lam)
        if lam.N != len(self._fsym.xs):
            raise ValueError("signature length must equal the number of variables")
        return self._fsym([self._fphi.row(k) for k in lam])

    def Fstar(self, lam) -> object:
        lam = _sig(lam)
        if lam.N != len(self._gsym.xs):
            raise ValueError("signature length must equal the number of variables")
        pref = multiplicity_prefactor(lam, self.params)
        if pref == 0:
            return pref
        return pref * self._gsym([self._gphi.row(k) for k in lam])


def F(lam, us: Sequence, params: ParameterSet):
    """F_lambda(u_1..u_N) by symmetrization."""
    return SpinHL(params, us=us).F(lam)


def Fstar(lam, vs: Sequence, params: ParameterSet):
    """F*_lambda(v_1..v_N): multiplicity prefactor times the xi-inverted symmetrization."""
    return SpinHL(params, vs=vs).Fstar(lam)


def F_shifted(lam, r: int, us: Sequence, params: ParameterSet):
    """F_lambda with parameters shifted by r, defined through F_{lambda + r}.

    Dividing F_{lambda+r} by prod_i prod_{j<r} (xi_j u_i - s_j)/(1 - s_j xi_j u_i)
    extends F_lambda to signatures with negative parts.
    """
    lam = lam if isinstance(lam, Signature) else Signature(lam, allow_negative=True)
    lifted = lam.shifted(r)
    if lifted.parts and lifted[-1] < 0:
        raise ValueError("lambda + r must be nonnegative")
    factor = 1
    for u in us:
        for j in range(r):
            s, xi = params.s[j], params.xi[j]
            factor = factor * (xi * u - s) / (1 - s * xi * u)
    if factor == 0:
        raise PoleError("shift factor vanishes")
    return F(Signature(lifted.parts), us, params) / factor


def F_stable(lam, us: Sequence, params: ParameterSet):
    """Stable F~_lambda: pad lambda with zeros, set s_0 = 0 and divide by (q;q)_{k-l}."""
    lam = _sig(lam).partition()
    k = len(us)
    if k < lam.ell:
        return Fraction(0) if isinstance(params.q, (int, Fraction)) else 0.0
    p0 = params.with_s0(0 * params.q)
    return F(lam.padded(k), us, p0) / qpoch(params.q, params.q, k - lam.ell)


def Fstar_stable(lam, vs: Sequence, params: ParameterSet):
    lam = _sig(lam).partition()
    k = len(vs)
    if k < lam.ell:
        return Fraction(0) if isinstance(params.q, (int, Fraction)) else 0.0
    return Fstar(lam.padded(k), vs, params.with_s0(0 * params.q))


def Gstar(lam, vs: Sequence, params: ParameterSet):
    """G*_lambda(v_1..v_K) for lambda of length N, by symmetrization over S_K."""
    lam = _sig(lam)
    return Gstar_cz(lam, vs, ColumnZeroForm.from_params(params)) / params.xi0**lam.ell


# ---------------------------------------------------------------------------
# column-zero form


@dataclass(frozen=True)
class ColumnZeroForm:
    """Column 0 described by a0 = s_0 xi_0 and b0 = s_0 / xi_0.

    ``rest`` supplies q, gamma and the columns x >= 1 (its column 0 is unused).
    Functions taking this form return xi_0-normalized values, which stay finite
    when a0 or b0 is sent to 0 exactly.
    """

    a0: object
    b0: object
    rest: ParameterSet

    @classmethod
    def from_params(cls, params: ParameterSet) -> "ColumnZeroForm":
        s0, xi0 = params.s0, params.xi0
        return cls(s0 * xi0, s0 / xi0, params)

    @property
    def q(self):
        return self.rest.q

    @property
    def s0_squared(self):
        return self.a0 * self.b0

    def dual(self) -> "ColumnZeroForm":
        """Form seen by starred functions: xi inverted, so a0 and b0 swap."""
        return ColumnZeroForm(self.b0, self.a0, self.rest.inverted_xi())


def phi_normalized(k: int, u, cz: ColumnZeroForm):
    """xi_0^{-1} phi_k(u) for k >= 1 and phi_0(u) for k = 0, in terms of (a0, b0)."""
    p = cz.rest
    q = p.q
    d0 = 1 - cz.a0 * u
    if d0 == 0:
        raise PoleError("column-0 pole")
    if k == 0:
        return (1 - q) / d0
    dk = 1 - p.s[k] * p.xi[k] * u
    if dk == 0:
        raise PoleError(f"phi_{k} pole")
    value = (1 - q) / dk * (u - cz.b0) / d0
    for j in range(1, k):
        s, xi = p.s[j], p.xi[j]
        value = value * (xi * u - s) / (1 - s * xi * u)
    return value


def F_cz(lam, us: Sequence, cz: ColumnZeroForm):
    """xi_0^{-l(lambda)} F_lambda(us)."""
    lam = _sig(lam)
    sym = Symmetrizer(us, hl_cross(cz.q))
    return sym([[phi_normalized(k, u, cz) for u in us] for k in lam])


def Fstar_cz(lam, vs: Sequence, cz: ColumnZeroForm):
    """xi_0^{l(lambda)} F*_lambda(vs)."""
    lam = _sig(lam)
    dual = cz.dual()
    pref = multiplicity_prefactor(lam, cz.rest, s0_squared=cz.s0_squared)
    sym = Symmetrizer(vs, hl_cross(cz.q))
    return pref * sym([[phi_normalized(k, v, dual) for v in vs] for k in lam])


def Gstar_cz(lam, vs: Sequence, cz: ColumnZeroForm):
    """xi_0^{l(lambda)} G*_lambda(vs).

    For lambda in Sign_N and K = len(vs) >= l(lambda), parts beyond N are
    treated as zeros.
    """
    return GstarEvaluator(vs, cz)(lam)


class GstarEvaluator:
    """xi_0-normalized G*_lambda at fixed vs, reusing permutation weights across signatures."""

    def __init__(self, vs: Sequence, cz: ColumnZeroForm):
        self.vs = list(vs)
        self.cz = cz
        self._dual = cz.dual()
        self._sym = Symmetrizer(vs, hl_cross(cz.q))
        self._phi = _PhiTable(self.vs, lambda k, v: phi_normalized(k, v, self._dual))
        for v in self.vs:
            if v == cz.a0:
                raise PoleError("G* pole v = s0 xi0")

    def __call__(self, lam) -> object:
        lam = _sig(lam)
        cz, q, vs = self.cz, self.cz.q, self.vs
        K, N, ell, m0 = len(vs), lam.N, lam.ell, lam.m0
        if K < ell:
            return Fraction(0) if isinstance(q, (int, Fraction)) else 0.0
        parts = (list(lam.parts) + [0] * K)[:K]
        pref = qpoch(q, q, N) / (qpoch(q, q, m0) * qpoch(q, q, K - ell))
        for r, m in lam.multiplicities().items():
            if r >= 1:
                pref = pref * qpoch(cz.rest.s[r] ** 2, q, m) / qpoch(q, q, m)
        rows = []
        for i in range(K):
            base = self._phi.row(parts[i])
            if i < ell:
                rows.append([b * v / (v - cz.a0) for b, v in zip(base, vs)])
            else:
                rows.append([b * (1 - v * q**m0 * cz.b0) for b, v in zip(base, vs)])
        return pref * self._sym(rows)


# ---------------------------------------------------------------------------
# Schur and complete homogeneous


def h_complete(k: int, us: Sequence):
    """Complete homogeneous symmetric polynomial h_k; zero for negative k."""
    if k < 0:
        return 0
    return _h_table(k, tuple(us))[k]


def _h_table(k: int, us: tuple):
    h = [1] + [0] * k
    for u in us:
        for d in range(1, k + 1):
            h[d] = h[d] + u * h[d - 1]
    return h


def schur(lam, vs: Sequence):
    """Schur polynomial by the bialternant formula."""
    lam = _sig(lam).partition()
    n = len(vs)
    if lam.N > n:
        return 0
    _require_distinct(vs, "Schur variables")
    parts = list(lam.parts) + [0] * (n - lam.N)
    num = det_exact([[v ** (parts[j] + n - 1 - j) for j in range(n)] for v in vs])
    den = prod(vs[i] - vs[j] for i in range(n) for j in range(i + 1, n))
    return num / den


def schur_jacobi_trudi(lam, vs: Sequence):
    lam = _sig(lam).partition()
    n = lam.N
    if n == 0:
        return 1
    top = lam[0] + n
    h = _h_table(top, tuple(vs))

    def hh(k):
        return h[k] if 0 <= k <= top else 0

    return det_exact([[hh(lam[i] + j - i) for j in range(n)] for i in range(n)])


# ---------------------------------------------------------------------------
# Hall-Littlewood and interpolation Hall-Littlewood


def hl_b(lam, t):
    """b_lambda = prod_{r>=1} (t;t)_{m_r}."""
    lam = _sig(lam)
    return prod(qpoch(t, t, m) for r, m in lam.multiplicities().items() if r >= 1)


def hl_Q(lam, us: Sequence, t):
    lam = _sig(lam)
    N = len(us)
    if lam.ell > N:
        return 0
    parts = (list(lam.partition().parts) + [0] * N)[:N]
    sym = Symmetrizer(us, hl_cross(t))
    total = sym([[u**p for u in us] for p in parts])
    return (1 - t) ** N / qpoch(t, t, N - lam.ell) * total


def hl_P(lam, us: Sequence, t):
    return hl_Q(lam, us, t) / hl_b(lam, t)


def iHL_F(lam, us: Sequence, t):
    """Interpolation Hall-Littlewood polynomial F^HL_lambda in len(lambda) variables."""
    lam = _sig(lam)
    N = lam.N
    if len(us) != N:
        raise ValueError("signature length must equal the number of variables")
    pref = (1 - t) ** N
    for r, m in lam.multiplicities().items():
        pref = pref / qpoch(t, t, m)
    shift = t ** (1 - N)

    def factor(p, u):
        return u**p * (1 - shift / u) if p > 0 else 1

    sym = Symmetrizer(us, hl_cross(t))
    return pref * sym([[factor(p, u) for u in us] for p in lam])


def iHL_G(lam, ys: Sequence, t):
    """Dual interpolation function G^HL_lambda(y_1..y_K); parts beyond N count as zero."""
    lam = _sig(lam)
    K, ell = len(ys), lam.ell
    if K < ell:
        return 0
    parts = (list(lam.parts) + [0] * K)[:K]
    pref = (1 - t) ** K / qpoch(t, t, K - ell)
    shift = t ** (1 - ell)

    def factor(p, y):
        num = y - shift if p == 0 else y
        return y ** (-p) * num / (y - t)

    sym = Symmetrizer(ys, lambda a, b: (b - t * a) / (b - a))
    return pref * sym([[factor(p, y) for y in ys] for p in parts])


# ---------------------------------------------------------------------------
# torus orthogonality


def torus_pairing(lam, mu, params: ParameterSet, contour: ContourSpec) -> complex:
    """(1/N!) torus integral of prod_{i!=j}(u_i-u_j)/prod_{i,j}(u_i-q u_j) F_lambda(u) F*_mu(1/u).

    Each axis uses the same circle with a different node phase, so no node tuple
    has coinciding coordinates. Evaluation is in complex floats.
    """
    lam, mu = _sig(lam), _sig(mu)
    N = lam.N
    if mu.N != N:
        raise ValueError("signatures must have the same length")
    fparams = _float_params(params)
    q = fparams.q
    axes = [contour.shifted((k + 0.5) / N if N > 1 else contour.phase) for k in range(N)]
    grids = [ax.points() for ax in axes]
    total = 0j
    for idx in np.ndindex(*(contour.nodes,) * N):
        us = [complex(grids[a][0][idx[a]]) for a in range(N)]
        weight = prod(complex(grids[a][1][idx[a]]) for a in range(N))
        cross = prod(us[i] - us[j] for i in range(N) for j in range(N) if i != j)
        den = prod(us[i] - q * us[j] for i in range(N) for j in range(N))
        ev = SpinHL(fparams, us=us, vs=[1 / u for u in us])
        total += weight * cross / den * ev.F(lam) * ev.Fstar(mu)
    return total / _factorial(N)


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    return 1 if n <= 1 else n * _factorial(n - 1)


def _float_params(params: ParameterSet) -> ParameterSet:
    def c(x):
        return complex(x) if not isinstance(x, Fraction) else complex(float(x))

    return ParameterSet(c(params.q), params.s.map(c), params.xi.map(c), c(params.gamma))

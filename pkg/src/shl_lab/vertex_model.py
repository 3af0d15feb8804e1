"""Higher-spin vertex weights, the Yang-Baxter check and lattice partition functions.

Conventions for a vertex state ``(i1, j1; i2, j2)``: ``i1`` is the vertical edge
below, ``j1`` the horizontal edge to the left, ``i2`` the edge above and ``j2``
the edge to the right. Paths of ``w`` go up and right (``i1 + j1 = i2 + j2``).
Paths of ``w*`` go up and left (``i2 + j1 = i1 + j2``).

Cross vertices ``R_z`` join a line carrying ``w`` vertices (paths flowing right)
and a line carrying ``w*`` vertices (paths flowing left). Hence the cross
conserves ``i1 + j2 = i2 + j1``: a path arriving on the first line may leave
through the second one, which reads as two paths annihilating.

All partition functions are computed by a left-to-right column sweep whose
state is the tuple of horizontal occupancies between two adjacent columns.
Vertical occupancies are resolved bottom to top within each column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .kernel import LabError, PoleError, div, qpoch, to_complex
from .signatures import ParameterSet, Signature


class AdmissibilityError(LabError, ValueError):
    pass


@dataclass(frozen=True)
class VertexState:
    i1: int
    j1: int
    i2: int
    j2: int

    def __iter__(self):
        return iter((self.i1, self.j1, self.i2, self.j2))


# Weights in "power form": the dependence on the bottom occupancy i1 enters only
# through q^i1, passed as ``qg``. This is what lets column 0 carry a generic
# number of arrows gamma = q^a.

def _w_pow(u, s, q, qg, j1, j2):
    den = 1 - s * u
    if den == 0:
        raise PoleError("w weight pole 1 - s u = 0")
    if j1 == 0 and j2 == 0:
        return (1 - s * qg * u) / den
    if j1 == 1 and j2 == 1:
        return (u - s * qg) / den
    if j1 == 1 and j2 == 0:
        return (1 - q * qg) / den
    return (1 - s * s * qg / q) * u / den


def _wstar_pow(v, s, q, qg, j1, j2):
    den = 1 - s * v
    if den == 0:
        raise PoleError("w* weight pole 1 - s v = 0")
    if j1 == 0 and j2 == 0:
        return (1 - s * qg * v) / den
    if j1 == 1 and j2 == 1:
        return (v - s * qg) / den
    if j1 == 1 and j2 == 0:
        return (1 - s * s * qg / q) / den
    return (1 - q * qg) * v / den


def weight_w(u, s, q, st: VertexState | tuple):
    """Weight w_{u,s}(i1, j1; i2, j2) of an up-right vertex."""
    i1, j1, i2, j2 = st
    if min(i1, i2) < 0 or i1 + j1 != i2 + j2 or j1 not in (0, 1) or j2 not in (0, 1):
        return Fraction(0)
    den = 1 - s * u
    if den == 0:
        raise PoleError("w weight pole 1 - s u = 0")
    g = i1
    if (j1, j2) == (0, 0):
        return (1 - s * q**g * u) / den
    if (j1, j2) == (1, 1):
        return (u - s * q**g) / den
    if (j1, j2) == (1, 0):
        return (1 - q ** (g + 1)) / den
    return (1 - s * s * q**i2) * u / den


def weight_wstar(v, s, q, st: VertexState | tuple):
    """Weight w*_{v,s} obtained from w through the dual-weight relation."""
    i1, j1, i2, j2 = st
    if min(i1, i2) < 0 or i2 + j1 != i1 + j2 or j1 not in (0, 1) or j2 not in (0, 1):
        return Fraction(0)
    ratio = div(
        qpoch(s * s, q, i1) * qpoch(q, q, i2),
        qpoch(s * s, q, i2) * qpoch(q, q, i1),
        "dual-weight ratio",
    )
    return ratio * weight_w(v, s, q, (i2, j1, i1, j2))


_R_STATES = ((0, 0, 0, 0), (1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, 1), (1, 1, 0, 0), (0, 0, 1, 1))


def weight_R(z, q, st: VertexState | tuple):
    """Cross vertex weight R_z; the first line flows right, the second flows left."""
    i1, j1, i2, j2 = tuple(st)
    if (i1, j1, i2, j2) not in _R_STATES:
        return Fraction(0)
    if (i1, j1, i2, j2) == (0, 0, 0, 0):
        return Fraction(1) if isinstance(z, (int, Fraction)) else 1.0
    if (i1, j1, i2, j2) == (1, 1, 1, 1):
        return q
    if z == 1:
        raise PoleError("cross weight pole at z = 1")
    if (i1, j1, i2, j2) == (1, 1, 0, 0):
        return (1 - q) / (1 - z)
    if (i1, j1, i2, j2) == (0, 0, 1, 1):
        return (1 - q) * z / (1 - z)
    return (1 - q * z) / (1 - z)


def ybe_sides(u, v, s, q, boundary: Sequence[int]):
    """Both sides of the Yang-Baxter relation moving a cross through a w*/w pair.

    ``boundary = (i1, i2, j1, j2, i3, j3)``: i2, i1 are the occupancies entering
    the w-line and w*-line on the left, j2, j1 those on the right, i3 the bottom
    and j3 the top vertical occupancy.
    """
    i1, i2, j1, j2, i3, j3 = boundary
    z = u * v
    lhs = 0
    for k1 in (0, 1):
        for k2 in (0, 1):
            r = weight_R(z, q, (i2, i1, k2, k1))
            if r == 0:
                continue
            k3 = i3 + j1 - k1  # w* conservation
            if k3 < 0:
                continue
            lhs += r * weight_wstar(v, s, q, (i3, k1, k3, j1)) * weight_w(u, s, q, (k3, k2, j3, j2))
    rhs = 0
    for k1 in (0, 1):
        for k2 in (0, 1):
            r = weight_R(z, q, (k2, k1, j2, j1))
            if r == 0:
                continue
            k3 = i3 + i2 - k2  # w conservation
            if k3 < 0:
                continue
            rhs += weight_wstar(v, s, q, (k3, i1, j3, k1)) * weight_w(u, s, q, (i3, i2, k3, k2)) * r
    return lhs, rhs


def check_ybe(u, v, s, q, boundary: Sequence[int]) -> bool:
    lhs, rhs = ybe_sides(u, v, s, q, boundary)
    return lhs == rhs


# ---------------------------------------------------------------------------
# column-sweep transfer


@dataclass(frozen=True)
class Row:
    """One horizontal line of a lattice: ``dual`` rows carry w*, others w."""

    spectral: object
    dual: bool = False


def _column_weights(rows, params: ParameterSet, x: int):
    s, xi = params.s[x], params.xi[x]
    q = params.q
    out = []
    for row in rows:
        if row.dual:
            out.append((True, row.spectral / xi, s))
        else:
            out.append((False, row.spectral * xi, s))
    return q, out


class _Column:
    """Vertical-occupancy bookkeeping for one column.

    Occupancies are stored as offsets from ``base``; ``qpow(offset)`` returns q
    to the absolute occupancy. With ``generic`` set, q^base is the symbol
    gamma and no nonnegativity constraint applies.
    """

    def __init__(self, q, base: int = 0, gamma=None):
        self.q = q
        self.base = base
        self.gamma = gamma
        self.cache = {}

    def allowed(self, offset: int) -> bool:
        return self.gamma is not None or self.base + offset >= 0

    def qpow(self, offset: int):
        if offset not in self.cache:
            if self.gamma is None:
                self.cache[offset] = self.q ** (self.base + offset)
            else:
                self.cache[offset] = self.gamma * self.q**offset
        return self.cache[offset]


def _sweep_column(states: dict, rows, params: ParameterSet, x: int, col: _Column, inflow: int, outflow: int):
    """Advance the horizontal-occupancy distribution through column x."""
    q, row_data = _column_weights(rows, params, x)
    n = len(rows)
    new_states: dict = {}

    for left, weight in states.items():
        # depth-first over rows, bottom to top
        stack = [(0, inflow, (), weight)]
        while stack:
            r, g, right, acc = stack.pop()
            if r == n:
                if g == outflow:
                    new_states[right] = new_states.get(right, 0) + acc
                continue
            dual, spectral, s = row_data[r]
            j1 = left[r]
            for j2 in (0, 1):
                g2 = g + j2 - j1 if dual else g + j1 - j2
                if not col.allowed(g2) or not col.allowed(g):
                    continue
                qg = col.qpow(g)
                if dual:
                    wt = _wstar_pow(spectral, s, q, qg, j1, j2)
                else:
                    wt = _w_pow(spectral, s, q, qg, j1, j2)
                if wt != 0:
                    stack.append((r + 1, g2, right + (j2,), acc * wt))
    return new_states


def _exact_zero(params: ParameterSet):
    return Fraction(0) if isinstance(params.q, (int, Fraction)) else 0.0


def _lattice(rows, params: ParameterSet, start, inflows: Sequence[int], outflows: Sequence[int]):
    """Sum over configurations on columns 0..len(inflows)-1 ending with empty horizontals."""
    states = {tuple(start): Fraction(1) if isinstance(params.q, (int, Fraction)) else 1.0}
    for x, (fin, fout) in enumerate(zip(inflows, outflows)):
        states = _sweep_column(states, rows, params, x, _Column(params.q), fin, fout)
    return states.get(tuple(0 for _ in rows), _exact_zero(params))


def pf_F(lam: Signature, us: Sequence, params: ParameterSet):
    """F_lambda as a sum over up-right path ensembles entering at every row."""
    lam = Signature(lam) if not isinstance(lam, Signature) else lam
    if len(us) != lam.N:
        raise ValueError("need one spectral parameter per part")
    if lam.N == 0:
        return Fraction(1)
    cols = lam[0] + 1
    mult = lam.multiplicities()
    return _lattice(
        [Row(u) for u in us], params, [1] * lam.N, [0] * cols, [mult.get(x, 0) for x in range(cols)]
    )


def pf_Fstar(lam: Signature, vs: Sequence, params: ParameterSet):
    """F*_lambda as a sum over up-left path ensembles leaving through every row."""
    lam = Signature(lam) if not isinstance(lam, Signature) else lam
    if len(vs) != lam.N:
        raise ValueError("need one spectral parameter per part")
    if lam.N == 0:
        return Fraction(1)
    cols = lam[0] + 1
    mult = lam.multiplicities()
    return _lattice(
        [Row(v, dual=True) for v in vs], params, [1] * lam.N, [mult.get(x, 0) for x in range(cols)], [0] * cols
    )


def pf_Gstar(lam: Signature, vs: Sequence, params: ParameterSet):
    """G*_lambda: up-left paths entering at lambda, all leaving through the top of column 0."""
    lam = Signature(lam) if not isinstance(lam, Signature) else lam
    if len(vs) < lam.ell:
        return _exact_zero(params)
    if lam.N == 0:
        return Fraction(1)
    cols = lam[0] + 1
    mult = lam.multiplicities()
    outflows = [lam.N] + [0] * (cols - 1)
    return _lattice(
        [Row(v, dual=True) for v in vs], params, [0] * len(vs), [mult.get(x, 0) for x in range(cols)], outflows
    )


def _resolve_arrows(params: ParameterSet, a):
    """Return (base, gamma) for column 0: integer arrows or the generic symbol gamma."""
    if a is None:
        return 0, params.gamma
    if a == math.inf:
        return 0, _exact_zero(params)
    if int(a) != a or a < 0:
        raise ValueError("arrow count must be a nonnegative integer, inf, or None")
    return int(a), None


def pf_Z(us: Sequence, vs: Sequence, params: ParameterSet, a=None):
    """Cross-vertex square with decorated domain-wall boundary.

    The u-lines start below the v-lines, every u-line crosses every v-line once,
    and then all lines meet column 0, whose vertical edges carry ``a`` arrows in
    and out. ``a=None`` uses the generic symbol ``params.gamma`` for q^a and
    ``a=math.inf`` means gamma = 0.
    """
    N = len(us)
    if len(vs) != N:
        raise ValueError("need as many v's as u's")
    base, gamma = _resolve_arrows(params, a)
    q = params.q
    one = Fraction(1) if isinstance(q, (int, Fraction)) else 1.0
    order = [("u", i) for i in range(N)] + [("v", j) for j in range(N)]
    states = {tuple([1] * (2 * N)): one}
    # bubble each v-line down through all u-lines
    for j in range(N):
        pos = order.index(("v", j))
        while pos > 0 and order[pos - 1][0] == "u":
            i = order[pos - 1][1]
            z = us[i] * vs[j]
            new_states: dict = {}
            for occ, wt in states.items():
                a_in, b_in = occ[pos - 1], occ[pos]
                for c_out in (0, 1):
                    for d_out in (0, 1):
                        r = weight_R(z, q, (a_in, b_in, c_out, d_out))
                        if r == 0:
                            continue
                        new = list(occ)
                        new[pos - 1], new[pos] = d_out, c_out
                        key = tuple(new)
                        new_states[key] = new_states.get(key, 0) + wt * r
            states = new_states
            order[pos - 1], order[pos] = order[pos], order[pos - 1]
            pos -= 1
    rows = [Row(vs[idx], dual=True) if kind == "v" else Row(us[idx]) for kind, idx in order]
    col = _Column(q, base, gamma)
    final = _sweep_column(states, rows, params, 0, col, 0, 0)
    return final.get(tuple([0] * (2 * N)), 0 * one)


def admissibility_ratio(us: Sequence, vs: Sequence, params: ParameterSet, columns: Iterable[int] | None = None) -> float:
    """Largest modulus of the per-column ratio governing convergence of Cauchy sums."""
    if columns is None:
        columns = range(max(len(params.s.prefix), len(params.xi.prefix)) + 1)
        columns = [x for x in columns if x > 0] or [1]
    worst = 0.0
    for x in columns:
        s, xi = params.s[x], params.xi[x]
        for u in us:
            for v in vs:
                left = to_complex(xi * u - s) / to_complex(1 - s * xi * u)
                right = to_complex(v / xi - s) / to_complex(1 - s * v / xi)
                worst = max(worst, abs(left * right))
    return worst


@dataclass(frozen=True)
class Truncated:
    """A truncated infinite sum together with the largest column index used."""

    value: object
    truncation: int
    converged: bool


def _small(inc, ref, tol) -> bool:
    if isinstance(inc, Fraction) and isinstance(ref, Fraction):
        return abs(inc) <= Fraction(tol) * abs(ref) if ref != 0 else inc == 0
    return abs(to_complex(inc)) <= tol * abs(to_complex(ref))


def pf_S(
    us: Sequence,
    vs: Sequence,
    params: ParameterSet,
    a=None,
    max_part: int | None = None,
    tol: float = 1e-30,
    max_columns: int = 400,
) -> Truncated:
    """Two-layer lattice: w rows for the u's below w* rows for the v's.

    Paths enter on the left of every u-row and leave on the left of every
    v-row; column 0 carries ``a`` extra arrows through (see :func:`pf_Z`).
    With ``max_part`` set, configurations up to that column are summed.
    Otherwise columns are added until two consecutive increments are below
    ``tol`` relative to the partial sum.
    """
    N = len(us)
    if len(vs) != N:
        raise ValueError("need as many v's as u's")
    if admissibility_ratio(us, vs, params) >= 1:
        raise AdmissibilityError("spectral parameters violate the admissibility bound")
    base, gamma = _resolve_arrows(params, a)
    rows = [Row(u) for u in us] + [Row(v, dual=True) for v in vs]
    one = Fraction(1) if isinstance(params.q, (int, Fraction)) else 1.0
    states = {tuple([1] * (2 * N)): one}
    empty = tuple([0] * (2 * N))
    states = _sweep_column(states, rows, params, 0, _Column(params.q, base, gamma), 0, 0)
    partial = states.get(empty, 0 * one)
    small_steps = 0
    x = 0
    limit = max_part if max_part is not None else max_columns
    while x < limit:
        x += 1
        states = _sweep_column(states, rows, params, x, _Column(params.q), 0, 0)
        new_partial = states.get(empty, 0 * one)
        inc = new_partial - partial
        partial = new_partial
        if max_part is None:
            small_steps = small_steps + 1 if _small(inc, partial, tol) else 0
            if small_steps >= 2:
                return Truncated(partial, x, True)
    return Truncated(partial, x, max_part is not None)

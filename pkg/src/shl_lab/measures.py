"""Schur, Hall-Littlewood and stable spin Hall-Littlewood measures on signatures.

All three measures are indexed by Sign_N with N = len(us) = len(vs); the
stable functions see a signature through its partition (zero parts dropped).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .identities import det_s0_forms
from .kernel import LabError, prod, qpoch, to_complex
from .shl import SpinHL, Symmetrizer, hl_b, hl_cross, schur
from .signatures import ParameterSet, Signature, signatures_with_top

DEFAULT_TOL = 1e-16


class MeasureKind(enum.Enum):
    SCHUR = "MM_SchurCase"
    HALL_LITTLEWOOD = "MM_HallLittlewood"
    SHL = "SHL"


class InvalidMeasureError(LabError, ValueError):
    pass


@dataclass(frozen=True)
class MeasureSpec:
    """A measure of the given kind; ``params.q`` plays the role of t for the Hall-Littlewood kind."""

    kind: MeasureKind
    us: tuple
    vs: tuple
    params: ParameterSet
    max_part: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "us", tuple(self.us))
        object.__setattr__(self, "vs", tuple(self.vs))
        if len(self.us) != len(self.vs) or not self.us:
            raise InvalidMeasureError("need equally many u's and v's, at least one")
        if any(not 0 < u for u in self.us + self.vs):
            raise InvalidMeasureError("variables must be positive")
        if any(not u * v < 1 for u in self.us for v in self.vs):
            raise InvalidMeasureError("need u_i v_j < 1")
        q = self.params.q
        if self.kind is not MeasureKind.SCHUR and not 0 <= q < 1:
            raise InvalidMeasureError("q must lie in [0, 1)")
        if self.kind is MeasureKind.SHL:
            # s_0 does not enter the stable functions
            spins = [self.params.s[x] for x in range(1, len(self.params.s.prefix) + 1)]
            for s in spins:
                if not -1 < s <= 0:
                    raise InvalidMeasureError("spins must lie in (-1, 0]")
            for xi in self.params.xi.values():
                if not all(0 <= xi * u < 1 for u in self.us) or not all(0 <= v / xi < 1 for v in self.vs):
                    raise InvalidMeasureError("need xi_x u_i and v_j / xi_x in [0, 1)")

    @property
    def N(self) -> int:
        return len(self.us)


class _Evaluator:
    """Weights for one measure with permutation tables built once."""

    def __init__(self, spec: MeasureSpec):
        self.spec = spec
        us, vs, p = spec.us, spec.vs, spec.params
        q = p.q
        if spec.kind is MeasureKind.SHL:
            self.norm = prod((1 - u * v) / (1 - q * u * v) for u in us for v in vs)
            p0 = p.with_s0(0 * q)
            self._ev = SpinHL(p0, us=us, vs=vs)
        elif spec.kind is MeasureKind.HALL_LITTLEWOOD:
            self.norm = prod((1 - u * v) / (1 - q * u * v) for u in us for v in vs)
            self._su = Symmetrizer(us, hl_cross(q))
            self._sv = Symmetrizer(vs, hl_cross(q))
        else:
            self.norm = prod(1 - u * v for u in us for v in vs)

    def __call__(self, lam: Signature):
        spec, q, N = self.spec, self.spec.params.q, self.spec.N
        if spec.kind is MeasureKind.SHL:
            # F~ = F / (q;q)_{m0} at s_0 = 0; F~* = F* at s_0 = 0
            return self.norm * self._ev.F(lam) / qpoch(q, q, lam.m0) * self._ev.Fstar(lam)
        if spec.kind is MeasureKind.HALL_LITTLEWOOD:
            pu = self._su([[u**p for u in spec.us] for p in lam])
            pv = self._sv([[v**p for v in spec.vs] for p in lam])
            # Q = (1-t)^N/(t;t)_{m0} * sym and P = Q / b_lambda
            scale = (1 - q) ** N / qpoch(q, q, lam.m0)
            return self.norm * scale * pu * scale * pv / hl_b(lam, q)
        return self.norm * schur(lam, spec.us) * schur(lam, spec.vs)


def weight(spec: MeasureSpec, lam) -> object:
    lam = lam if isinstance(lam, Signature) else Signature(lam)
    if lam.N != spec.N:
        lam = lam.partition().padded(spec.N)
    return _Evaluator(spec)(lam)


def _sweep(spec: MeasureSpec, observable, max_part, tol):
    """Accumulate observable(lambda) * weight by shells of equal largest part."""
    ev = _Evaluator(spec)
    limit = max_part if max_part is not None else spec.max_part
    partial, mass, small, top = 0, 0, 0, -1
    while True:
        top += 1
        shell = 0
        shell_mass = 0
        for lam in signatures_with_top(spec.N, top):
            w = ev(lam)
            shell_mass = shell_mass + w
            shell = shell + observable(lam, w)
        partial = partial + shell
        mass = mass + shell_mass
        if limit is not None:
            if top >= limit:
                return partial, top
            continue
        if abs(to_complex(shell_mass)) <= tol * abs(to_complex(mass)):
            small += 1
            if small >= 2:
                return partial, top
        else:
            small = 0
        if top >= 400:
            return partial, top


def partial_mass(spec: MeasureSpec, max_part: int):
    return _sweep(spec, lambda lam, w: w, max_part, DEFAULT_TOL)[0]


def observable(spec: MeasureSpec, zeta, lam: Signature):
    """(-zeta; q)_{m0} for the Hall-Littlewood kinds, prod (1 + zeta q^{lambda_j + N - j}) for Schur."""
    q, N = spec.params.q, spec.N
    if spec.kind is MeasureKind.SCHUR:
        return prod(1 + zeta * q ** (lam[j] + N - 1 - j) for j in range(N))
    return qpoch(-zeta, q, lam.m0)


def m0_transform(spec: MeasureSpec, zeta, max_part: int | None = None, tol: float = DEFAULT_TOL):
    """Truncated expectation of the kind's observable."""
    return _sweep(spec, lambda lam, w: observable(spec, zeta, lam) * w, max_part, tol)[0]


def m0_transform_closed(spec: MeasureSpec, zeta):
    """prod (1 - u_i v_j) times the s_0 = 0 determinant, with gamma = -zeta/q (q = params.q)."""
    q = spec.params.q
    first, _ = det_s0_forms(list(spec.us), list(spec.vs), -zeta / q, q)
    return prod(1 - u * v for u in spec.us for v in spec.vs) * first


def m0_distribution(spec: MeasureSpec, max_part: int | None = None, tol: float = DEFAULT_TOL) -> list:
    """P(m0 = k) for k = 0..N from truncated weights (not renormalized)."""
    N = spec.N
    zero = 0 * spec.params.q
    ev = _Evaluator(spec)
    limit = max_part if max_part is not None else spec.max_part
    dist = [zero] * (N + 1)
    mass, small, top = zero, 0, -1
    while True:
        top += 1
        shell_mass = zero
        for lam in signatures_with_top(N, top):
            w = ev(lam)
            dist[lam.m0] += w
            shell_mass += w
        mass += shell_mass
        if limit is not None:
            if top >= limit:
                return dist
            continue
        if abs(to_complex(shell_mass)) <= tol * abs(to_complex(mass)):
            small += 1
            if small >= 2 or top >= 400:
                return dist
        else:
            small = 0

"""ASEP on Z: Bethe eigenfunctions, contour-integral formulas and two independent oracles.

Particles jump left at rate 1 and right at rate q. Formula evaluators accept
either exact scalars or numpy arrays, so the same code serves exact checks
and vectorized quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.stats import poisson

from .kernel import ContourSpec, LabError, permutations, prod


class SummabilityError(LabError, ValueError):
    pass


class WindowTooSmallError(LabError, ValueError):
    pass


class ContourError(LabError, ValueError):
    pass


@dataclass(frozen=True)
class ASEPConfig:
    positions: tuple

    def __init__(self, positions: Sequence[int]):
        positions = tuple(int(x) for x in positions)
        if not positions:
            raise ValueError("need at least one particle")
        if any(a >= b for a, b in zip(positions, positions[1:])):
            raise ValueError(f"positions must be strictly increasing: {positions}")
        object.__setattr__(self, "positions", positions)

    @property
    def N(self) -> int:
        return len(self.positions)

    def shifted(self, k: int) -> "ASEPConfig":
        return ASEPConfig([x + k for x in self.positions])

    def __iter__(self):
        return iter(self.positions)

    def __getitem__(self, i):
        return self.positions[i]


def _config(x) -> ASEPConfig:
    return x if isinstance(x, ASEPConfig) else ASEPConfig(x)


def zeta(z, q):
    """(1 - z) / (1 - z/q)."""
    return (1 - z) / (1 - z / q)


# ---------------------------------------------------------------------------
# eigenfunctions and generator


def psi(side: str, x, zs: Sequence, q):
    """Right ("r") or left ("ell") Bethe eigenfunction at positions x."""
    x = _config(x)
    N = x.N
    if len(zs) != N:
        raise ValueError("need one spectral variable per particle")
    if side not in ("r", "ell"):
        raise ValueError("side must be 'r' or 'ell'")
    sign = -1 if side == "r" else 1
    zetas = [zeta(z, q) for z in zs]
    total = 0
    for sigma in permutations(N):
        if side == "r":
            cross = prod((zs[sigma[i]] - q * zs[sigma[j]]) / (zs[sigma[i]] - zs[sigma[j]])
                         for i in range(N) for j in range(i + 1, N))
        else:
            cross = prod((q * zs[sigma[i]] - zs[sigma[j]]) / (zs[sigma[i]] - zs[sigma[j]])
                         for i in range(N) for j in range(i + 1, N))
        total = total + cross * prod(zetas[sigma[i]] ** (sign * x[i]) for i in range(N))
    return total


def eigenvalue(zs: Sequence, q):
    return -sum((1 - q) ** 2 / ((1 - z) * (1 - q / z)) for z in zs)


def generator_apply(f: Callable, x, q, transpose: bool = False):
    """(A f)(x) for the ASEP generator; ``transpose`` swaps the rates 1 and q."""
    x = _config(x)
    right, left = (1, q) if transpose else (q, 1)
    pos = list(x.positions)
    N = len(pos)
    fx = f(x)
    total = 0 * fx
    for i in range(N):
        if i == N - 1 or pos[i + 1] > pos[i] + 1:
            moved = pos.copy()
            moved[i] += 1
            total = total + right * (f(ASEPConfig(moved)) - fx)
        if i == 0 or pos[i - 1] < pos[i] - 1:
            moved = pos.copy()
            moved[i] -= 1
            total = total + left * (f(ASEPConfig(moved)) - fx)
    return total


# ---------------------------------------------------------------------------
# contour integrals


def single_time_radius(q: float) -> float:
    """Radius of the default circle around 1 for Plancherel and transition integrals."""
    return 0.5 * (1 - q) / (1 + q)


def single_time_radius_limit(q: float, N: int) -> float:
    """Circles around 1 must stay below this radius to exclude z = q and z_i = q z_j."""
    return 1 - q if N == 1 else (1 - q) / (1 + q)


def two_time_radii(q: float) -> tuple[float, float]:
    """(z radius, w radius) of the nested circles around 1."""
    rw = min(0.15, 0.45 * (1 - q) / (1 + q))
    return rw / 3, rw


def default_contour(q: float, N: int) -> ContourSpec:
    return ContourSpec(1.0, single_time_radius(q), 128 if N <= 2 else 48)


# fractions of the radius limit tried when no contour is given
RADIUS_FRACTIONS = (0.3, 0.5, 0.7, 0.85)


def _tensor_nodes(contours: Sequence[ContourSpec]):
    """Broadcastable node and weight arrays, one axis per contour."""
    d = len(contours)
    nodes, weights = [], []
    for a, c in enumerate(contours):
        z, w = c.points()
        shape = [1] * d
        shape[a] = c.nodes
        nodes.append(z.reshape(shape))
        weights.append(w.reshape(shape))
    return nodes, weights


def _phased(c: ContourSpec, count: int) -> list[ContourSpec]:
    return [c.shifted((k + 0.5) / count) for k in range(count)]


def _plancherel_density(zs, q):
    N = len(zs)
    num = prod((zs[i] - zs[j]) ** 2 for i in range(N) for j in range(i + 1, N))
    den = prod(zs[i] - q * zs[j] for i in range(N) for j in range(N) if i != j)
    return num / den * prod((1 - 1 / q) / ((1 - z) * (1 - z / q)) for z in zs)


def _check_single_contour(c: ContourSpec, q: float, N: int):
    r = c.radius
    if abs(c.center - 1) > 1e-12:
        raise ContourError("circle must be centered at 1")
    if r >= 1 - q:
        raise ContourError("circle must exclude the pole at q")
    if r >= 1:
        raise ContourError("circle must exclude z = 0")
    if N > 1 and (1 - r) <= q * (1 + r):
        raise ContourError("circles meet the poles z_i = q z_j")


def _single_time_sums(x, y, t, q, contour: ContourSpec):
    """(full trapezoid sum, the same rule on every other node, sum of absolute terms)."""
    N = x.N
    zs, ws = _tensor_nodes(_phased(contour, N))
    integrand = _plancherel_density(zs, q) * psi("r", x, zs, q) * psi("ell", y, zs, q)
    if t:
        integrand = integrand * np.exp(t * eigenvalue(zs, q))
    terms = integrand * prod(ws)
    half = terms[(slice(None, None, 2),) * N] * 2**N
    return complex(np.sum(terms)), complex(np.sum(half)), float(np.sum(np.abs(terms)))


def _single_time_integral(x, y, t, q, contour: ContourSpec | None):
    x, y = _config(x), _config(y)
    if x.N != y.N:
        raise ValueError("configurations must have the same number of particles")
    N = x.N
    q = float(q)
    if contour is not None:
        _check_single_contour(contour, q, N)
        total = _single_time_sums(x, y, t, q, contour)[0]
    else:
        # pick the circle with the smallest estimated error: circles near 1 lose
        # digits to cancellation when y lies left of x, wide ones when it lies right
        base = default_contour(q, N)
        limit = single_time_radius_limit(q, N)
        best = None
        for frac in RADIUS_FRACTIONS:
            c = ContourSpec(1.0, frac * limit, base.nodes)
            full, half, size = _single_time_sums(x, y, t, q, c)
            estimate = abs(full - half) + 1e-16 * size
            if best is None or estimate < best[0]:
                best = (estimate, full)
        total = best[1]
    # the normalization that makes t = 0 give the identity kernel: each circle
    # contributes -1 at z = 1, and the squared Vandermonde differs from
    # prod_{i != j} (z_i - z_j) by (-1)^{N(N-1)/2}
    return (-1) ** (N + N * (N - 1) // 2) * total / math.factorial(N)


def plancherel_check(x, y, q, contour: ContourSpec | None = None) -> complex:
    """N-fold quadrature of the orthogonality integrand; should equal 1 when x = y and 0 otherwise."""
    return _single_time_integral(x, y, 0.0, q, contour)


@dataclass(frozen=True)
class QuadratureValue:
    value: float
    imag_residual: float


def transition_prob_detail(x, y, t, q, contour: ContourSpec | None = None) -> QuadratureValue:
    if t < 0:
        raise ValueError("t must be nonnegative")
    v = _single_time_integral(x, y, float(t), q, contour)
    return QuadratureValue(v.real, abs(v.imag))


def transition_prob(x, y, t, q, contour: ContourSpec | None = None) -> float:
    """P_t(x -> y) by quadrature (real part)."""
    return transition_prob_detail(x, y, t, q, contour).value


# ---------------------------------------------------------------------------
# summation identities


def summability_ratio(zs, ws, q) -> float:
    return max(abs(zeta(w, q) / zeta(z, q)) for z in zs for w in ws)


def _ordered_tuples(N: int, start: int, max_x: int) -> np.ndarray:
    return np.array(list(combinations(range(start, max_x + 1), N)), dtype=np.int64).reshape(-1, N)


def _psi_tuples(side: str, xs: np.ndarray, zs, q) -> np.ndarray:
    """Psi at every row of xs (shape (count, N)), vectorized over rows."""
    N = xs.shape[1]
    sign = -1 if side == "r" else 1
    zetas = np.array([complex(zeta(z, q)) for z in zs])
    out = np.zeros(xs.shape[0], dtype=complex)
    for sigma in permutations(N):
        zz = [complex(zs[s]) for s in sigma]
        if side == "r":
            cross = prod((zz[i] - q * zz[j]) / (zz[i] - zz[j]) for i in range(N) for j in range(i + 1, N))
        else:
            cross = prod((q * zz[i] - zz[j]) / (zz[i] - zz[j]) for i in range(N) for j in range(i + 1, N))
        term = np.ones(xs.shape[0], dtype=complex)
        for i in range(N):
            term *= zetas[sigma[i]] ** (sign * xs[:, i].astype(float))
        out += cross * term
    return out


def pair_sum_direct(zs, ws, q, max_x: int, start: int = 0) -> complex:
    """Truncated sum over start <= x_1 < ... < x_N <= start + max_x of Psi^r(z) Psi^ell(w)."""
    if summability_ratio(zs, ws, q) >= 1:
        raise SummabilityError("summability condition fails")
    xs = _ordered_tuples(len(zs), start, start + max_x)
    return complex(np.sum(_psi_tuples("r", xs, zs, q) * _psi_tuples("ell", xs, ws, q)))


def pair_sum_cauchy_form(zs, ws, q):
    """Closed form with the Cauchy-type determinant det[1/((z_i - w_j)(z_i - q w_j))]."""
    N = len(zs)
    m = np.array([[1 / ((z - w) * (z - q * w)) for w in ws] for z in zs], dtype=complex)
    pre = prod((1 - z) * (1 - w / q) for z, w in zip(zs, ws))
    pre *= (1 / q - 1) ** (-N) * prod(z - q * w for z in zs for w in ws)
    pre /= prod((zs[i] - zs[j]) * (ws[j] - ws[i]) for i in range(N) for j in range(i + 1, N))
    return complex(pre * np.linalg.det(m))


def pair_sum_alternant_form(zs, ws, q):
    """Closed form with det[z_j^i {...}] over prod_{i<j} (z_j - z_i)."""
    N = len(zs)
    rows = []
    for i in range(1, N + 1):
        row = []
        for z in zs:
            ratio = prod((z - q * w) / (z - w) for w in ws)
            row.append(z**i * ((1 - 1 / z) * (1 - q / z) * ratio - q ** (N - i) * (1 - 1 / z) * (1 - q * q / z)))
        rows.append(row)
    den = prod(zs[j] - zs[i] for i in range(N) for j in range(i + 1, N))
    return complex((1 - q) ** (-2 * N) * np.linalg.det(np.array(rows, dtype=complex)) / den)


def shift_factor(zs, ws, q, k: int):
    return prod((zeta(w, q) / zeta(z, q)) ** k for z, w in zip(zs, ws))


def left_sum_direct(zs, q, max_x: int) -> complex:
    if max(abs(zeta(z, q)) for z in zs) >= 1:
        raise SummabilityError("need |(1 - z)/(1 - z/q)| < 1")
    xs = _ordered_tuples(len(zs), 0, max_x)
    return complex(np.sum(_psi_tuples("ell", xs, zs, q)))


def left_sum_product(zs, q):
    N = len(zs)
    return complex(q ** (N * (N - 1) // 2) * prod(1 - z / q for z in zs) / ((1 - 1 / q) ** N * prod(zs)))


@dataclass(frozen=True)
class SumReport:
    direct: complex
    cauchy_form: complex
    alternant_form: complex
    shifts: dict
    single_direct: complex | None
    single_product: complex | None

    def max_rel_err(self) -> float:
        errs = [_rel(self.direct, self.cauchy_form), _rel(self.direct, self.alternant_form)]
        errs += [_rel(a, b) for a, b in self.shifts.values()]
        if self.single_direct is not None:
            errs.append(_rel(self.single_direct, self.single_product))
        return max(errs)


def _rel(a, b) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def sum_identities(zs, ws, q, max_x: int, shifts=(-2, -1, 0, 1, 2)) -> SumReport:
    """Truncated sums against both closed forms, the shift relation, and the single-eigenfunction sum at ws."""
    direct = pair_sum_direct(zs, ws, q, max_x)
    shift_pairs = {
        k: (pair_sum_direct(zs, ws, q, max_x, start=k), complex(shift_factor(zs, ws, q, k)) * direct) for k in shifts
    }
    single_d = single_p = None
    if max(abs(zeta(w, q)) for w in ws) < 1:
        single_d, single_p = left_sum_direct(ws, q, max_x), left_sum_product(ws, q)
    return SumReport(direct, pair_sum_cauchy_form(zs, ws, q), pair_sum_alternant_form(zs, ws, q), shift_pairs,
                     single_d, single_p)


# ---------------------------------------------------------------------------
# two-time formula


@dataclass(frozen=True)
class SimSpec:
    initial: ASEPConfig
    q: float
    times: tuple
    thresholds: tuple
    replicates: int = 100_000
    seed: int = 0
    window: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "initial", _config(self.initial))
        t1, t2 = self.times
        if not 0 <= t1 <= t2:
            raise ValueError("need 0 <= t1 <= t2")
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        if not 0 <= self.q < 1:
            raise ValueError("q must lie in [0, 1)")

    def resolved_window(self) -> tuple[int, int]:
        if self.window is not None:
            L, R = self.window
        else:
            t2 = self.times[1]
            spread = int(math.ceil(12 + 6 * t2 + 4 * math.sqrt(max(t2, 1.0))))
            L, R = self.initial[0] - spread, self.initial[-1] + spread
        if not (L < self.initial[0] and self.initial[-1] < R):
            raise WindowTooSmallError("window must contain the initial configuration with margin")
        return L, R


def _det_stack(m):
    return np.linalg.det(m)


def two_time_integrand(zs, ws, spec: SimSpec):
    """Integrand of the two-time formula (without dz/dw), broadcast over node arrays."""
    q = float(spec.q)
    N = spec.initial.N
    t1, t2 = spec.times
    k1, k2 = spec.thresholds
    val = (-1) ** N * (-q) ** (N * (N - 1) // 2) / math.factorial(N) ** 2
    val = val * prod(1 / (1 - z) for z in zs) * prod(1 / w for w in ws)
    val = val * prod((zs[i] - zs[j]) * (ws[i] - ws[j]) for i in range(N) for j in range(i + 1, N))
    val = val * prod(w - q * z for w in ws for z in zs)
    val = val / prod((zs[i] - q * zs[j]) * (ws[i] - q * ws[j]) for i in range(N) for j in range(N) if i != j)
    shape = np.broadcast_shapes(*(np.shape(a) for a in list(zs) + list(ws)))
    m = np.empty(shape + (N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            m[..., i, j] = np.broadcast_to(1 / ((ws[i] - zs[j]) * (ws[i] - q * zs[j])), shape)
    val = val * _det_stack(m)
    val = val * np.exp(t1 * eigenvalue(zs, q) + (t2 - t1) * eigenvalue(ws, q))
    val = val * prod(zeta(z, q) ** k1 for z in zs) * prod(zeta(w, q) ** (k2 - k1) for w in ws)
    return val * psi("r", spec.initial, zs, q)


def two_time_prob(spec: SimSpec, nodes: int | None = None, radii: tuple | None = None) -> QuadratureValue:
    """Prob(x_1(t_1) >= k_1, x_1(t_2) >= k_2) by 2N-fold tensor quadrature on nested circles around 1."""
    q = float(spec.q)
    N = spec.initial.N
    rz, rw = radii if radii is not None else two_time_radii(q)
    if not 0 < rz < rw:
        raise ContourError("need z circles strictly inside w circles")
    if rw >= 1 - q - q * rz or (1 - rw) <= q * (1 + rw):
        raise ContourError("w circles meet the poles w = q z or w_i = q w_j")
    if nodes is None:
        nodes = 128 if N == 1 else 32
    zc = _phased(ContourSpec(1.0, rz, nodes), N)
    wc = _phased(ContourSpec(1.0, rw, nodes), N)
    arrays, weights = _tensor_nodes(zc + wc)
    zs, ws = arrays[:N], arrays[N:]
    total = np.sum(two_time_integrand(zs, ws, spec) * prod(weights))
    return QuadratureValue(float(total.real), float(abs(total.imag)))


# ---------------------------------------------------------------------------
# oracle 1: truncated continuous-time Markov chain


@dataclass(frozen=True)
class CTMCResult:
    single_time: dict
    two_time: float
    escaped: float
    window: tuple = field(default=())


def _states(N: int, L: int, R: int):
    states = list(combinations(range(L, R + 1), N))
    return states, {s: i for i, s in enumerate(states)}


def rate_matrix(N: int, q: float, L: int, R: int):
    """Generator restricted to configurations in [L, R]; jumps leaving the window are killed.

    The diagonal keeps the full-chain exit rate, so rows sum to 0 except at
    configurations touching the window edge, where the deficit is the killed rate.
    """
    states, index = _states(N, L, R)
    rows, cols, vals = [], [], []
    diag = np.zeros(len(states))
    for a, s in enumerate(states):
        for i in range(N):
            for step, rate in ((1, q), (-1, 1.0)):
                if rate == 0:
                    continue
                new = s[i] + step
                if (i + 1 < N and new == s[i + 1]) or (i > 0 and new == s[i - 1]):
                    continue
                diag[a] -= rate
                if L <= new <= R:
                    t = list(s)
                    t[i] = new
                    rows.append(a)
                    cols.append(index[tuple(t)])
                    vals.append(rate)
    m = sparse.csr_matrix((vals, (rows, cols)), shape=(len(states), len(states)))
    return m + sparse.diags(diag), states, index


def _uniformized(p0: np.ndarray, Qt, rate: float, t: float, tail: float = 1e-16) -> np.ndarray:
    """p0 exp(t Q) by uniformization; Qt is the transposed generator."""
    if t == 0:
        return p0.copy()
    mu = rate * t
    n_max = int(poisson.ppf(1 - tail, mu)) + 10
    P = sparse.identity(Qt.shape[0], format="csr") + Qt / rate
    term = p0.copy()
    out = poisson.pmf(0, mu) * term
    for n in range(1, n_max + 1):
        term = P @ term
        out += poisson.pmf(n, mu) * term
    return out


def ctmc_oracle(spec: SimSpec, escape_tol: float = 1e-10) -> CTMCResult:
    """Distribution at t_1 and the two-time event probability on a finite window."""
    N, q = spec.initial.N, float(spec.q)
    L, R = spec.resolved_window()
    Q, states, index = rate_matrix(N, q, L, R)
    Qt = Q.T.tocsr()
    rate = N * (1 + q)
    p0 = np.zeros(len(states))
    p0[index[spec.initial.positions]] = 1.0
    t1, t2 = spec.times
    k1, k2 = spec.thresholds
    p1 = _uniformized(p0, Qt, rate, t1)
    escaped = 1.0 - p1.sum()
    mask1 = np.array([s[0] >= k1 for s in states])
    p2 = _uniformized(np.where(mask1, p1, 0.0), Qt, rate, t2 - t1)
    full = _uniformized(p1, Qt, rate, t2 - t1)
    escaped = max(escaped, 1.0 - full.sum())
    if escaped > escape_tol:
        raise WindowTooSmallError(f"escaped mass {escaped:.3e} exceeds {escape_tol:.0e}; enlarge the window")
    mask2 = np.array([s[0] >= k2 for s in states])
    single = {s: float(p) for s, p in zip(states, p1) if p > 0}
    return CTMCResult(single, float(p2[mask2].sum()), float(escaped), (L, R))


# ---------------------------------------------------------------------------
# oracle 2: Monte Carlo


@dataclass(frozen=True)
class MCResult:
    estimate: float
    stderr: float
    replicates: int


MC_CHUNK = 100_000


def _simulate_chunk(rng: np.random.Generator, initial: np.ndarray, q: float, t1: float, t2: float, k1: int, k2: int,
                    count: int) -> int:
    N = initial.size
    x = np.tile(initial, (count, 1)).astype(np.int64)
    time = np.zeros(count)
    ok1 = np.ones(count, dtype=bool)
    checked = np.zeros(count, dtype=bool)
    active = np.ones(count, dtype=bool)
    big = np.iinfo(np.int64).max // 4
    while active.any():
        idx = np.flatnonzero(active)
        xa = x[idx]
        left_nb = np.concatenate([np.full((idx.size, 1), -big), xa[:, :-1]], axis=1)
        right_nb = np.concatenate([xa[:, 1:], np.full((idx.size, 1), big)], axis=1)
        rates = np.concatenate([(xa - 1 > left_nb) * 1.0, (xa + 1 < right_nb) * q], axis=1)
        total = rates.sum(axis=1)
        dt = rng.exponential(1.0, idx.size) / np.where(total > 0, total, 1.0)
        dt[total == 0] = np.inf
        new_time = time[idx] + dt
        # event indicator at t1 uses the state held across t1
        cross1 = (~checked[idx]) & (new_time > t1)
        ok1[idx[cross1]] = xa[cross1, 0] >= k1
        checked[idx[cross1]] = True
        done = new_time > t2
        go = ~done
        u = rng.random(idx.size) * total
        choice = (np.cumsum(rates, axis=1) < u[:, None]).sum(axis=1)
        choice = np.minimum(choice, 2 * N - 1)
        rows = np.flatnonzero(go)
        particle = choice[rows] % N
        step = np.where(choice[rows] < N, -1, 1)
        xa[rows, particle] += step
        if N > 1 and np.any(np.diff(xa[rows], axis=1) <= 0):
            raise AssertionError("exclusion violated")
        x[idx] = xa
        time[idx] = np.where(go, new_time, time[idx])
        active[idx[done]] = False
    return int(np.count_nonzero(ok1 & (x[:, 0] >= k2)))


def mc_simulate(spec: SimSpec) -> MCResult:
    """Next-event simulation of the two-time event; chunk c uses the stream SeedSequence([seed, c])."""
    t1, t2 = spec.times
    k1, k2 = spec.thresholds
    initial = np.array(spec.initial.positions, dtype=np.int64)
    hits = 0
    done = 0
    chunk = 0
    while done < spec.replicates:
        count = min(MC_CHUNK, spec.replicates - done)
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, chunk]))
        hits += _simulate_chunk(rng, initial, float(spec.q), t1, t2, k1, k2, count)
        done += count
        chunk += 1
    p = hits / spec.replicates
    return MCResult(p, math.sqrt(max(p * (1 - p), 0.0) / spec.replicates), spec.replicates)


# ---------------------------------------------------------------------------
# spin Hall-Littlewood specialization


def shl_specialization_sides(x, zs, sqrt_q):
    """(F at s = -1/sqrt q, its Psi^r form, F* at s = -1/sqrt q, its Psi^ell form), exact when inputs are."""
    from .shl import F, Fstar
    from .signatures import ParameterSet, Signature

    x = _config(x)
    q = sqrt_q * sqrt_q
    N = x.N
    s = -1 / sqrt_q
    params = ParameterSet(q, s, 1, 1)
    lam = Signature(tuple(reversed(x.positions)))
    total = sum(x.positions)
    f_side = F(lam, [-sqrt_q / z for z in zs], params)
    f_psi = (1 - q) ** N * sqrt_q**total / prod(1 - 1 / z for z in zs) * psi("r", x, zs, q)
    fs_side = Fstar(lam, [-z / sqrt_q for z in zs], params)
    fs_psi = (-q) ** (-N) * (1 - q) ** N / sqrt_q**total / prod(1 - z / q for z in zs) * psi("ell", x, zs, q)
    return f_side, f_psi, fs_side, fs_psi

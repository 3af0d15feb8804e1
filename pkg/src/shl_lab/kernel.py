"""Number tower, combinatorial primitives, exact linear algebra and periodic quadrature.

Scalars are plain Python numbers in one of two modes:

* exact: ``int`` or ``fractions.Fraction``
* float: ``float`` or ``complex``

Python would silently promote a Fraction to a float when the two are mixed. The
entry points below call :func:`common_mode` so that such mixing raises
:class:`MixedModeError` instead.
"""

from __future__ import annotations

import cmath
import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

PERMUTATION_CAP = 9


class LabError(Exception):
    """Base class for errors raised by this package."""


class MixedModeError(LabError, TypeError):
    pass


class PoleError(LabError, ZeroDivisionError):
    pass


class CapExceededError(LabError, ValueError):
    pass


class NonFiniteError(LabError, ArithmeticError):
    pass


class Mode(enum.Enum):
    EXACT = "ExactRational"
    FLOAT = "ComplexFloat"


def mode_of(x) -> Mode:
    if isinstance(x, (bool, int, Fraction)):
        return Mode.EXACT
    if isinstance(x, (float, complex, np.floating, np.complexfloating)):
        return Mode.FLOAT
    raise TypeError(f"not a scalar: {x!r}")


def common_mode(*xs) -> Mode:
    """Mode shared by all arguments; raises MixedModeError on disagreement."""
    modes = {mode_of(x) for x in xs}
    if len(modes) > 1:
        raise MixedModeError(f"mixed scalar modes: {sorted(m.value for m in modes)}")
    return modes.pop() if modes else Mode.EXACT


def parse_scalar(text: str):
    """Parse ``"p/q"`` or an integer as a Fraction, anything else as complex."""
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        value = complex(text.replace("i", "j"))
        return value.real if value.imag == 0 else value


def to_complex(x) -> complex:
    return complex(x.numerator / x.denominator) if isinstance(x, Fraction) else complex(x)


def div(num, den, what: str = "expression"):
    """Division that reports a vanishing denominator as a PoleError."""
    if den == 0:
        raise PoleError(f"pole in {what}")
    return num / den


def prod(values, start=1):
    result = start
    for v in values:
        result = result * v
    return result


def qpoch(a, q, k: int):
    """The q-Pochhammer symbol (a; q)_k for a nonnegative integer k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    common_mode(a, q)
    result = Fraction(1) if mode_of(a) is Mode.EXACT else 1.0
    power = 1
    for _ in range(k):
        result *= 1 - a * power
        power *= q
    return result


@dataclass(frozen=True)
class SquareMatrix:
    rows: tuple

    def __init__(self, rows: Sequence[Sequence]):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and nonempty")
        common_mode(*(x for r in rows for x in r))
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    def det(self):
        return det_exact(self)


def det_exact(m: SquareMatrix | Sequence[Sequence]):
    """Determinant by pivoted elimination.

    Exact matrices use the first nonzero pivot over the rationals; float
    matrices use partial pivoting by modulus.
    """
    if not isinstance(m, SquareMatrix):
        m = SquareMatrix(m)
    n = m.n
    exact = mode_of(m.rows[0][0]) is Mode.EXACT
    a = [[Fraction(x) if exact else complex(x) for x in row] for row in m.rows]
    det = Fraction(1) if exact else complex(1)
    for col in range(n):
        if exact:
            pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        else:
            pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
            if a[pivot][col] == 0:
                pivot = None
        if pivot is None:
            return Fraction(0) if exact else complex(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor != 0:
                row_r, row_c = a[r], a[col]
                for c in range(col + 1, n):
                    row_r[c] -= factor * row_c[c]
    return det


def permutations(n: int, cap: int = PERMUTATION_CAP) -> Iterator[tuple[int, ...]]:
    if n > cap:
        raise CapExceededError(f"{n}! permutations exceeds the cap {cap}")
    return itertools.permutations(range(n))


def vandermonde(xs: Sequence):
    """Product of (x_i - x_j) over i < j."""
    return prod(xs[i] - xs[j] for i in range(len(xs)) for j in range(i + 1, len(xs)))


@dataclass(frozen=True)
class ContourSpec:
    """Positively oriented circle sampled at ``nodes`` equispaced points.

    ``phase`` rotates the nodes by a fraction of one step; tensor quadratures
    give each axis a different phase so that nodes on different axes never
    coincide.
    """

    center: complex
    radius: float
    nodes: int = 256
    phase: float = 0.0

    def __post_init__(self):
        if self.nodes < 8:
            raise ValueError("at least 8 nodes are required")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes z_k and weights so that (1/2 pi i) * integral f dz is approx sum(weights * f(z_k))."""
        theta = 2 * np.pi * (np.arange(self.nodes) + self.phase) / self.nodes
        e = np.exp(1j * theta)
        return complex(self.center) + self.radius * e, self.radius * e / self.nodes

    def shifted(self, phase: float) -> "ContourSpec":
        return ContourSpec(self.center, self.radius, self.nodes, phase)


def contour_integral(f: Callable[[complex], complex], c: ContourSpec) -> complex:
    """(1 / 2 pi i) times the integral of f over the circle, by the trapezoid rule."""
    zs, ws = c.points()
    total = 0j
    for z, w in zip(zs, ws):
        value = complex(f(complex(z)))
        if not cmath.isfinite(value):
            raise NonFiniteError(f"integrand is not finite at {z}")
        total += w * value
    return total


def rel_err(a, b) -> float:
    a, b = to_complex(a), to_complex(b)
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


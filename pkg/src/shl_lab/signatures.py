"""Signatures, their statistics, bounded enumeration, and model parameters."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Sequence

from .kernel import common_mode


@dataclass(frozen=True, order=True)
class Signature:
    """A weakly decreasing integer tuple.

    Negative parts are only allowed through :meth:`shifted`, which is how the
    shifting property extends symmetric functions to negative indices.
    """

    parts: tuple[int, ...]

    def __init__(self, parts: Sequence[int] = (), *, allow_negative: bool = False):
        parts = tuple(int(p) for p in parts)
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"signature must be weakly decreasing: {parts}")
        if parts and parts[-1] < 0 and not allow_negative:
            raise ValueError(f"negative parts need the shifting constructor: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Signature":
        text = text.strip().strip("()")
        return cls([int(p) for p in text.split(",") if p.strip()])

    def shifted(self, r: int) -> "Signature":
        return Signature([p + r for p in self.parts], allow_negative=True)

    def padded(self, n: int) -> "Signature":
        """Append zeros up to length n (the union with 0^(n - length))."""
        if n < len(self.parts):
            raise ValueError("cannot pad to a shorter length")
        return Signature(self.parts + (0,) * (n - len(self.parts)))

    def partition(self) -> "Signature":
        """Drop zero parts."""
        return Signature([p for p in self.parts if p != 0], allow_negative=True)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    @property
    def N(self) -> int:
        return len(self.parts)

    @property
    def ell(self) -> int:
        return sum(1 for p in self.parts if p != 0)

    @property
    def m0(self) -> int:
        return self.N - self.ell

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    def mult(self, j: int) -> int:
        return self.parts.count(j)


@dataclass(frozen=True)
class Stats:
    m: dict
    ell: int
    m0: int
    weight: int


def stats(lam: Signature) -> Stats:
    return Stats(m=lam.multiplicities(), ell=lam.ell, m0=lam.m0, weight=lam.weight)


def enumerate_signatures(N: int, max_part: int) -> Iterator[Signature]:
    """Every signature of length N with parts in [0, max_part], each once."""
    for combo in itertools.combinations_with_replacement(range(max_part, -1, -1), N):
        yield Signature(combo)


def enumerate_partitions(max_length: int, max_part: int) -> Iterator[Signature]:
    """Partitions (no zero parts) of length at most max_length with parts at most max_part."""
    for lam in enumerate_signatures(max_length, max_part):
        yield lam.partition()


def signatures_with_top(N: int, top: int) -> Iterator[Signature]:
    """Signatures of length N whose largest part is exactly ``top`` (N >= 1)."""
    for rest in itertools.combinations_with_replacement(range(top, -1, -1), N - 1):
        yield Signature((top,) + rest)


@dataclass(frozen=True)
class EventuallyConstant:
    """Sequence x_0, x_1, ... stored as a finite prefix and a constant tail."""

    prefix: tuple = ()
    tail: object = Fraction(0)

    def __getitem__(self, x: int):
        if x < 0:
            raise IndexError("negative column index")
        return self.prefix[x] if x < len(self.prefix) else self.tail

    def shift(self, r: int) -> "EventuallyConstant":
        prefix = self.prefix[r:] if r < len(self.prefix) else ()
        return EventuallyConstant(tuple(prefix), self.tail)

    def map(self, f) -> "EventuallyConstant":
        return EventuallyConstant(tuple(f(x) for x in self.prefix), f(self.tail))

    def with_value(self, x: int, value) -> "EventuallyConstant":
        length = max(len(self.prefix), x + 1)
        items = [self[i] for i in range(length)]
        items[x] = value
        return EventuallyConstant(tuple(items), self.tail)

    def values(self):
        return tuple(self.prefix) + (self.tail,)


def _exact_int(x):
    """Plain ints become Fractions so that later divisions stay exact."""
    return Fraction(x) if isinstance(x, int) else x


def _seq(values) -> EventuallyConstant:
    if isinstance(values, EventuallyConstant):
        return values
    if isinstance(values, (list, tuple)):
        if not values:
            raise ValueError("empty sequence")
        return EventuallyConstant(tuple(values[:-1]), values[-1])
    return EventuallyConstant((), values)


@dataclass(frozen=True)
class ParameterSet:
    """Model data: q, spins s_x, inhomogeneities xi_x and the deformation gamma.

    ``s`` and ``xi`` accept a scalar (constant sequence), a list whose last entry
    is the tail value, or an :class:`EventuallyConstant`.
    """

    q: object
    s: EventuallyConstant
    xi: EventuallyConstant = field(default_factory=lambda: EventuallyConstant((), Fraction(1)))
    gamma: object = Fraction(1)

    def __init__(self, q, s, xi=Fraction(1), gamma=Fraction(1)):
        object.__setattr__(self, "q", _exact_int(q))
        object.__setattr__(self, "s", _seq(s).map(_exact_int))
        object.__setattr__(self, "xi", _seq(xi).map(_exact_int))
        object.__setattr__(self, "gamma", _exact_int(gamma))
        common_mode(q, gamma, *self.s.values(), *self.xi.values())

    @property
    def s0(self):
        return self.s[0]

    @property
    def xi0(self):
        return self.xi[0]

    def shift(self, r: int) -> "ParameterSet":
        return ParameterSet(self.q, self.s.shift(r), self.xi.shift(r), self.gamma)

    def inverted_xi(self) -> "ParameterSet":
        return ParameterSet(self.q, self.s, self.xi.map(lambda x: 1 / x), self.gamma)

    def with_s0(self, s0) -> "ParameterSet":
        return ParameterSet(self.q, self.s.with_value(0, s0), self.xi, self.gamma)

    def with_gamma(self, gamma) -> "ParameterSet":
        return replace(self, gamma=gamma)

    def columns(self, count: int):
        """(s_x, xi_x) for x = 0 .. count - 1."""
        return [(self.s[x], self.xi[x]) for x in range(count)]

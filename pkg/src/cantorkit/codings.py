"""Exact integer and word codings used by every other module.

Words are plain strings over "01" (the empty word is ""), naturals are
Python ints, so nothing here ever overflows.  The pairing enumerates
the plane anti-diagonal by anti-diagonal:

    (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...

so ``pair(n, p) = T(n+p) + p`` with T the triangular numbers, and
``unpair`` is its inverse.  ``nat_to_word`` enumerates binary words by
length, then lexicographically with 0 < 1:

    "", "0", "1", "00", "01", "10", "11", "000", ...

Infinite binary sequences are restricted to the eventually constant
ones (:class:`EvConstSeq`): a finite prefix plus a repeating tail bit.
That fragment is closed under coordinatewise xor and the shift, and it
is exactly the fragment on which the later membership questions are
decidable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

Word = str  # finite word over {0,1}; "" is the empty word


def check_word(w: str) -> str:
    """Validate that ``w`` is a 0/1 string and return it."""
    if not isinstance(w, str) or w.strip("01"):
        raise ValueError(f"not a binary word: {w!r}")
    return w


def _check_nat(q: int) -> int:
    if not isinstance(q, int) or isinstance(q, bool) or q < 0:
        raise ValueError(f"not a natural number: {q!r}")
    return q


def triangular(m: int) -> int:
    """Sum 0 + 1 + ... + m."""
    return m * (m + 1) // 2


def tri_root(q: int) -> int:
    """Largest m with triangular(m) <= q."""
    _check_nat(q)
    m = (math.isqrt(8 * q + 1) - 1) // 2
    # isqrt is exact, but guard the boundary anyway
    while triangular(m + 1) <= q:
        m += 1
    while triangular(m) > q:
        m -= 1
    return m


def unpair(q: int) -> tuple[int, int]:
    """Split q into its diagonal coordinates (inverse of :func:`pair`)."""
    _check_nat(q)
    m = tri_root(q)
    t = triangular(m)
    return (m - q + t, q - t)


def pair(n: int, p: int) -> int:
    """Diagonal pairing: the position of (n, p) in the enumeration."""
    _check_nat(n)
    _check_nat(p)
    return triangular(n + p) + p


def nat_to_word(q: int) -> Word:
    """q-th binary word in length-then-lexicographic order (0 < 1)."""
    _check_nat(q)
    return bin(q + 1)[3:]  # strip "0b1": the leading 1 marks the length


def word_to_nat(w: Word) -> int:
    """Rank of a word in length-then-lexicographic order."""
    check_word(w)
    return int("1" + w, 2) - 1


def tuple_code(s) -> int:
    """Iterated pairing of a nonempty tuple of naturals.

    Arity 1 is the identity; longer tuples fold through ``pair`` from the
    left, so for fixed arity the map is a bijection onto the naturals.
    """
    s = tuple(s)
    if not s:
        raise ValueError("tuple_code needs a nonempty tuple")
    for x in s:
        _check_nat(x)
    return reduce(pair, s)


@dataclass(frozen=True)
class EvConstSeq:
    """Eventually constant infinite binary sequence.

    Canonical form: ``prefix`` never ends with ``tail``, so equal
    sequences compare equal.  Coordinate m is ``prefix[m]`` below the
    certificate ``len(prefix)`` and ``tail`` from there on.
    """

    prefix: Word
    tail: int

    def __post_init__(self):
        check_word(self.prefix)
        if self.tail not in (0, 1):
            raise ValueError(f"tail must be 0 or 1, got {self.tail!r}")
        p = self.prefix.rstrip(str(self.tail))
        if p != self.prefix:
            object.__setattr__(self, "prefix", p)

    @property
    def certificate(self) -> int:
        """Bound N such that every coordinate >= N equals the tail."""
        return len(self.prefix)

    def at(self, m: int) -> int:
        _check_nat(m)
        if m < len(self.prefix):
            return int(self.prefix[m])
        return self.tail

    def prefix_to(self, n: int) -> Word:
        """The first n coordinates as a word."""
        _check_nat(n)
        if n <= len(self.prefix):
            return self.prefix[:n]
        return self.prefix + str(self.tail) * (n - len(self.prefix))

    def ones(self):
        """Positions carrying 1 inside the certified prefix (all of them
        when the tail is 0)."""
        return [i for i, c in enumerate(self.prefix) if c == "1"]

    def is_zero(self) -> bool:
        return self.tail == 0 and not self.prefix

    def __str__(self) -> str:
        return f"{self.prefix or '-'}:{self.tail}^inf"

    @classmethod
    def constant(cls, bit: int) -> "EvConstSeq":
        return cls("", bit)

    @classmethod
    def from_word(cls, w: Word, tail: int) -> "EvConstSeq":
        return cls(w, tail)

    @classmethod
    def parse(cls, literal: str) -> "EvConstSeq":
        """Parse the CLI literal ``tail:prefix`` with "-" for the empty word."""
        try:
            tail_s, prefix_s = literal.split(":", 1)
        except ValueError:
            raise ValueError(f"sequence literal must look like '0:10', got {literal!r}")
        if tail_s not in ("0", "1"):
            raise ValueError(f"tail must be 0 or 1 in {literal!r}")
        prefix = "" if prefix_s == "-" else prefix_s
        return cls(check_word(prefix), int(tail_s))


ZERO_SEQ = EvConstSeq("", 0)
ONE_SEQ = EvConstSeq("", 1)


def symdiff(a: EvConstSeq, b: EvConstSeq) -> EvConstSeq:
    """Coordinatewise xor; the result is again eventually constant."""
    n = max(len(a.prefix), len(b.prefix))
    bits = "".join(str(a.at(i) ^ b.at(i)) for i in range(n))
    return EvConstSeq(bits, a.tail ^ b.tail)


def shift(a: EvConstSeq) -> EvConstSeq:
    """Drop coordinate 0."""
    return EvConstSeq(a.prefix[1:], a.tail)


def prepend(bit: int, a: EvConstSeq) -> EvConstSeq:
    """Push ``bit`` in front of coordinate 0 (left inverse of :func:`shift`)."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    return EvConstSeq(str(bit) + a.prefix, a.tail)

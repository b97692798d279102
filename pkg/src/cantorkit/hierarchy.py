"""Row-vanishing maps on eventually constant sequences.

The basic map sends a sequence e to the sequence whose coordinate i is
1 exactly when e is 0 on the whole pairing row {pair(i, j) | j}.  On an
eventually constant input every row is decided by finitely many
coordinates plus the tail, so the map is computable and the output is
again eventually constant, with certificate

    N' = tri_root(N) + 1

because pair(i, 0) = triangular(i) already clears the input certificate
N from row N' on.

Iterating the map a finite number of times stays exact.  The limit
stage works through the staged maps: stage k keeps coordinates below k
and applies a finite iterate to the shifted remainder.  Whether the
diagonal of that process is eventually constant depends on the parity
of the fundamental sequence: once a stage sees an exactly constant
remainder, each later stage flips the running tail once per odd entry.
With the default fundamental sequence (all entries 1) the diagonal
therefore alternates forever, and the only honest outcome is
:class:`CertificateUnavailable`; an eventually even fundamental
sequence yields an exact answer.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import testkit
from .codings import EvConstSeq, shift, symdiff, tri_root
from .errors import CertificateUnavailable


@dataclass(frozen=True)
class FundSeq:
    """Fundamental sequence for the limit ordinal: finitely many explicit
    positive entries, then a repeating positive entry."""

    head: tuple = ()
    repeat: int = 1

    def __post_init__(self):
        for x in self.head:
            if not isinstance(x, int) or x < 1:
                raise ValueError("fundamental sequence entries must be >= 1")
        if not isinstance(self.repeat, int) or self.repeat < 1:
            raise ValueError("repeating entry must be >= 1")

    def at(self, k: int) -> int:
        return self.head[k] if k < len(self.head) else self.repeat


@dataclass(frozen=True)
class Ordinal:
    """Either a natural number or the first limit, with a fundamental
    sequence choice.  Nothing at or beyond twice the first limit."""

    value: int | None
    fundseq: FundSeq | None = None

    @classmethod
    def finite(cls, n: int) -> "Ordinal":
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"not a natural number: {n!r}")
        return cls(n, None)

    @classmethod
    def omega(cls, fundseq: FundSeq | None = None) -> "Ordinal":
        return cls(None, fundseq or FundSeq())

    @classmethod
    def parse(cls, token: str) -> "Ordinal":
        if token == "omega":
            return cls.omega()
        return cls.finite(int(token))

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __str__(self) -> str:
        return "omega" if self.value is None else str(self.value)


@dataclass(frozen=True)
class CertifiedSeq:
    """A sequence together with an explicit tail certificate.

    The bound may be looser than the canonical one but never tighter;
    that exact comparison subsumes the coordinate spot check.
    """

    seq: EvConstSeq
    bound: int

    def __post_init__(self):
        if self.bound < self.seq.certificate:
            raise ValueError(
                f"certificate {self.bound} below canonical bound "
                f"{self.seq.certificate}"
            )

    @classmethod
    def of(cls, x) -> "CertifiedSeq":
        if isinstance(x, CertifiedSeq):
            return x
        return cls(x, x.certificate)


def row_zero(e) -> CertifiedSeq:
    """Coordinate i of the output is 1 iff the input is 0 on all of row i."""
    e = CertifiedSeq.of(e)
    seq, n = e.seq, e.bound
    out_bound = tri_root(n) + 1
    if seq.tail == 1:
        # every row eventually meets the tail of ones
        return CertifiedSeq(EvConstSeq("", 0), out_bound)
    bits = []
    for i in range(out_bound):
        row_clear = True
        j = 0
        pos = i * (i + 1) // 2  # pair(i, 0)
        while pos < n:
            if seq.at(pos) == 1:
                row_clear = False
                break
            j += 1
            pos += i + j + 1  # pair(i, j+1) - pair(i, j)
        bits.append("1" if row_clear else "0")
    return CertifiedSeq(EvConstSeq("".join(bits), 1), out_bound)


def _row_zero_iter(times: int, e: CertifiedSeq) -> CertifiedSeq:
    for _ in range(times):
        e = row_zero(e)
    return e


def row_zero_pow(xi: Ordinal, e, max_stages: int = 64) -> CertifiedSeq:
    """Transfinite iterate of :func:`row_zero` at the given ordinal.

    Finite ordinals iterate directly.  The limit runs the staged maps
    until a stage sees an exactly constant remainder; from there the
    diagonal is a closed-form parity and either stabilizes (exact
    result) or provably alternates (:class:`CertificateUnavailable`).
    Exhausting ``max_stages`` without reaching that regime also raises,
    with a distinguishable message.
    """
    e = CertifiedSeq.of(e)
    if xi.is_finite:
        return _row_zero_iter(xi.value, e)

    fs = xi.fundseq
    g = e.seq
    out_bits = []
    for k in range(max_stages):
        if g.certificate <= k:
            # remainder is exactly constant: later diagonal values flip
            # the running tail once per odd fundamental entry
            b = g.tail
            settle = max(k, len(fs.head))
            diag = []
            for j in range(k, settle + 1):
                b ^= fs.at(j) & 1
                diag.append(b)
            if fs.repeat % 2 == 1:
                raise CertificateUnavailable(
                    "limit iterate alternates eventually: the repeating "
                    "fundamental entry is odd, so no tail certificate exists"
                )
            prefix = "".join(str(x) for x in out_bits + diag[:-1])
            return CertifiedSeq.of(EvConstSeq(prefix, diag[-1]))
        stage = _row_zero_iter(fs.at(k), CertifiedSeq.of(shift_by(g, k)))
        g = EvConstSeq(g.prefix_to(k) + stage.seq.prefix, stage.seq.tail)
        out_bits.append(g.at(k))
    raise CertificateUnavailable(
        f"no tail stability within {max_stages} limit stages"
    )


def shift_by(seq: EvConstSeq, k: int) -> EvConstSeq:
    """Drop the first k coordinates."""
    return EvConstSeq(seq.prefix[k:], seq.tail)


def vanishes(xi: Ordinal, e, max_stages: int = 64) -> bool:
    """Membership in the preimage of the zero sequence under the iterate."""
    return row_zero_pow(xi, e, max_stages=max_stages).seq.is_zero()


def branch_escapes(
    xi: Ordinal, alpha: EvConstSeq, beta: EvConstSeq, test: testkit.Test
) -> bool:
    """True when (alpha, beta) is a tree branch whose shifted difference
    escapes the vanishing class."""
    if not testkit.is_branch(alpha, beta, test):
        return False
    return not vanishes(xi, shift(symdiff(alpha, beta)))

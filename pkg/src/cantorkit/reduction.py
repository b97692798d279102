"""Continuous-reduction scaffolding over a canonical test.

Given an oracle of "safe continuation" words u(q, l) (every length-l
word extended by u(q, l) lands inside the q-th dense open set), this
module linearizes the binary word tree along the length-lex order and
threads one test pair per rank:

    rank 0:      s = "0" + u(0, 1) + zeros
    rank R:      s extends the previous rank's s by "0" + u(R, .) + zeros,
                 t extends the tree-parent's t by the branching bit and
                 a mirror of the same material.

The supremum of the s-chain is a single anchor sequence; the supremum
of the t-chain along the prefixes of an arbitrary alpha is a continuous
image of alpha, and the two differ exactly at coordinate 0 and at the
pair levels along alpha's path, where the difference bit equals the
corresponding bit of alpha.

Levels explode: each rank's level runs the whole previous word through
the word bijection and the pairing, so it grows at least quadratically
per rank and generically doubly exponentially.  The construction
therefore keeps an exact rank table only until the level passes a
content horizon ``cap``; beyond it a path node is recorded
symbolically, with its level known only to exceed the horizon but its
level guard (the first pairing component of level - 1) still known
exactly from the construction.  Every question the verifiers ask needs
only the exact table, the sub-horizon content, and those guards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .codings import (
    EvConstSeq,
    Word,
    check_word,
    nat_to_word,
    pair,
    tuple_code,
    unpair,
    word_to_nat,
)
from .errors import MaterializationError, ResourceLimitError, SearchExhaustedError
from .hierarchy import Ordinal, row_zero_pow
from .testkit import Test, level_params, pair_in_tree, richness_witness

MAX_ORACLE_WORD = 1 << 16


def trivial_oracle(q: int, l: int) -> Word:
    """Every cylinder is already inside every set: no continuation needed."""
    return ""


def one_after_oracle(q: int, l: int) -> Word:
    """Forces a 1 strictly after coordinate q: u = zeros up to there, then 1."""
    return "0" * max(0, q + 1 - l) + "1"


ORACLES = {"trivial": trivial_oracle, "one": one_after_oracle}


@dataclass(frozen=True)
class RankRec:
    """Exactly materialized rank: its word, pair level machine data."""

    rank: int
    word: Word
    level: int
    u: Word
    v_len: int
    base_level: int
    u_block_len: int
    row: int


@dataclass(frozen=True)
class PathNode:
    """A node alpha|q along a path; level None means beyond the horizon."""

    q: int
    word: Word
    rank: int
    level: int | None
    row: int


@dataclass(frozen=True)
class DiffData:
    """Where the anchor and the image of alpha differ, besides coordinate 0.

    ``exact`` holds (position, row, q) with the position as a plain int;
    ``symbolic`` holds (q, row) for ones beyond the exact table;
    ``all_rows`` marks a tail-1 alpha, whose ones eventually hit every row.
    """

    exact: tuple
    symbolic: tuple
    all_rows: bool


class Reduction:
    """Materialized reduction data for one test and one oracle."""

    def __init__(self, test: Test, oracle, max_rank: int | None = None,
                 cap: int = 1024):
        if cap < 4:
            raise ValueError("content horizon must be at least 4")
        self.test = test
        self.oracle = oracle
        self.max_rank = max_rank
        self.cap = cap
        self.ranks: list[RankRec] = []
        self._anchor: Word = ""
        self._build()

    # -- construction ------------------------------------------------

    def _call_oracle(self, q: int, l: int) -> Word:
        u = check_word(self.oracle(q, l))
        if len(u) > MAX_ORACLE_WORD:
            raise ResourceLimitError(
                f"oracle word at (q={q}) has {len(u)} characters"
            )
        return u

    def _split_of_level(self, lvl: int) -> tuple[int, Word]:
        """Split data of the test pair at an exactly known level lvl >= 1:
        the earlier level q' and the shared suffix w with s = s_q' + "0" + w."""
        if self.test.canonical:
            base = level_params(lvl)[0]
            return base, self._anchor[base + 1 : lvl]
        s_l, t_l = self.test.pair_at(lvl)
        last_diff = max(i for i in range(lvl) if s_l[i] != t_l[i])
        for q in range(last_diff, lvl):
            if s_l[q] != "0" or t_l[q] != "1":
                continue
            s_q, t_q = self.test.pair_at(q)
            if s_l[:q] == s_q and t_l[:q] == t_q:
                return q, s_l[q + 1 :]
        raise SearchExhaustedError(f"level {lvl} admits no split")

    def _build(self) -> None:
        self.ranks = []
        anchor: list[str] = []
        r = 0
        while True:
            w = nat_to_word(r)
            row = unpair(len(w))[0]
            if r == 0:
                base = 0
                u = self._call_oracle(0, 1)
                u_block = u
            else:
                parent_rank = word_to_nat(w[:-1])
                eps = w[-1]
                parent_level = self.ranks[parent_rank].level
                prev_level = self.ranks[r - 1].level
                u = self._call_oracle(r, prev_level + 1)
                middle = ("".join(anchor[:prev_level]) + "0")[parent_level + 1 :]
                if eps == "1":
                    base = parent_level
                    u_block = middle + u
                else:
                    base, w2 = self._split_of_level(parent_level)
                    u_block = w2 + "0" + middle + u
            if self.test.canonical:
                level = pair(row, pair(base, word_to_nat(u_block))) + 1
                v_len = level - base - 1 - len(u_block)
                v_word = None
            else:
                try:
                    v = richness_witness(self.test, base, row, u_block)
                except SearchExhaustedError as exc:
                    raise SearchExhaustedError(
                        f"rank {r} (word {w or '-'!r}): {exc}"
                    ) from exc
                level = base + 1 + len(u_block) + len(v)
                v_len = len(v)
                v_word = v
            if v_len < 0 or unpair(level - 1)[0] != row:
                raise AssertionError(f"witness arithmetic broke at rank {r}")
            # extend the anchor content: "0", the oracle word, then padding
            start = len(anchor)
            if start < self.cap:
                head = "0" + u + (v_word or "")
                room = self.cap - start
                anchor.extend(head[:room])
                target = min(level, self.cap)
                if len(anchor) < target:
                    anchor.extend("0" * (target - len(anchor)))
            self.ranks.append(
                RankRec(r, w, level, u, v_len, base, len(u_block), row)
            )
            if level >= self.cap:
                break
            if self.max_rank is not None and r >= self.max_rank:
                break
            if r > 10_000:  # levels grow superlinearly; this cannot happen
                raise AssertionError("rank table failed to reach the horizon")
            r += 1
        self._anchor = "".join(anchor)

    @property
    def horizon(self) -> int:
        """Level of the last exactly materialized rank."""
        return self.ranks[-1].level

    @property
    def available(self) -> int:
        """How many anchor coordinates are materialized."""
        return len(self._anchor)

    def _ensure(self, n: int) -> None:
        if n <= self.available:
            return
        if self.max_rank is not None:
            raise MaterializationError(
                f"prefix length {n} exceeds the materialized {self.available} "
                f"coordinates and the rank bound forbids extending"
            )
        cap = self.cap
        while cap < n:
            cap *= 2
        self.cap = cap
        self._build()

    # -- prefixes ------------------------------------------------------

    def anchor_prefix(self, n: int) -> Word:
        """First n coordinates of the anchor sequence."""
        self._ensure(n)
        return self._anchor[:n]

    def path_nodes(self, alpha_prefix: Word) -> list[PathNode]:
        """Nodes along the given path prefix, exact while the table lasts."""
        check_word(alpha_prefix)
        out = []
        for q in range(len(alpha_prefix) + 1):
            word = alpha_prefix[:q]
            rank = word_to_nat(word)
            level = self.ranks[rank].level if rank < len(self.ranks) else None
            out.append(PathNode(q, word, rank, level, unpair(q)[0]))
        return out

    def map_prefix(self, alpha_prefix: Word, n: int) -> Word:
        """First n coordinates of the image of any sequence extending the
        given prefix.

        Well-defined once some node along the prefix has level >= n: the
        image agrees with the anchor everywhere except coordinate 0 and
        the node levels, which carry the corresponding bits of alpha.
        """
        self._ensure(n)
        nodes = self.path_nodes(alpha_prefix)
        if not any(node.level is None or node.level >= n for node in nodes):
            raise MaterializationError(
                f"path prefix {alpha_prefix!r} is too short to settle {n} "
                f"coordinates of the image"
            )
        bits = list(self._anchor[:n])
        if n > 0:
            bits[0] = "1"
        for node in nodes[:-1]:
            if node.level is not None and node.level < n:
                if bits[node.level] != "0" or self._anchor[node.level] != "0":
                    raise AssertionError("anchor has no room for a path mark")
                bits[node.level] = alpha_prefix[node.q]
        return "".join(bits)

    def map_prefix_of(self, alpha: EvConstSeq, n: int) -> Word:
        """Like :meth:`map_prefix`, extending the path by alpha's tail as
        far as needed."""
        self._ensure(n)
        q = 0
        while True:
            word = alpha.prefix_to(q)
            rank = word_to_nat(word)
            if rank >= len(self.ranks) or self.ranks[rank].level >= n:
                return self.map_prefix(alpha.prefix_to(max(q, 1)), n)
            q += 1

    # -- difference structure ------------------------------------------

    def differences(self, alpha: EvConstSeq) -> DiffData:
        """Positions beyond 0 where the anchor and the image of alpha differ:
        the node levels along alpha's path whose alpha bit is 1."""
        exact = []
        q = 0
        while True:
            word = alpha.prefix_to(q)
            rank = word_to_nat(word)
            if rank >= len(self.ranks):
                break
            if alpha.at(q) == 1:
                rec = self.ranks[rank]
                row = unpair(rec.level - 1)[0]
                if row != unpair(q)[0]:  # pragma: no cover
                    raise AssertionError("level guard disagrees with the path")
                exact.append((rec.level, row, q))
            q += 1
        symbolic = tuple(
            (qq, unpair(qq)[0]) for qq in alpha.ones() if qq >= q
        )
        return DiffData(tuple(exact), symbolic, alpha.tail == 1)


def build_reduction(
    test: Test, oracle, max_rank: int | None = None, cap: int = 1024
) -> Reduction:
    """Materialize the reduction for a test and a dense-open oracle."""
    return Reduction(test, oracle, max_rank=max_rank, cap=cap)


# --- verification ---------------------------------------------------------

@dataclass
class ReductionReport:
    ok: bool
    clause: str | None = None
    detail: str = ""
    stats: dict = field(default_factory=dict)


def _tuples_upto(t_bound: int, max_arity: int = 2):
    """All lead tuples with entries <= t_bound, arities 0..max_arity."""
    out = [()]
    for a in range(t_bound + 1):
        out.append((a,))
    if max_arity >= 2:
        for a in range(t_bound + 1):
            for b in range(t_bound + 1):
                out.append((a, b))
    return out


def default_samples(seed: int = 0, count: int = 8) -> list[EvConstSeq]:
    """Deterministic tail-0 sample paths, fixed shapes plus seeded noise."""
    fixed = ["", "1", "01", "11", "10", "0101", "001", "110"]
    rng = random.Random(seed)
    words = list(fixed)
    for _ in range(count):
        k = rng.randint(0, 16)
        words.append("".join(rng.choice("01") for _ in range(k)))
    return [EvConstSeq(w, 0) for w in words]


def _delta_bit(diff: DiffData, position: int) -> int:
    """Difference indicator at an explicitly asked position >= 1 (small
    positions only: symbolic ones sit beyond any horizon)."""
    return int(any(p == position for p, _, _ in diff.exact))


def _row_hit_rows(diff: DiffData):
    return {row for _, row, _ in diff.exact} | {row for _, row in diff.symbolic}


def row_hits(rd: Reduction, alpha: EvConstSeq) -> EvConstSeq:
    """The first vanishing-map stage of the shifted difference sequence.

    Coordinate i dies exactly when some difference position P >= 1 has
    level guard (P-1) unpairing to row i; those guards are exact for
    table levels and carried by construction beyond it.  A tail-1 alpha
    hits every row.
    """
    diff = rd.differences(alpha)
    if diff.all_rows:
        return EvConstSeq("", 0)
    rows = _row_hit_rows(diff)
    if not rows:
        return EvConstSeq("", 1)
    bits = "".join("0" if i in rows else "1" for i in range(max(rows) + 1))
    return EvConstSeq(bits, 1)


def verify_shift_identity(
    rd: Reduction, xi: Ordinal, alpha: EvConstSeq, coords: int
) -> bool:
    """Coordinatewise equality, below ``coords``, of the xi-th vanishing
    iterate of alpha and of the shifted anchor/image difference.

    Only finite xi and tail-0 alpha are accepted: a tail-1 alpha makes
    the difference sequence eventually alternate between marked levels,
    so it has no tail certificate (its prefixes remain available through
    :meth:`Reduction.map_prefix_of`).
    """
    if not xi.is_finite:
        raise ValueError("the identity check needs a finite ordinal")
    if alpha.tail != 0:
        raise ValueError("tail-1 alpha rejected: the difference sequence "
                         "is not eventually constant")
    lhs = row_zero_pow(xi, alpha).seq
    if xi.value == 0:
        rd._ensure(coords + 1)
        diff = rd.differences(alpha)
        return all(
            lhs.at(k) == _delta_bit(diff, k + 1) for k in range(coords)
        )
    first = row_hits(rd, alpha)
    rhs = row_zero_pow(Ordinal.finite(xi.value - 1), first).seq
    return all(lhs.at(k) == rhs.at(k) for k in range(coords))


def verify_reduction(
    rd: Reduction,
    depth: int,
    t_bound: int,
    m_bound: int,
    samples: list[EvConstSeq] | None = None,
    seed: int = 0,
) -> ReductionReport:
    """Check the reduction's contract at finite depth.

    (a) every sampled path yields prefix pairs inside the generated tree
        through ``depth``;
    (b)(i) a 1 of alpha at a coded coordinate forces a difference at a
        coordinate with the matching level guard: exhibited inside
        ``depth`` when the level lands there, otherwise established from
        the construction records;
    (b)(ii) conversely, a difference at a coded coordinate forces a 1 of
        alpha under the same lead tuple;
    plus the structural facts: level guards, chunk reconstruction, the
    oracle words sitting inside both the anchor and every sampled image,
    and the explicit sub-depth difference positions matching the
    structural ones.
    """
    # the horizon must clear both the depth and every coded coordinate,
    # so that difference positions beyond the exact table cannot alias
    # the small positions the clauses ask about
    max_code = tuple_code((t_bound, t_bound, m_bound))
    rd._ensure(max(depth, max_code + 2))
    if samples is None:
        samples = default_samples(seed)
    stats = {"literal_b_i": 0, "structural_b_i": 0, "b_ii": 0, "vacuous": 0}

    # structural: level guards and chunk arithmetic for every exact rank
    prev_level = 0
    for rec in rd.ranks:
        if unpair(rec.level - 1)[0] != rec.row:
            return ReductionReport(False, "structure",
                                   f"level guard fails at rank {rec.rank}")
        if rec.rank > 0:
            if rec.level != prev_level + 1 + len(rec.u) + rec.v_len:
                return ReductionReport(False, "structure",
                                       f"chunk arithmetic fails at rank {rec.rank}")
        start = prev_level
        if start + 1 + len(rec.u) <= rd.available:
            chunk = rd._anchor[start : start + 1 + len(rec.u)]
            if chunk != "0" + rec.u:
                return ReductionReport(
                    False, "structure",
                    f"anchor does not carry the rank-{rec.rank} oracle word")
        prev_level = rec.level

    for alpha in samples:
        image = rd.map_prefix_of(alpha, depth)
        anchor = rd.anchor_prefix(depth)

        # (a) prefix pairs stay in the tree
        for r in range(depth + 1):
            if not pair_in_tree(anchor[:r], image[:r], rd.test):
                return ReductionReport(
                    False, "a",
                    f"prefix pair at depth {r} leaves the tree for "
                    f"alpha {alpha}")

        # oracle words must sit inside the image wherever they fit
        prev_level = 0
        for rec in rd.ranks:
            lo = prev_level + 1
            hi = lo + len(rec.u)
            if hi <= depth and image[lo:hi] != rec.u:
                return ReductionReport(
                    False, "structure",
                    f"image misses the rank-{rec.rank} oracle word for "
                    f"alpha {alpha}")
            prev_level = rec.level

        # explicit vs structural difference positions below depth
        diff = rd.differences(alpha)
        explicit = {i for i in range(depth)
                    if i < len(anchor) and anchor[i] != image[i]}
        structural = ({0} if depth > 0 else set()) | {
            p for p, _, _ in diff.exact if p < depth
        }
        if explicit != structural:
            return ReductionReport(
                False, "structure",
                f"difference positions disagree for alpha {alpha}: "
                f"explicit {sorted(explicit)} vs structural {sorted(structural)}")

        rows = _row_hit_rows(diff)
        for t in _tuples_upto(t_bound):
            lead = tuple_code(t) if t else None
            for m in range(m_bound + 1):
                code = tuple_code(t + (m,))
                # (b)(i)
                if alpha.at(code) == 1:
                    if lead is None:
                        ok = bool(diff.exact or diff.symbolic or diff.all_rows)
                    else:
                        ok = diff.all_rows or lead in rows
                    if not ok:
                        return ReductionReport(
                            False, "b(i)",
                            f"no difference with guard {lead} for alpha "
                            f"{alpha}, tuple {t}, m={m}")
                    literal = any(
                        p < depth and (lead is None or row == lead)
                        for p, row, _ in diff.exact
                    )
                    stats["literal_b_i" if literal else "structural_b_i"] += 1
                else:
                    stats["vacuous"] += 1
                # (b)(ii)
                position = code + 1
                if _delta_bit(diff, position) == 1:
                    found = None
                    for m2 in range(alpha.certificate + 2):
                        probe = tuple_code(t + (m2,))
                        if alpha.at(probe) == 1:
                            found = m2
                            break
                    if found is None:
                        return ReductionReport(
                            False, "b(ii)",
                            f"difference at coded coordinate {position - 1} "
                            f"has no matching 1 in alpha {alpha}, tuple {t}")
                    stats["b_ii"] += 1

    return ReductionReport(True, None, "all clauses hold", stats)

"""Diagonal tests on binary words and the trees they generate.

A *test* picks one pair of equal-length words per level so that the
generated tree

    T = {("", "")} | {(s_q + "0" + w, t_q + "1" + w)}

has acyclic level graphs.  The canonical instance is produced by a
recurrence that threads every (parent level, middle word) pair through
the diagonal pairing; everything else in this module checks such
objects exhaustively at finite depth: the defining clauses, level
slices, bipartite level graphs, cycles, rectangles, and membership of
eventually constant branch pairs.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from itertools import product

from .codings import (
    EvConstSeq,
    Word,
    check_word,
    nat_to_word,
    pair,
    unpair,
    word_to_nat,
)
from .errors import (
    MaterializationError,
    ResourceLimitError,
    SearchExhaustedError,
    UndecidedError,
)

# a fully materialized test keeps ~q**2 characters; keep that visible
DEFAULT_CHAR_BUDGET = 2**26


def level_params(q: int) -> tuple[int, Word, int]:
    """Recurrence data (base level, middle word, zero padding) for level q >= 1.

    Level q extends the base-level pair by a 0/1 split, the middle word
    and a block of zeros:  s_q = s_base + "0" + mid + "0"*pad  (the t
    side uses "1" as the split bit).  base + 1 + len(mid) + pad == q.
    """
    if q < 1:
        raise ValueError("level 0 has no recurrence data")
    r = unpair(q - 1)[1]
    base, mid_rank = unpair(r)
    mid = nat_to_word(mid_rank)
    pad = q - 1 - base - len(mid)
    return base, mid, pad


def level_bits(q: int, i: int) -> tuple[int, int]:
    """Coordinate i of the canonical pair at level q, without storing words.

    Returns (s bit, t bit).  The recursion only descends through base
    levels, which shrink extremely fast, so huge q are fine.
    """
    if not 0 <= i < q:
        raise ValueError(f"coordinate {i} out of range for level {q}")
    while True:
        base, mid, pad = level_params(q)
        if i < base:
            q = base
            continue
        if i == base:
            return (0, 1)
        if i <= base + len(mid):
            b = int(mid[i - base - 1])
            return (b, b)
        return (0, 0)


class Test:
    """Per-level word pairs, materialized lazily for the canonical instance.

    Foreign instances (from files or explicit pairs) are fixed: queries
    beyond their materialized levels raise :class:`MaterializationError`.
    Levels are filled at most once; refilling is idempotent.
    """

    def __init__(self, canonical: bool = True, char_budget: int = DEFAULT_CHAR_BUDGET):
        self.canonical = canonical
        self.char_budget = char_budget
        self._levels: dict[int, tuple[Word, Word]] = {}
        self._chars = 0
        if canonical:
            self._levels[0] = ("", "")

    @classmethod
    def from_pairs(cls, pairs: dict[int, tuple[Word, Word]]) -> "Test":
        t = cls(canonical=False)
        for q, (s, tt) in sorted(pairs.items()):
            t._levels[int(q)] = (check_word(s), check_word(tt))
        return t

    @property
    def materialized_levels(self) -> list[int]:
        return sorted(self._levels)

    def has_level(self, q: int) -> bool:
        return q in self._levels or (self.canonical and q >= 0)

    def materialize(self, max_q: int) -> None:
        if not self.canonical:
            missing = [q for q in range(max_q + 1) if q not in self._levels]
            if missing:
                raise MaterializationError(
                    f"foreign test has no level {missing[0]}"
                )
            return
        need = max_q * (max_q + 1)
        if need > self.char_budget:
            raise ResourceLimitError(
                f"materializing levels 0..{max_q} needs ~{need} characters, "
                f"budget is {self.char_budget}"
            )
        for q in range(len(self._levels), max_q + 1):
            base, mid, pad = level_params(q)
            s_b, t_b = self._levels[base]
            zeros = "0" * pad
            self._levels[q] = (s_b + "0" + mid + zeros, t_b + "1" + mid + zeros)
            self._chars += 2 * q

    def pair_at(self, q: int) -> tuple[Word, Word]:
        if q not in self._levels:
            if self.canonical:
                self.materialize(q)
            else:
                raise MaterializationError(f"level {q} not materialized")
        return self._levels[q]


def build_test(max_q: int, char_budget: int = DEFAULT_CHAR_BUDGET) -> Test:
    """The canonical test, materialized through level ``max_q``."""
    t = Test(canonical=True, char_budget=char_budget)
    t.materialize(max_q)
    return t


# --- test files --------------------------------------------------------

def _word_out(w: Word) -> str:
    return w or "-"


def _word_in(s: str) -> Word:
    return check_word("" if s == "-" else s)


def save_test(test: Test, fp) -> None:
    """Write ``level<TAB>s<TAB>t`` lines, "-" for the empty word."""
    for q in test.materialized_levels:
        s, t = test.pair_at(q)
        fp.write(f"{q}\t{_word_out(s)}\t{_word_out(t)}\n")


def load_test(fp) -> Test:
    """Parse the line format of :func:`save_test` into a foreign test."""
    if isinstance(fp, str):
        fp = io.StringIO(fp)
    pairs: dict[int, tuple[Word, Word]] = {}
    for lineno, line in enumerate(fp, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
        q = int(parts[0])
        if q < 0:
            raise ValueError(f"line {lineno}: negative level")
        if q in pairs:
            raise ValueError(f"line {lineno}: duplicate level {q}")
        pairs[q] = (_word_in(parts[1]), _word_in(parts[2]))
    return Test.from_pairs(pairs)


# --- the defining clauses ----------------------------------------------

@dataclass
class TestReport:
    """Outcome of :func:`check_test`: ok, or the first violated clause."""

    ok: bool
    clause: str | None = None
    detail: str = ""
    split_witnesses: dict[int, int] = field(default_factory=dict)
    richness_witnesses: dict = field(default_factory=dict)


def _closed_form_level(p: int, m: int, u: Word) -> int:
    """Level whose canonical pair realizes the richness clause at (p, m, u)."""
    return pair(m, pair(p, word_to_nat(u))) + 1


def richness_witness(
    test: Test,
    p: int,
    m: int,
    u: Word,
    value_budget: int = 10**6,
    search_budget: int | None = None,
) -> Word:
    """A word v with (s_p + "0" + u + v, t_p + "1" + u + v) in the test
    and the level's predecessor unpairing to (m, _).

    Canonical tests use the closed form (the witness is a block of
    zeros); foreign tests get a bounded scan over their materialized
    levels.  Witness values larger than ``value_budget`` characters are
    refused rather than built.
    """
    check_word(u)
    s_p, t_p = test.pair_at(p)
    if test.canonical:
        lvl = _closed_form_level(p, m, u)
        vlen = lvl - 1 - p - len(u)
        if vlen > value_budget:
            raise ResourceLimitError(
                f"witness for (p={p}, m={m}, u={u!r}) has {vlen} characters, "
                f"budget is {value_budget}"
            )
        return "0" * vlen
    top = search_budget if search_budget is not None else max(
        test.materialized_levels, default=0
    )
    head = p + 1 + len(u)
    for lvl in test.materialized_levels:
        if lvl < head or lvl > top:
            continue
        s_l, t_l = test.pair_at(lvl)
        v = s_l[head:]
        if (
            unpair(lvl - 1)[0] == m
            and s_l == s_p + "0" + u + v
            and t_l == t_p + "1" + u + v
        ):
            return v
    raise SearchExhaustedError(
        f"no richness witness for (p={p}, m={m}, u={u!r}) in materialized levels"
    )


def _verify_richness_arithmetic(test: Test, p: int, m: int, u: Word, v: Word) -> bool:
    """Re-verify a canonical witness without building the level's words."""
    lvl = p + 1 + len(u) + len(v)
    if set(v) - {"0"}:
        return False
    if unpair(lvl - 1)[0] != m:
        return False
    base, mid, pad = level_params(lvl)
    if (base, mid, pad) != (p, u, len(v)):
        return False
    s_p, t_p = test.pair_at(p)
    s_word = s_p + "0" + u + v
    t_word = t_p + "1" + u + v
    samples = {0, p // 2, p, p + 1, p + len(u), p + len(u) + 1, lvl - 1}
    for i in sorted(samples):
        if 0 <= i < lvl:
            sb, tb = level_bits(lvl, i)
            if sb != int(s_word[i]) or tb != int(t_word[i]):
                return False
    return True


def check_test(
    test: Test,
    max_q: int,
    b_bounds: tuple[int, int, int] = (3, 3, 3),
    word_budget: int = 2048,
) -> TestReport:
    """Exhaustive check of the three defining clauses.

    (a) one pair of length-q words per level q <= max_q;
    (c) every level n > 0 splits over some earlier level;
    (b) richness witnesses exist for all p, m below the bounds and all
        middle words u up to the length bound, each one re-verified
        independently of the closed form that produced it.
    """
    p_max, m_max, u_len_max = b_bounds
    try:
        test.materialize(max_q)
    except MaterializationError as exc:
        return TestReport(False, "a", str(exc))

    for q in range(max_q + 1):
        s, t = test.pair_at(q)
        if len(s) != q or len(t) != q:
            return TestReport(
                False, "a", f"level {q} words have lengths {len(s)}, {len(t)}"
            )

    report = TestReport(True)
    for n in range(1, max_q + 1):
        s_n, t_n = test.pair_at(n)
        if s_n == t_n:
            return TestReport(False, "c", f"level {n} words are equal")
        last_diff = max(i for i in range(n) if s_n[i] != t_n[i])
        found = None
        for q in range(last_diff, n):
            if s_n[q] != "0" or t_n[q] != "1":
                continue
            s_q, t_q = test.pair_at(q)
            if s_n[:q] == s_q and t_n[:q] == t_q:
                found = q
                break
        if found is None:
            return TestReport(
                False, "c", f"level {n} admits no split over an earlier level"
            )
        report.split_witnesses[n] = found

    words = [
        "".join(bits)
        for k in range(u_len_max + 1)
        for bits in product("01", repeat=k)
    ]
    for p in range(p_max + 1):
        for m in range(m_max + 1):
            for u in words:
                try:
                    v = richness_witness(test, p, m, u)
                except (SearchExhaustedError, ResourceLimitError) as exc:
                    return TestReport(
                        False, "b", f"(p={p}, m={m}, u={u!r}): {exc}"
                    )
                lvl = p + 1 + len(u) + len(v)
                if test.canonical:
                    ok = _verify_richness_arithmetic(test, p, m, u, v)
                    if ok and lvl <= word_budget:
                        s_l, t_l = test.pair_at(lvl)
                        s_p, t_p = test.pair_at(p)
                        ok = s_l == s_p + "0" + u + v and t_l == t_p + "1" + u + v
                else:
                    s_l, t_l = test.pair_at(lvl)
                    s_p, t_p = test.pair_at(p)
                    ok = (
                        s_l == s_p + "0" + u + v
                        and t_l == t_p + "1" + u + v
                        and unpair(lvl - 1)[0] == m
                    )
                if not ok:
                    return TestReport(
                        False, "b", f"witness at (p={p}, m={m}, u={u!r}) fails"
                    )
                report.richness_witnesses[(p, m, u)] = lvl
    return report


# --- the generated tree -------------------------------------------------

def pair_in_tree(s: Word, t: Word, test: Test) -> bool:
    """Membership of a same-length pair in the generated tree.

    The split level is searched exactly: it can only sit at or after the
    last position where the words differ.
    """
    check_word(s)
    check_word(t)
    if len(s) != len(t):
        raise ValueError("pair_in_tree needs words of equal length")
    n = len(s)
    if n == 0:
        return True
    if s == t:
        return False
    last_diff = max(i for i in range(n) if s[i] != t[i])
    for q in range(last_diff, n):
        if s[q] != "0" or t[q] != "1":
            continue
        if not test.has_level(q):
            continue
        s_q, t_q = test.pair_at(q)
        if s[:q] == s_q and t[:q] == t_q:
            return True
    return False


def level_slice(test: Test, p: int) -> set[tuple[Word, Word]]:
    """All tree pairs of length p."""
    if p == 0:
        return {("", "")}
    out = set()
    for q in range(p):
        if not test.has_level(q):
            continue
        s_q, t_q = test.pair_at(q)
        for bits in product("01", repeat=p - q - 1):
            w = "".join(bits)
            out.add((s_q + "0" + w, t_q + "1" + w))
    return out


@dataclass(frozen=True)
class LevelGraph:
    """Bipartite graph of a level slice: all length-p words on both sides,
    one edge per slice pair."""

    level: int
    edges: frozenset

    def left_vertices(self):
        return ["".join(b) for b in product("01", repeat=self.level)]

    def right_vertices(self):
        return self.left_vertices()


def level_graph(test: Test, p: int) -> LevelGraph:
    return LevelGraph(p, frozenset(level_slice(test, p)))


class UnionFind:
    """Disjoint sets over hashable items, path compression + union by rank."""

    def __init__(self):
        self.parent = {}
        self.rank = {}

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.rank[x] = 0
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        """Join the two classes; False when already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def is_acyclic(g: LevelGraph) -> bool:
    """Cycle test: an edge whose endpoints are already connected closes one."""
    uf = UnionFind()
    for left, right in sorted(g.edges):
        if not uf.union(("L", left), ("R", right)):
            return False
    return True


def slice_rectangle_free(pairs) -> bool:
    """No two distinct rows share two distinct columns."""
    columns: dict[Word, list[Word]] = {}
    for left, right in pairs:
        columns.setdefault(right, []).append(left)
    seen = set()
    for right in sorted(columns):
        lefts = sorted(set(columns[right]))
        for i in range(len(lefts)):
            for j in range(i + 1, len(lefts)):
                key = (lefts[i], lefts[j])
                if key in seen:
                    return False
                seen.add(key)
    return True


def rectangle_free(test: Test, p: int) -> bool:
    return slice_rectangle_free(level_slice(test, p))


def is_branch(alpha: EvConstSeq, beta: EvConstSeq, test: Test) -> bool:
    """Decide whether the pair of eventually constant sequences is an
    infinite branch of the generated tree.

    Only same-tail pairs are decidable: past both certificates the pair
    appends the same bit to both sides, and the tree is closed under
    that, so checking through depth max(certificates) + 1 settles it.
    Different tails raise :class:`UndecidedError`.
    """
    if alpha.tail != beta.tail:
        raise UndecidedError(
            "branch membership is undecided for pairs with different tails"
        )
    depth = max(alpha.certificate, beta.certificate) + 1
    for r in range(depth + 1):
        if not pair_in_tree(alpha.prefix_to(r), beta.prefix_to(r), test):
            return False
    return True


def graph_to_dot(g: LevelGraph) -> str:
    """DOT text: left vertices L_<word>, right R_<word>, undirected edges."""
    lines = [f"graph level_{g.level} {{"]
    for w in g.left_vertices():
        lines.append(f'  "L_{w or "-"}";')
    for w in g.right_vertices():
        lines.append(f'  "R_{w or "-"}";')
    for left, right in sorted(g.edges):
        lines.append(f'  "L_{left or "-"}" -- "R_{right or "-"}";')
    lines.append("}")
    return "\n".join(lines) + "\n"

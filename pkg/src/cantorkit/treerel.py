"""Tree relations on truncated word trees.

Everything lives on the full node set of words of length <= depth over a
finite alphabet, so every defining clause becomes an exhaustive scan:
partial-order axioms, root-below-everything, linearly ordered
predecessor sets, distinguished subtrees, resolution families (with an
optional explicit limit stage equal to the intersection of the others),
heights, predecessor truncations and the uniformity condition.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cmp_to_key
from itertools import product


@dataclass(frozen=True)
class TruncTree:
    """All words of length <= depth over an alphabet of the given size."""

    arity: int = 2
    depth: int = 5

    def __post_init__(self):
        if self.arity < 1 or self.depth < 0:
            raise ValueError("arity must be >= 1 and depth >= 0")
        if self.arity > 10:
            raise ValueError("alphabet capped at 10 digit symbols")

    @property
    def alphabet(self) -> str:
        return "0123456789"[: self.arity]

    def nodes(self) -> list[str]:
        out = []
        for k in range(self.depth + 1):
            out.extend("".join(p) for p in product(self.alphabet, repeat=k))
        return out

    def contains(self, w: str) -> bool:
        return len(w) <= self.depth and not w.strip(self.alphabet)


@dataclass(frozen=True)
class TreeRelation:
    """Explicit relation on the nodes of a truncated tree."""

    tree: TruncTree
    pairs: frozenset

    def holds(self, s: str, t: str) -> bool:
        return (s, t) in self.pairs


def relation_from_pairs(tree: TruncTree, pairs) -> TreeRelation:
    for s, t in pairs:
        if not (tree.contains(s) and tree.contains(t)):
            raise ValueError(f"pair ({s!r}, {t!r}) leaves the tree")
    return TreeRelation(tree, frozenset(pairs))


def prefix_relation(tree: TruncTree) -> TreeRelation:
    """Non-strict prefix extension."""
    pairs = {
        (s, t) for t in tree.nodes() for s in (t[:r] for r in range(len(t) + 1))
    }
    return TreeRelation(tree, frozenset(pairs))


def ones_aligned_relation(tree: TruncTree) -> TreeRelation:
    """Prefixes whose count of 1-digits is zero or already the target's."""
    pairs = set()
    for t in tree.nodes():
        total = t.count("1")
        for r in range(len(t) + 1):
            s = t[:r]
            if s.count("1") in (0, total):
                pairs.add((s, t))
    return TreeRelation(tree, frozenset(pairs))


def closed_set_relation(c_words, tree: TruncTree) -> TreeRelation:
    """Prefix pairs whose target still meets the coded closed set.

    ``c_words`` lists the nodes whose cylinder meets the set; it must be
    prefix-closed.  The result is written exactly as defined, so the
    tree-relation axioms can fail off the coded set (and
    :func:`is_tree_relation` will report that).
    """
    c = set(c_words)
    for w in c:
        if not tree.contains(w):
            raise ValueError(f"code word {w!r} leaves the tree")
        if w and w[:-1] not in c:
            raise ValueError(f"code is not prefix-closed at {w!r}")
    pairs = {
        (t[:r], t) for t in tree.nodes() if t in c for r in range(len(t) + 1)
    }
    return TreeRelation(tree, frozenset(pairs))


def intersect_relations(rels) -> TreeRelation:
    rels = list(rels)
    pairs = frozenset.intersection(*(r.pairs for r in rels))
    return TreeRelation(rels[0].tree, pairs)


def tree_relation_violation(rel: TreeRelation) -> str | None:
    """First violated tree-relation clause, or None."""
    nodes = rel.tree.nodes()
    for t in nodes:
        if not rel.holds("", t):
            return f"root not below {t or '-'!r}"
    for t in nodes:
        if not rel.holds(t, t):
            return f"not reflexive at {t!r}"
    for s, t in rel.pairs:
        if s != t and rel.holds(t, s):
            return f"not antisymmetric on ({s!r}, {t!r})"
    for s, t in rel.pairs:
        for u in nodes:
            if rel.holds(t, u) and not rel.holds(s, u):
                return f"not transitive on ({s!r}, {t!r}, {u!r})"
    for t in nodes:
        preds = [s for s in nodes if rel.holds(s, t)]
        for i, a in enumerate(preds):
            for b in preds[i + 1 :]:
                if not (rel.holds(a, b) or rel.holds(b, a)):
                    return f"predecessors of {t!r} not linear: {a!r} vs {b!r}"
    return None


def is_tree_relation(rel: TreeRelation) -> bool:
    return tree_relation_violation(rel) is None


def predecessors(rel: TreeRelation, t: str) -> list[str]:
    """P(t), sorted upward by the relation itself."""
    preds = [s for s in rel.tree.nodes() if rel.holds(s, t)]
    return sorted(preds, key=cmp_to_key(lambda a, b: -1 if rel.holds(a, b) else 1))


def height(rel: TreeRelation, t: str) -> int:
    """Number of strict predecessors."""
    return len(predecessors(rel, t)) - 1


def is_distinguished(sub: TreeRelation, sup: TreeRelation) -> bool:
    """Jumping over a chain of the bigger relation forces the smaller one
    on the intermediate node."""
    if not sub.pairs <= sup.pairs:
        raise ValueError("first relation is not contained in the second")
    nodes = sub.tree.nodes()
    for s, t in sup.pairs:
        for u in nodes:
            if sup.holds(t, u) and sub.holds(s, u) and not sub.holds(s, t):
                return False
    return True


@dataclass(frozen=True)
class ResolutionFamily:
    """Stages of tree relations, each distinguished in the previous one,
    plus an optional explicit limit stage (the intersection surrogate)."""

    stages: tuple
    limit: TreeRelation | None = None

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a family needs at least one stage")

    @property
    def tree(self) -> TruncTree:
        return self.stages[0].tree

    def indices(self) -> list[int]:
        n = len(self.stages)
        return list(range(n + 1)) if self.limit is not None else list(range(n))

    def at(self, rho: int) -> TreeRelation:
        if rho == len(self.stages) and self.limit is not None:
            return self.limit
        return self.stages[rho]


def is_resolution_family(family: ResolutionFamily) -> bool:
    for i in range(1, len(family.stages)):
        sub, sup = family.stages[i], family.stages[i - 1]
        if not sub.pairs <= sup.pairs:
            return False
        if not is_distinguished(sub, sup):
            return False
    if family.limit is not None:
        if family.limit.pairs != intersect_relations(family.stages).pairs:
            return False
    return True


def pred_prefix(family: ResolutionFamily, rho: int, z: str) -> str:
    """Longest proper prefix of z below z in the stage-rho relation."""
    if not z:
        raise ValueError("the empty word has no proper prefix")
    rel = family.at(rho)
    for r in range(len(z) - 1, -1, -1):
        if rel.holds(z[:r], z):
            return z[:r]
    raise ValueError(f"no proper prefix of {z!r} is related to it at stage {rho}")


def pred_chain(family: ResolutionFamily, z: str) -> list[tuple[int, str]]:
    """Distinct predecessor truncations of z with representative indices.

    Each value keeps the largest index attaining it; entries come out
    ordered by increasing index, hence strictly shrinking words.  The
    chain-link property (each value below the previous one in its own
    stage) is verified on the way out.
    """
    best: dict[str, int] = {}
    for rho in family.indices():
        w = pred_prefix(family, rho, z)
        best[w] = max(best.get(w, -1), rho)
    chain = sorted(((rho, w) for w, rho in best.items()), key=lambda kv: kv[0])
    prev = z
    for rho, w in chain:
        if not (len(w) < len(prev) and prev[: len(w)] == w):
            raise ValueError("truncations do not form a strictly shrinking chain")
        prev = w
    for (rho_next, w_next), (_, w) in zip(chain[1:], chain):
        if not family.at(rho_next).holds(w_next, w):
            raise ValueError(
                f"chain link fails: {w_next!r} not below {w!r} at stage {rho_next}"
            )
    return chain


def is_uniform(family: ResolutionFamily, eta) -> bool:
    """Uniformity of a family with a designated limit stage.

    ``eta`` maps each k to a stage index >= 1; whenever two nodes are
    related in that stage and one of them has height <= k there, they
    must already be related in the limit.
    """
    if family.limit is None:
        raise ValueError("uniformity needs a designated limit stage")
    if isinstance(eta, int):
        fixed = eta
        eta = lambda k: fixed  # noqa: E731
    heights_cache: dict[int, dict[str, int]] = {}
    nodes = family.tree.nodes()
    for k in range(family.tree.depth + 1):
        idx = eta(k)
        if not 1 <= idx < len(family.stages):
            raise ValueError(f"eta({k}) = {idx} is not a stage index >= 1")
        if idx not in heights_cache:
            rel = family.stages[idx]
            heights_cache[idx] = {t: height(rel, t) for t in nodes}
        h = heights_cache[idx]
        for s, t in family.stages[idx].pairs:
            if min(h[s], h[t]) <= k and not family.limit.holds(s, t):
                return False
    return True


# --- relation files -----------------------------------------------------

def save_relation(rel: TreeRelation, fp) -> None:
    """Write one ``s<TAB>t`` line per related pair, "-" for the empty word."""
    for s, t in sorted(rel.pairs):
        fp.write(f"{s or '-'}\t{t or '-'}\n")


def load_relation(fp, tree: TruncTree) -> TreeRelation:
    if isinstance(fp, str):
        fp = io.StringIO(fp)
    pairs = set()
    for lineno, line in enumerate(fp, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 2 tab-separated fields")
        s = "" if parts[0] == "-" else parts[0]
        t = "" if parts[1] == "-" else parts[1]
        if not (tree.contains(s) and tree.contains(t)):
            raise ValueError(f"line {lineno}: words leave the tree")
        pairs.add((s, t))
    return TreeRelation(tree, frozenset(pairs))

"""Product selectors on acyclic bipartite edge sets.

An instance carries finite vertex sets F0, F1, an edge set whose
bipartite graph is a forest, finite value spaces X0, X1 and a target map
assigning each edge a set of allowed value pairs.  A selector picks one
value per vertex so that every edge lands in its target set; the point
is that a selector for a relaxed (pointwise larger) target map can be
upgraded edge by edge, using the unique-path structure of the forest to
blend two partial solutions without breaking the others.

All feasibility questions here are solved exactly: the constraint graph
is the forest itself, so arc consistency decides solvability and every
surviving value extends to a full solution.  Tests cross-check this
against literal enumeration of all selectors on small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import NoBaseSelector, SeparationSurrogateFailure
from .testkit import UnionFind


@dataclass(frozen=True)
class SelectorInstance:
    """Vertices, forest edges, value spaces and the per-edge target sets.

    ``edges`` keeps its given order; the lifting iteration processes
    edges in exactly that order.
    """

    f0: tuple
    f1: tuple
    edges: tuple
    x0: tuple
    x1: tuple
    psi: dict

    def __post_init__(self):
        uf = UnionFind()
        seen = set()
        for a, b in self.edges:
            if a not in self.f0 or b not in self.f1:
                raise ValueError(f"edge ({a!r}, {b!r}) leaves F0 x F1")
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a!r}, {b!r})")
            seen.add((a, b))
            if not uf.union((a, 0), (b, 1)):
                raise ValueError("the bipartite graph of the edges has a cycle")
        for t in self.edges:
            if t not in self.psi:
                raise ValueError(f"no target set for edge {t!r}")

    def vertices(self):
        return [(a, 0) for a in self.f0] + [(b, 1) for b in self.f1]

    def adjacency(self) -> dict:
        adj = {v: [] for v in self.vertices()}
        for a, b in self.edges:
            adj[(a, 0)].append((b, 1))
            adj[(b, 1)].append((a, 0))
        return adj


class PiSelector:
    """A product choice: one value per left vertex, one per right vertex."""

    def __init__(self, psi0: dict, psi1: dict):
        self.psi0 = dict(psi0)
        self.psi1 = dict(psi1)

    def at(self, t) -> tuple:
        return (self.psi0[t[0]], self.psi1[t[1]])

    def satisfies(self, edges, mapping) -> bool:
        return all(self.at(t) in mapping[t] for t in edges)

    def __eq__(self, other):
        return (
            isinstance(other, PiSelector)
            and self.psi0 == other.psi0
            and self.psi1 == other.psi1
        )

    def __repr__(self):
        return f"PiSelector({self.psi0!r}, {self.psi1!r})"


def unique_path(instance: SelectorInstance, frm, to):
    """The unique simple path between tagged vertices, or None.

    Vertices are (element, 0) on the left and (element, 1) on the right.
    Uniqueness comes for free from acyclicity, so breadth-first search
    suffices.
    """
    adj = instance.adjacency()
    if frm not in adj or to not in adj:
        raise ValueError("endpoint is not a vertex of the instance")
    if frm == to:
        return [frm]
    parent = {frm: None}
    queue = [frm]
    while queue:
        v = queue.pop(0)
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                if w == to:
                    path = [w]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(w)
    return None


@dataclass(frozen=True)
class EdgePartition:
    """Cells of F0 x F1 relative to an anchor edge: pairs that cannot
    reach it, pairs whose path enters through the anchor's right vertex
    (horizontal), and the rest of the edges (vertical)."""

    anchor: tuple
    unreachable: frozenset
    horizontal: frozenset
    vertical: frozenset


def partition_edges(instance: SelectorInstance, t0) -> EdgePartition:
    if t0 not in instance.edges:
        raise ValueError(f"anchor {t0!r} is not an edge")
    f0, f1 = t0
    edge_set = set(instance.edges)
    unreachable, horizontal, vertical = set(), set(), set()
    for e0 in instance.f0:
        for e1 in instance.f1:
            t = (e0, e1)
            if t == t0:
                continue
            if t not in edge_set:
                unreachable.add(t)
                continue
            if e0 == f0:
                vertical.add(t)
                continue
            path = unique_path(instance, (e0, 0), (f0, 0))
            if path is None:
                unreachable.add(t)
            elif path[-2] == (f1, 1):
                horizontal.add(t)
            else:
                vertical.add(t)
    return EdgePartition(
        t0, frozenset(unreachable), frozenset(horizontal), frozenset(vertical)
    )


# --- exact feasibility on the forest ------------------------------------

def _domains(instance: SelectorInstance, cmap: dict, anchor=None) -> dict | None:
    """Arc-consistent value domains per vertex; None when some domain dies.

    On a forest the fixpoint is exact: all domains nonempty iff a
    selector for ``cmap`` exists, and every surviving value occurs in one.
    """
    dom = {(a, 0): list(instance.x0) for a in instance.f0}
    dom.update({(b, 1): list(instance.x1) for b in instance.f1})
    if anchor is not None:
        v, value = anchor
        if value not in dom[v]:
            return None
        dom[v] = [value]
    arcs = []
    for a, b in instance.edges:
        allowed = cmap[(a, b)]
        arcs.append(((a, 0), (b, 1), lambda u, w, al=allowed: (u, w) in al))
        arcs.append(((b, 1), (a, 0), lambda u, w, al=allowed: (w, u) in al))
    changed = True
    while changed:
        changed = False
        for v, w, ok in arcs:
            kept = [u for u in dom[v] if any(ok(u, x) for x in dom[w])]
            if len(kept) != len(dom[v]):
                dom[v] = kept
                changed = True
            if not kept:
                return None
    return dom


def _assign(instance: SelectorInstance, cmap: dict, dom: dict) -> PiSelector:
    """Canonical selector from arc-consistent domains (top-down per tree)."""
    adj = instance.adjacency()
    value = {}
    for root in instance.vertices():
        if root in value:
            continue
        value[root] = dom[root][0]
        stack = [root]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w in value:
                    continue
                t = (v[0], w[0]) if v[1] == 0 else (w[0], v[0])
                allowed = cmap[t]
                for cand in dom[w]:
                    pv = (value[v], cand) if v[1] == 0 else (cand, value[v])
                    if pv in allowed:
                        value[w] = cand
                        break
                else:  # pragma: no cover - impossible after arc consistency
                    raise AssertionError("arc-consistent domain lost support")
                stack.append(w)
    psi0 = {a: value[(a, 0)] for a in instance.f0}
    psi1 = {b: value[(b, 1)] for b in instance.f1}
    return PiSelector(psi0, psi1)


def solve_selector(instance: SelectorInstance, cmap: dict, anchor=None):
    """A selector for the constraint map (optionally pinning one vertex),
    or None."""
    dom = _domains(instance, cmap, anchor)
    if dom is None:
        return None
    return _assign(instance, cmap, dom)


def feasible_values(instance: SelectorInstance, cmap: dict, vertex) -> list:
    """Values at a vertex that extend to a full selector for ``cmap``."""
    dom = _domains(instance, cmap)
    if dom is None:
        return []
    return dom[vertex]


# --- blending and lifting ------------------------------------------------

def blend(
    instance: SelectorInstance,
    t0,
    psi_a: PiSelector,
    psi_b: PiSelector,
    x: tuple,
    phi: dict,
) -> PiSelector:
    """Merge two stage selectors into one that hits ``x`` on the anchor.

    ``psi_a`` must carry x[0] on the anchor's left vertex, ``psi_b``
    x[1] on its right vertex, and both must satisfy the stage map
    ``phi`` on every edge.  The output follows ``psi_b`` on the
    horizontal cell, ``psi_a`` elsewhere, and equals ``x`` on the
    anchor; acyclicity makes the two cells non-interfering.
    """
    if t0 not in instance.edges:
        raise ValueError(f"anchor {t0!r} is not an edge")
    f0, f1 = t0
    x0, x1 = x
    if x not in instance.psi[t0]:
        raise ValueError("anchor value is not in the target set")
    if psi_a.psi0.get(f0) != x0:
        raise ValueError("first selector is not anchored at x[0]")
    if psi_b.psi1.get(f1) != x1:
        raise ValueError("second selector is not anchored at x[1]")
    for t in instance.edges:
        if psi_a.at(t) not in phi[t]:
            raise ValueError(f"first selector violates the stage map at {t!r}")
        if psi_b.at(t) not in phi[t]:
            raise ValueError(f"second selector violates the stage map at {t!r}")

    part = partition_edges(instance, t0)
    h0 = {e0 for e0, _ in part.horizontal}
    h1 = {e1 for _, e1 in part.horizontal}
    psi0 = {}
    for e0 in instance.f0:
        if e0 == f0:
            psi0[e0] = x0
        elif e0 in h0:
            psi0[e0] = psi_b.psi0[e0]
        else:
            psi0[e0] = psi_a.psi0[e0]
    psi1 = {}
    for e1 in instance.f1:
        if e1 == f1:
            psi1[e1] = x1
        elif e1 in h1:
            psi1[e1] = psi_b.psi1[e1]
        else:
            psi1[e1] = psi_a.psi1[e1]
    out = PiSelector(psi0, psi1)

    if out.at(t0) != x:
        raise AssertionError("blend lost the anchor value")
    for t in instance.edges:
        if t != t0 and out.at(t) not in phi[t]:
            raise AssertionError(f"blend violates the stage map at {t!r}")
    return out


def lift_selector(instance: SelectorInstance, phi_bar: dict) -> PiSelector:
    """Upgrade a selector for the relaxed map to one for the target map.

    Walks the edges in input order, each time pinning a point of the
    target set that both one-sided feasible value sets allow, and
    blending the two anchored witnesses.  Raises
    :class:`NoBaseSelector` when the relaxed map has no selector at all
    and :class:`SeparationSurrogateFailure` when the point search at
    some edge comes up empty; the latter is a legitimate outcome of the
    finite setting, not a bug in the input.
    """
    for t in instance.edges:
        if not set(instance.psi[t]) <= set(phi_bar[t]):
            raise ValueError(f"target set at {t!r} is not inside the relaxed set")

    stage = {t: phi_bar[t] for t in instance.edges}
    current = solve_selector(instance, stage)
    if current is None:
        raise NoBaseSelector("the relaxed map admits no selector")

    for t_next in instance.edges:
        target = instance.psi[t_next]
        if current.at(t_next) in target:
            stage[t_next] = target
            continue
        u0 = feasible_values(instance, stage, (t_next[0], 0))
        u1 = feasible_values(instance, stage, (t_next[1], 1))
        x = next(
            (
                (a, b)
                for a, b in product(u0, u1)
                if (a, b) in target
            ),
            None,
        )
        if x is None:
            raise SeparationSurrogateFailure(
                f"no point of the target set at {t_next!r} is jointly feasible"
            )
        psi_a = solve_selector(instance, stage, anchor=((t_next[0], 0), x[0]))
        psi_b = solve_selector(instance, stage, anchor=((t_next[1], 1), x[1]))
        assert psi_a is not None and psi_b is not None
        current = blend(instance, t_next, psi_a, psi_b, x, stage)
        stage[t_next] = target

    for t in instance.edges:
        if current.at(t) not in instance.psi[t]:  # pragma: no cover
            raise AssertionError("lift produced an invalid selector")
    return current


# --- random instances (used by the demo command and the test suite) ------

def random_instance(rng, max_f: int = 5, max_x: int = 4) -> SelectorInstance:
    """A random acyclic instance with nonempty target sets on every edge."""
    n0 = rng.randint(1, max_f)
    n1 = rng.randint(1, max_f)
    f0 = tuple(f"a{i}" for i in range(n0))
    f1 = tuple(f"b{i}" for i in range(n1))
    x0 = tuple(range(rng.randint(1, max_x)))
    x1 = tuple(range(rng.randint(1, max_x)))
    cells = [(a, b) for a in f0 for b in f1]
    rng.shuffle(cells)
    uf = UnionFind()
    edges = []
    for a, b in cells:
        if rng.random() < 0.6 and uf.union((a, 0), (b, 1)):
            edges.append((a, b))
    values = [(u, v) for u in x0 for v in x1]
    psi = {}
    for t in edges:
        k = rng.randint(1, len(values))
        psi[t] = frozenset(rng.sample(values, k))
    return SelectorInstance(f0, f1, tuple(edges), x0, x1, psi)


def random_relaxation(rng, instance: SelectorInstance) -> dict:
    """A pointwise random superset of the instance's target map."""
    values = [(u, v) for u in instance.x0 for v in instance.x1]
    out = {}
    for t in instance.edges:
        extra = [v for v in values if v not in instance.psi[t]]
        take = rng.randint(0, len(extra))
        out[t] = frozenset(set(instance.psi[t]) | set(rng.sample(extra, take)))
    return out

"""Matching structures: compatibility graph, arrival graph, derived objects.

A structure couples two finite class sets (customers 1..n_customers and
servers 1..n_servers) through two bipartite edge sets over the same vertex
sets: E lists the compatible pairs (who may be matched) and F lists the
possible arrivals (which couples may enter together).
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field

from .errors import (
    DisconnectedMatchingGraph,
    IsolatedArrivalVertex,
    OutOfRangeEdge,
    TooLarge,
)

log = logging.getLogger(__name__)

Edge = tuple[int, int]


@dataclass(frozen=True)
class MatchingStructure:
    """A validated matching structure.

    Classes are 1-based integers on both sides.  ``E`` is the compatibility
    graph, ``F`` the arrival graph; both are sets of (customer, server)
    pairs.
    """

    n_customers: int
    n_servers: int
    E: frozenset[Edge]
    F: frozenset[Edge]
    server_neighbors: tuple[tuple[int, ...], ...] = field(repr=False)
    customer_neighbors: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def customers(self) -> range:
        return range(1, self.n_customers + 1)

    @property
    def servers(self) -> range:
        return range(1, self.n_servers + 1)

    def S(self, c: int) -> tuple[int, ...]:
        """Server classes compatible with customer class ``c``."""
        return self.server_neighbors[c - 1]

    def C(self, s: int) -> tuple[int, ...]:
        """Customer classes compatible with server class ``s``."""
        return self.customer_neighbors[s - 1]

    def S_of_set(self, A) -> frozenset[int]:
        return frozenset(j for c in A for j in self.S(c))

    def C_of_set(self, B) -> frozenset[int]:
        return frozenset(i for s in B for i in self.C(s))

    def compatible(self, c: int, s: int) -> bool:
        return (c, s) in self.E


def _check_edges(name: str, edges, n_customers: int, n_servers: int) -> frozenset[Edge]:
    out = set()
    for e in edges:
        c, s = e
        if not (1 <= c <= n_customers and 1 <= s <= n_servers):
            raise OutOfRangeEdge(f"{name} edge ({c}, s{s}) out of range")
        out.add((int(c), int(s)))
    return frozenset(out)


def _bipartite_connected(n_customers: int, n_servers: int, edges: frozenset[Edge]) -> bool:
    nodes = [("c", i) for i in range(1, n_customers + 1)]
    nodes += [("s", j) for j in range(1, n_servers + 1)]
    adj: dict = {v: [] for v in nodes}
    for c, s in edges:
        adj[("c", c)].append(("s", s))
        adj[("s", s)].append(("c", c))
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(nodes)


def build_structure(
    n_customers: int,
    n_servers: int,
    E,
    F,
    require_connected: bool = True,
) -> MatchingStructure:
    """Validate and build a matching structure.

    Raises OutOfRangeEdge for edges outside the class ranges,
    DisconnectedMatchingGraph when the compatibility graph is not connected
    (skipped with ``require_connected=False``, useful for double-cover
    structures whose compatibility graph may split), and
    IsolatedArrivalVertex when some class never arrives.
    """
    if n_customers < 1 or n_servers < 1:
        raise OutOfRangeEdge("need at least one class on each side")
    E = _check_edges("E", E, n_customers, n_servers)
    F = _check_edges("F", F, n_customers, n_servers)
    if not E:
        raise DisconnectedMatchingGraph("compatibility graph has no edges")
    if require_connected and not _bipartite_connected(n_customers, n_servers, E):
        raise DisconnectedMatchingGraph("compatibility graph is not connected")
    arriving_c = {c for c, _ in F}
    arriving_s = {s for _, s in F}
    if len(arriving_c) != n_customers or len(arriving_s) != n_servers:
        missing = sorted(set(range(1, n_customers + 1)) - arriving_c)
        missing_s = sorted(set(range(1, n_servers + 1)) - arriving_s)
        raise IsolatedArrivalVertex(
            f"classes never arriving: customers {missing}, servers {missing_s}"
        )
    server_neighbors = tuple(
        tuple(sorted(s for c2, s in E if c2 == c)) for c in range(1, n_customers + 1)
    )
    customer_neighbors = tuple(
        tuple(sorted(c for c, s2 in E if s2 == s)) for s in range(1, n_servers + 1)
    )
    return MatchingStructure(
        n_customers=n_customers,
        n_servers=n_servers,
        E=E,
        F=F,
        server_neighbors=server_neighbors,
        customer_neighbors=customer_neighbors,
    )


def build_bm(n_customers: int, n_servers: int, E) -> MatchingStructure:
    """Structure where every couple may arrive (complete arrival graph)."""
    F = [(c, s) for c in range(1, n_customers + 1) for s in range(1, n_servers + 1)]
    return build_structure(n_customers, n_servers, E, F)


def build_gm(n_classes: int, reduced_edges) -> MatchingStructure:
    """Double-cover structure of a general (one-set) compatibility graph.

    Server class j is the copy of customer class j; couples always arrive
    as (c, copy of c); customer i is compatible with server j exactly when
    {i, j} is an edge of the reduced graph (self-loops allowed).
    """
    E = set()
    for i, j in reduced_edges:
        if not (1 <= i <= n_classes and 1 <= j <= n_classes):
            raise OutOfRangeEdge(f"reduced edge ({i}, {j}) out of range")
        E.add((i, j))
        E.add((j, i))
    F = [(i, i) for i in range(1, n_classes + 1)]
    return build_structure(n_classes, n_classes, E, F, require_connected=False)


# --- associated digraph ---------------------------------------------------


def associated_digraph(structure: MatchingStructure) -> dict:
    """Directed graph on all classes: customer -> compatible server (via E),
    server -> co-arriving customer (via F).  Nodes are ('c', i) / ('s', j).
    """
    adj: dict = {("c", i): [] for i in structure.customers}
    adj.update({("s", j): [] for j in structure.servers})
    for c, s in sorted(structure.E):
        adj[("c", c)].append(("s", s))
    for c, s in sorted(structure.F):
        adj[("s", s)].append(("c", c))
    return adj


def is_strongly_connected(adj: dict) -> bool:
    """Whether every node reaches every other (two sweeps, iterative)."""
    nodes = list(adj)
    if not nodes:
        return True

    def reach(graph):
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            v = stack.pop()
            for u in graph.get(v, ()):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(nodes)

    rev: dict = {v: [] for v in nodes}
    for v, outs in adj.items():
        for u in outs:
            rev[u].append(v)
    return reach(adj) and reach(rev)


# --- independent sets and separability ------------------------------------


@dataclass(frozen=True)
class IndependentSet:
    """A pair (A, B) of class subsets with no compatibility between them."""

    A: frozenset[int]
    B: frozenset[int]
    free_customers: frozenset[int]
    free_servers: frozenset[int]

    @property
    def is_maximal(self) -> bool:
        return not self.free_customers and not self.free_servers


def _make_independent_set(structure: MatchingStructure, A, B) -> IndependentSet:
    A = frozenset(A)
    B = frozenset(B)
    free_c = frozenset(structure.customers) - A - structure.C_of_set(B)
    free_s = frozenset(structure.servers) - B - structure.S_of_set(A)
    return IndependentSet(A=A, B=B, free_customers=free_c, free_servers=free_s)


def enumerate_independent_sets(
    structure: MatchingStructure, size_cap: int = 20
) -> list[IndependentSet]:
    """All non-empty pairs (A, B) with A x B disjoint from E.

    Exponential in class count; refuses structures with more than
    ``size_cap`` classes in total.
    """
    total = structure.n_customers + structure.n_servers
    if total > size_cap:
        raise TooLarge(f"{total} classes exceeds enumeration cap {size_cap}")
    out = []
    customers = list(structure.customers)
    servers = list(structure.servers)
    for ra in range(structure.n_customers + 1):
        for A in itertools.combinations(customers, ra):
            blocked = structure.S_of_set(A)
            allowed = [s for s in servers if s not in blocked]
            for rb in range(structure.n_servers + 1):
                if ra == 0 and rb == 0:
                    continue
                for B in itertools.combinations(allowed, rb):
                    out.append(_make_independent_set(structure, A, B))
    return out


@dataclass(frozen=True)
class BiSeparablePartition:
    """Partition of classes into independent parts covering the structure.

    Each part is an independent set; parts that are not maximal are
    one-sided.  ``order`` is the number of parts.
    """

    parts: tuple[IndependentSet, ...]

    @property
    def order(self) -> int:
        return len(self.parts)


def check_bi_separable(structure: MatchingStructure) -> BiSeparablePartition | None:
    """Return the separability partition, or None.

    The candidate parts are the connected components of the bipartite
    complement of the compatibility graph.  The structure qualifies when
    there are at least two parts, every two-sided part is an independent
    set, and every non-maximal part is one-sided.
    """
    comp_adj: dict = {}
    for c in structure.customers:
        comp_adj[("c", c)] = [
            ("s", s) for s in structure.servers if (c, s) not in structure.E
        ]
    for s in structure.servers:
        comp_adj[("s", s)] = [
            ("c", c) for c in structure.customers if (c, s) not in structure.E
        ]
    seen: set = set()
    components = []
    for start in comp_adj:
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        stack = [start]
        while stack:
            v = stack.pop()
            for u in comp_adj[v]:
                if u not in seen:
                    seen.add(u)
                    comp.add(u)
                    stack.append(u)
        components.append(comp)
    if len(components) < 2:
        log.debug("separability check: complement graph is connected")
        return None
    parts = []
    for comp in components:
        A = frozenset(i for side, i in comp if side == "c")
        B = frozenset(j for side, j in comp if side == "s")
        if any((c, s) in structure.E for c in A for s in B):
            log.debug("separability check: part %s x %s not independent", A, B)
            return None
        part = _make_independent_set(structure, A, B)
        if not part.is_maximal and A and B:
            log.debug("separability check: non-maximal two-sided part %s", part)
            return None
        parts.append(part)
    parts.sort(key=lambda p: (min(p.A) if p.A else structure.n_customers + min(p.B),))
    partition = BiSeparablePartition(parts=tuple(parts))
    # inside a maximal part, every customer must see exactly the servers
    # outside the part (and symmetrically)
    all_s = frozenset(structure.servers)
    all_c = frozenset(structure.customers)
    for part in parts:
        if not part.is_maximal:
            continue
        for c in part.A:
            if frozenset(structure.S(c)) != all_s - part.B:
                log.debug("separability check: neighbor identity fails at %d", c)
                return None
        for s in part.B:
            if frozenset(structure.C(s)) != all_c - part.A:
                log.debug("separability check: neighbor identity fails at s%d", s)
                return None
    return partition


# --- model kind -----------------------------------------------------------


def detect_model_kind(structure: MatchingStructure) -> str:
    """Classify a structure as 'bm', 'gm' or 'ebm'.

    'bm': every couple may arrive.  'gm': arrivals form a perfect matching
    pairing each customer class with a dedicated server copy, and the
    compatibility graph is symmetric under that pairing (a double cover of
    a general graph).  Everything else is 'ebm'.
    """
    full = structure.n_customers * structure.n_servers
    if len(structure.F) == full:
        return "bm"
    if structure.n_customers == structure.n_servers:
        n = structure.n_customers
        if len(structure.F) == n:
            pair = dict(structure.F)
            if len(pair) == n and len(set(pair.values())) == n:
                symmetric = all(
                    ((c2, pair[c1]) in structure.E) == ((c1, pair[c2]) in structure.E)
                    for c1 in structure.customers
                    for c2 in structure.customers
                )
                if symmetric:
                    return "gm"
    return "ebm"


# --- random instances ------------------------------------------------------


def random_connected_bipartite_edges(
    n_customers: int, n_servers: int, rng: random.Random, extra_prob: float = 0.4
) -> set[Edge]:
    """Random edge set whose bipartite graph is connected.

    Builds a random spanning tree over the joint vertex set, then adds each
    remaining edge independently.
    """
    nodes = [("c", i) for i in range(1, n_customers + 1)]
    nodes += [("s", j) for j in range(1, n_servers + 1)]
    rng.shuffle(nodes)
    edges: set[Edge] = set()
    placed_c = [i for side, i in nodes[:1] if side == "c"]
    placed_s = [j for side, j in nodes[:1] if side == "s"]
    for side, k in nodes[1:]:
        if side == "c":
            if placed_s:
                edges.add((k, rng.choice(placed_s)))
            placed_c.append(k)
        else:
            if placed_c:
                edges.add((rng.choice(placed_c), k))
            placed_s.append(k)
    # the shuffled insertion can leave the first node isolated when the
    # early prefix is one-sided; stitch any leftover isolated vertices
    for i in range(1, n_customers + 1):
        if not any(c == i for c, _ in edges):
            edges.add((i, rng.randrange(1, n_servers + 1)))
    for j in range(1, n_servers + 1):
        if not any(s == j for _, s in edges):
            edges.add((rng.randrange(1, n_customers + 1), j))
    for c in range(1, n_customers + 1):
        for s in range(1, n_servers + 1):
            if (c, s) not in edges and rng.random() < extra_prob:
                edges.add((c, s))
    if not _bipartite_connected(n_customers, n_servers, frozenset(edges)):
        # stitching cannot disconnect; retry defensively on pathological draws
        return random_connected_bipartite_edges(n_customers, n_servers, rng, extra_prob)
    return edges


def random_bm(n_customers: int, n_servers: int, rng: random.Random) -> MatchingStructure:
    """Random structure with connected compatibilities and complete arrivals."""
    return build_bm(
        n_customers, n_servers, random_connected_bipartite_edges(n_customers, n_servers, rng)
    )


def random_connected_reduced_edges(
    n_classes: int, rng: random.Random, extra_prob: float = 0.4, loop_prob: float = 0.2
) -> set[tuple[int, int]]:
    """Random connected general graph on 1..n_classes, may include loops."""
    order = list(range(1, n_classes + 1))
    rng.shuffle(order)
    edges = set()
    for k in range(1, n_classes):
        edges.add((order[rng.randrange(k)], order[k]))
    for i in range(1, n_classes + 1):
        for j in range(i + 1, n_classes + 1):
            if (i, j) not in edges and (j, i) not in edges and rng.random() < extra_prob:
                edges.add((i, j))
        if rng.random() < loop_prob:
            edges.add((i, i))
    return edges


def random_gm(n_classes: int, rng: random.Random) -> MatchingStructure:
    """Random double-cover structure of a connected general graph."""
    return build_gm(n_classes, random_connected_reduced_edges(n_classes, rng))

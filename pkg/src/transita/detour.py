"""ComDetour: compatible s-t paths of length at most dist(s,t) + k.

The solver classifies vertices into BFS layers, seeds a table over
inter-layer edges near the target with direct ComPath calls, and fills
earlier layers by joining short ComPath segments with already-computed
entries across permitted transitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import Graph, TransitionSystem, Walk, bfs_dist, is_compatible_walk, INF
from .compath import SlotGraph, family_for_bound, oriented_compath


@dataclass(frozen=True)
class LayerStructure:
    """BFS layers from s and the inter/within-layer edge classification."""

    dist: tuple
    layers: tuple  # layers[i] = tuple of vertices at distance i

    @staticmethod
    def build(g: Graph, s: int) -> "LayerStructure":
        dist = bfs_dist(g, s)
        finite = [int(d) for d in dist if d != INF]
        top = max(finite) if finite else 0
        layers = [[] for _ in range(top + 1)]
        for v in range(g.n):
            if dist[v] != INF:
                layers[int(dist[v])].append(v)
        return LayerStructure(tuple(dist), tuple(tuple(l) for l in layers))

    def is_inter_layer(self, g: Graph, e: int) -> bool:
        u, v = g.endpoints(e)
        return self.dist[u] != self.dist[v]

    def low(self, g: Graph, e: int) -> int:
        u, v = g.endpoints(e)
        return u if self.dist[u] < self.dist[v] else v

    def region(self, g: Graph, x: int, hi: int) -> set:
        """Vertex set of the induced subgraph G_(x, hi]."""
        lo = self.dist[x]
        return {x} | {
            v for v in range(g.n) if lo < self.dist[v] <= hi
        }


@dataclass(frozen=True)
class DetourResult:
    yes: bool
    nu: Optional[int]
    dist: Optional[int]
    witness: Optional[Walk] = None
    diagnostic: Optional[str] = None


def zero_detour_path(g: Graph, t: TransitionSystem, s: int, tgt: int) -> Optional[int]:
    """dist(s,tgt) if a compatible s-tgt path of exactly that length exists.

    Runs an ordinary BFS over the transition-filtered line graph; a
    compatible walk of length exactly dist(s,tgt) is automatically simple.
    """
    if s == tgt:
        return 0
    dist = bfs_dist(g, s)
    if dist[tgt] == INF:
        return None
    d = int(dist[tgt])
    sg = SlotGraph(g, t)
    start = [sg.slot(e, w) for w, e in g.adj(s)]
    steps = [INF] * (2 * g.m)
    queue = []
    for sid in start:
        steps[sid] = 1
        queue.append(sid)
    while queue:
        nxt = []
        for sid in queue:
            if sg.head(sid) == tgt:
                return d if steps[sid] == d else None
            if steps[sid] >= d:
                continue
            for s2 in sg.succ[sid]:
                if steps[s2] == INF:
                    steps[s2] = steps[sid] + 1
                    nxt.append(s2)
        queue = nxt
    return None


def comdetour(
    g: Graph,
    t: TransitionSystem,
    s: int,
    tgt: int,
    k: int,
    seed: int = 0,
    witness: bool = False,
) -> DetourResult:
    """Decide whether a compatible s-tgt path of length <= dist(s,tgt)+k exists.

    Returns the achieved shortest such length nu when one exists, and a
    reconstructed witness path on request.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if s == tgt:
        return DetourResult(True, 0, 0, Walk((s,), ()) if witness else None)
    dist = bfs_dist(g, s)
    if dist[tgt] == INF:
        return DetourResult(False, None, None, diagnostic="target unreachable from source")
    d = int(dist[tgt])

    if d <= k:
        from .compath import compath  # delegation per the small-distance case

        res = compath(g, t, s, tgt, d + k, seed=seed, witness=witness)
        ln, w = res if witness else (res, None)
        if ln is None:
            return DetourResult(False, None, d)
        return DetourResult(True, ln, d, w)

    ls = LayerStructure.build(g, s)
    hi = d + k
    pruned = {v for v in range(g.n) if ls.dist[v] <= hi}
    sg = SlotGraph(g, t)
    # Both the seeding calls and the join segments need length bound 2k+1:
    # an x..u prefix spans up to k+1 layers plus k slack, and a join with a
    # bound of 2k would already fail to find the single-edge prefix at k=0.
    inner_bound = 2 * k + 1
    fam_seed = family_for_bound(g.n, 2 * k + 1, seed)
    fam_loop = fam_seed

    table = {}  # inter-layer edge id -> best known length of an e..tgt path
    pieces = {}  # edge id -> witness walk (seed) or (prefix walk, next edge)

    inter = [
        e
        for e in range(g.m)
        if ls.is_inter_layer(g, e)
        and all(ls.dist[v] <= hi for v in g.endpoints(e))
    ]
    # Seed the last layers with direct ComPath calls.
    for e in inter:
        x = ls.low(g, e)
        if ls.dist[x] < d - k - 1:
            continue
        region = ls.region(g, x, hi)
        res = oriented_compath(
            g, t, ("e", e, x), [("v", tgt)], 2 * k + 1, fam_seed,
            allowed_vertices=region, slot_graph=sg, witness=witness,
        )
        res, ws = res if witness else (res, [None])
        ln = res[0]
        if ln is not None and ls.dist[x] + ln <= hi:
            table[e] = ln
            if witness:
                pieces[e] = ("seed", ws[0])

    # Fill earlier layers; joins step across permitted transitions at u.
    by_layer = {}
    for e in inter:
        by_layer.setdefault(int(ls.dist[ls.low(g, e)]), []).append(e)
    incident_inter = {}
    for e in inter:
        for v in g.endpoints(e):
            incident_inter.setdefault(v, []).append(e)

    for m in range(d - k - 1, -1, -1):
        for x in ls.layers[m] if m < len(ls.layers) else ():
            for u in sorted(pruned):
                du = int(ls.dist[u])
                if not (m < du <= m + k + 1):
                    continue
                region = ls.region(g, x, du)
                starts = [e for w, e in g.adj(x) if w in region]
                goal_edges = [e for w, e in g.adj(u) if w in region]
                goals = [("e", e, u) for e in goal_edges]
                if not goals:
                    continue
                for e in starts:
                    res = oriented_compath(
                        g, t, ("e", e, x), goals, inner_bound, fam_loop,
                        allowed_vertices=region, slot_graph=sg, witness=witness,
                    )
                    res, ws = res if witness else (res, [None] * len(goals))
                    for gi, f in enumerate(goal_edges):
                        r = res[gi]
                        if r is None:
                            continue
                        # Join across u onto a higher inter-layer edge g'.
                        for g2 in incident_inter.get(u, ()):
                            if ls.low(g, g2) != u or g2 not in table:
                                continue
                            if not t.permits(f, g2):
                                continue
                            p = table[g2]
                            if ls.dist[x] + r + p <= hi and table.get(e, INF) > r + p:
                                table[e] = r + p
                                if witness:
                                    pieces[e] = ("join", ws[gi], g2)

    nu = INF
    nu_edge = None
    for w, e in g.adj(s):
        if table.get(e, INF) < nu:
            nu = table[e]
            nu_edge = e
    if nu > hi:
        return DetourResult(False, None, d)
    wit = None
    if witness:
        wit = _assemble(g, pieces, nu_edge)
        assert wit.vertices[0] == s and wit.vertices[-1] == tgt
        assert wit.is_path() and is_compatible_walk(g, t, wit)
        assert wit.length == nu
    return DetourResult(True, int(nu), d, wit)


def _assemble(g: Graph, pieces, e: int) -> Walk:
    kind = pieces[e][0]
    if kind == "seed":
        return pieces[e][1]
    _, prefix, g2 = pieces[e]
    rest = _assemble(g, pieces, g2)
    assert prefix.vertices[-1] == rest.vertices[0]
    return Walk(
        prefix.vertices + rest.vertices[1:],
        prefix.edge_ids + rest.edge_ids,
    )

"""Fixed-parameter shortest compatible path via color coding.

The solver colors vertices with functions from a k-perfect hash family and
runs a dynamic program over (color set, last directed edge) states; a path
is found iff some family member colors its vertices injectively.  Endpoints
may be vertices or edges (the path then starts/ends with that edge).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .core import Endpoint, Graph, TransitionSystem, Walk, INF


@dataclass(frozen=True)
class HashFamily:
    """Family of functions [0..n-1] -> [k].

    perfect_for is the subset size the family splits: for every vertex set S
    with |S| <= perfect_for some member is injective on S.  The classical
    construction uses range k = perfect_for; wider ranges trade palette size
    for far fewer members.
    """

    n: int
    k: int
    functions: tuple  # tuple of length-n tuples with values in 0..k-1
    perfect_for: int = 0

    def __post_init__(self):
        if self.perfect_for == 0:
            object.__setattr__(self, "perfect_for", self.k)

    def __len__(self):
        return len(self.functions)


def verify_k_perfect(fam: HashFamily, subset_size: Optional[int] = None) -> bool:
    """Exhaustively test perfectness (use only for small n and subset size)."""
    n = fam.n
    j = fam.perfect_for if subset_size is None else subset_size
    if j <= 1 or n <= j:
        return len(fam.functions) > 0
    for sub in itertools.combinations(range(n), j):
        if not any(len({f[v] for v in sub}) == j for f in fam.functions):
            return False
    return True


def _random_function(n: int, k: int, rng: random.Random) -> tuple:
    return tuple(rng.randrange(k) for _ in range(n))


def build_hash_family(n: int, k: int, mode: str = "auto", seed: int = 0) -> HashFamily:
    """Construct a k-perfect hash family of functions [n] -> [k].

    Modes:
      - "exhaustive": all k^n functions (tiny k^n only).
      - "greedy": seeded random functions kept while they cover uncovered
        k-subsets, then direct repair; certified perfect (n <= 20).
      - "random": ceil(e^k * k * ln n) + 8 seeded trials, uncertified.
      - "auto": exhaustive when k^n is tiny, greedy when n <= 20, else random.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if k == 1:
        return HashFamily(n, k, ((0,) * n,))
    if n <= k:
        return HashFamily(n, k, (tuple(range(n)),))
    if mode == "auto":
        mode = "exhaustive" if k**n <= 4096 else ("greedy" if n <= 20 else "random")
    rng = random.Random(f"{seed}/{n}/{k}/{mode}")
    if mode == "exhaustive":
        if k**n > 200_000:
            raise ValueError("exhaustive family too large")
        fns = tuple(itertools.product(range(k), repeat=n))
        return HashFamily(n, k, fns)
    if mode == "random":
        trials = math.ceil(math.e**k * k * math.log(n)) + 8
        return HashFamily(n, k, tuple(_random_function(n, k, rng) for _ in range(trials)))
    if mode != "greedy":
        raise ValueError(f"unknown mode {mode!r}")
    if n > 20:
        raise ValueError("greedy certification needs n <= 20")
    uncovered = set(itertools.combinations(range(n), k))
    fns = []
    trials = math.ceil(math.e**k * k * math.log(n)) + 64
    for _ in range(trials):
        if not uncovered:
            break
        f = _random_function(n, k, rng)
        hit = [s for s in uncovered if len({f[v] for v in s}) == k]
        if hit:
            fns.append(f)
            uncovered.difference_update(hit)
    for s in sorted(uncovered):
        f = [rng.randrange(k) for _ in range(n)]
        for i, v in enumerate(s):
            f[v] = i
        fns.append(tuple(f))
    return HashFamily(n, k, tuple(fns))


@lru_cache(maxsize=512)
def _cached_family(n: int, k: int, mode: str, seed: int) -> HashFamily:
    return build_hash_family(n, k, mode, seed)


@lru_cache(maxsize=512)
def build_splitter_family(n: int, subset_size: int, seed: int = 0) -> HashFamily:
    """Seeded family over a doubled color range, certified for n <= 32.

    Doubling the range makes a random function injective on a fixed j-set
    with constant probability, so a certified family stays small enough to
    sweep exhaustively; residual subsets are repaired directly.
    """
    j = subset_size
    rng = random.Random(f"{seed}/splitter/{n}/{j}")
    k = 2 * j
    if j <= 1 or n <= j:
        return build_hash_family(n, max(j, 1), "auto", seed)
    fns = []
    if n > 32:
        trials = math.ceil(math.e**j * j * math.log(n)) + 8
        fns = [_random_function(n, j, rng) for _ in range(trials)]
        return HashFamily(n, j, tuple(fns), perfect_for=j)
    base = 24 + 16 * j
    fns = [_random_function(n, k, rng) for _ in range(base)]
    extra = []
    for sub in itertools.combinations(range(n), j):
        if any(len({f[v] for v in sub}) == j for f in fns):
            continue
        if not any(len({f[v] for v in sub}) == j for f in extra):
            f = [rng.randrange(k) for _ in range(n)]
            for i, v in enumerate(sub):
                f[v] = i
            extra.append(tuple(f))
    return HashFamily(n, k, tuple(fns + extra), perfect_for=j)


def family_for_bound(n: int, bound: int, seed: int = 0) -> HashFamily:
    """Shared family for ComPath with length bound `bound` on n vertices.

    The dynamic program needs injectivity only on the path's non-endpoint
    vertices, so a family splitting (bound-1)-sets suffices.
    """
    j = max(bound - 1, 1)
    if n <= 20:
        return _cached_family(n, j, "auto", seed)
    return build_splitter_family(n, j, seed)


class SlotGraph:
    """Directed edge slots of a forbidden-transition graph.

    Slot 2e+d is edge e traversed so that its head is endpoints(e)[1-d].
    Successors follow permitted transitions at the head.  Compatible walks
    are exactly the walks of this digraph, which makes it the shared
    substrate for walk prefilters and the colorful DP.
    """

    __slots__ = ("g", "t", "succ", "pred")

    def __init__(self, g: Graph, t: TransitionSystem):
        self.g = g
        self.t = t
        succ = [[] for _ in range(2 * g.m)]
        for e in range(g.m):
            for d in (0, 1):
                head = g.edges[e][1 - d]
                sid = 2 * e + d
                for w, f in g.adj(head):
                    if f == e or not t.permits(e, f):
                        continue
                    fd = 0 if g.edges[f][1] == w else 1
                    succ[sid].append(2 * f + fd)
        self.succ = tuple(tuple(s) for s in succ)
        pred = [[] for _ in range(2 * g.m)]
        for sid, outs in enumerate(self.succ):
            for nxt in outs:
                pred[nxt].append(sid)
        self.pred = tuple(tuple(p) for p in pred)

    def head(self, sid: int) -> int:
        e, d = divmod(sid, 2)
        return self.g.edges[e][1 - d]

    def tail(self, sid: int) -> int:
        e, d = divmod(sid, 2)
        return self.g.edges[e][d]

    def slot(self, e: int, head: int) -> int:
        u, v = self.g.edges[e]
        if head == v:
            return 2 * e
        if head == u:
            return 2 * e + 1
        raise ValueError(f"vertex {head} not an endpoint of edge {e}")


def _start_slots(sg: SlotGraph, start, allowed) -> list:
    g = sg.g
    if start[0] == "v":
        x = start[1]
        return [
            sg.slot(e, w)
            for w, e in g.adj(x)
            if allowed is None or w in allowed
        ]
    _, e, first = start
    head = g.other_end(e, first)
    if allowed is not None and head not in allowed:
        return []
    return [sg.slot(e, head)]


def _goal_slots(sg: SlotGraph, goal, allowed) -> list:
    g = sg.g
    if goal[0] == "v":
        y = goal[1]
        if allowed is not None and y not in allowed:
            return []
        return [
            sg.slot(e, y)
            for _, e in g.adj(y)
            if allowed is None or g.other_end(e, y) in allowed
        ]
    _, e, last = goal
    tail = g.other_end(e, last)
    if allowed is not None and (last not in allowed or tail not in allowed):
        return []
    return [sg.slot(e, last)]


def _slot_walk_dists(sg: SlotGraph, seeds: Iterable[int], allowed, backward=False) -> list:
    """Minimal compatible-walk edge counts per slot (1 at the seed slots)."""
    dist = [INF] * (2 * sg.g.m)
    queue = []
    for s in seeds:
        if dist[s] == INF:
            dist[s] = 1
            queue.append(s)
    nbr = sg.pred if backward else sg.succ
    while queue:
        nxt = []
        for s in queue:
            for u in nbr[s]:
                if dist[u] == INF:
                    if allowed is not None and (
                        sg.head(u) not in allowed or sg.tail(u) not in allowed
                    ):
                        continue
                    dist[u] = dist[s] + 1
                    nxt.append(u)
        queue = nxt
    return dist


def _colorful_run(sg, col, start, goals, bound, results, wits, slot_goal,
                  allowed, bwd, witness):
    """One DP sweep under a fixed coloring; updates results/wits in place.

    States are (colorset mask, slot); the frontier at round L holds all
    states whose walk is a colorful compatible path of length L.  bwd gives
    per-slot lower bounds on the remaining walk length, used as an
    admissible prune.
    """
    g = sg.g
    starts = _start_slots(sg, start, allowed)
    parents = {} if witness else None
    frontier = {}
    if start[0] == "v":
        c0 = col[start[1]]
        for sid in starts:
            h = sg.head(sid)
            if col[h] == c0:
                continue
            key = ((1 << c0) | (1 << col[h]), sid)
            frontier.setdefault(key[0], set()).add(sid)
            if witness:
                parents[key] = None
    else:
        u = start[2]
        v = g.other_end(start[1], start[2])
        if col[u] != col[v] and starts:
            key = ((1 << col[u]) | (1 << col[v]), starts[0])
            frontier[key[0]] = {starts[0]}
            if witness:
                parents[key] = None
    seen = {(m, s) for m, ss in frontier.items() for s in ss}
    length = 1
    while frontier and length <= bound:
        for mask, ss in frontier.items():
            for sid in ss:
                for i in slot_goal.get(sid, ()):
                    if results[i] is None or length < results[i]:
                        results[i] = length
                        if witness:
                            wits[i] = _rebuild(sg, parents, (mask, sid))
        if length == bound:
            break
        nxt = {}
        for mask, ss in frontier.items():
            for sid in ss:
                for s2 in sg.succ[sid]:
                    h = sg.head(s2)
                    if allowed is not None and h not in allowed:
                        continue
                    if bwd[s2] == INF or length + 1 + bwd[s2] > bound:
                        continue
                    b = 1 << col[h]
                    if mask & b:
                        continue
                    key = (mask | b, s2)
                    if key in seen:
                        continue
                    seen.add(key)
                    if witness:
                        parents[key] = (mask, sid)
                    nxt.setdefault(mask | b, set()).add(s2)
        frontier = nxt
        length += 1


def _rebuild(sg: SlotGraph, parents, state) -> Walk:
    slots = []
    cur = state
    while cur is not None:
        slots.append(cur[1])
        cur = parents[cur]
    slots.reverse()
    verts = [sg.tail(slots[0])]
    eids = []
    for sid in slots:
        verts.append(sg.head(sid))
        eids.append(sid // 2)
    return Walk(tuple(verts), tuple(eids))


def oriented_compath(
    g: Graph,
    t: TransitionSystem,
    start,
    goals: Sequence,
    bound: int,
    family: HashFamily,
    allowed_vertices: Optional[set] = None,
    slot_graph: Optional[SlotGraph] = None,
    witness: bool = False,
):
    """Shortest compatible paths from one oriented start to several goals.

    start is ("v", x) or ("e", e, first_vertex); each goal is ("v", y) or
    ("e", e, last_vertex), where the named vertex is the path's first/last
    vertex.  Returns optional lengths (<= bound) per goal, plus parallel
    witness walks when witness=True.  Family members are swept with early
    exit once every reachable goal matches its compatible-walk lower bound.
    """
    sg = slot_graph if slot_graph is not None else SlotGraph(g, t)
    allowed = allowed_vertices
    results = [None] * len(goals)
    wits = [None] * len(goals)

    for i, goal in enumerate(goals):
        if start[0] == "v" and goal == start:
            if allowed is None or start[1] in allowed:
                results[i] = 0
                wits[i] = Walk((start[1],), ())
        elif (
            start[0] == "e"
            and goal[0] == "e"
            and goal[1] == start[1]
            and goal[2] == g.other_end(start[1], start[2])
            and bound >= 1
        ):
            ok = allowed is None or (start[2] in allowed and goal[2] in allowed)
            if ok:
                results[i] = 1
                wits[i] = Walk((start[2], goal[2]), (start[1],))

    starts = _start_slots(sg, start, allowed)
    if not starts:
        return (results, wits) if witness else results
    fwd = _slot_walk_dists(sg, starts, allowed)

    slot_goal = {}
    lower = {}
    for i, goal in enumerate(goals):
        gs = _goal_slots(sg, goal, allowed)
        walk_best = min((fwd[s] for s in gs), default=INF)
        if results[i] is not None:
            lower[i] = results[i]
            continue
        if walk_best == INF or walk_best > bound:
            continue  # not even a compatible walk fits the bound
        lower[i] = walk_best
        for s in gs:
            slot_goal.setdefault(s, []).append(i)
    pending = [i for i in lower if results[i] != lower[i]]
    if not pending:
        return (results, wits) if witness else results

    seeds = {s for s, ids in slot_goal.items()}
    bwd = _slot_walk_dists(sg, seeds, allowed, backward=True)
    # bwd counts the goal slot itself; remaining length from a state already
    # standing on a slot is bwd - 1.
    bwd = [d if d == INF else d - 1 for d in bwd]

    special = {}
    if start[0] == "v":
        special[start[1]] = 0
    else:
        special[start[2]] = 0
        special.setdefault(g.other_end(start[1], start[2]), len(special))
    for i in pending:
        goal = goals[i]
        if goal[0] == "v":
            special.setdefault(goal[1], len(special))
        else:
            a, b = g.edges[goal[1]]
            special.setdefault(a, len(special))
            special.setdefault(b, len(special))
    base = len(special)

    for fn in family.functions:
        col = [0] * g.n
        for v in range(g.n):
            col[v] = special[v] if v in special else base + fn[v]
        _colorful_run(sg, col, start, goals, bound, results, wits, slot_goal,
                      allowed, bwd, witness)
        if all(results[i] is not None and results[i] <= lower[i] for i in pending):
            break
    return (results, wits) if witness else results


def _orientations(g: Graph, ep: Endpoint, is_start: bool) -> list:
    if ep.kind == "vertex":
        return [("v", ep.ident)]
    a, b = g.endpoints(ep.ident)
    if is_start:
        return [("e", ep.ident, a), ("e", ep.ident, b)]
    return [("e", ep.ident, b), ("e", ep.ident, a)]


def colorful_compatible_path(
    g: Graph,
    t: TransitionSystem,
    x,
    y,
    coloring: Sequence[int],
    k: int,
):
    """Shortest colorful compatible x-y path under one fixed vertex coloring.

    coloring[v] are positive color indices; a path is colorful when its
    vertices carry pairwise distinct colors.  Returns the length (<= k) of
    the shortest such path, or None.
    """
    x = x if isinstance(x, Endpoint) else Endpoint.vertex(x)
    y = y if isinstance(y, Endpoint) else Endpoint.vertex(y)
    x.validate(g)
    y.validate(g)
    if len(coloring) != g.n:
        raise ValueError("coloring must be total on the vertices")
    palette = sorted(set(coloring))
    remap = {c: i for i, c in enumerate(palette)}
    col = [remap[c] for c in coloring]
    sg = SlotGraph(g, t)
    goals = _orientations(g, y, False)
    best = None
    for start in _orientations(g, x, True):
        results = [None] * len(goals)
        for i, goal in enumerate(goals):
            if start[0] == "v" and goal == start:
                results[i] = 0
            elif (
                start[0] == "e"
                and goal[0] == "e"
                and goal[1] == start[1]
                and goal[2] == g.other_end(start[1], start[2])
                and k >= 1
            ):
                results[i] = 1
        slot_goal = {}
        for i, goal in enumerate(goals):
            for s in _goal_slots(sg, goal, None):
                slot_goal.setdefault(s, []).append(i)
        bwd = [0] * (2 * g.m)  # no walk prefilter for the single-coloring op
        _colorful_run(sg, col, start, goals, k, results, [None] * len(goals),
                      slot_goal, None, bwd, False)
        for r in results:
            if r is not None and (best is None or r < best):
                best = r
    return best


def compath(
    g: Graph,
    t: TransitionSystem,
    x,
    y,
    k: int,
    seed: int = 0,
    witness: bool = False,
    family: Optional[HashFamily] = None,
):
    """Length of a shortest compatible x-y path of length <= k, or None.

    Wraps the colorful dynamic program over all members of a perfect hash
    family, taking the minimum over members and endpoint orientations.
    With witness=True returns (length, Walk) instead.
    """
    x = x if isinstance(x, Endpoint) else Endpoint.vertex(x)
    y = y if isinstance(y, Endpoint) else Endpoint.vertex(y)
    x.validate(g)
    y.validate(g)
    if k < 0:
        return (None, None) if witness else None
    if x.kind == "vertex" and y.kind == "vertex" and x.ident == y.ident:
        w = Walk((x.ident,), ())
        return (0, w) if witness else 0
    if k < 1:
        return (None, None) if witness else None
    if family is None:
        family = family_for_bound(g.n, k, seed)
    sg = SlotGraph(g, t)
    goals = _orientations(g, y, False)
    best = None
    best_w = None
    for st in _orientations(g, x, True):
        res = oriented_compath(
            g, t, st, goals, k, family, slot_graph=sg, witness=witness
        )
        if witness:
            res, ws = res
        for i, r in enumerate(res):
            if r is not None and (best is None or r < best):
                best = r
                if witness:
                    best_w = ws[i]
    return (best, best_w) if witness else best

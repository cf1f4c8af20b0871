"""Structural property checks that report a witness instead of raising."""
from collections import deque
from dataclasses import dataclass
from typing import Any, Optional

from .bitset import bits, is_subset
from .model import InqModel, PointedModel, Structure, encode_relational

PROPERTIES = ("relational-valid", "downward-closed", "s5", "stratified",
              "K-rich", "simple", "N-acyclic")


@dataclass(frozen=True)
class Report:
    ok: bool
    property: str
    witness: Optional[str] = None
    data: Any = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"{self.property}: pass"
        return f"{self.property}: fail ({self.witness})"


def _pass(prop):
    return Report(True, prop)


def _fail(prop, witness, data=None):
    return Report(False, prop, witness, data)


def validate(subject, property: str, **args) -> Report:
    """Check ``property`` of a model or structure.

    Arguments by property: ``stratified`` takes ``ell`` and ``point``
    (world name/index, state mask, or a :class:`PointedModel`); ``K-rich``
    takes ``K``; ``simple`` takes an optional ``granularity`` (default
    ``"full"``); ``N-acyclic`` takes ``N``.
    """
    check = _CHECKS.get(property)
    if check is None:
        raise ValueError(f"unknown property {property!r}; expected one of {PROPERTIES}")
    return check(subject, **args)


# --- relational conditions ----------------------------------------------------

def _relational(subject):
    if isinstance(subject, InqModel):
        return encode_relational(subject)
    return subject


def _check_relational(subject) -> Report:
    prop = "relational-valid"
    rel = _relational(subject)
    seen = {}
    for j, s in enumerate(rel.states):
        if s in seen:
            return _fail(prop, f"extensionality: states #{seen[s]} and #{j} are both "
                               f"{rel.format_state(s)}", ("extensionality", seen[s], j))
        seen[s] = j
    for s in rel.states:
        for i in bits(s):
            if s & ~(1 << i) not in seen:
                t = s & ~(1 << i)
                return _fail(prop, f"local powerset: {rel.format_state(t)} is a subset of "
                                   f"{rel.format_state(s)} but not in the second sort",
                             ("local-powerset", s, t))
    for ai, row in enumerate(rel.edges):
        for w, ids in enumerate(row):
            if not ids:
                return _fail(prop, f"non-emptiness: E_{rel.agents[ai]}[{rel.worlds[w]}] is empty",
                             ("non-emptiness", ai, w))
    dc = _check_downward(rel)
    if not dc.ok:
        return Report(False, prop, dc.witness, dc.data)
    return _pass(prop)


def _check_downward(subject) -> Report:
    prop = "downward-closed"
    if isinstance(subject, InqModel):
        # guaranteed by the antichain representation
        return _pass(prop)
    rel = subject
    where = {}
    for j, s in enumerate(rel.states):
        where.setdefault(s, j)
    for ai, row in enumerate(rel.edges):
        for w, ids in enumerate(row):
            masks = {rel.states[j] for j in ids}
            for s in masks:
                for i in bits(s):
                    t = s & ~(1 << i)
                    if t in where and t not in masks:
                        return _fail(prop, f"downward closure: {rel.format_state(t)} ⊆ "
                                           f"{rel.format_state(s)} ∈ E_{rel.agents[ai]}"
                                           f"[{rel.worlds[w]}] but is not E-related",
                                     ("downward-closure", ai, w, t))
    return _pass(prop)


# --- epistemic conditions -----------------------------------------------------

def _inq(subject):
    if isinstance(subject, InqModel):
        return subject
    from .model import decode_relational
    return decode_relational(subject)


def _check_s5(subject) -> Report:
    prop = "s5"
    M = _inq(subject)
    for ai, row in enumerate(M.sigma_table):
        a = M.agents[ai]
        for w, st in enumerate(row):
            sig = st.union()
            if not sig >> w & 1:
                return _fail(prop, f"factivity: {M.worlds[w]} ∉ σ_{a}({M.worlds[w]})", ("factivity", a, w))
            for v in bits(sig):
                if row[v] != st:
                    return _fail(prop, f"introspection: Σ_{a}({M.worlds[v]}) ≠ Σ_{a}({M.worlds[w]}) "
                                       f"although {M.worlds[v]} ∈ σ_{a}({M.worlds[w]})",
                                 ("introspection", a, w, v))
    return _pass(prop)


def _colours(M, granularity):
    from .bisim import classes
    return classes(M, "fixpoint" if granularity == "full" else granularity)


def _s5_first(M, prop):
    rep = _check_s5(M)
    if rep.ok:
        return None
    return _fail(prop, f"not S5: {rep.witness}", rep.data)


def _check_rich(subject, K) -> Report:
    prop = f"K-rich({K})"
    M = _inq(subject)
    bad = _s5_first(M, prop)
    if bad:
        return bad
    colour = _colours(M, "full")
    for ai, row in enumerate(M.sigma_table):
        for w, st in enumerate(row):
            for m in st.maximal:
                counts = {}
                for v in bits(m):
                    counts[colour[v]] = counts.get(colour[v], 0) + 1
                for c, k in sorted(counts.items()):
                    if k < K:
                        return _fail(prop, f"maximal state {M.format_state(m)} of "
                                           f"Σ_{M.agents[ai]}({M.worlds[w]}) has {k} world(s) of type #{c}",
                                     (M.agents[ai], w, m, c))
    return _pass(prop)


def saturate(M, cls: int, s: int, colour) -> int:
    """Worlds of ``cls`` whose colour occurs in ``s``."""
    present = {colour[v] for v in bits(s)}
    out = 0
    for v in bits(cls):
        if colour[v] in present:
            out |= 1 << v
    return out


def _check_simple(subject, granularity="full") -> Report:
    prop = "simple"
    M = _inq(subject)
    bad = _s5_first(M, prop)
    if bad:
        return bad
    colour = _colours(M, granularity)
    for ai, row in enumerate(M.sigma_table):
        for w, st in enumerate(row):
            cls = st.union()
            for m in st.maximal:
                sat = saturate(M, cls, m, colour)
                if sat != m:
                    return _fail(prop, f"maximal state {M.format_state(m)} of Σ_{M.agents[ai]}"
                                       f"({M.worlds[w]}) is not colour-saturated "
                                       f"(saturation {M.format_state(sat)})",
                                 (M.agents[ai], w, m, sat))
    return _pass(prop)


def _check_acyclic(subject, N) -> Report:
    """Class overlaps: at most one shared world, and no short cycles.

    Cycles are read in the bipartite incidence graph between worlds and
    a-classes, so several classes meeting in one world do not count as a
    cycle; a cycle through k classes has length k.
    """
    prop = f"N-acyclic({N})"
    M = _inq(subject)
    bad = _s5_first(M, prop)
    if bad:
        return bad
    cls = []
    for ai, row in enumerate(M.sigma_table):
        for m in sorted({st.union() for st in row}):
            cls.append((M.agents[ai], m))
    for i, (a, c) in enumerate(cls):
        for b, d in cls[i + 1:]:
            shared = c & d
            if shared & (shared - 1):
                return _fail(prop, f"{a}-class {M.format_state(c)} and {b}-class "
                                   f"{M.format_state(d)} share {M.format_state(shared)}",
                             ("overlap", a, c, b, d))
    # vertices: worlds 0..n-1, classes n..n+len(cls)-1
    n = M.n
    adj = [set() for _ in range(n + len(cls))]
    for k, (_, c) in enumerate(cls):
        for v in bits(c):
            adj[v].add(n + k)
            adj[n + k].add(v)
    best = None
    for k in range(len(cls)):
        for v in sorted(adj[n + k]):
            path = _bfs_path(adj, v, n + k, skip=(v, n + k))
            if path is not None and (best is None or len(path) < len(best)):
                best = path
    if best is not None:
        length = len(best) // 2
        if length <= N:
            names = [f"{cls[x - n][0]}:{M.format_state(cls[x - n][1])}" for x in best if x >= n]
            return _fail(prop, f"cycle through {length} classes: " + " - ".join(names),
                         ("cycle", best))
    return _pass(prop)


def _bfs_path(adj, src, dst, skip):
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            out = []
            while x is not None:
                out.append(x)
                x = prev[x]
            return out[::-1]
        for y in sorted(adj[x]):
            if {x, y} == set(skip) or y in prev:
                continue
            prev[y] = x
            queue.append(y)
    return None


# --- stratification -----------------------------------------------------------

def gaifman_adjacency(rel: Structure, drop_empty: bool = False):
    """Undirected adjacency over elements ('w', i) and ('s', j)."""
    adj = {("w", i): set() for i in range(rel.n)}
    for j, s in enumerate(rel.states):
        if drop_empty and s == 0:
            continue
        adj[("s", j)] = set()
        for v in bits(s):
            adj[("w", v)].add(("s", j))
            adj[("s", j)].add(("w", v))
    for row in rel.edges:
        for w, ids in enumerate(row):
            for j in ids:
                if ("s", j) in adj:
                    adj[("w", w)].add(("s", j))
                    adj[("s", j)].add(("w", w))
    return adj


def distances(adj, sources, limit=None):
    dist = {x: 0 for x in sources}
    queue = deque(sources)
    while queue:
        x = queue.popleft()
        if limit is not None and dist[x] >= limit:
            continue
        for y in sorted(adj[x]):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def _point(rel, point):
    if isinstance(point, PointedModel):
        return point.kind, point.point
    if isinstance(point, str):
        return "world", rel.world_index(point)
    if isinstance(point, tuple) and len(point) == 2 and point[0] in ("world", "state"):
        kind, p = point
        return kind, rel.world_index(p) if kind == "world" else rel.state(p)
    if isinstance(point, int):
        return "world", point
    return "state", rel.state(point)


def _check_stratified(subject, ell, point) -> Report:
    """Stratification of the neighbourhood of ``point``.

    Distances are measured with the empty state removed (it is adjacent to
    every world, so keeping it would put all worlds within distance 2); the
    empty state is shared by all strata and ignored when assigning levels.
    World points use radius ``ell`` and W_0 = {w}; state points use radius
    ``ell + 1`` with W_0 = ∅ and S_0 the subsets of the point.
    """
    prop = f"stratified({ell})"
    rel = subject
    if isinstance(subject, InqModel):
        kind, p = _point(subject, point)
        rel = encode_relational(subject, point=p if kind == "state" else None)
    kind, p = _point(rel, point)
    adj = gaifman_adjacency(rel, drop_empty=True)
    if kind == "world":
        sources = [("w", p)]
        radius = ell
    else:
        if p == 0:
            return _pass(prop)
        try:
            sources = [("s", rel.state_id(p))]
        except Exception:
            return _fail(prop, f"state point {rel.format_state(p)} is not in the second sort")
        radius = ell + 1
    near = distances(adj, sources, radius)
    level = {}
    if kind == "world":
        level[("w", p)] = 0
    else:
        for j, s in enumerate(rel.states):
            if s and is_subset(s, p) and ("s", j) in near:
                level[("s", j)] = 0
    queue = deque(sorted(level))
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if y not in near:
                continue
            want = level[x] + (0 if _is_e_edge(rel, x, y) else (1 if x[0] == "s" else -1))
            if x[0] == y[0]:
                continue
            if _is_e_edge(rel, x, y) and _is_eps_edge(rel, x, y):
                return _fail(prop, f"{_name(rel, x)} and {_name(rel, y)} are linked by both E and ε")
            if y not in level:
                level[y] = want
                queue.append(y)
            elif level[y] != want:
                return _fail(prop, f"{_name(rel, y)} would need levels {level[y]} and {want}",
                             (y, level[y], want))
    for x in near:
        if x not in level:
            return _fail(prop, f"{_name(rel, x)} is unreachable from the point")
        if x[0] == "w" and level[x] < 0:
            return _fail(prop, f"{_name(rel, x)} falls below stratum 0", (x, level[x]))
        if x[0] == "s" and level[x] < 0:
            return _fail(prop, f"{_name(rel, x)} falls below stratum 0", (x, level[x]))
        if kind == "world" and x[0] == "w" and level[x] == 0 and x != ("w", p):
            return _fail(prop, f"{_name(rel, x)} shares stratum 0 with the point")
        if kind == "state":
            if x[0] == "w" and level[x] == 0:
                return _fail(prop, f"{_name(rel, x)} lands in stratum 0, which must be empty")
            if x[0] == "s" and level[x] == 0 and not is_subset(rel.states[x[1]], p):
                return _fail(prop, f"{_name(rel, x)} is in stratum 0 but not a subset of the point")
    return Report(True, prop, data=level)


def _is_e_edge(rel, x, y):
    w, s = (x, y) if x[0] == "w" else (y, x)
    return any(s[1] in row[w[1]] for row in rel.edges)


def _is_eps_edge(rel, x, y):
    w, s = (x, y) if x[0] == "w" else (y, x)
    return bool(rel.states[s[1]] >> w[1] & 1)


def _name(rel, x):
    if x[0] == "w":
        return f"world {rel.worlds[x[1]]}"
    return f"state #{x[1]} {rel.format_state(rel.states[x[1]])}"


_CHECKS = {
    "relational-valid": _check_relational,
    "downward-closed": _check_downward,
    "s5": _check_s5,
    "stratified": lambda m, ell=2, point=0: _check_stratified(m, ell, point),
    "K-rich": lambda m, K=1: _check_rich(m, K),
    "simple": _check_simple,
    "N-acyclic": lambda m, N=2: _check_acyclic(m, N),
}

"""Bisimilarity-preserving constructions: stratified unfolding, rich covers, simplification."""
from dataclasses import dataclass
from typing import Tuple

from .bisim import classes, is_world_bisimulation
from .bitset import bits, maximal_antichain, subsets
from .errors import BudgetExhausted, CapExceeded, ModelError, S5Error
from .model import (InqModel, InqState, PointedModel, RelationalModel, Structure, as_inq,
                    encode_relational)
from .validate import Report, saturate, validate

COVER_CAP = 4096


def _as_relational(M, policy, point_state=None):
    if isinstance(M, InqModel):
        mode = "locally-full" if policy == "locally-full" else "minimal"
        return encode_relational(M, mode, point=point_state)
    if isinstance(M, Structure):
        return M
    raise TypeError(f"expected a model, got {type(M).__name__}")


def stratify(M, point, ell=2, policy: str = "minimal", budget: int = None):
    """Partially unfold ``M`` around ``point`` into a stratified model.

    ``point`` is a world (name or index) or a state (``("state", s)`` or a
    :class:`PointedModel`). With an even ``ell`` the unfolding stops after
    ``ell // 2`` stages and the frontier worlds are linked into one shared
    copy of the original model, so the result is finite. ``ell ==
    "unbounded"`` unfolds until no worlds remain and needs ``budget``, the
    maximal number of tagged worlds.

    ``policy`` picks the second sort of each stratum: ``"minimal"`` keeps
    only the E-images needed, ``"locally-full"`` copies every state.

    Returns ``(relational_model, pointed_model)``.
    """
    if policy not in ("minimal", "locally-full"):
        raise ValueError(f"unknown policy {policy!r}")
    kind, p = _read_point(M, point)
    rel = _as_relational(M, policy, p if kind == "state" else None)
    unbounded = ell == "unbounded"
    if unbounded:
        if budget is None:
            raise ValueError("unbounded stratification needs a world budget")
        stages = None
    else:
        if not isinstance(ell, int) or ell <= 0 or ell % 2:
            raise ValueError("depth must be an even positive integer or 'unbounded'")
        stages = ell // 2
    where = {}
    for j, s in enumerate(rel.states):
        where.setdefault(s, j)

    # tagged worlds per level, tagged states per level (as original masks)
    wlev = []
    slev = []
    if kind == "world":
        wlev.append([p])
    else:
        wlev.append([])
        slev.append(sorted(s for s in subsets(p) if s))
    last_world_level = stages if kind == "world" else (None if stages is None else stages + 1)
    total = 0
    while True:
        i = len(wlev) - 1
        if last_world_level is not None and i == last_world_level:
            break
        if len(slev) == i:
            if policy == "locally-full":
                chosen = sorted(s for s in set(rel.states) if s)
            else:
                chosen = set()
                for u in wlev[i]:
                    for row in rel.edges:
                        chosen.update(rel.states[j] for j in row[u])
                chosen = sorted(s for s in chosen if s)
            slev.append(chosen)
        members = 0
        for s in slev[i]:
            members |= s
        nxt = list(bits(members))
        total += len(nxt)
        if unbounded and total > budget:
            raise BudgetExhausted(f"unfolding exceeded the budget of {budget} worlds")
        wlev.append(nxt)
        if unbounded and not nxt:
            break
    glue = not unbounded

    worlds, windex = [], {}
    for lev, us in enumerate(wlev):
        for u in us:
            windex[(u, lev)] = len(worlds)
            worlds.append(f"{rel.worlds[u]}:{lev}")
    if glue:
        for u in range(rel.n):
            windex[(u, None)] = len(worlds)
            worlds.append(rel.worlds[u])
    if len(set(worlds)) != len(worlds):
        raise ModelError("tagged world names collide with original names")

    states, sindex = [0], {}
    for lev, ss in enumerate(slev):
        for s in ss:
            mask = 0
            for v in bits(s):
                mask |= 1 << windex[(v, lev + 1)]
            sindex[(s, lev)] = len(states)
            states.append(mask)
    if glue:
        for s in sorted(set(rel.states)):
            if s:
                mask = 0
                for v in bits(s):
                    mask |= 1 << windex[(v, None)]
                sindex[(s, None)] = len(states)
                states.append(mask)

    def sid(s, lev):
        return 0 if s == 0 else sindex[(s, lev)]

    edges = []
    for row in rel.edges:
        out = []
        for lev, us in enumerate(wlev):
            target = lev if lev < len(slev) else None
            for u in us:
                if target is None and not glue:
                    out.append(frozenset(sid(rel.states[j], None) for j in row[u] if rel.states[j] == 0))
                else:
                    out.append(frozenset(sid(rel.states[j], target) for j in row[u]))
        if glue:
            for u in range(rel.n):
                out.append(frozenset(sid(rel.states[j], None) for j in row[u]))
        edges.append(tuple(out))

    valuation = []
    for v in rel.valuation:
        mask = 0
        for key, ix in windex.items():
            if v >> key[0] & 1:
                mask |= 1 << ix
        valuation.append(mask)
    out = RelationalModel(tuple(worlds), rel.agents, rel.atoms, tuple(states),
                          tuple(edges), tuple(valuation), f"{rel.name}/strat")
    if kind == "world":
        return out, PointedModel(out, windex[(p, 0)], "world")
    mask = 0
    for v in bits(p):
        mask |= 1 << windex[(v, 1)]
    return out, PointedModel(out, mask, "state")


def _read_point(M, point):
    if isinstance(point, PointedModel):
        return point.kind, point.point
    if isinstance(point, tuple) and len(point) == 2 and point[0] in ("world", "state"):
        if point[0] == "world":
            return "world", M.world_index(point[1])
        return "state", M.state(point[1])
    return "world", M.world_index(point)


def restrict(P: PointedModel, ell: int) -> PointedModel:
    """The ℓ-restriction of a pointed relational model, as a pointed model.

    Distances are measured without the empty state (which is kept); state
    points use radius ``ell + 1``.
    """
    from .fo import neighbourhood

    rel = P.model
    if isinstance(rel, InqModel):
        rel = encode_relational(rel, point=P.point if P.kind == "state" else None)
    if P.kind == "world":
        sub, pt = neighbourhood(rel, ("w", P.point), ell, drop_empty=True)
    else:
        sub, pt = neighbourhood(rel, ("s", rel.state_id(P.point)), ell + 1, drop_empty=True)
    if not isinstance(sub, RelationalModel):
        raise ModelError("restriction is not a relational model")
    if pt[0] == "w":
        return PointedModel(sub, pt[1], "world")
    return PointedModel(sub, sub.states[pt[1]], "state")


@dataclass(frozen=True)
class Covering:
    source: InqModel
    target: InqModel
    projection: Tuple[int, ...]


def rich_cover(M, K: int, cap: int = COVER_CAP) -> Covering:
    """Product of ``M`` with a K-element set, projecting onto ``M``.

    Worlds are named ``<w>.<m>`` for m = 1..K in world-major order. Each
    Σ_a(w, m) is generated by the full preimages of the maximal states of
    Σ_a(w).
    """
    M = as_inq(M)
    if K < 1:
        raise ValueError("K must be at least 1")
    if M.n * K > cap:
        raise CapExceeded(f"{M.n * K} worlds exceed the cover cap {cap}")
    block = (1 << K) - 1

    def pre(s):
        out = 0
        for v in bits(s):
            out |= block << (v * K)
        return out

    worlds = tuple(f"{w}.{m}" for w in M.worlds for m in range(1, K + 1))
    table = tuple(
        tuple(InqState(tuple(sorted(pre(m) for m in st.maximal))) for st in row for _ in range(K))
        for row in M.sigma_table
    )
    target = InqModel(worlds, M.agents, M.atoms, table, tuple(pre(v) for v in M.valuation),
                      f"{M.name}x{K}")
    return Covering(M, target, tuple(w for w in range(M.n) for _ in range(K)))


def simplify(M, granularity="full") -> InqModel:
    """Replace every Σ_a(w) by the family generated by its colour-saturated states."""
    M = as_inq(M)
    rep = validate(M, "s5")
    if not rep.ok:
        raise S5Error(rep.witness)
    colour = classes(M, "fixpoint" if granularity == "full" else granularity)
    table = []
    for row in M.sigma_table:
        new = []
        for st in row:
            cls = st.union()
            new.append(InqState.from_states(saturate(M, cls, m, colour) for m in st.maximal))
        table.append(tuple(new))
    return InqModel(M.worlds, M.agents, M.atoms, tuple(table), M.valuation, M.name)


def _image(s, proj):
    out = 0
    for v in bits(s):
        out |= 1 << proj[v]
    return out


def verify_covering(c: Covering) -> Report:
    """Check surjectivity, the valuation and Σ squares, and the bisimulation."""
    prop = "covering"
    src, tgt, proj = as_inq(c.source), as_inq(c.target), tuple(c.projection)
    if len(proj) != tgt.n or any(not 0 <= x < src.n for x in proj):
        return Report(False, prop, "projection is not a map from target worlds to source worlds")
    missing = set(range(src.n)) - set(proj)
    if missing:
        w = min(missing)
        return Report(False, prop, f"surjectivity: source world {src.worlds[w]} has no preimage",
                      ("surjectivity", w))
    if tuple(src.agents) != tuple(tgt.agents):
        return Report(False, prop, "agent lists differ")
    sval = dict(zip(src.atoms, src.valuation))
    tval = dict(zip(tgt.atoms, tgt.valuation))
    for p in sorted(set(sval) | set(tval)):
        for t in range(tgt.n):
            a, b = bool(tval.get(p, 0) >> t & 1), bool(sval.get(p, 0) >> proj[t] & 1)
            if a != b:
                return Report(False, prop, f"atom-equivalence: {p} differs at {tgt.worlds[t]} "
                                           f"and its image {src.worlds[proj[t]]}",
                              ("atom-equivalence", p, t))
    for ai, a in enumerate(src.agents):
        for t in range(tgt.n):
            img = maximal_antichain(_image(m, proj) for m in tgt.sigma_table[ai][t].maximal)
            if img != src.sigma_table[ai][proj[t]].maximal:
                return Report(False, prop, f"Σ_{a} square fails at {tgt.worlds[t]}",
                              ("sigma", a, t))
    if not is_world_bisimulation(tgt, src, [(t, proj[t]) for t in range(tgt.n)]):
        return Report(False, prop, "the projection graph is not a bisimulation")
    return Report(True, prop)

"""Line-oriented model files, covering files and DOT export.

Model file::

    model ex
    agents a
    atoms p q
    world w1 p q
    world w2 p
    sigma a w1 : {w1} {w2}
    sigma a w2 : {w1} {w2}
    point world w1

Relational files add ``state {w1,w2}`` lines (ids count from 0 in file
order) and ``edge <agent> <world> <state-id>`` lines instead of ``sigma``.
"""
import os
import re
from dataclasses import dataclass
from typing import Optional

from . import __version__
from .bitset import bits, popcount
from .errors import ModelError
from .model import InqModel, PointedModel, RelationalModel, Structure, build_model
from .transforms import Covering

HEADER = f"# inqkit {__version__}"
_STATE = re.compile(r"\{([^{}]*)\}")


@dataclass
class ModelFile:
    model: object
    point: Optional[PointedModel] = None


def _state_names(text, where):
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ModelError(f"{where}: expected a state like {{w1,w2}}, got {text!r}")
    inner = body[1:-1]
    return [x for x in re.split(r"[,\s]+", inner) if x]


def parse_model(text: str, allow_trivial: bool = False, source: str = "<string>") -> ModelFile:
    name, agents, atoms = "M", None, None
    worlds, world_atoms = [], {}
    sigma, states, edges = {}, [], []
    point = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "model":
            name = rest or name
        elif head == "agents":
            agents = rest.split()
        elif head == "atoms":
            atoms = rest.split()
        elif head == "world":
            parts = rest.split()
            if not parts:
                raise ModelError(f"{source}:{lineno}: world needs an id")
            if parts[0] in world_atoms:
                raise ModelError(f"{source}:{lineno}: duplicate world {parts[0]!r}")
            worlds.append(parts[0])
            world_atoms[parts[0]] = parts[1:]
        elif head == "sigma":
            left, sep, right = rest.partition(":")
            key = left.split()
            if not sep or len(key) != 2:
                raise ModelError(f"{source}:{lineno}: expected 'sigma <agent> <world> : {{..}} ...'")
            found = _STATE.findall(right)
            leftover = _STATE.sub("", right).strip()
            if leftover:
                raise ModelError(f"{source}:{lineno}: unexpected text {leftover!r}")
            listed = sigma.setdefault(tuple(key), [])
            listed.extend([x for x in re.split(r"[,\s]+", f) if x] for f in found)
        elif head == "state":
            states.append(_state_names(rest, f"{source}:{lineno}"))
        elif head == "edge":
            parts = rest.split()
            if len(parts) != 3 or not parts[2].isdigit():
                raise ModelError(f"{source}:{lineno}: expected 'edge <agent> <world> <state-id>'")
            edges.append((parts[0], parts[1], int(parts[2]), lineno))
        elif head == "point":
            kind, _, what = rest.partition(" ")
            if kind == "world":
                point = ("world", what.strip())
            elif kind == "state":
                point = ("state", _state_names(what, f"{source}:{lineno}"))
            else:
                raise ModelError(f"{source}:{lineno}: point must be 'world <id>' or 'state {{..}}'")
        else:
            raise ModelError(f"{source}:{lineno}: unknown directive {head!r}")
    if agents is None or atoms is None:
        raise ModelError(f"{source}: 'agents' and 'atoms' lines are required")
    for w, ps in world_atoms.items():
        for p in ps:
            if p not in atoms:
                raise ModelError(f"{source}: world {w!r} mentions undeclared atom {p!r}")
    valuation = {p: [w for w in worlds if p in world_atoms[w]] for p in atoms}
    if states or edges:
        if sigma:
            raise ModelError(f"{source}: a file cannot mix 'sigma' with 'state'/'edge' lines")
        model = _relational(name, worlds, agents, atoms, valuation, states, edges, source)
    else:
        model = build_model(worlds, agents, atoms, sigma, valuation,
                            allow_trivial=allow_trivial, name=name)
    pm = None
    if point is not None:
        if point[0] == "world":
            pm = PointedModel.world(model, point[1])
        else:
            pm = PointedModel.state(model, point[1])
    return ModelFile(model, pm)


def _relational(name, worlds, agents, atoms, valuation, states, edges, source):
    wix = {w: i for i, w in enumerate(worlds)}

    def mask(names):
        out = 0
        for x in names:
            if x not in wix:
                raise ModelError(f"{source}: unknown world {x!r}")
            out |= 1 << wix[x]
        return out

    masks = tuple(mask(s) for s in states)
    table = [[set() for _ in worlds] for _ in agents]
    for a, w, j, lineno in edges:
        if a not in agents:
            raise ModelError(f"{source}:{lineno}: unknown agent {a!r}")
        if j >= len(masks):
            raise ModelError(f"{source}:{lineno}: state id {j} is not declared")
        table[agents.index(a)][mask([w]).bit_length() - 1].add(j)
    val = tuple(mask(valuation[p]) for p in atoms)
    return RelationalModel(tuple(worlds), tuple(agents), tuple(atoms), masks,
                           tuple(tuple(frozenset(x) for x in row) for row in table), val, name)


def read_model(path: str, allow_trivial: bool = False) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), allow_trivial, source=path)


def _world_lines(M):
    out = []
    for w, name in enumerate(M.worlds):
        ps = [p for p, v in zip(M.atoms, M.valuation) if v >> w & 1]
        out.append(" ".join(["world", name] + ps))
    return out


def _point_line(M, point):
    if point is None:
        return []
    if point.kind == "world":
        return [f"point world {M.worlds[point.point]}"]
    return [f"point state {M.format_state(point.point)}"]


def format_model(M, point: Optional[PointedModel] = None, header: bool = True) -> str:
    """Serialise an inquisitive or relational model."""
    lines = [HEADER] if header else []
    lines += [f"model {M.name}", "agents " + " ".join(M.agents), "atoms " + " ".join(M.atoms)]
    lines += _world_lines(M)
    if isinstance(M, InqModel):
        for ai, a in enumerate(M.agents):
            for w, st in enumerate(M.sigma_table[ai]):
                lines.append(f"sigma {a} {M.worlds[w]} : " +
                             " ".join(M.format_state(m) for m in st.maximal))
    elif isinstance(M, Structure):
        for s in M.states:
            lines.append(f"state {M.format_state(s)}")
        for ai, a in enumerate(M.agents):
            for w, ids in enumerate(M.edges[ai]):
                for j in sorted(ids):
                    lines.append(f"edge {a} {M.worlds[w]} {j}")
    else:
        raise TypeError(f"cannot serialise {type(M).__name__}")
    lines += _point_line(M, point)
    return "\n".join(lines) + "\n"


# --- coverings ----------------------------------------------------------------

def format_covering(c: Covering, source_path: str, target_path: str) -> str:
    lines = [HEADER, f"source {source_path}", f"target {target_path}"]
    for t, s in enumerate(c.projection):
        lines.append(f"map {c.target.worlds[t]} {c.source.worlds[s]}")
    return "\n".join(lines) + "\n"


def read_covering(path: str) -> Covering:
    base = os.path.dirname(os.path.abspath(path))
    src = tgt = None
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] in ("source", "target") and len(parts) == 2:
                full = parts[1] if os.path.isabs(parts[1]) else os.path.join(base, parts[1])
                m = read_model(full).model
                if parts[0] == "source":
                    src = m
                else:
                    tgt = m
            elif parts[0] == "map" and len(parts) == 3:
                pairs.append((parts[1], parts[2], lineno))
            else:
                raise ModelError(f"{path}:{lineno}: expected 'source', 'target' or 'map' line")
    if src is None or tgt is None:
        raise ModelError(f"{path}: covering needs both 'source' and 'target'")
    from .model import as_inq
    src, tgt = as_inq(src), as_inq(tgt)
    proj = [None] * tgt.n
    for t, s, lineno in pairs:
        ti = tgt.world_index(t)
        if proj[ti] is not None:
            raise ModelError(f"{path}:{lineno}: world {t!r} mapped twice")
        proj[ti] = src.world_index(s)
    if any(x is None for x in proj):
        missing = [tgt.worlds[i] for i, x in enumerate(proj) if x is None]
        raise ModelError(f"{path}: no image for target world(s) {', '.join(missing)}")
    return Covering(src, tgt, tuple(proj))


# --- DOT ----------------------------------------------------------------------

def _q(s):
    return '"' + str(s).replace('"', '\\"') + '"'


def to_dot(M: InqModel, agent=None) -> str:
    """Kripke reduct with the inquisitive structure drawn as boxes.

    For the chosen agent (default: the first), each class of worlds sharing
    the same Σ is a dashed cluster. When its maximal states are pairwise
    disjoint they become solid nested clusters; otherwise each maximal state
    is a box node linked to its worlds. Other agents appear as labelled
    edges of the Kripke reduct.
    """
    agents = list(M.agents)
    main = agents[0] if agent is None else agent
    ai = M.agent_index(main)
    lines = [HEADER.replace("#", "//", 1), f"digraph {_q(M.name)} {{",
             "  compound=true;", "  node [shape=ellipse];"]
    groups = []
    for w, st in enumerate(M.sigma_table[ai]):
        for g in groups:
            if g[0] == st and st.union() >> w & 1:
                g[1].append(w)
                break
        else:
            groups.append((st, [w]))
    drawn = set()
    for gi, (st, ws) in enumerate(groups):
        lines.append(f"  subgraph cluster_{gi} {{")
        lines.append(f"    style=dashed; label={_q(main + ': ' + ','.join(M.worlds[w] for w in ws))};")
        disjoint = sum(popcount(m) for m in st.maximal) == popcount(st.union())
        inside = set()
        members = sum(1 << w for w in ws)
        if disjoint and st.union() == members:
            for mi, m in enumerate(st.maximal):
                if not m:
                    continue
                lines.append(f"    subgraph cluster_{gi}_{mi} {{ style=solid; label=\"\";")
                for v in bits(m):
                    lines.append(f"      {_q(M.worlds[v])};")
                    inside.add(v)
                lines.append("    }")
        for w in ws:
            if w not in inside:
                lines.append(f"    {_q(M.worlds[w])};")
            drawn.add(w)
        if not inside:
            for mi, m in enumerate(st.maximal):
                box = f"{main}_{gi}_{mi}"
                lines.append(f"    {_q(box)} [shape=box, label={_q(M.format_state(m))}];")
        lines.append("  }")
        if not inside:
            for mi, m in enumerate(st.maximal):
                box = f"{main}_{gi}_{mi}"
                for v in bits(m):
                    lines.append(f"  {_q(box)} -> {_q(M.worlds[v])} [style=dotted, arrowhead=none];")
    for w in range(M.n):
        if w not in drawn:
            lines.append(f"  {_q(M.worlds[w])};")
    for bj, b in enumerate(agents):
        if b == main:
            continue
        for w, st in enumerate(M.sigma_table[bj]):
            for v in bits(st.union()):
                lines.append(f"  {_q(M.worlds[w])} -> {_q(M.worlds[v])} [label={_q(b)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

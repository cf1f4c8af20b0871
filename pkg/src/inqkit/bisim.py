"""n-bisimilarity and full bisimilarity via layered world relations.

A layer ``Y_i`` is stored as one mask per world of the left model, listing
the related worlds of the right model. The lifted relation between states
holds when every world on either side has a partner on the other side.

For the back-and-forth step it is enough to look at maximal states: if a
maximal ``m`` in Σ_a(w) has a maximal ``m'`` in Σ'_a(w') such that every
world of ``m`` has a partner in ``m'``, then the partners of ``m`` inside
``m'`` form a member of Σ'_a(w') lifted-related to ``m``, and the same
works for every subset of ``m`` by shrinking the witness.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .bitset import bits
from .errors import ModelError
from .model import InqModel, PointedModel, as_inq


def _atom_table(M, atoms):
    val = dict(zip(M.atoms, M.valuation))
    return [tuple(bool(val.get(p, 0) >> w & 1) for p in atoms) for w in range(M.n)]


def _union_atoms(M, M2):
    return tuple(M.atoms) + tuple(p for p in M2.atoms if p not in M.atoms)


def _inverse(Y, n2):
    inv = [0] * n2
    for w, row in enumerate(Y):
        for v in bits(row):
            inv[v] |= 1 << w
    return inv


def _partners(rel, s):
    out = 0
    for v in bits(s):
        out |= rel[v]
    return out


def lifted(Y, Yinv, s, s2) -> bool:
    """Lifted relation: every world of s has a partner in s2 and vice versa."""
    return all(Y[v] & s2 for v in bits(s)) and all(Yinv[v] & s for v in bits(s2))


def _forth_ok(Yinv, fam, fam2):
    # each maximal m of fam fits inside the Y-preimage of some maximal m2 of fam2
    pre = [_partners(Yinv, m2) for m2 in fam2]
    return all(any(m & ~p == 0 for p in pre) for m in fam)


def _step(M, M2, Y0, Y):
    Yinv = _inverse(Y, M2.n)
    out = []
    for w in range(M.n):
        row = 0
        for w2 in bits(Y[w]):
            ok = True
            for a in range(len(M.agents)):
                fam = M.sigma_table[a][w].maximal
                fam2 = M2.sigma_table[a][w2].maximal
                if not (_forth_ok(Yinv, fam, fam2) and _forth_ok(Y, fam2, fam)):
                    ok = False
                    break
            if ok:
                row |= 1 << w2
        out.append(row)
    return tuple(out)


@dataclass(frozen=True)
class LayeredWorldRelation:
    """Layers Y_0 ⊇ Y_1 ⊇ ... between the worlds of ``left`` and ``right``.

    ``stable`` is set when the last layer is a fixpoint, in which case it
    is full bisimilarity.
    """

    left: InqModel
    right: InqModel
    layers: Tuple[Tuple[int, ...], ...]
    stable: bool = False
    _inv: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def depth(self) -> int:
        return len(self.layers) - 1

    def layer(self, i: Union[int, str]) -> Tuple[int, ...]:
        if i == "full":
            if not self.stable:
                raise ValueError("relation was not iterated to its fixpoint")
            return self.layers[-1]
        if i >= len(self.layers):
            if self.stable:
                return self.layers[-1]
            raise ValueError(f"layer {i} was not computed")
        return self.layers[i]

    def inverse(self, i) -> Tuple[int, ...]:
        key = i if i == "full" else min(i, len(self.layers) - 1)
        if key not in self._inv:
            self._inv[key] = tuple(_inverse(self.layer(i), self.right.n))
        return self._inv[key]

    def related(self, i, w: int, w2: int) -> bool:
        return bool(self.layer(i)[w] >> w2 & 1)

    def lifted(self, i, s: int, s2: int) -> bool:
        return lifted(self.layer(i), self.inverse(i), s, s2)

    def pairs(self, i) -> List[Tuple[int, int]]:
        return [(w, v) for w, row in enumerate(self.layer(i)) for v in bits(row)]


def compute_layers(M, M2, n: Union[int, str] = "fixpoint") -> LayeredWorldRelation:
    """Layers up to ``n`` rounds, or until stable when ``n == "fixpoint"``."""
    M, M2 = as_inq(M), as_inq(M2)
    if tuple(M.agents) != tuple(M2.agents):
        raise ModelError("bisimulation needs both models over the same agents")
    atoms = _union_atoms(M, M2)
    t1, t2 = _atom_table(M, atoms), _atom_table(M2, atoms)
    Y0 = tuple(sum(1 << v for v in range(M2.n) if t2[v] == t1[w]) for w in range(M.n))
    layers = [Y0]
    stable = False
    while n == "fixpoint" or len(layers) <= n:
        nxt = _step(M, M2, Y0, layers[-1])
        if nxt == layers[-1]:
            stable = True
            if n == "fixpoint":
                break
        layers.append(nxt)
    return LayeredWorldRelation(M, M2, tuple(layers), stable)


def self_layers(M, n="fixpoint") -> LayeredWorldRelation:
    return compute_layers(M, M, n)


def classes(M, n="fixpoint") -> Tuple[int, ...]:
    """Class id of each world under ∼ⁿ (or full ∼) within ``M``.

    Ids are assigned by first occurrence in world order.
    """
    M = as_inq(M)
    rel = self_layers(M, n)
    Y = rel.layer("full" if n == "fixpoint" else n)
    ids = {}
    return tuple(ids.setdefault(Y[w], len(ids)) for w in range(M.n))


def _depth(rel, depth):
    return "full" if depth in ("full", "fixpoint") else depth


def equiv(P: PointedModel, P2: PointedModel, depth: Union[int, str] = "full") -> bool:
    """∼ⁿ (or full ∼ with ``depth="full"``) between pointed models."""
    if P.kind != P2.kind:
        raise ModelError("cannot compare a world-pointed with a state-pointed model")
    rel = compute_layers(P.model, P2.model, "fixpoint" if depth == "full" else depth)
    d = _depth(rel, depth)
    if P.kind == "world":
        return rel.related(d, P.point, P2.point)
    return rel.lifted(d, P.point, P2.point)


def is_world_bisimulation(M, M2, pairs) -> bool:
    """Whether the given set of world pairs is a world-bisimulation."""
    M, M2 = as_inq(M), as_inq(M2)
    Y = [0] * M.n
    for w, v in pairs:
        Y[w] |= 1 << v
    atoms = _union_atoms(M, M2)
    t1, t2 = _atom_table(M, atoms), _atom_table(M2, atoms)
    if any(t1[w] != t2[v] for w, v in pairs):
        return False
    return tuple(_step(M, M2, None, tuple(Y))) == tuple(Y)


# --- game transcripts ----------------------------------------------------------

@dataclass
class WorldNode:
    """World position ``(left, right)`` with ``rounds`` rounds to play.

    ``outcome == "atoms"`` marks an immediate win for I. Otherwise I plays
    ``state`` for ``agent`` on ``side`` and ``responses`` answers every
    state II could reply with.
    """

    left: int
    right: int
    rounds: int
    outcome: Optional[str] = None
    side: Optional[str] = None
    agent: Optional[str] = None
    state: Optional[int] = None
    responses: List["StateNode"] = field(default_factory=list)


@dataclass
class StateNode:
    """State position ``(left, right)``; I picks ``world`` on ``side``.

    ``replies`` holds one world position per answer of II; an empty list
    means II has no legal answer.
    """

    left: int
    right: int
    rounds: int
    side: str = "left"
    world: int = -1
    replies: List[WorldNode] = field(default_factory=list)


def _world_strategy(rel, w, w2, k):
    M, M2 = rel.left, rel.right
    if not rel.related(0, w, w2):
        return WorldNode(w, w2, k, outcome="atoms")
    # the pair survives j-1 rounds but not j, and j <= k
    j = next(i for i in range(1, k + 1) if not rel.related(i, w, w2))
    Y, Yinv = rel.layer(j - 1), rel.inverse(j - 1)
    for side in ("left", "right"):
        for ai, a in enumerate(M.agents):
            if side == "left":
                fam, fam2 = M.sigma_table[ai][w].maximal, M2.sigma_table[ai][w2]
                pre = [_partners(Yinv, m2) for m2 in fam2.maximal]
            else:
                fam, fam2 = M2.sigma_table[ai][w2].maximal, M.sigma_table[ai][w]
                pre = [_partners(Y, m2) for m2 in fam2.maximal]
            for m in fam:
                if any(m & ~p == 0 for p in pre):
                    continue
                node = WorldNode(w, w2, k, side=side, agent=a, state=m)
                for t in fam2.members():
                    pos = (m, t) if side == "left" else (t, m)
                    node.responses.append(_state_strategy(rel, *pos, k - 1, j - 1, side))
                return node
    raise AssertionError("pair is not separated at this depth")


def _state_strategy(rel, s, s2, rounds, layer, prefer="left"):
    """I wins from (s, s2): worlds are picked, then ``rounds`` more rounds."""
    Y, Yinv = rel.layer(layer), rel.inverse(layer)
    order = ("left", "right") if prefer == "left" else ("right", "left")
    for side in order:
        if side == "left":
            bad = [v for v in bits(s) if not Y[v] & s2]
            if bad:
                v = bad[0]
                return StateNode(s, s2, rounds, "left", v,
                                 [_world_strategy(rel, v, v2, rounds) for v2 in bits(s2)])
        else:
            bad = [v for v in bits(s2) if not Yinv[v] & s]
            if bad:
                v = bad[0]
                return StateNode(s, s2, rounds, "right", v,
                                 [_world_strategy(rel, u, v, rounds) for u in bits(s)])
    raise AssertionError("states are lifted-related at this depth")


def distinguishing_play(P: PointedModel, P2: PointedModel, n: int):
    """A winning strategy for I in the n-round game, or ``None`` if II wins.

    The result is a tree of :class:`WorldNode` / :class:`StateNode` covering
    every answer of II. I always picks the least failing move, preferring
    the left model and agents in declaration order.
    """
    if P.kind != P2.kind:
        raise ModelError("cannot compare a world-pointed with a state-pointed model")
    rel = compute_layers(P.model, P2.model, n)
    if P.kind == "world":
        if rel.related(n, P.point, P2.point):
            return None
        k = next(i for i in range(n + 1) if not rel.related(i, P.point, P2.point))
        return _world_strategy(rel, P.point, P2.point, k)
    if rel.lifted(n, P.point, P2.point):
        return None
    return _state_strategy(rel, P.point, P2.point, n, n)


def check_transcript(P: PointedModel, P2: PointedModel, n: int, tree) -> bool:
    """Replay a strategy tree against the game rules alone.

    True iff the tree is a complete winning strategy for I within ``n``
    rounds: every move is legal, every answer of II is covered, and every
    leaf is an atomic discrepancy or a position where II cannot move.
    """
    M, M2 = as_inq(P.model), as_inq(P2.model)
    atoms = _union_atoms(M, M2)
    t1, t2 = _atom_table(M, atoms), _atom_table(M2, atoms)
    agents = {a: i for i, a in enumerate(M.agents)}

    def world_ok(node, left, right, k):
        if not isinstance(node, WorldNode) or (node.left, node.right) != (left, right):
            return False
        if node.outcome == "atoms":
            return t1[left] != t2[right]
        if k < 1 or node.agent not in agents or node.side not in ("left", "right"):
            return False
        ai = agents[node.agent]
        mine = M.sigma_table[ai][left] if node.side == "left" else M2.sigma_table[ai][right]
        other = M2.sigma_table[ai][right] if node.side == "left" else M.sigma_table[ai][left]
        if node.state is None or node.state not in mine:
            return False
        answers = other.members()
        if len(node.responses) != len(answers):
            return False
        for t, sub in zip(answers, node.responses):
            pos = (node.state, t) if node.side == "left" else (t, node.state)
            if not state_ok(sub, pos[0], pos[1], k - 1):
                return False
        return True

    def state_ok(node, s, s2, k):
        if not isinstance(node, StateNode) or (node.left, node.right) != (s, s2):
            return False
        if node.side == "left":
            if not s >> node.world & 1:
                return False
            options = list(bits(s2))
            pairs = [(node.world, v) for v in options]
        elif node.side == "right":
            if not s2 >> node.world & 1:
                return False
            options = list(bits(s))
            pairs = [(u, node.world) for u in options]
        else:
            return False
        if len(node.replies) != len(pairs):
            return False
        return all(world_ok(r, u, v, k) for r, (u, v) in zip(node.replies, pairs))

    if tree is None:
        return False
    if P.kind == "world":
        return world_ok(tree, P.point, P2.point, n)
    return state_ok(tree, P.point, P2.point, n)


def format_transcript(tree, M, M2, indent: str = "") -> List[str]:
    """Human-readable lines for a strategy tree."""
    M, M2 = as_inq(M), as_inq(M2)
    lines = []

    def wnode(node, pad):
        head = f"{pad}at ({M.worlds[node.left]}, {M2.worlds[node.right]}), {node.rounds} round(s) left: "
        if node.outcome == "atoms":
            lines.append(head + "atoms differ, I wins")
            return
        model = M if node.side == "left" else M2
        lines.append(head + f"I plays {model.format_state(node.state)} in Σ_{node.agent} on the {node.side}")
        for sub in node.responses:
            snode(sub, pad + "  ")

    def snode(node, pad):
        other = M2 if node.side == "left" else M
        answer = node.right if node.side == "left" else node.left
        model = M if node.side == "left" else M2
        lines.append(f"{pad}II answers {other.format_state(answer)}; "
                     f"I picks {model.worlds[node.world]} on the {node.side}")
        if not node.replies:
            lines.append(f"{pad}  II has no world to answer with, I wins")
        for r in node.replies:
            wnode(r, pad + "  ")

    if isinstance(tree, WorldNode):
        wnode(tree, indent)
    else:
        lines.append(f"{indent}at ({M.format_state(tree.left)}, {M2.format_state(tree.right)}): "
                     f"I picks {(M if tree.side == 'left' else M2).worlds[tree.world]} on the {tree.side}")
        if not tree.replies:
            lines.append(f"{indent}  II has no world to answer with, I wins")
        for r in tree.replies:
            wnode(r, indent + "  ")
    return lines

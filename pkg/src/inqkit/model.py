"""Inquisitive models, their Kripke reducts and two-sorted relational encodings.

Worlds carry dense integer indices and information states are bitmasks over
those indices (see :mod:`inqkit.bitset`). Every value here is immutable.
"""
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

from .bitset import bits, downward_closure, is_subset, mask_of, maximal_antichain, subsets
from .errors import CapExceeded, ModelError

FULL_ENCODING_CAP = 16
MODES = ("minimal", "locally-full", "full")


@dataclass(frozen=True)
class InqState:
    """A non-empty downward-closed family of information states.

    Stored by its maximal antichain; ``s in state`` tests membership of a
    mask in the downward closure.
    """

    maximal: Tuple[int, ...]

    def __post_init__(self):
        if not self.maximal:
            raise ModelError("an inquisitive state needs at least one maximal element")
        if tuple(sorted(set(self.maximal))) != tuple(self.maximal):
            raise ModelError(f"maximal states must be sorted and distinct: {self.maximal}")
        for i, a in enumerate(self.maximal):
            for b in self.maximal[i + 1:]:
                if is_subset(a, b) or is_subset(b, a):
                    raise ModelError(f"not an antichain: {a:#b} and {b:#b}")

    @classmethod
    def from_states(cls, states: Iterable[int]) -> "InqState":
        return cls(maximal_antichain(states))

    def __contains__(self, s: int) -> bool:
        return any(s & ~m == 0 for m in self.maximal)

    def union(self) -> int:
        out = 0
        for m in self.maximal:
            out |= m
        return out

    def members(self) -> list:
        """Every state of the family, in numeric order."""
        return downward_closure(self.maximal)

    @property
    def trivial(self) -> bool:
        return self.maximal == (0,)


def _index(names: Sequence[str], key, kind: str) -> int:
    if isinstance(key, int) and not isinstance(key, bool):
        if 0 <= key < len(names):
            return key
        raise ModelError(f"{kind} index {key} out of range")
    try:
        return names.index(key)
    except ValueError:
        raise ModelError(f"unknown {kind} {key!r}") from None


class _Signature:
    """Name lookups shared by models and structures."""

    worlds: Tuple[str, ...]
    agents: Tuple[str, ...]
    atoms: Tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.worlds)

    @property
    def all_worlds(self) -> int:
        return (1 << len(self.worlds)) - 1

    def world_index(self, w) -> int:
        return _index(self.worlds, w, "world")

    def agent_index(self, a) -> int:
        return _index(self.agents, a, "agent")

    def atom_index(self, p) -> int:
        return _index(self.atoms, p, "atom")

    def state(self, names: Iterable) -> int:
        """Mask for a collection of world names or indices."""
        if isinstance(names, int):
            if names & ~self.all_worlds:
                raise ModelError(f"state {names:#b} mentions undeclared worlds")
            return names
        return mask_of(self.world_index(w) for w in names)

    def state_names(self, mask: int) -> Tuple[str, ...]:
        return tuple(self.worlds[i] for i in bits(mask))

    def format_state(self, mask: int) -> str:
        return "{" + ",".join(self.state_names(mask)) + "}"


@dataclass(frozen=True)
class InqModel(_Signature):
    """Finite multi-agent inquisitive modal model.

    ``sigma_table[a][w]`` is the inquisitive state of agent ``a`` at world
    ``w``; ``valuation[i]`` is the mask of worlds where ``atoms[i]`` holds.
    """

    worlds: Tuple[str, ...]
    agents: Tuple[str, ...]
    atoms: Tuple[str, ...]
    sigma_table: Tuple[Tuple[InqState, ...], ...]
    valuation: Tuple[int, ...]
    name: str = "M"

    def __post_init__(self):
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("world ids must be unique")
        if len(self.sigma_table) != len(self.agents):
            raise ModelError("one inquisitive assignment per agent expected")
        full = self.all_worlds
        for row in self.sigma_table:
            if len(row) != len(self.worlds):
                raise ModelError("inquisitive assignment must cover every world")
            for st in row:
                if any(m & ~full for m in st.maximal):
                    raise ModelError("inquisitive state mentions undeclared worlds")
        if len(self.valuation) != len(self.atoms):
            raise ModelError("one valuation mask per atom expected")

    def Sigma(self, a, w) -> InqState:
        return self.sigma_table[self.agent_index(a)][self.world_index(w)]

    def sigma(self, a, w) -> int:
        return self.Sigma(a, w).union()

    def V(self, p) -> int:
        return self.valuation[self.atom_index(p)]

    def atom_type(self, w: int) -> Tuple[bool, ...]:
        return tuple(bool(v >> w & 1) for v in self.valuation)


@dataclass(frozen=True)
class KripkeModel(_Signature):
    """Kripke reduct: ``R[a][w]`` is the successor mask of ``w`` for agent ``a``."""

    worlds: Tuple[str, ...]
    agents: Tuple[str, ...]
    atoms: Tuple[str, ...]
    R: Tuple[Tuple[int, ...], ...]
    valuation: Tuple[int, ...]
    name: str = "K"

    def successors(self, a, w) -> int:
        return self.R[self.agent_index(a)][self.world_index(w)]

    def relation(self, a) -> frozenset:
        row = self.R[self.agent_index(a)]
        return frozenset((w, v) for w, succ in enumerate(row) for v in bits(succ))


@dataclass(frozen=True)
class Structure(_Signature):
    """Plain two-sorted structure (W, S, E_a, eps, P_i).

    ``states[j]`` is the membership mask of second-sort element ``j``;
    duplicates are allowed here (extensionality is a property checked by
    validation, not a representation invariant). ``edges[a][w]`` is the set
    of state ids E_a-related to ``w``.
    """

    worlds: Tuple[str, ...]
    agents: Tuple[str, ...]
    atoms: Tuple[str, ...]
    states: Tuple[int, ...]
    edges: Tuple[Tuple[frozenset, ...], ...]
    valuation: Tuple[int, ...]
    name: str = "M"

    def __post_init__(self):
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("world ids must be unique")
        full = self.all_worlds
        if any(s & ~full for s in self.states):
            raise ModelError("state mentions undeclared worlds")
        if len(self.edges) != len(self.agents):
            raise ModelError("one E relation per agent expected")
        for row in self.edges:
            if len(row) != len(self.worlds):
                raise ModelError("E relation must list every world")
            for ids in row:
                if any(not 0 <= j < len(self.states) for j in ids):
                    raise ModelError("E relation references an unknown state")
        if len(self.valuation) != len(self.atoms):
            raise ModelError("one valuation mask per atom expected")

    def E(self, a, w) -> frozenset:
        return self.edges[self.agent_index(a)][self.world_index(w)]

    def state_id(self, s) -> int:
        """Id of the (first) second-sort element whose extension is ``s``."""
        mask = self.state(s)
        try:
            return self.states.index(mask)
        except ValueError:
            raise ModelError(f"state {self.format_state(mask)} is not in the second sort") from None

    @property
    def size(self) -> int:
        return len(self.worlds) + len(self.states)


@dataclass(frozen=True)
class RelationalModel(Structure):
    """Two-sorted structure intended to satisfy the relational-model conditions.

    Construction does not enforce those conditions; use
    ``validate(m, "relational-valid")``.
    """


@dataclass(frozen=True)
class PointedModel:
    model: Union[InqModel, RelationalModel]
    point: int
    kind: str = "world"

    def __post_init__(self):
        if self.kind not in ("world", "state"):
            raise ModelError(f"point kind must be 'world' or 'state', not {self.kind!r}")
        if self.kind == "world" and not 0 <= self.point < self.model.n:
            raise ModelError(f"world index {self.point} out of range")
        if self.kind == "state" and self.point & ~self.model.all_worlds:
            raise ModelError("state point mentions undeclared worlds")

    @classmethod
    def world(cls, model, w) -> "PointedModel":
        return cls(model, model.world_index(w), "world")

    @classmethod
    def state(cls, model, s) -> "PointedModel":
        return cls(model, model.state(s), "state")


def build_model(worlds: Sequence[str], agents: Sequence[str], atoms: Sequence[str],
                sigma: Mapping, valuation: Mapping, *, allow_trivial: bool = False,
                name: str = "M") -> InqModel:
    """Build an :class:`InqModel` from names.

    ``sigma`` maps ``(agent, world)`` to an iterable of states, each an
    iterable of world names; these generate Σ_a(w) by downward closure.
    ``valuation`` maps atom names to iterables of world names. A missing or
    empty listing for some (agent, world) is rejected unless
    ``allow_trivial`` is set, in which case it becomes {∅}. An explicit
    empty state (``[]``) is always accepted.
    """
    worlds = tuple(worlds)
    agents = tuple(agents)
    atoms = tuple(atoms)
    if len(set(agents)) != len(agents) or len(set(atoms)) != len(atoms):
        raise ModelError("agent and atom labels must be unique")
    proto = InqModel(worlds, agents, atoms,
                     tuple(tuple(InqState((0,)) for _ in worlds) for _ in agents),
                     tuple(0 for _ in atoms), name)
    for (a, w) in sigma:
        proto.agent_index(a)
        proto.world_index(w)
    table = []
    for a in agents:
        row = []
        for w in worlds:
            listed = [proto.state(s) for s in sigma.get((a, w), ())]
            if not listed:
                if not allow_trivial:
                    raise ModelError(f"no inquisitive state given for agent {a!r} at world {w!r}")
                listed = [0]
            row.append(InqState.from_states(listed))
        table.append(tuple(row))
    for p in valuation:
        proto.atom_index(p)
    val = tuple(proto.state(valuation.get(p, ())) for p in atoms)
    return InqModel(worlds, agents, atoms, tuple(table), val, name)


def sigma(M: InqModel, a, w) -> int:
    """Knowledge state σ_a(w), the union of Σ_a(w)."""
    return M.sigma(a, w)


def kripke_reduct(M: InqModel) -> KripkeModel:
    R = tuple(tuple(st.union() for st in row) for row in M.sigma_table)
    return KripkeModel(M.worlds, M.agents, M.atoms, R, M.valuation, M.name)


def encode_relational(M: InqModel, mode: str = "minimal", point=None,
                      cap: int = FULL_ENCODING_CAP) -> RelationalModel:
    """Relational encoding of ``M`` with the second sort chosen by ``mode``.

    ``point`` may be a state (mask or iterable of world names); its full
    powerset is added to the second sort. A world point changes nothing.
    """
    if mode not in MODES:
        raise ModelError(f"unknown encoding mode {mode!r}")
    S = set()
    if mode == "minimal":
        for row in M.sigma_table:
            for st in row:
                S.update(st.members())
    elif mode == "locally-full":
        for row in M.sigma_table:
            for st in row:
                S.update(subsets(st.union()))
    else:
        if M.n > cap:
            raise CapExceeded(f"full encoding of {M.n} worlds exceeds cap {cap}")
        S.update(range(1 << M.n))
    if point is not None and not (isinstance(point, str) or isinstance(point, PointedModel) and point.kind == "world"):
        if isinstance(point, PointedModel):
            point = point.point
        S.update(subsets(M.state(point)))
    S.add(0)
    states = tuple(sorted(S))
    ids = {m: j for j, m in enumerate(states)}
    edges = tuple(
        tuple(frozenset(ids[m] for m in st.members()) for st in row)
        for row in M.sigma_table
    )
    return RelationalModel(M.worlds, M.agents, M.atoms, states, edges, M.valuation, M.name)


def decode_relational(rel: Structure) -> InqModel:
    """The inquisitive model determined by a valid relational model."""
    from .validate import validate

    report = validate(rel, "relational-valid")
    if not report.ok:
        raise ModelError(f"invalid relational model: {report.witness}")
    table = tuple(
        tuple(InqState.from_states(rel.states[j] for j in ids) for ids in row)
        for row in rel.edges
    )
    return InqModel(rel.worlds, rel.agents, rel.atoms, table, rel.valuation, rel.name)


def as_inq(model) -> InqModel:
    """Accept either representation where only the inquisitive content matters."""
    if isinstance(model, InqModel):
        return model
    if isinstance(model, Structure):
        return decode_relational(model)
    raise TypeError(f"expected a model, got {type(model).__name__}")


def disjoint_sum(parts: Sequence[Tuple[Structure, int]], name: Optional[str] = None) -> Structure:
    """Essentially disjoint union of ``multiplicity`` copies of each part.

    Worlds are renamed ``<world>@<part>.<copy>``. All copies share a single
    empty state, which comes first in the second sort when any part has one.
    The result is a :class:`RelationalModel` when every part is one.
    """
    if not parts:
        raise ModelError("disjoint_sum needs at least one part")
    agents = parts[0][0].agents
    atoms = []
    for m, _ in parts:
        if m.agents != agents:
            raise ModelError("all parts of a disjoint sum must share the agent list")
        atoms.extend(p for p in m.atoms if p not in atoms)
    shared_empty = any(0 in m.states for m, _ in parts)
    worlds = []
    states = [0] if shared_empty else []
    edges = [[] for _ in agents]
    valuation = [0] * len(atoms)
    for pi, (m, mult) in enumerate(parts):
        for c in range(mult):
            offset = len(worlds)
            worlds.extend(f"{w}@{pi}.{c}" for w in m.worlds)
            idmap = {}
            for j, s in enumerate(m.states):
                if s == 0:
                    idmap[j] = 0
                else:
                    idmap[j] = len(states)
                    states.append(s << offset)
            for ai, row in enumerate(m.edges):
                edges[ai].extend(frozenset(idmap[j] for j in ids) for ids in row)
            for k, p in enumerate(m.atoms):
                valuation[atoms.index(p)] |= m.valuation[k] << offset
    cls = RelationalModel if all(isinstance(m, RelationalModel) for m, _ in parts) else Structure
    if name is None:
        name = "+".join(f"{mult}*{m.name}" for m, mult in parts)
    return cls(tuple(worlds), agents, tuple(atoms), tuple(states),
               tuple(tuple(r) for r in edges), tuple(valuation), name)


def drop_empty_state(rel: Structure) -> Structure:
    """Remove the empty information state from the second sort."""
    if 0 not in rel.states:
        return rel
    keep = [j for j, s in enumerate(rel.states) if s != 0]
    idmap = {j: k for k, j in enumerate(keep)}
    edges = tuple(
        tuple(frozenset(idmap[j] for j in ids if j in idmap) for ids in row)
        for row in rel.edges
    )
    return Structure(rel.worlds, rel.agents, rel.atoms, tuple(rel.states[j] for j in keep),
                     edges, rel.valuation, rel.name)

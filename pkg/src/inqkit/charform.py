"""Characteristic formulae for ∼ⁿ-classes of worlds, states and inquisitive states.

Within one model the ∼ᵏ-type of a state is the set of ∼ᵏ-classes of its
worlds, stored as a bitmask over class ids. Two states are lifted
∼ᵏ-related exactly when their types coincide, so the families of states
that the recursion ranges over are handled as downward-closed families of
types, each represented by its maximal antichain.
"""
from itertools import combinations
from typing import Iterable, List, Sequence

from .bisim import classes
from .bitset import bits, is_subset, maximal_antichain, subsets
from .errors import CapExceeded, ModelError
from .formula import (BOT, And, Atom, BoxPlus, Formula, IDisj, Implies, Interner,
                      TOP)
from .model import InqState, PointedModel, as_inq

DEPTH_CAP = 3
RAW_FAMILY_CAP = 10
CONJUNCT_MODES = ("all", "maximal", "literal", "literal-raw")


class Synthesizer:
    """Builds χ-formulae for one model, sharing structure through an interner.

    ``conjuncts`` selects which negated ⊞-conjuncts enter χ^{k+1}_w:

    * ``"all"``: one per downward-closed proper subfamily of the type family
      of Σ_a(w) (containing at least the empty type);
    * ``"maximal"``: only the subfamilies that drop a single maximal type,
      which imply all the others;
    * ``"literal"``: one per downward-closed subfamily of Σ_a(w) itself,
      enumerated state by state (exponential, for cross-checking);
    * ``"literal-raw"``: one per arbitrary subfamily of Σ_a(w) not matching
      Σ_a(w), without the downward-closure restriction. Kept to exhibit that
      this reading is unsound: the family Σ_a(w) minus ∅ already makes the
      formula unsatisfiable.
    """

    def __init__(self, M, cap: int = DEPTH_CAP, conjuncts: str = "all"):
        if conjuncts not in CONJUNCT_MODES:
            raise ValueError(f"unknown conjunct mode {conjuncts!r}")
        self.M = as_inq(M)
        self.cap = cap
        self.mode = conjuncts
        self.intern = Interner()
        self._classes = {}
        self._world = {}
        self._typeset = {}

    # -- helpers

    def _check(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"depth must be a natural number, got {n!r}")
        if n > self.cap:
            raise CapExceeded(f"depth {n} exceeds the characteristic-formula cap {self.cap}")

    def cls(self, k) -> tuple:
        if k not in self._classes:
            self._classes[k] = classes(self.M, k)
        return self._classes[k]

    def reps(self, k) -> List[int]:
        """Least world of each ∼ᵏ class, indexed by class id."""
        out = {}
        for w, c in enumerate(self.cls(k)):
            out.setdefault(c, w)
        return [out[c] for c in range(len(out))]

    def type_of(self, s: int, k) -> int:
        c = self.cls(k)
        out = 0
        for v in bits(s):
            out |= 1 << c[v]
        return out

    def _and(self, items: Iterable[Formula]) -> Formula:
        out = None
        for f in items:
            out = f if out is None else self.intern(And(out, f))
        return TOP if out is None else out

    def _not(self, f):
        return self.intern(Implies(f, BOT))

    def _or(self, items):
        out = None
        for f in items:
            out = f if out is None else self._not(self.intern(And(self._not(out), self._not(f))))
        return BOT if out is None else out

    def _idisj(self, items):
        out = None
        for f in items:
            out = f if out is None else self.intern(IDisj(out, f))
        return BOT if out is None else out

    # -- the recursion

    def world(self, w: int, n: int) -> Formula:
        self._check(n)
        key = (w, n)
        if key in self._world:
            return self._world[key]
        M = self.M
        if n == 0:
            lits = []
            for p, val in zip(M.atoms, M.valuation):
                atom = self.intern(Atom(p))
                lits.append(atom if val >> w & 1 else self._not(atom))
            out = self._and(lits)
        else:
            k = n - 1
            parts = [self.world(w, k)]
            for ai, a in enumerate(M.agents):
                st = M.sigma_table[ai][w]
                full = maximal_antichain(self.type_of(m, k) for m in st.maximal)
                parts.append(self.intern(BoxPlus(a, self.family(full, k))))
                for sub in self._proper_subfamilies(st, full, k):
                    parts.append(self._not(self.intern(BoxPlus(a, sub))))
            out = self._and(parts)
        self._world[key] = out
        return out

    def typeset(self, T: int, k: int) -> Formula:
        """Classical disjunction of χᵏ over the classes in ``T``."""
        key = (T, k)
        if key not in self._typeset:
            reps = self.reps(k)
            self._typeset[key] = self._or(self.world(reps[c], k) for c in bits(T))
        return self._typeset[key]

    def family(self, antichain: Sequence[int], k: int) -> Formula:
        """⫾ over the maximal types of a downward-closed type family."""
        return self._idisj(self.typeset(T, k) for T in sorted(antichain))

    def _proper_subfamilies(self, st: InqState, full, k):
        if self.mode == "maximal":
            seen = set()
            for m in full:
                if m == 0:
                    # Σ = {∅}: no non-empty proper subfamily to exclude
                    continue
                rest = [x for x in full if x != m]
                rest += [m & ~(1 << c) for c in bits(m)]
                anti = maximal_antichain(rest)
                if anti not in seen:
                    seen.add(anti)
                    yield self.family(anti, k)
            return
        if self.mode == "all":
            members = sorted(set(x for m in full for x in subsets(m)))
            for anti in _antichains(members):
                if _closure_equal(anti, full):
                    continue
                yield self.family(anti, k)
            return
        members = st.members()
        if self.mode == "literal":
            for anti in _antichains(members):
                fam = sorted(set(x for m in anti for x in subsets(m)))
                if maximal_antichain(self.type_of(s, k) for s in fam) == full:
                    continue
                yield self._idisj(self.state(s, k) for s in fam)
            return
        if len(members) > RAW_FAMILY_CAP:
            raise CapExceeded(f"{len(members)} members exceed the raw-family cap {RAW_FAMILY_CAP}")
        full_types = {self.type_of(s, k) for s in members}
        for r in range(len(members) + 1):
            for fam in combinations(members, r):
                types = {self.type_of(s, k) for s in fam}
                if full_types <= types:
                    continue
                yield self._idisj(self.state(s, k) for s in fam)

    def state(self, s: int, n: int) -> Formula:
        self._check(n)
        return self.typeset(self.type_of(s, n), n)

    def inqstate(self, st: InqState, n: int) -> Formula:
        self._check(n)
        return self.family(maximal_antichain(self.type_of(m, n) for m in st.maximal), n)


def _closure_equal(anti, full):
    return all(any(is_subset(m, a) for a in anti) for m in full)


def _antichains(members: Sequence[int]):
    """Every non-empty antichain of the given masks, as sorted tuples."""
    members = sorted(members)

    def rec(start, chosen):
        if chosen:
            yield tuple(chosen)
        for i in range(start, len(members)):
            x = members[i]
            if any(is_subset(x, c) or is_subset(c, x) for c in chosen):
                continue
            chosen.append(x)
            yield from rec(i + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


def chi_world(M, w, n: int, **opts) -> Formula:
    M = as_inq(M)
    return Synthesizer(M, **opts).world(M.world_index(w), n)


def chi_state(M, s, n: int, **opts) -> Formula:
    M = as_inq(M)
    return Synthesizer(M, **opts).state(M.state(s), n)


def chi_inqstate(M, st: InqState, n: int, **opts) -> Formula:
    M = as_inq(M)
    if not isinstance(st, InqState):
        st = InqState.from_states(M.state(s) for s in st)
    return Synthesizer(M, **opts).inqstate(st, n)


def class_formula(representatives: Sequence[PointedModel], n: int, kind: str = "world",
                  **opts) -> Formula:
    """Formula defining the ∼ⁿ-closure of the given pointed models.

    World representatives are joined by classical disjunction, state
    representatives by inquisitive disjunction. Duplicate χ-formulae are
    dropped, keeping first occurrences.
    """
    if kind not in ("world", "state"):
        raise ValueError("kind must be 'world' or 'state'")
    synth = {}
    parts = []
    for P in representatives:
        if P.kind != kind:
            raise ModelError(f"representative pointed at a {P.kind}, expected {kind}")
        key = id(P.model)
        if key not in synth:
            synth[key] = Synthesizer(P.model, **opts)
        S = synth[key]
        f = S.world(P.point, n) if kind == "world" else S.state(P.point, n)
        if f not in parts:
            parts.append(f)
    if kind == "world":
        out = None
        for f in parts:
            out = f if out is None else Implies(And(Implies(out, BOT), Implies(f, BOT)), BOT)
        return BOT if out is None else out
    out = None
    for f in parts:
        out = f if out is None else IDisj(out, f)
    return BOT if out is None else out

"""S5-specific views: a-classes, coloured local a-structures, threshold counting."""
from dataclasses import dataclass
from itertools import product
from typing import Dict, Sequence

from .bisim import classes
from .bitset import bits
from .errors import S5Error
from .model import InqState, as_inq
from .validate import validate


def _require_s5(M):
    rep = validate(M, "s5")
    if not rep.ok:
        raise S5Error(rep.witness)


def a_class(M, a, w) -> int:
    """The a-class [w]_a, which in an S5 model is σ_a(w)."""
    M = as_inq(M)
    _require_s5(M)
    return M.sigma(a, w)


def a_classes(M, a) -> list:
    """All a-classes of ``M`` in order of their least world."""
    M = as_inq(M)
    _require_s5(M)
    ai = M.agent_index(a)
    seen = []
    for st in M.sigma_table[ai]:
        c = st.union()
        if c not in seen:
            seen.append(c)
    return seen


@dataclass(frozen=True)
class LocalAStructure:
    agent: str
    carrier: int
    inqstate: InqState
    colouring: Dict[int, int]

    def colours(self, s: int) -> frozenset:
        return frozenset(self.colouring[v] for v in bits(s))

    def multiplicity(self, s: int) -> Dict[int, int]:
        out = {}
        for v in bits(s):
            out[self.colouring[v]] = out.get(self.colouring[v], 0) + 1
        return out


def local_a_structure(M, a, w, granularity="full") -> LocalAStructure:
    """The a-class of ``w`` with Σ_a and the ∼ⁿ (or ∼) colouring from ``M``.

    Colour ids are those of the whole model, numbered by first occurrence
    in world order.
    """
    M = as_inq(M)
    _require_s5(M)
    colour = classes(M, "fixpoint" if granularity == "full" else granularity)
    st = M.Sigma(a, w)
    carrier = st.union()
    return LocalAStructure(a, carrier, st, {v: colour[v] for v in bits(carrier)})


def _cells(U, sets):
    U = set(U)
    for i, P in enumerate(sets):
        if not set(P) <= U:
            raise ValueError(f"set #{i} is not contained in its universe")
    out = {}
    for signs in product((True, False), repeat=len(sets)):
        cell = set(U)
        for keep, P in zip(signs, sets):
            cell &= set(P) if keep else U - set(P)
        out[signs] = len(cell)
    return out


def threshold_eq(m: int, n: int, d: int) -> bool:
    """|P| =_d |P'|: equal, or both at least d."""
    return m == n or (m >= d and n >= d)


def threshold_equiv(U, P: Sequence, U2, Q: Sequence, d: int) -> bool:
    """Whether every boolean combination has =_d-matching sizes on both sides.

    Every boolean term is a disjoint union of atoms of the generated
    algebra (the cells), and cells are terms, so checking the cells
    suffices.
    """
    if len(P) != len(Q):
        raise ValueError("tuples of sets must have the same length")
    A, B = _cells(U, P), _cells(U2, Q)
    return all(threshold_eq(A[k], B[k], d) for k in A)

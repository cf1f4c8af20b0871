"""Two-sorted first-order logic over relational encodings.

Sorts are ``"world"`` and ``"state"``. Formulae are frozen dataclasses;
``subseteq`` and ``e`` are macros that :func:`expand` rewrites into the
primitive vocabulary (E_a, ε, P_i, equality) before evaluation.
"""
import re
from dataclasses import dataclass
from itertools import count
from typing import Mapping, Optional, Sequence

from . import formula as F
from .bitset import bits
from .errors import CapExceeded, InqError, ModelError, SignatureError
from .model import RelationalModel, Structure
from .validate import distances, gaifman_adjacency, validate

WORLD, STATE = "world", "state"
EF_CAP = 40


class FOError(InqError, ValueError):
    """Ill-sorted formula or incomplete assignment."""


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


class FO:
    """Base class of first-order formulae."""

    def __str__(self):
        return to_sexpr(self)


@dataclass(frozen=True)
class ERel(FO):
    agent: str
    w: Var
    s: Var


@dataclass(frozen=True)
class Eps(FO):
    w: Var
    s: Var


@dataclass(frozen=True)
class Pred(FO):
    atom: str
    w: Var


@dataclass(frozen=True)
class Eq(FO):
    x: Var
    y: Var


@dataclass(frozen=True)
class FBot(FO):
    pass


@dataclass(frozen=True)
class FNot(FO):
    body: FO


@dataclass(frozen=True)
class FAnd(FO):
    left: FO
    right: FO


@dataclass(frozen=True)
class FOr(FO):
    left: FO
    right: FO


@dataclass(frozen=True)
class FImplies(FO):
    left: FO
    right: FO


@dataclass(frozen=True)
class FIff(FO):
    left: FO
    right: FO


@dataclass(frozen=True)
class Forall(FO):
    var: Var
    body: FO


@dataclass(frozen=True)
class Exists(FO):
    var: Var
    body: FO


@dataclass(frozen=True)
class Subseteq(FO):
    """Macro: s ⊆ t, i.e. every world in s is in t."""

    s: Var
    t: Var


@dataclass(frozen=True)
class EMacro(FO):
    """Macro: t is exactly the union of the E_a-successors of w."""

    agent: str
    w: Var
    t: Var


_BINARY = (FAnd, FOr, FImplies, FIff)
_QUANT = (Forall, Exists)


def _check_sort(v: Var, sort: str, where: str):
    if v.sort != sort:
        raise FOError(f"{where} expects a {sort} variable, got {v.name}:{v.sort}")


def free_vars(psi: FO) -> frozenset:
    if isinstance(psi, (ERel, EMacro)):
        return frozenset((psi.w, psi.s if isinstance(psi, ERel) else psi.t))
    if isinstance(psi, Eps):
        return frozenset((psi.w, psi.s))
    if isinstance(psi, Pred):
        return frozenset((psi.w,))
    if isinstance(psi, Eq):
        return frozenset((psi.x, psi.y))
    if isinstance(psi, Subseteq):
        return frozenset((psi.s, psi.t))
    if isinstance(psi, FBot):
        return frozenset()
    if isinstance(psi, FNot):
        return free_vars(psi.body)
    if isinstance(psi, _BINARY):
        return free_vars(psi.left) | free_vars(psi.right)
    if isinstance(psi, _QUANT):
        return free_vars(psi.body) - {psi.var}
    raise TypeError(f"not an FO formula: {psi!r}")


def _fresh(base: str, avoid) -> str:
    if base not in avoid:
        return base
    for i in count(1):
        name = f"{base}{i}"
        if name not in avoid:
            return name


def expand(psi: FO) -> FO:
    """Rewrite macros into primitives, with bound names fresh for the arguments."""
    if isinstance(psi, Subseteq):
        _check_sort(psi.s, STATE, "subseteq")
        _check_sort(psi.t, STATE, "subseteq")
        u = Var(_fresh("w", {psi.s.name, psi.t.name}), WORLD)
        return Forall(u, FImplies(Eps(u, psi.s), Eps(u, psi.t)))
    if isinstance(psi, EMacro):
        _check_sort(psi.w, WORLD, "e")
        _check_sort(psi.t, STATE, "e")
        avoid = {psi.w.name, psi.t.name}
        v = Var(_fresh("v", avoid), WORLD)
        s = Var(_fresh("s", avoid | {v.name}), STATE)
        return Forall(v, FIff(Eps(v, psi.t),
                              Exists(s, FAnd(ERel(psi.agent, psi.w, s), Eps(v, s)))))
    if isinstance(psi, FNot):
        return FNot(expand(psi.body))
    if isinstance(psi, _BINARY):
        return type(psi)(expand(psi.left), expand(psi.right))
    if isinstance(psi, _QUANT):
        return type(psi)(psi.var, expand(psi.body))
    if isinstance(psi, (ERel, Eps)):
        _check_sort(psi.w, WORLD, type(psi).__name__)
        _check_sort(psi.s, STATE, type(psi).__name__)
    elif isinstance(psi, Pred):
        _check_sort(psi.w, WORLD, "P")
    elif isinstance(psi, Eq) and psi.x.sort != psi.y.sort:
        raise FOError(f"equality between sorts: {psi.x.name}, {psi.y.name}")
    return psi


def quantifier_rank(psi: FO) -> int:
    psi = expand(psi)

    def qr(f):
        if isinstance(f, _QUANT):
            return 1 + qr(f.body)
        if isinstance(f, FNot):
            return qr(f.body)
        if isinstance(f, _BINARY):
            return max(qr(f.left), qr(f.right))
        return 0

    return qr(psi)


def to_sexpr(psi: FO) -> str:
    if isinstance(psi, ERel):
        return f"(E_{psi.agent} {psi.w} {psi.s})"
    if isinstance(psi, Eps):
        return f"(eps {psi.w} {psi.s})"
    if isinstance(psi, Pred):
        return f"(P_{psi.atom} {psi.w})"
    if isinstance(psi, Eq):
        return f"(= {psi.x} {psi.y})"
    if isinstance(psi, Subseteq):
        return f"(subseteq {psi.s} {psi.t})"
    if isinstance(psi, EMacro):
        return f"(e_{psi.agent} {psi.w} {psi.t})"
    if isinstance(psi, FBot):
        return "bot"
    if isinstance(psi, FNot):
        return f"(not {to_sexpr(psi.body)})"
    if isinstance(psi, _BINARY):
        op = {FAnd: "and", FOr: "or", FImplies: "->", FIff: "<->"}[type(psi)]
        return f"({op} {to_sexpr(psi.left)} {to_sexpr(psi.right)})"
    if isinstance(psi, _QUANT):
        q = "forall" if isinstance(psi, Forall) else "exists"
        return f"({q} {psi.var.name}:{psi.var.sort} {to_sexpr(psi.body)})"
    raise TypeError(f"not an FO formula: {psi!r}")


# --- standard translation -----------------------------------------------------

_W = Var("w", WORLD)
_S = Var("s", STATE)
_T = Var("t", STATE)


def _other(sv: Var) -> Var:
    return _T if sv == _S else _S


def _st_w(phi):
    w = _W
    if isinstance(phi, F.Atom):
        return Pred(phi.name, w)
    if isinstance(phi, F.Bottom):
        return FBot()
    if isinstance(phi, F.And):
        return FAnd(_st_w(phi.left), _st_w(phi.right))
    if isinstance(phi, F.IDisj):
        return FOr(_st_w(phi.left), _st_w(phi.right))
    if isinstance(phi, F.Implies):
        return FImplies(_st_w(phi.left), _st_w(phi.right))
    if isinstance(phi, F.BoxPlus):
        return Forall(_S, FImplies(ERel(phi.agent, w, _S), _st_s(phi.body, _S)))
    if isinstance(phi, F.Box):
        return Forall(_S, FImplies(EMacro(phi.agent, w, _S), _st_s(phi.body, _S)))
    raise TypeError(f"not a formula: {phi!r}")


def _st_s(phi, s: Var):
    if isinstance(phi, (F.Atom, F.Bottom, F.Box, F.BoxPlus)):
        # truth-conditional clauses: every world of s satisfies phi
        return Forall(_W, FImplies(Eps(_W, s), _st_w(phi)))
    if isinstance(phi, F.And):
        return FAnd(_st_s(phi.left, s), _st_s(phi.right, s))
    if isinstance(phi, F.IDisj):
        return FOr(_st_s(phi.left, s), _st_s(phi.right, s))
    if isinstance(phi, F.Implies):
        t = _other(s)
        return Forall(t, FImplies(Subseteq(t, s),
                                  FImplies(_st_s(phi.left, t), _st_s(phi.right, t))))
    raise TypeError(f"not a formula: {phi!r}")


def standard_translate(phi, mode: str = WORLD) -> FO:
    """ST_w (free variable ``w``) or ST_s (free variable ``s``) of an InqML formula."""
    if mode == WORLD:
        return _st_w(phi)
    if mode == STATE:
        return _st_s(phi, _S)
    raise ValueError(f"mode must be 'world' or 'state', not {mode!r}")


# --- evaluation ---------------------------------------------------------------

@dataclass(frozen=True)
class StateId:
    """Refers to a second-sort element by position (needed when extensions repeat)."""

    index: int


def _resolve(struct: Structure, var: Var, value):
    if var.sort == WORLD:
        if isinstance(value, tuple) and value[:1] == ("w",):
            return value[1]
        return struct.world_index(value)
    if isinstance(value, StateId):
        if not 0 <= value.index < len(struct.states):
            raise ModelError(f"state id {value.index} out of range")
        return value.index
    if isinstance(value, tuple) and value[:1] == ("s",):
        return value[1]
    return struct.state_id(value)


class _Evaluator:
    def __init__(self, struct: Structure):
        self.st = struct
        self.val = dict(zip(struct.atoms, struct.valuation))
        self.agent = {a: i for i, a in enumerate(struct.agents)}
        self.domain = {WORLD: range(struct.n), STATE: range(len(struct.states))}
        self.memo = {}
        self.fv = {}

    def free(self, f):
        key = id(f)
        if key not in self.fv:
            self.fv[key] = (f, tuple(sorted(free_vars(f), key=lambda v: (v.name, v.sort))))
        return self.fv[key][1]

    def ev(self, f, env):
        fv = self.free(f)
        key = (id(f), tuple(env[v] for v in fv))
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._ev(f, env)
        return hit

    def _ev(self, f, env):
        st = self.st
        if isinstance(f, ERel):
            a = self.agent.get(f.agent)
            if a is None:
                raise SignatureError(f"agent {f.agent!r} not in the structure")
            return env[f.s] in st.edges[a][env[f.w]]
        if isinstance(f, Eps):
            return bool(st.states[env[f.s]] >> env[f.w] & 1)
        if isinstance(f, Pred):
            v = self.val.get(f.atom)
            if v is None:
                raise SignatureError(f"atom {f.atom!r} not in the structure")
            return bool(v >> env[f.w] & 1)
        if isinstance(f, Eq):
            return env[f.x] == env[f.y]
        if isinstance(f, FBot):
            return False
        if isinstance(f, FNot):
            return not self.ev(f.body, env)
        if isinstance(f, FAnd):
            return self.ev(f.left, env) and self.ev(f.right, env)
        if isinstance(f, FOr):
            return self.ev(f.left, env) or self.ev(f.right, env)
        if isinstance(f, FImplies):
            return not self.ev(f.left, env) or self.ev(f.right, env)
        if isinstance(f, FIff):
            return self.ev(f.left, env) == self.ev(f.right, env)
        if isinstance(f, _QUANT):
            want = isinstance(f, Exists)
            inner = dict(env)
            for x in self.domain[f.var.sort]:
                inner[f.var] = x
                if self.ev(f.body, inner) == want:
                    return want
            return not want
        raise TypeError(f"not an FO formula: {f!r}")


def fo_eval(struct: Structure, psi: FO, assignment: Optional[Mapping] = None) -> bool:
    """Tarskian truth of ``psi`` in a finite two-sorted structure.

    ``assignment`` maps variables (or their names) to elements: worlds by
    name or index, states by mask, by an iterable of world names, or by
    :class:`StateId`.
    """
    psi = expand(psi)
    assignment = dict(assignment or {})
    env = {}
    for v in free_vars(psi):
        if v in assignment:
            value = assignment[v]
        elif v.name in assignment:
            value = assignment[v.name]
        else:
            raise FOError(f"free variable {v.name} is unassigned")
        env[v] = _resolve(struct, v, value)
    return _Evaluator(struct).ev(psi, env)


# --- Ehrenfeucht-Fraisse games ------------------------------------------------

def _elements(struct):
    return [("w", i) for i in range(struct.n)] + [("s", j) for j in range(len(struct.states))]


class _Sig:
    """Atomic facts about elements of one structure, over a shared vocabulary."""

    def __init__(self, struct, atoms, agents):
        self.struct = struct
        val = dict(zip(struct.atoms, struct.valuation))
        self.atoms = tuple(tuple(bool(val.get(p, 0) >> i & 1) for p in atoms)
                           for i in range(struct.n))
        ix = {a: k for k, a in enumerate(struct.agents)}
        self.edges = [struct.edges[ix[a]] if a in ix else None for a in agents]

    def unary(self, x):
        return (x[0], self.atoms[x[1]] if x[0] == "w" else None)

    def binary(self, x, y):
        if x[0] == "w" and y[0] == "s":
            e = tuple(row is not None and y[1] in row[x[1]] for row in self.edges)
            return (e, bool(self.struct.states[y[1]] >> x[1] & 1))
        return None


def _partial_iso(SA, SB, pairs):
    for i, (x, y) in enumerate(pairs):
        if SA.unary(x) != SB.unary(y):
            return False
        for x2, y2 in pairs[i + 1:]:
            if (x == x2) != (y == y2):
                return False
            if SA.binary(x, x2) != SB.binary(y, y2) or SA.binary(x2, x) != SB.binary(y2, y):
                return False
    return True


def _element(struct, e):
    if isinstance(e, tuple) and len(e) == 2 and e[0] in ("w", "s"):
        return e
    if isinstance(e, StateId):
        return ("s", e.index)
    if isinstance(e, str):
        return ("w", struct.world_index(e))
    raise FOError(f"cannot read {e!r} as an element; use a world name, ('w', i), ('s', j) or StateId")


def fo_ef_equiv(A: Structure, a: Sequence, B: Structure, b: Sequence, q: int,
                cap: int = EF_CAP, max_rounds: int = 3) -> bool:
    """Whether the duplicator wins the q-round two-sorted EF game from (a; b)."""
    if q > max_rounds:
        raise CapExceeded(f"{q} rounds exceed the EF round cap {max_rounds}")
    size = A.n + len(A.states) + B.n + len(B.states)
    if size > cap:
        raise CapExceeded(f"{size} elements exceed the EF cap {cap}")
    if len(a) != len(b):
        raise FOError("distinguished tuples differ in length")
    atoms = tuple(A.atoms) + tuple(p for p in B.atoms if p not in A.atoms)
    agents = tuple(A.agents) + tuple(x for x in B.agents if x not in A.agents)
    SA, SB = _Sig(A, atoms, agents), _Sig(B, atoms, agents)
    EA, EB = _elements(A), _elements(B)
    start = tuple((_element(A, x), _element(B, y)) for x, y in zip(a, b))
    memo = {}

    def wins(pairs, k):
        key = (frozenset(pairs), k)
        if key in memo:
            return memo[key]
        out = _partial_iso(SA, SB, list(pairs))
        if out and k:
            for x in EA:
                if not any(y[0] == x[0] and wins(pairs + ((x, y),), k - 1) for y in EB):
                    out = False
                    break
            if out:
                for y in EB:
                    if not any(x[0] == y[0] and wins(pairs + ((x, y),), k - 1) for x in EA):
                        out = False
                        break
        memo[key] = out
        return out

    return wins(start, q)


# --- Gaifman neighbourhoods ---------------------------------------------------

def _point_element(struct, x):
    if isinstance(x, tuple) and len(x) == 2 and x[0] in ("w", "s"):
        return x
    if isinstance(x, tuple) and len(x) == 2 and x[0] in ("world", "state"):
        if x[0] == "world":
            return ("w", struct.world_index(x[1]))
        return ("s", struct.state_id(x[1]))
    if isinstance(x, StateId):
        return ("s", x.index)
    if isinstance(x, (str, int)):
        return ("w", struct.world_index(x))
    return ("s", struct.state_id(x))


def neighbourhood(struct: Structure, x, ell: int, drop_empty: bool = False):
    """Induced substructure on elements within Gaifman distance ``ell`` of ``x``.

    Returns ``(substructure, point)`` with the point as ``("w", i)`` or
    ``("s", j)`` in the new indexing. With ``drop_empty`` the distances are
    measured without the empty state, which is then added back if present.
    The result is a :class:`RelationalModel` when the input is one and the
    restriction passes relational validation; otherwise a plain structure.
    """
    if ell < 0:
        raise ValueError("radius must be non-negative")
    p = _point_element(struct, x)
    adj = gaifman_adjacency(struct, drop_empty=drop_empty)
    near = distances(adj, [p], ell)
    if drop_empty:
        near.update({("s", j): None for j, s in enumerate(struct.states) if s == 0})
    sub = induced(struct, near)
    new_p = _reindex_point(struct, near, p)
    if isinstance(struct, RelationalModel) and (drop_empty or (ell and ell % 2 == 0)):
        cand = RelationalModel(sub.worlds, sub.agents, sub.atoms, sub.states, sub.edges,
                               sub.valuation, sub.name)
        if validate(cand, "relational-valid").ok:
            return cand, new_p
    return sub, new_p


def induced(struct: Structure, keep) -> Structure:
    worlds = [i for i in range(struct.n) if ("w", i) in keep]
    states = [j for j in range(len(struct.states)) if ("s", j) in keep]
    wmap = {i: k for k, i in enumerate(worlds)}
    smap = {j: k for k, j in enumerate(states)}

    def remap(mask):
        out = 0
        for i in bits(mask):
            if i in wmap:
                out |= 1 << wmap[i]
        return out

    edges = tuple(
        tuple(frozenset(smap[j] for j in row[i] if j in smap) for i in worlds)
        for row in struct.edges
    )
    return Structure(tuple(struct.worlds[i] for i in worlds), struct.agents, struct.atoms,
                     tuple(remap(struct.states[j]) for j in states), edges,
                     tuple(remap(v) for v in struct.valuation), struct.name)


def _reindex_point(struct, keep, p):
    if p[0] == "w":
        return ("w", sum(1 for i in range(p[1]) if ("w", i) in keep))
    return ("s", sum(1 for j in range(p[1]) if ("s", j) in keep))


def local_equiv(A: Structure, a, B: Structure, b, ell: int, r: int, **kw) -> bool:
    """ℓ-local r-equivalence: EF game on the ℓ-neighbourhoods of the points."""
    NA, pa = neighbourhood(A, a, ell)
    NB, pb = neighbourhood(B, b, ell)
    return fo_ef_equiv(NA, [pa], NB, [pb], r, **kw)


# --- s-expression reader ------------------------------------------------------

_SEXPR_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def _sexpr_tokens(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _SEXPR_TOKEN.match(text, pos)
        if not m:
            raise FOError(f"cannot read FO text at position {pos}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_sexpr(text: str) -> FO:
    """Read the s-expression form printed by :func:`to_sexpr`.

    Free variables get their sort from the position they occur in; in
    equalities a free variable is a world variable unless its name starts
    with ``s`` or ``t``.
    """
    toks = _sexpr_tokens(text)
    pos = [0]

    def take():
        if pos[0] >= len(toks):
            raise FOError("unexpected end of FO text")
        tok = toks[pos[0]]
        pos[0] += 1
        return tok

    def var(name, sort, scope):
        if name in scope:
            v = scope[name]
            if sort is not None and v.sort != sort:
                raise FOError(f"variable {name} used as {sort} but bound as {v.sort}")
            return v
        if sort is None:
            sort = STATE if name[:1] in ("s", "t") else WORLD
        return Var(name, sort)

    def expr(scope):
        tok = take()
        if tok == "bot":
            return FBot()
        if tok != "(":
            raise FOError(f"unexpected token {tok!r}")
        head = take()
        if head in ("forall", "exists"):
            name, _, sort = take().partition(":")
            if sort not in (WORLD, STATE):
                raise FOError(f"quantified variable {name!r} needs a sort, e.g. {name}:world")
            v = Var(name, sort)
            body = expr({**scope, name: v})
            out = (Forall if head == "forall" else Exists)(v, body)
        elif head == "not":
            out = FNot(expr(scope))
        elif head in ("and", "or", "->", "<->"):
            cls = {"and": FAnd, "or": FOr, "->": FImplies, "<->": FIff}[head]
            out = cls(expr(scope), expr(scope))
        elif head == "eps":
            out = Eps(var(take(), WORLD, scope), var(take(), STATE, scope))
        elif head == "subseteq":
            out = Subseteq(var(take(), STATE, scope), var(take(), STATE, scope))
        elif head == "=":
            out = Eq(var(take(), None, scope), var(take(), None, scope))
        elif head.startswith("E_"):
            out = ERel(head[2:], var(take(), WORLD, scope), var(take(), STATE, scope))
        elif head.startswith("e_"):
            out = EMacro(head[2:], var(take(), WORLD, scope), var(take(), STATE, scope))
        elif head.startswith("P_"):
            out = Pred(head[2:], var(take(), WORLD, scope))
        else:
            raise FOError(f"unknown FO head {head!r}")
        if take() != ")":
            raise FOError(f"expected ')' after {head}")
        return out

    out = expr({})
    if pos[0] != len(toks):
        raise FOError("trailing tokens after FO formula")
    return out

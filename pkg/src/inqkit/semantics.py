"""Support and truth for InqML over finite inquisitive models."""
from .bitset import bits, subsets
from .errors import CapExceeded, SignatureError, UnsupportedFormula
from .formula import (And, Atom, Bottom, Box, BoxPlus, Formula, IDisj, Implies,
                      agents_of, atoms_of, has_kind, is_flat_syntax)
from .model import InqModel, KripkeModel, as_inq

TRUTH_CONDITIONAL_CAP = 12


def check_signature(M, phi: Formula):
    missing = atoms_of(phi) - set(M.atoms)
    if missing:
        raise SignatureError(f"atoms not in the model signature: {sorted(missing)}")
    missing = agents_of(phi) - set(M.agents)
    if missing:
        raise SignatureError(f"agents not in the model signature: {sorted(missing)}")


class Evaluator:
    """Support relation of one model, memoised on (subformula, state).

    With ``shortcuts`` off every clause is evaluated as stated: implication
    ranges over all substates and the inquisitive box over all members of
    Σ_a(w). With shortcuts on, formulae that are syntactically flat are
    decided world by world and the inquisitive box only inspects maximal
    members (both sound by persistency).
    """

    def __init__(self, M: InqModel, shortcuts: bool = True):
        self.M = as_inq(M)
        self.shortcuts = shortcuts
        self._memo = {}
        self._flat = {}
        self._val = dict(zip(self.M.atoms, self.M.valuation))
        self._sigma = [[st.union() for st in row] for row in self.M.sigma_table]
        self._agent = {a: i for i, a in enumerate(self.M.agents)}

    def supports(self, s: int, phi: Formula) -> bool:
        key = (phi, s)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._support(s, phi)
        return hit

    def truth(self, w: int, phi: Formula) -> bool:
        return self.supports(1 << w, phi)

    def _support(self, s, phi):
        if self.shortcuts and s & (s - 1) and is_flat_syntax(phi, self._flat):
            return all(self.supports(1 << w, phi) for w in bits(s))
        if isinstance(phi, Atom):
            v = self._val.get(phi.name)
            if v is None:
                raise SignatureError(f"atom {phi.name!r} not in the model signature")
            return s & ~v == 0
        if isinstance(phi, Bottom):
            return s == 0
        if isinstance(phi, And):
            return self.supports(s, phi.left) and self.supports(s, phi.right)
        if isinstance(phi, IDisj):
            return self.supports(s, phi.left) or self.supports(s, phi.right)
        if isinstance(phi, Implies):
            return all(not self.supports(t, phi.left) or self.supports(t, phi.right)
                       for t in subsets(s))
        if isinstance(phi, Box):
            a = self._agent_ix(phi.agent)
            return all(self.supports(self._sigma[a][w], phi.body) for w in bits(s))
        if isinstance(phi, BoxPlus):
            a = self._agent_ix(phi.agent)
            for w in bits(s):
                st = self.M.sigma_table[a][w]
                family = st.maximal if self.shortcuts else st.members()
                if not all(self.supports(t, phi.body) for t in family):
                    return False
            return True
        raise TypeError(f"not a formula: {phi!r}")

    def _agent_ix(self, a):
        try:
            return self._agent[a]
        except KeyError:
            raise SignatureError(f"agent {a!r} not in the model signature") from None


def supports(M, s, phi: Formula, shortcuts: bool = True) -> bool:
    M = as_inq(M)
    check_signature(M, phi)
    return Evaluator(M, shortcuts).supports(M.state(s), phi)


def truth(M, w, phi: Formula, shortcuts: bool = True) -> bool:
    M = as_inq(M)
    check_signature(M, phi)
    return Evaluator(M, shortcuts).truth(M.world_index(w), phi)


def is_truth_conditional(M, phi: Formula, cap: int = TRUTH_CONDITIONAL_CAP) -> bool:
    """Whether support of ``phi`` in ``M`` reduces to truth at each world."""
    M = as_inq(M)
    if M.n > cap:
        raise CapExceeded(f"{M.n} worlds exceeds the truth-conditionality cap {cap}")
    check_signature(M, phi)
    ev = Evaluator(M, shortcuts=False)
    true_at = 0
    for w in range(M.n):
        if ev.truth(w, phi):
            true_at |= 1 << w
    return all(ev.supports(s, phi) == (s & ~true_at == 0) for s in range(1 << M.n))


def kripke_truth(K: KripkeModel, w, phi: Formula) -> bool:
    """Standard Kripke truth; only for formulae without ⫾ and ⊞."""
    if has_kind(phi, IDisj, BoxPlus):
        raise UnsupportedFormula("Kripke evaluation rejects inquisitive disjunction and ⊞")
    check_signature(K, phi)
    val = dict(zip(K.atoms, K.valuation))
    agent = {a: i for i, a in enumerate(K.agents)}
    memo = {}

    def ev(u, f):
        key = (f, u)
        if key in memo:
            return memo[key]
        if isinstance(f, Atom):
            out = bool(val[f.name] >> u & 1)
        elif isinstance(f, Bottom):
            out = False
        elif isinstance(f, And):
            out = ev(u, f.left) and ev(u, f.right)
        elif isinstance(f, Implies):
            out = not ev(u, f.left) or ev(u, f.right)
        elif isinstance(f, Box):
            out = all(ev(v, f.body) for v in bits(K.R[agent[f.agent]][u]))
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[key] = out
        return out

    return ev(K.world_index(w), phi)

import pytest

from inqkit.model import InqModel, InqState, RelationalModel, build_model, encode_relational
from inqkit.transforms import stratify
from inqkit.validate import validate


def _rel(states, edges, worlds=("x", "y")):
    return RelationalModel(tuple(worlds), ("a",), ("p",), tuple(states),
                           (tuple(frozenset(e) for e in edges),), (0b01,), "R")


def test_relational_conditions():
    good = _rel([0, 0b01, 0b10], [{0, 1}, {0, 2}])
    assert validate(good, "relational-valid").ok
    rep = validate(_rel([0, 0b01, 0b01], [{0, 1}, {0, 2}]), "relational-valid")
    assert not rep and rep.witness.startswith("extensionality")
    rep = validate(_rel([0, 0b11], [{0, 1}, {0, 1}]), "relational-valid")
    assert rep.witness.startswith("local powerset")
    rep = validate(_rel([0, 0b01, 0b10], [{0, 1}, set()]), "relational-valid")
    assert rep.witness.startswith("non-emptiness")
    rep = validate(_rel([0, 0b01, 0b10], [{1}, {0, 2}]), "relational-valid")
    assert rep.witness.startswith("downward closure")
    assert not validate(_rel([0, 0b01, 0b10], [{1}, {0, 2}]), "downward-closed").ok


def test_inquisitive_models_are_valid(ex1):
    assert validate(ex1, "relational-valid").ok
    assert validate(ex1, "downward-closed").ok


def test_s5(ex1, m1):
    assert validate(ex1, "s5").ok
    rep = validate(m1, "s5")
    # σ(u2) = {v,u} does not contain u2
    assert not rep.ok and "factivity" in rep.witness
    M = build_model(["x", "y"], ["a"], [], {("a", "x"): [["x", "y"]], ("a", "y"): [["x"], ["y"]]}, {})
    assert "introspection" in validate(M, "s5").witness


def test_rich(ex1):
    assert not validate(ex1, "K-rich", K=2).ok
    assert validate(ex1, "K-rich", K=1).ok


def test_simple():
    # x and y are bisimilar, so {x} alone is not saturated
    M = build_model(["x", "y", "z"], ["a"], ["p"],
                    {("a", w): [["x", "z"], ["y"]] for w in "xyz"}, {"p": ["x", "y"]})
    rep = validate(M, "simple")
    assert not rep.ok and "saturated" in rep.witness
    M2 = build_model(["x", "y", "z"], ["a"], ["p"],
                     {("a", w): [["x", "y"], ["z"]] for w in "xyz"}, {"p": ["x", "y"]})
    assert validate(M2, "simple").ok
    # at granularity 0 only the valuation matters
    assert validate(M2, "simple", granularity=0).ok


def _two_agents(a_blocks, b_blocks, worlds):
    def rows(blocks):
        out = {}
        for blk in blocks:
            for w in blk:
                out[w] = InqState.from_states([sum(1 << worlds.index(v) for v in blk)])
        return tuple(out[w] for w in worlds)

    return InqModel(tuple(worlds), ("a", "b"), (), (rows(a_blocks), rows(b_blocks)), (), "T")


def test_acyclic():
    worlds = ["1", "2", "3", "4"]
    # a-class {1,2} and b-class {1,2} overlap in two worlds
    M = _two_agents([["1", "2"], ["3", "4"]], [["1", "2"], ["3"], ["4"]], worlds)
    assert "share" in validate(M, "N-acyclic", N=2).witness
    # a cycle 1 -a- 2 -b- 3 -a- 4 -b- 1 through four classes
    M = _two_agents([["1", "2"], ["3", "4"]], [["2", "3"], ["4", "1"]], worlds)
    assert not validate(M, "N-acyclic", N=4).ok
    assert validate(M, "N-acyclic", N=3).ok
    # a path, no cycle
    M = _two_agents([["1", "2"], ["3", "4"]], [["2", "3"], ["1"], ["4"]], worlds)
    assert validate(M, "N-acyclic", N=10).ok


def test_stratified(ex1):
    rel = encode_relational(ex1)
    assert not validate(rel, "stratified", ell=2, point="w_pq").ok
    out, P = stratify(ex1, "w_pq", 2)
    assert validate(out, "stratified", ell=2, point=P).ok
    out, P = stratify(ex1, ("state", ["w_pq", "w_Pq"]), 2)
    assert validate(out, "stratified", ell=2, point=P).ok


def test_unknown_property(ex1):
    with pytest.raises(ValueError):
        validate(ex1, "pretty")

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import naive_supports, random_formula, random_model, rng_for
from inqkit.bitset import subsets
from inqkit.errors import SignatureError, UnsupportedFormula
from inqkit.formula import is_flat_syntax, parse
from inqkit.model import kripke_reduct
from inqkit.semantics import Evaluator, is_truth_conditional, kripke_truth, supports, truth


def test_example_values(ex1):
    assert truth(ex1, "w_pq", parse("[+a]?q"))
    assert not truth(ex1, "w_pq", parse("[]?q"))
    assert truth(ex1, "w_pq", parse("[]p"))
    assert truth(ex1, "w_Pq", parse("![]?q & ![+a]?q"))
    assert not truth(ex1, "w_Pq", parse("[+a]?q"))
    # the p-worlds settle whether q once a's issue is resolved
    assert supports(ex1, ["w_pq"], parse("?q"))
    assert not supports(ex1, ["w_pq", "w_pQ"], parse("?q"))


@given(st.integers(0, 10_000))
def test_shortcuts_agree_with_reference(seed):
    rng = rng_for(seed)
    M = random_model(rng, max_n=4, agents=("a", "b"))
    phi = random_formula(rng, 2, agents=("a", "b"), size=5)
    fast, slow = Evaluator(M), Evaluator(M, shortcuts=False)
    for s in subsets((1 << M.n) - 1):
        expect = naive_supports(M, s, phi)
        assert fast.supports(s, phi) == expect
        assert slow.supports(s, phi) == expect


@given(st.integers(0, 10_000))
def test_truth_is_singleton_support(seed):
    rng = rng_for(seed)
    M = random_model(rng)
    phi = random_formula(rng, 2)
    for w in range(M.n):
        assert truth(M, w, phi) == supports(M, 1 << w, phi)


@given(st.integers(0, 10_000))
def test_flat_formulas_are_truth_conditional(seed):
    rng = rng_for(seed)
    M = random_model(rng)
    phi = random_formula(rng, 2)
    if is_flat_syntax(phi):
        assert is_truth_conditional(M, phi)


def test_questions_are_not_truth_conditional(ex1, m1):
    assert not is_truth_conditional(ex1, parse("?q"))
    assert is_truth_conditional(ex1, parse("[+a]?q"))
    assert is_truth_conditional(ex1, parse("p"))
    # {v,u} supports neither p nor its negation
    assert not is_truth_conditional(m1, parse("?p"))


def test_kripke_truth_rejects_inquisitive_operators(ex1):
    K = kripke_reduct(ex1)
    with pytest.raises(UnsupportedFormula):
        kripke_truth(K, 0, parse("?p"))
    with pytest.raises(UnsupportedFormula):
        kripke_truth(K, 0, parse("[+a]p"))
    assert kripke_truth(K, 0, parse("[]p"))


def test_signature_errors(ex1):
    with pytest.raises(SignatureError):
        truth(ex1, "w_pq", parse("r"))
    with pytest.raises(SignatureError):
        truth(ex1, "w_pq", parse("[b]p", ["a", "b"]))

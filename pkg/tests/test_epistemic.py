import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import threshold_by_terms
from inqkit.epistemic import (a_class, a_classes, local_a_structure, threshold_eq,
                              threshold_equiv)
from inqkit.errors import S5Error


def test_a_classes(ex1):
    assert a_classes(ex1, "a") == [ex1.state(["w_pq", "w_pQ"]), ex1.state(["w_Pq", "w_PQ"])]
    assert a_class(ex1, "a", "w_PQ") == ex1.state(["w_Pq", "w_PQ"])


def test_non_s5_rejected(m1):
    with pytest.raises(S5Error):
        a_classes(m1, "a")


def test_local_structure(ex1):
    L = local_a_structure(ex1, "a", "w_pq")
    assert L.carrier == ex1.state(["w_pq", "w_pQ"])
    assert L.inqstate == ex1.Sigma("a", "w_pq")
    # colours are model-wide ids in world order
    assert L.colouring == {0: 0, 1: 1}
    assert L.colours(L.carrier) == {0, 1}
    assert L.multiplicity(L.carrier) == {0: 1, 1: 1}
    L2 = local_a_structure(ex1, "a", "w_Pq", granularity=0)
    assert L2.colouring == {2: 2, 3: 3}


def test_threshold_eq():
    assert threshold_eq(3, 3, 10)
    assert threshold_eq(5, 9, 4)
    assert not threshold_eq(2, 9, 4)



@given(st.integers(0, 6), st.integers(0, 6), st.integers(1, 3), st.integers(0, 4), st.data())
def test_threshold_against_term_enumeration(nu, nu2, k, d, data):
    U, U2 = list(range(nu)), list(range(nu2))
    P = [data.draw(st.lists(st.sampled_from(U), unique=True)) if U else [] for _ in range(k)]
    Q = [data.draw(st.lists(st.sampled_from(U2), unique=True)) if U2 else [] for _ in range(k)]
    assert threshold_equiv(U, P, U2, Q, d) == threshold_by_terms(U, P, U2, Q, d)


def test_threshold_errors():
    with pytest.raises(ValueError):
        threshold_equiv([1], [[1]], [1], [], 1)
    with pytest.raises(ValueError):
        threshold_equiv([1], [[2]], [1], [[1]], 1)


def test_threshold_examples():
    # sizes 3 and 5 (complements 1 and 1) agree up to threshold 3 but not 4
    assert threshold_equiv(range(4), [[0, 1, 2]], range(6), [[0, 1, 2, 3, 4]], 3)
    assert not threshold_equiv(range(4), [[0, 1, 2]], range(6), [[0, 1, 2, 3, 4]], 4)
    assert threshold_equiv(range(8), [[0, 1, 2]], range(9), [[0, 1, 2, 3, 4]], 3)

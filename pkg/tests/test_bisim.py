from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import naive_game, naive_state_game, permuted, random_model, rng_for
from inqkit.bisim import (StateNode, WorldNode, check_transcript, classes, compute_layers,
                          distinguishing_play, equiv, format_transcript, is_world_bisimulation)
from inqkit.bitset import subsets
from inqkit.errors import ModelError
from inqkit.model import PointedModel
from inqkit.transforms import rich_cover


@given(st.integers(0, 10_000))
def test_layers_match_naive_game(seed):
    rng = rng_for(seed)
    M = random_model(rng, max_n=3, atoms=("p",))
    N = random_model(rng, max_n=3, atoms=("p",))
    rel = compute_layers(M, N, 2)
    for n in (0, 1, 2):
        for w, v in product(range(M.n), range(N.n)):
            assert rel.related(n, w, v) == naive_game(M, w, N, v, n)


@given(st.integers(0, 10_000))
def test_lifting_matches_naive_state_game(seed):
    rng = rng_for(seed)
    M = random_model(rng, max_n=3, atoms=("p",))
    N = random_model(rng, max_n=3, atoms=("p",))
    rel = compute_layers(M, N, 1)
    for s, t in product(subsets((1 << M.n) - 1), subsets((1 << N.n) - 1)):
        assert rel.lifted(1, s, t) == naive_state_game(M, s, N, t, 1)


@given(st.integers(0, 10_000))
def test_layers_shrink_and_stabilise(seed):
    rng = rng_for(seed)
    M, N = random_model(rng), random_model(rng)
    rel = compute_layers(M, N, "fixpoint")
    assert rel.stable
    for i in range(1, len(rel.layers)):
        assert all(a & ~b == 0 for a, b in zip(rel.layers[i], rel.layers[i - 1]))
    assert rel.layer("full") == rel.layers[-1]


def test_permutation_is_full_bisimilar(rng):
    for _ in range(20):
        M = random_model(rng)
        perm = list(range(M.n))
        rng.shuffle(perm)
        N = permuted(M, perm)
        for w in range(M.n):
            assert equiv(PointedModel(M, w), PointedModel(N, perm[w]), "full")


def test_cover_projection_is_a_bisimulation(rng):
    for _ in range(20):
        M = random_model(rng)
        c = rich_cover(M, 2)
        pairs = [(t, c.projection[t]) for t in range(c.target.n)]
        assert is_world_bisimulation(c.target, M, pairs)
        if M.n > 1:
            # moving one pair breaks it unless the two images happen to agree
            bad = list(pairs)
            t, w = bad[0]
            w2 = (w + 1) % M.n
            bad[0] = (t, w2)
            if not equiv(PointedModel(M, w), PointedModel(M, w2), "full"):
                assert not is_world_bisimulation(c.target, M, bad)


def test_classes_ids_by_first_occurrence(m1):
    assert classes(m1, 0) == (0, 1, 1)
    assert classes(m1, "fixpoint") == (0, 1, 1)


def test_neighbourhood_contrast_transcript(m1, m2):
    P, Q = PointedModel.world(m1, "v"), PointedModel.world(m2, "v")
    assert equiv(P, Q, 0)
    assert not equiv(P, Q, 1)
    assert distinguishing_play(P, Q, 0) is None
    tree = distinguishing_play(P, Q, 1)
    assert isinstance(tree, WorldNode)
    assert check_transcript(P, Q, 1, tree)
    lines = format_transcript(tree, m1, m2)
    assert lines and "I wins" in lines[-1]


def _tamper(node):
    """Drop one duplicator answer from the first state move found."""
    if isinstance(node, WorldNode) and node.responses:
        if len(node.responses) > 1:
            node.responses = node.responses[1:]
            return True
        return _tamper(node.responses[0])
    if isinstance(node, StateNode) and node.replies:
        return _tamper(node.replies[0])
    return False


def test_transcripts_for_random_pairs(rng):
    found = 0
    for _ in range(200):
        M = random_model(rng, max_n=3, atoms=("p",))
        N = random_model(rng, max_n=3, atoms=("p",))
        for n in (1, 2):
            for w, v in product(range(M.n), range(N.n)):
                P, Q = PointedModel(M, w), PointedModel(N, v)
                tree = distinguishing_play(P, Q, n)
                assert (tree is None) == equiv(P, Q, n)
                if tree is not None:
                    found += 1
                    assert check_transcript(P, Q, n, tree)
                    if _tamper(tree):
                        assert not check_transcript(P, Q, n, tree)
    assert found > 50


def test_state_pointed_transcript(m1, m2):
    P = PointedModel.state(m1, ["v", "u"])
    Q = PointedModel.state(m2, ["v", "u"])
    assert not equiv(P, Q, 1)
    tree = distinguishing_play(P, Q, 1)
    assert isinstance(tree, StateNode)
    assert check_transcript(P, Q, 1, tree)


def test_mixed_kinds_rejected(m1):
    with pytest.raises(ModelError):
        equiv(PointedModel(m1, 0), PointedModel(m1, 1, "state"), 1)

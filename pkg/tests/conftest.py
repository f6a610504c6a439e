"""Shared builders for the spec corpus the test suite exercises.

Small by design: every semilattice has at most 8 indices and every
component at most a handful of matrix blocks, so exhaustive basis checks
stay fast.
"""

import numpy as np
import pytest

from gradedcstar import findim as fd
from gradedcstar import graded as gr
from gradedcstar import semilattice as sl

SCALAR = fd.AlgebraShape([1])
M2 = fd.AlgebraShape([2])


def unital_embedding(target_shape):
    """lambda -> lambda * unit, the unique unital hom out of the scalars."""
    col = fd.to_vector(fd.unit(target_shape)).reshape(-1, 1)
    return fd.StarHom(SCALAR, target_shape, col)


def all_scalar_spec(L):
    """Every component the scalars, every structure map the identity."""
    phi = {pair: fd.identity_hom(SCALAR) for pair in L.comparable_pairs()}
    return gr.GradedSpec(L, [SCALAR] * L.n, phi)


def m2_chain_spec():
    """Two-element chain: scalars on top, M_2 below, unital embedding."""
    L = sl.chain(2)
    return gr.GradedSpec(L, [M2, SCALAR], {(0, 1): unital_embedding(M2)})


def mixed_diamond_spec():
    """Diamond with noncommutative components.

    Top and one middle index carry the scalars, the other middle index and
    the bottom carry M_2; all maps into M_2 are the unital embedding and
    the two M_2 components are linked by the identity.
    """
    L = sl.diamond()
    a, b = L.index_of("a"), L.index_of("b")
    bot, top = L.index_of("0"), L.index_of("1")
    comps = [None] * 4
    comps[bot], comps[a], comps[b], comps[top] = M2, M2, SCALAR, SCALAR
    phi = {
        (a, top): unital_embedding(M2),
        (b, top): fd.identity_hom(SCALAR),
        (bot, top): unital_embedding(M2),
        (bot, a): fd.identity_hom(M2),
        (bot, b): unital_embedding(M2),
    }
    return gr.GradedSpec(L, comps, phi)


def block_chain_spec():
    """Chain with a two-block bottom component (M_2 + scalars)."""
    L = sl.chain(2)
    bottom = fd.AlgebraShape([2, 1])
    return gr.GradedSpec(L, [bottom, SCALAR], {(0, 1): unital_embedding(bottom)})


def standard_corpus():
    """Named valid specs used across the behavioural tests."""
    corpus = {
        "all-scalar-diamond": all_scalar_spec(sl.diamond()),
        "all-scalar-antichain3": all_scalar_spec(sl.antichain_with_bottom(3)),
        "m2-chain": m2_chain_spec(),
        "mixed-diamond": mixed_diamond_spec(),
        "block-chain": block_chain_spec(),
    }
    for n in range(2, 9):
        corpus[f"all-scalar-chain{n}"] = all_scalar_spec(sl.chain(n))
    return corpus


@pytest.fixture(scope="session")
def corpus():
    return standard_corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)

import random

import pytest

from valring.algebra import UniPoly, ValuedFieldCtx
from valring.keychain import build_chain

CTX2 = ValuedFieldCtx(2)

GA = UniPoly((3, 0, 1))            # x^2 + 3
GB = UniPoly((1, -1, 1))           # x^2 - x + 1
GC = UniPoly((7, 0, 1))            # x^2 + 7, split branch eta = 3 mod 8
GD = UniPoly((3, 8, 5, 2, 1))      # x^4 + 2x^3 + 5x^2 + 8x + 3

BRANCH_C = [[0, 0]]


@pytest.fixture(scope="session")
def ctx():
    return CTX2


@pytest.fixture(scope="session")
def chain_a():
    return build_chain(CTX2, GA, "unique")


@pytest.fixture(scope="session")
def chain_a_collapsed():
    return build_chain(CTX2, GA, "unique", mode="collapsed")


@pytest.fixture(scope="session")
def chain_b():
    return build_chain(CTX2, GB, "unique")


@pytest.fixture(scope="session")
def chain_c():
    return build_chain(CTX2, GC, BRANCH_C, depth=4)


@pytest.fixture(scope="session")
def chain_c6():
    return build_chain(CTX2, GC, BRANCH_C, depth=6)


@pytest.fixture(scope="session")
def chain_d():
    return build_chain(CTX2, GD, "unique")


@pytest.fixture(scope="session")
def all_chains(chain_a, chain_b, chain_c, chain_d):
    return {"A": chain_a, "B": chain_b, "C": chain_c, "D": chain_d}


def rand_unipoly(rng: random.Random, max_deg: int, height: int = 2 ** 16) -> UniPoly:
    deg = rng.randrange(0, max_deg + 1)
    coeffs = [rng.randrange(-height, height + 1) for _ in range(deg + 1)]
    return UniPoly(coeffs)


def rand_xpoly(rng: random.Random, positions, max_exp=2, n_terms=4, height=16):
    from valring.xpoly import XPoly
    terms = {}
    for _ in range(n_terms):
        mono = {}
        for k in positions:
            e = rng.randrange(0, max_exp + 1)
            if e:
                mono[k] = e
        key = tuple(sorted(mono.items()))
        terms[key] = terms.get(key, 0) + rng.randrange(-height, height + 1)
    return XPoly(terms)

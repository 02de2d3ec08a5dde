"""The test corpus: fixture coalgebras and the comodules drawn over them."""

from functools import lru_cache

from artifact.exactla import field as make_field
from artifact.coalg import fixture
from artifact.comod import trivial_comodule, coalgebra_as_comodule, cofree

import gen

COALGEBRAS = ("unit", "C2", "C2x4")
LIGHT_FIELDS = ("F2", "F3", "F5", "Q", "F2xF3")
HEAVY_FIELDS = ("F2", "F3", "F2xF3")
COFREE_SEED = 11
RANDOM_COUNT = 3


@lru_cache(maxsize=None)
def coalgebra(name, F):
    return fixture(name, F)


@lru_cache(maxsize=None)
def random_seeds(name):
    return tuple(gen.matched_seeds(name, RANDOM_COUNT))


def random_comodule(name, F, seed):
    C = coalgebra(name, F)
    if C.field.is_product:
        parts = [random_comodule(name, f.name, seed) for f in C.field.factors]
        return gen.join_comodules(C, parts, f"random{seed}")
    return _random_single(name, F, seed)


@lru_cache(maxsize=None)
def _random_single(name, F, seed):
    return gen.random_comodule(coalgebra(name, F), seed)


@lru_cache(maxsize=None)
def members(name, F, randoms=True):
    """[(label, comodule)]: trivial, cofree on a random complex, C itself, random comodules."""
    C = coalgebra(name, F)
    out = [("k", trivial_comodule(C)),
           ("cofree", _named(cofree(gen.random_cogenerator(F, COFREE_SEED), C), "cofree")),
           ("C", coalgebra_as_comodule(C))]
    if randoms:
        out += [(f"random{s}", random_comodule(name, F, s)) for s in random_seeds(name)]
    return tuple(out)


def pairs(name, F):
    """Cotor pairs drawn from {k, cofree, C}."""
    ms = dict(members(name, F, randoms=False))
    return [(a, b, ms[a], ms[b]) for a in ms for b in ms]


def _named(X, name):
    X.name = name
    return X


def factor_names(F):
    Fs = make_field(F)
    return [f.name for f in Fs.factors] if Fs.is_product else [Fs.name]

"""Regenerate tests/golden/*.json: python3 tests/make_golden.py"""

import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from artifact.exactla import field
from artifact.chain import sphere, disk, direct_sum
from artifact.coalg import fixture
from artifact.comod import trivial_comodule, coalgebra_as_comodule, cofree, gamma_comodule
from artifact.simplicial import gamma
from artifact.postnikov import build_tower
from artifact.derived import cotor_table
from artifact.codec import encode

import gen

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
COALGEBRA_FIELDS = [("unit", "F2"), ("C2", "F2"), ("C2", "F3"), ("C2", "F5"), ("C2", "Q"),
                    ("C2x4", "F2"), ("C2x4", "F3"), ("C2x4", "Q"), ("product-demo", "F2xF3")]


def fixture_documents(name, F):
    C = fixture(name, F)
    k = trivial_comodule(C)
    yield "coalgebra", C
    yield "k", k
    yield "C", coalgebra_as_comodule(C)
    yield "cofree", cofree(sphere(C.field, 1, 2), C)


def extra_documents():
    yield "field-F2xF3", field("F2xF3")
    yield "complex-Q", gen.random_complex("Q", 3)
    X = gen.random_complex("F5", 4)
    yield "map-F5", gen.random_chain_map(X, gen.random_complex("F5", 5), 4)
    S, _, _ = direct_sum(sphere(field("F2xF3"), 1, 1), disk(field("F2xF3"), 1, 3))
    yield "complex-F2xF3", S
    yield "simplicial-F3", gamma(sphere(field("F3"), 1, 2), 4)
    C = fixture("C2", "F2")
    yield "scomodule-C2-F2", gamma_comodule(trivial_comodule(C), 4)
    yield "tower-C2-F2", build_tower(cofree(sphere(C.field, 1, 2), C), 4)
    k = trivial_comodule(C)
    yield "table-C2-F2", cotor_table(k, k, 8, method="cobar")


def all_documents():
    for name, F in COALGEBRA_FIELDS:
        for what, obj in fixture_documents(name, F):
            yield f"{name}-{F}-{what}", obj
    yield from extra_documents()


def main():
    os.makedirs(GOLDEN, exist_ok=True)
    for stem, obj in all_documents():
        with open(os.path.join(GOLDEN, stem + ".json"), "w", encoding="utf-8") as fh:
            fh.write(encode(obj))
        print(stem)


if __name__ == "__main__":
    main()

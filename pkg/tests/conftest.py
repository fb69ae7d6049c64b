"""Shared fixtures: the nesting corpus, toy characters, and the model corpus.

The corpus covers nesting depth 0-3, product subdivergences, repeated
subdivergences (multiplicity) and an overlap-style generator whose structure
is deliberately incompatible with scale independence (for negative tests).

The characters in RG_CHARACTERS satisfy the pole relations that make
counterterms scale-independent (leading poles 1/n! for ladders, the
half-product rule for single nestings, and so on); those in BP_CHARACTERS are
only constrained by pole depth and exercise the Birkhoff machinery.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from feynhopf.hopf import Generator, Monomial, NestingSpec
from feynhopf.renorm import Character
from feynhopf.scalars import LaurentSeries

K = 16
P = 8


def series(terms) -> LaurentSeries:
    return LaurentSeries(terms, K, P)


def build_corpus() -> NestingSpec:
    a = Generator("a", 1)
    b = Generator("b", 1)
    c = Generator("c", 2)
    m2 = Generator("m2", 2, [(Monomial.of(a), b)])
    l2 = Generator("l2", 2, [(Monomial.of(a), a)])
    l3 = Generator("l3", 3, [(Monomial.of(a), l2), (Monomial.of(l2), a)])
    l4 = Generator("l4", 4, [(Monomial.of(a), l3), (Monomial.of(l2), l2),
                             (Monomial.of(l3), a)])
    d3 = Generator("d3", 3, [(Monomial.of(a), m2), (Monomial.of(a), m2),
                             (Monomial.of(a, a), b)])
    o3 = Generator("o3", 3, [(Monomial.of(b), c), (Monomial.of(c), b)])
    return NestingSpec([a, b, c, m2, l2, l3, d3, l4, o3])


CORPUS = build_corpus()


def _random_series(rng: random.Random, max_pole: int) -> LaurentSeries:
    terms = {}
    for k in range(-max_pole, 3):
        if rng.random() < 0.7:
            num = rng.randint(-6, 6)
            den = rng.randint(1, 4)
            if num:
                terms[k] = Fraction(num, den)
    if -max_pole not in terms:
        terms[-max_pole] = Fraction(rng.randint(1, 5), rng.randint(1, 3))
    return series(terms)


def random_character(seed: int, corpus: NestingSpec = CORPUS) -> Character:
    rng = random.Random(seed)
    return Character({g.gid: _random_series(rng, g.degree) for g in corpus},
                     K, P, label=f"random-{seed}")


def build_bp_characters() -> list:
    corpus = CORPUS
    simple = Character(
        {g.gid: series({-g.degree: 1, 0: Fraction(g.degree, 2)})
         for g in corpus}, K, P, label="simple")
    regular = Character(
        {g.gid: series({0: Fraction(2 + i, 3), 1: Fraction(i - 2)})
         for i, g in enumerate(corpus)}, K, P, label="regular")
    pure_pole = Character(
        {g.gid: series({-g.degree: Fraction(3, 2), -1: Fraction(-1)})
         for g in corpus}, K, P, label="pure-pole")
    return [simple, regular, pure_pole,
            random_character(11), random_character(23)]


BP_CHARACTERS = build_bp_characters()


def build_rg_ladder() -> tuple:
    """Exponential ladder: F(l_n) = 1/(n! eps^n), free tail on l4."""
    sub = NestingSpec([CORPUS.by_id[g] for g in ("a", "l2", "l3", "l4")])
    char = Character({
        "a": series({-1: 1}),
        "l2": series({-2: Fraction(1, 2)}),
        "l3": series({-3: Fraction(1, 6)}),
        "l4": series({-4: Fraction(1, 24), -1: Fraction(5), 0: Fraction(7)}),
    }, K, P, label="rg-ladder")
    return char, sub


def build_rg_rich() -> tuple:
    """Regular parts switched on; pole coefficients solve the
    scale-independence relations (half-product rule and its depth-2/3
    analogues, worked out by hand and pinned by the rg test suite)."""
    sub = NestingSpec([CORPUS.by_id[g]
                       for g in ("a", "b", "c", "m2", "l2", "l3", "d3")])
    char = Character({
        "a": series({-1: 1, 0: 2}),
        "b": series({-1: 1, 0: 1, 1: 1}),
        "c": series({-1: 2, 0: 1}),
        "m2": series({-2: Fraction(1, 2), -1: 4, 0: 1}),
        "l2": series({-2: Fraction(1, 2), -1: 3, 0: 2}),
        "l3": series({-3: Fraction(1, 6), -2: 2, -1: 1}),
        "d3": series({-3: Fraction(1, 3), -2: 5, -1: 2, 0: 1}),
    }, K, P, label="rg-rich")
    return char, sub


def build_rg_regular() -> tuple:
    sub = NestingSpec([CORPUS.by_id[g] for g in ("a", "l2", "l3")])
    char = Character({
        "a": series({0: 3, 1: 1}),
        "l2": series({0: Fraction(1, 2)}),
        "l3": series({1: 2}),
    }, K, P, label="rg-regular")
    return char, sub


def build_rg_negative() -> tuple:
    """Overlap-shaped nesting: no character with this structure and a
    nonzero leading pole can have scale-independent counterterms."""
    sub = NestingSpec([CORPUS.by_id[g] for g in ("b", "c", "o3")])
    char = Character({
        "b": series({-1: 1}),
        "c": series({-1: 1}),
        "o3": series({-3: 1, -2: 2, -1: 1}),
    }, K, P, label="rg-negative")
    return char, sub


@pytest.fixture(scope="session")
def corpus() -> NestingSpec:
    return CORPUS


@pytest.fixture(scope="session")
def bp_characters() -> list:
    return BP_CHARACTERS


@pytest.fixture(scope="session")
def rg_ladder():
    return build_rg_ladder()


@pytest.fixture(scope="session")
def rg_rich():
    return build_rg_rich()


@pytest.fixture(scope="session")
def rg_regular():
    return build_rg_regular()


@pytest.fixture(scope="session")
def rg_negative():
    return build_rg_negative()


# ---------------------------------------------------------------------------
# model corpus for the Feynman-theorem oracle
# ---------------------------------------------------------------------------

def build_model_corpus() -> list:
    """(name, model, max_total_order) triples; slot totals stay <= 12."""
    from feynhopf.amplitudes import InteractionModel, SymTensor
    from feynhopf.wick import BilinearForm, Covector

    F = Fraction
    corpus = []

    def add(name, dim, matrix, externals, vertices, max_order):
        bilinear = BilinearForm(tuple(tuple(F(x) for x in row)
                                      for row in matrix))
        forms = tuple(Covector(tuple(F(x) for x in comp))
                      for comp in externals)
        tensors = {m: SymTensor(m, dim, {idx: F(v) for idx, v in cmap.items()})
                   for m, cmap in vertices.items()}
        corpus.append((name, InteractionModel(bilinear, forms, tensors),
                       max_order))

    add("phi3-1d-vacuum", 1, [[1]], [], {3: {(0, 0, 0): 1}}, 2)
    add("phi4-1d-2pt", 1, [[2]], [[1], [1]], {4: {(0, 0, 0, 0): 1}}, 2)
    add("phi3-1d-2pt-half", 1, [[1]], [[1], [2]],
        {3: {(0, 0, 0): "1/2"}}, 2)
    add("phi4-1d-vacuum-deep", 1, [[3]], [], {4: {(0, 0, 0, 0): 1}}, 3)
    add("mixed-1d-sources", 1, [[1]], [[1], [1]],
        {1: {(0,): 2}, 2: {(0, 0): "1/3"}}, 3)
    add("phi3-2d-diag", 2, [[1, 0], [0, 2]], [[1, 0], [0, 1]],
        {3: {(0, 0, 0): 1, (1, 1, 1): 1}}, 2)
    add("phi4-2d-cross", 2, [[2, 1], [1, 2]], [],
        {4: {(0, 0, 1, 1): 1}}, 2)
    add("xyz-3d", 3, [[1, 0, 0], [0, 1, 0], [0, 0, 2]],
        [[1, 0, 0], [0, 0, 1]], {3: {(0, 1, 2): 1}}, 2)
    add("mass-2d-4pt", 2, [[1, 0], [0, 1]],
        [[1, 1], [1, -1], [2, 0], [0, 1]], {2: {(0, 1): 1}}, 3)
    add("quad-3d-vacuum", 3, [[2, 1, 0], [1, 2, 1], [0, 1, 3]], [],
        {2: {(0, 0): 1, (2, 2): "1/2"}}, 3)
    add("mixed-2d", 2, [[2, 0], [0, 3]], [[1, 0], [1, 1]],
        {1: {(0,): 1, (1,): 1}, 3: {(0, 0, 1): 3}}, 2)
    return corpus


@pytest.fixture(scope="session")
def model_corpus() -> list:
    return build_model_corpus()

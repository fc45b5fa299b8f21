"""Shared symbols and corpora for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from hbspace.symbols import SymbolSpec, parse_symbol

CORPUS_DIR = Path(__file__).resolve().parents[1] / "corpus"

Z3 = SymbolSpec.blaschke([0, 0, 0], name="z^3")
HALF = SymbolSpec.polynomial([0.5, 0.5], name="(1+z)/2")
Z_HALF = SymbolSpec.blaschke([0, 0.5], name="z B_1/2")


def corpus_symbol(name: str) -> SymbolSpec:
    return parse_symbol(CORPUS_DIR / f"{name}.json")


def even_outer() -> SymbolSpec:
    return corpus_symbol("outer_even_two_arc")


def odd_outer() -> SymbolSpec:
    return corpus_symbol("outer_odd")


def asymmetric_outer() -> SymbolSpec:
    return corpus_symbol("outer_asymmetric")


def _random_zero(rng, radius=0.9):
    r = radius * np.sqrt(rng.random())
    return r * np.exp(2j * np.pi * rng.random())


def blaschke_corpus(seed: int = 2024, per_degree: int = 8, max_degree: int = 6):
    """Random and structured finite Blaschke zero sets of degree 2..max_degree.

    Families: random zeros, ``z^d``, even products (zeros closed under
    negation), even products times one factor, even products times ``z``.
    """
    rng = np.random.default_rng(seed)
    zero_sets = []
    for d in range(2, max_degree + 1):
        zero_sets += [[_random_zero(rng) for _ in range(d)] for _ in range(per_degree)]
        zero_sets.append([0j] * d)
    for k in range(1, max_degree // 2 + 1):
        for _ in range(3):
            a = [_random_zero(rng) for _ in range(k)]
            even = a + [-x for x in a]
            zero_sets.append(even)
            if 2 * k + 1 <= max_degree:
                zero_sets.append(even + [_random_zero(rng)])
                zero_sets.append(even + [0j])
    return [SymbolSpec.blaschke(z) for z in zero_sets]

"""The compiled kernel and the pure-Python kernel must agree exactly."""

import random
from fractions import Fraction

import pytest

from darbouxforge import _kernel_py
from darbouxforge import kernel

try:
    from darbouxforge import _speedups
except ImportError:
    _speedups = None

from support import oracle_sort_word


def random_mono(rng, n_gens, parities):
    pairs = sorted(rng.sample(range(n_gens), rng.randint(0, min(3, n_gens))))
    mono = []
    for i in pairs:
        mono.extend([i, 1 if parities[i] else rng.randint(1, 3)])
    return tuple(mono)


def random_terms(rng, n_gens, parities, count=4):
    out = {}
    for _ in range(count):
        out[random_mono(rng, n_gens, parities)] = Fraction(
            rng.randint(-5, 5) or 1, rng.randint(1, 4)
        )
    return out


@pytest.mark.skipif(_speedups is None, reason="compiled kernel not built")
def test_backends_agree_on_random_inputs():
    rng = random.Random(42)
    for _ in range(300):
        n = rng.randint(1, 6)
        parities = tuple(rng.randint(0, 1) for _ in range(n))
        ma = random_mono(rng, n, parities)
        mb = random_mono(rng, n, parities)
        assert _kernel_py.merge_monomials(ma, mb, parities) == \
            _speedups.merge_monomials(ma, mb, parities)
        ta = random_terms(rng, n, parities)
        tb = random_terms(rng, n, parities)
        assert _kernel_py.mul_terms(ta, tb, parities) == \
            _speedups.mul_terms(ta, tb, parities)
        assert _kernel_py.add_terms(ta, tb) == _speedups.add_terms(ta, tb)
        pairs = [(rng.randrange(n), rng.randint(1, 2)) for _ in range(4)]
        assert _kernel_py.monomial_from_pairs(pairs, parities) == \
            _speedups.monomial_from_pairs(pairs, parities)


def test_merge_against_permutation_oracle():
    rng = random.Random(7)
    for _ in range(400):
        n = rng.randint(1, 5)
        parities = tuple(rng.randint(0, 1) for _ in range(n))
        ma = random_mono(rng, n, parities)
        mb = random_mono(rng, n, parities)
        word = []
        for t in range(0, len(ma), 2):
            word.extend([ma[t]] * ma[t + 1])
        for t in range(0, len(mb), 2):
            word.extend([mb[t]] * mb[t + 1])
        sign, mono = oracle_sort_word(word, parities)
        got = kernel.merge_monomials(ma, mb, parities)
        if sign == 0:
            assert got is None
        else:
            assert got == (sign, mono)


def test_monomial_from_pairs_oracle():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randint(1, 5)
        parities = tuple(rng.randint(0, 1) for _ in range(n))
        pairs = [(rng.randrange(n), rng.randint(1, 2)) for _ in range(rng.randint(0, 4))]
        word = []
        for i, e in pairs:
            word.extend([i] * e)
        sign, mono = oracle_sort_word(word, parities)
        got = kernel.monomial_from_pairs(pairs, parities)
        if sign == 0:
            assert got is None
        else:
            assert got == (sign, mono)


def test_backend_selection_reports():
    assert kernel.BACKEND in ("py", "cy")

"""Shared random generators and independent oracles for the test suite.

The oracles deliberately avoid the package's own hot paths: products are
re-expanded by permutation counting over flat symbol lists, derivations are
re-applied term by term with explicit sign bookkeeping, and ranks come from
sympy.  Expected values frozen in the tests were computed with these.
"""

from __future__ import annotations

import random
from fractions import Fraction

from darbouxforge.algebra import AlgElement, GradedAlgebra, GradedGenerator, normalize
from darbouxforge.darboux import ContactDarbouxSpec
from darbouxforge.legendrian import LegendrianDarbouxSpec

# ---------------------------------------------------------------------------
# random presentations and elements
# ---------------------------------------------------------------------------

COEFF_POOL = [1, -1, 2, -3, Fraction(1, 2), Fraction(-2, 3), 5]


def random_algebra(rng: random.Random, max_gens: int = 6) -> GradedAlgebra:
    count = rng.randint(2, max_gens)
    gens = [
        GradedGenerator(f"g{i}", rng.choice([0, 0, -1, -1, -2, -3]))
        for i in range(count)
    ]
    return GradedAlgebra(gens)


def random_element(alg: GradedAlgebra, rng: random.Random, terms: int = 3,
                   max_factors: int = 3) -> AlgElement:
    raw = []
    for _ in range(terms):
        factors = [
            (rng.choice(alg.generators).name, rng.randint(1, 2))
            for _ in range(rng.randint(0, max_factors))
        ]
        raw.append((rng.choice(COEFF_POOL), factors))
    return normalize(alg, raw)


def random_homogeneous(alg: GradedAlgebra, rng: random.Random,
                       tries: int = 40) -> AlgElement:
    """A random element with all monomials of one degree (possibly a single
    monomial); falls back to a single generator."""
    for _ in range(tries):
        e = random_element(alg, rng, terms=rng.randint(1, 3))
        if e.is_zero():
            continue
        degs = {alg.monomial_degree(m) for m in e.terms}
        if len(degs) == 1:
            return e
        target = degs.pop()
        filtered = {m: c for m, c in e.terms.items()
                    if alg.monomial_degree(m) == target}
        return AlgElement(alg, filtered)
    return alg.gen(alg.generators[0].name)


# ---------------------------------------------------------------------------
# sign oracle: brute-force Koszul reordering over flat factor words
# ---------------------------------------------------------------------------


def oracle_sort_word(word: list[int], parities) -> tuple[int, tuple]:
    """Bubble-sort a flat list of generator indices counting odd-odd swaps.

    Returns (sign, canonical monomial) or (0, ()) if an odd index repeats.
    """
    word = list(word)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                if parities[word[i]] and parities[word[i + 1]]:
                    sign = -sign
                word[i], word[i + 1] = word[i + 1], word[i]
                changed = True
    mono = []
    for idx in word:
        if mono and mono[-2] == idx:
            mono[-1] += 1
            if parities[idx] and mono[-1] >= 2:
                return 0, ()
        else:
            mono.extend([idx, 1])
    return sign, tuple(mono)


def oracle_mul(a: AlgElement, b: AlgElement) -> AlgElement:
    """Product recomputed by flattening monomials to words and resorting."""
    alg = a.algebra
    acc: dict = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            word = []
            for t in range(0, len(ma), 2):
                word.extend([ma[t]] * ma[t + 1])
            for t in range(0, len(mb), 2):
                word.extend([mb[t]] * mb[t + 1])
            sign, mono = oracle_sort_word(word, alg.parities)
            if sign == 0:
                continue
            acc[mono] = acc.get(mono, Fraction(0)) + sign * ca * cb
    return AlgElement(alg, {m: c for m, c in acc.items() if c})


def oracle_partial(e: AlgElement, gen_name: str) -> AlgElement:
    """Left partial derivative recomputed on flat words."""
    alg = e.algebra
    gi = alg.index(gen_name)
    acc: dict = {}
    for mono, c in e.terms.items():
        word = []
        for t in range(0, len(mono), 2):
            word.extend([mono[t]] * mono[t + 1])
        for pos, idx in enumerate(word):
            if idx != gi:
                continue
            sign = 1
            if alg.parities[gi]:
                for left in word[:pos]:
                    if alg.parities[left]:
                        sign = -sign
            rest = word[:pos] + word[pos + 1:]
            s2, m2 = oracle_sort_word(rest, alg.parities)
            if s2 == 0:
                continue
            acc[m2] = acc.get(m2, Fraction(0)) + sign * s2 * c
    return AlgElement(alg, {m: v for m, v in acc.items() if v})


def oracle_apply_d(presentation, e: AlgElement) -> AlgElement:
    """Internal differential recomputed term by term on flat words."""
    alg = presentation.algebra
    acc = alg.zero()
    for mono, c in e.terms.items():
        word = []
        for t in range(0, len(mono), 2):
            word.extend([mono[t]] * mono[t + 1])
        for pos, idx in enumerate(word):
            img = presentation.d_images.get(idx)
            if img is None:
                continue
            sign = 1
            for left in word[:pos]:
                if alg.parities[left]:
                    sign = -sign
            piece = alg.scalar(sign * c)
            for left in word[:pos]:
                piece = piece * AlgElement(alg, {(left, 1): Fraction(1)})
            piece = piece * img
            for right in word[pos + 1:]:
                piece = piece * AlgElement(alg, {(right, 1): Fraction(1)})
            acc = acc + piece
    return acc


def sympy_rank(matrix) -> int:
    import sympy

    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    m = sympy.Matrix(
        [[sympy.Rational(x.numerator, x.denominator) for x in row]
         for row in matrix.data]
    )
    return m.rank()


# ---------------------------------------------------------------------------
# fixture corpora
# ---------------------------------------------------------------------------


def random_shape(rng: random.Random, k: int, max_count: int = 2):
    ell = -((k + 1) // 2)
    return tuple(rng.randint(0 if i else 1, max_count) for i in range(ell + 1))


def random_x_monomial(alg, names, rng, degree: int):
    """A random monomial of the requested degree in x-variables only, or None."""
    pool = [(n, -i) for i, _, n in names.all_x() for _ in range(1)]
    for _ in range(60):
        chosen = []
        total = 0
        for _ in range(rng.randint(1, 4)):
            n, d = rng.choice(pool)
            chosen.append(n)
            total += d
            if total < degree:
                break
        if total == degree:
            e = normalize(alg, [(rng.choice(COEFF_POOL), [(n, 1) for n in chosen])])
            if not e.is_zero():
                return e
    return None


def random_contact_spec(rng: random.Random, k: int):
    """A random contact spec: x-only Hamiltonian terms (always admissible)
    plus y-linear terms with x-coefficients (still admissible when every
    dH/dx^{-i} * dH/dy^{k+i} summand cancels; checked by the caller)."""
    m = random_shape(rng, k)

    def hfn(alg, names):
        h = alg.zero()
        for _ in range(rng.randint(0, 3)):
            mono = random_x_monomial(alg, names, rng, k + 1)
            if mono is not None:
                h = h + mono
        for i, j, yn in names.all_y():
            if rng.random() < 0.4:
                coeff = random_x_monomial(alg, names, rng, 1 - i)
                if coeff is not None:
                    h = h + coeff * alg.gen(yn)
        return h

    return ContactDarbouxSpec.create(k, m, hfn)


def perturbed_contact_spec(rng: random.Random):
    """k = -3 specs whose Hamiltonian provably violates the master equation:
    H = a(x) y1_kp1 + x1_m1 x2_m1 b(x) with a, b nonzero."""
    def hfn(alg, names):
        a = alg.gen("x1") ** rng.randint(1, 2)
        b = alg.scalar(rng.choice([1, 2, -1]))
        return a * alg.gen("y1_kp1") + alg.gen("x1_m1") * alg.gen("x2_m1") * b
    return ContactDarbouxSpec.create(-3, (1, 2), hfn)


def _random_word(rng, pool, max_factors=2):
    return [(rng.choice(pool), 1) for _ in range(rng.randint(0, max_factors))]


def coupled_legendrian_recipe(rng: random.Random):
    """Shape and term recipe for an admissible (H, G) pair at k = -1.

    Every G-term is divisible by xt1, so the classical locus contains the
    hyperplane xt1 = 0 and rational points are easy to sample.  'both' terms
    couple u- and v-parts whose product is compensated by H.
    """
    m0 = rng.randint(1, 2)
    n0 = rng.randint(1, 2)
    n1 = rng.randint(1, 2)
    xt = [f"xt{j}" for j in range(1, m0 + 1)]
    u0 = [f"u{j}" for j in range(1, n0 + 1)]
    terms = []
    for j in range(1, n1 + 1):
        mode = rng.choice(["both", "uonly", "vonly"])
        c = rng.choice([1, -1, 2])
        terms.append(
            (mode, j, c,
             [("xt1", 1)] + _random_word(rng, xt),
             [("xt1", 1)] + _random_word(rng, xt),
             _random_word(rng, u0, 1))
        )
    return m0, n0, n1, terms


def coupled_legendrian_spec(recipe) -> LegendrianDarbouxSpec:
    m0, n0, n1, terms = recipe

    def gfn(alg, nm):
        g = alg.zero()
        for mode, j, c, gw, fw, dress in terms:
            if mode == "both":
                g = g + normalize(alg, [(c, [(f"u{j}_m1", 1)] + gw),
                                        (1, fw + [(f"v{j}_km0", 1)])])
            elif mode == "uonly":
                g = g + normalize(alg, [(c, [(f"u{j}_m1", 1)] + gw + dress)])
            else:
                g = g + normalize(alg, [(1, fw + dress + [(f"v{j}_km0", 1)])])
        return g

    def hfn(alg, nm):
        h = alg.zero()
        for mode, j, c, gw, fw, dress in terms:
            if mode == "both":
                word = [(n.replace("xt", "x"), e) for n, e in gw + fw]
                h = h + normalize(alg, [(-c, word)])
        return h

    return LegendrianDarbouxSpec.create(-1, (m0,), (n0, n1), hfn, gfn)

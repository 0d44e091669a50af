"""Exact linear algebra, chain complexes and point evaluation."""

import random
from fractions import Fraction

import pytest

from darbouxforge.darboux import ContactDarbouxSpec, build_contact_darboux
from darbouxforge.errors import NotAChainMap, PointNotOnClassicalLocus
from darbouxforge.homcheck import (
    ChainComplexQ,
    ComplexMap,
    Matrix,
    PointAssignment,
    cohomology_ranks,
    cotangent_complex_at,
    is_quasi_iso,
    is_strict_iso,
    mapping_cone,
    require_classical_point,
    sample_classical_points,
    tangent_complex_at,
)

from support import sympy_rank


def random_matrix(rng, rows, cols):
    return Matrix(rows, cols, [
        [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(cols)]
        for _ in range(rows)
    ])


def test_rank_against_sympy():
    rng = random.Random(0)
    for _ in range(60):
        m = random_matrix(rng, rng.randint(0, 5), rng.randint(0, 5))
        assert m.rank() == sympy_rank(m)


def test_det_against_sympy():
    import sympy

    rng = random.Random(1)
    for _ in range(40):
        n = rng.randint(0, 4)
        m = random_matrix(rng, n, n)
        expected = sympy.Matrix(
            [[sympy.Rational(x.numerator, x.denominator) for x in row]
             for row in m.data]
        ).det() if n else 1
        assert m.det() == Fraction(str(expected))


def test_nullspace_vectors_annihilate():
    rng = random.Random(2)
    for _ in range(30):
        m = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
        basis = m.nullspace()
        assert len(basis) == m.cols - m.rank()
        for v in basis:
            out = [sum(m.data[i][j] * v[j] for j in range(m.cols))
                   for i in range(m.rows)]
            assert all(x == 0 for x in out)


def two_term(matrix):
    return ChainComplexQ(
        {0: matrix.cols, 1: matrix.rows}, {0: matrix},
        {0: [f"a{i}" for i in range(matrix.cols)],
         1: [f"b{i}" for i in range(matrix.rows)]},
    )


def test_complex_rejects_nonzero_d_squared():
    d0 = Matrix(1, 1, [[1]])
    d1 = Matrix(1, 1, [[1]])
    with pytest.raises(ValueError):
        ChainComplexQ({0: 1, 1: 1, 2: 1}, {0: d0, 1: d1})


def test_cohomology_zero_complex():
    c = ChainComplexQ({0: 2, 1: 2}, {})
    assert cohomology_ranks(c) == {0: 2, 1: 2}


def test_cohomology_invertible_two_term():
    c = two_term(Matrix(2, 2, [[1, 1], [0, 1]]))
    assert cohomology_ranks(c) == {0: 0, 1: 0}


def test_cohomology_euler_characteristic():
    rng = random.Random(3)
    for _ in range(20):
        rows, cols = rng.randint(0, 4), rng.randint(0, 4)
        c = two_term(random_matrix(rng, rows, cols))
        ranks = cohomology_ranks(c)
        assert sum((-1) ** (d & 1) * r for d, r in ranks.items()) == \
            c.euler_characteristic()


def test_cohomology_invariant_under_basis_change():
    rng = random.Random(4)
    for _ in range(20):
        n = rng.randint(1, 4)
        d = random_matrix(rng, n, n)
        # force d^2 = 0 by using a strictly lower block form: d = [[0,A],[0,0]]
        a = random_matrix(rng, n, n)
        mat = Matrix(2 * n, 2 * n)
        for i in range(n):
            for j in range(n):
                mat.data[i][n + j] = a.data[i][j]
        c = ChainComplexQ({0: 2 * n, 1: 2 * n}, {0: mat})
        # conjugate by a random invertible matrix
        while True:
            p = random_matrix(rng, 2 * n, 2 * n)
            if p.rank() == 2 * n:
                break
        import sympy

        sp = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator)
                            for x in row] for row in p.data])
        pinv = sp.inv()
        pinv_m = Matrix(2 * n, 2 * n,
                        [[Fraction(str(pinv[i, j])) for j in range(2 * n)]
                         for i in range(2 * n)])
        conj = p @ mat @ pinv_m
        c2 = ChainComplexQ({0: 2 * n, 1: 2 * n}, {0: conj})
        assert cohomology_ranks(c) == cohomology_ranks(c2)


def test_quasi_iso_identity_and_zero_maps():
    c = two_term(Matrix(2, 2, [[1, 0], [0, 1]]))
    ident = ComplexMap(c, c, {0: Matrix.identity(2), 1: Matrix.identity(2)})
    ok, witness = is_quasi_iso(ident)
    assert ok and witness is None
    # zero map between acyclic complexes is a quasi-isomorphism
    zero = ComplexMap(c, c, {})
    ok, _ = is_quasi_iso(zero)
    assert ok


def test_quasi_iso_failure_witness():
    c = ChainComplexQ({0: 1}, {}, {0: ["e"]})
    zero_c = ChainComplexQ({}, {})
    bad = ComplexMap(c, zero_c, {})
    ok, witness = is_quasi_iso(bad)
    assert not ok
    assert witness and "e" in witness


def test_strict_iso():
    c = two_term(Matrix(1, 2, [[1, 0]]))
    ident = ComplexMap(c, c, {0: Matrix.identity(2), 1: Matrix.identity(1)})
    ok, _ = is_strict_iso(ident)
    assert ok
    other = ChainComplexQ({0: 1, 1: 1}, {0: Matrix(1, 1, [[1]])})
    with pytest.raises(NotAChainMap):
        ComplexMap(c, other, {0: Matrix(1, 2, [[0, 1]]), 1: Matrix(1, 1, [[1]])})


def test_strict_iso_rejects_non_square():
    c = ChainComplexQ({0: 2}, {})
    d = ChainComplexQ({0: 1}, {})
    f = ComplexMap(c, d, {0: Matrix(1, 2, [[1, 0]])})
    ok, why = is_strict_iso(f)
    assert not ok and "not square" in why


def test_strict_implies_quasi():
    rng = random.Random(5)
    for _ in range(15):
        n = rng.randint(1, 3)
        while True:
            f0 = random_matrix(rng, n, n)
            if f0.rank() == n:
                break
        c = ChainComplexQ({0: n}, {})
        d = ChainComplexQ({0: n}, {})
        f = ComplexMap(c, d, {0: f0})
        assert is_strict_iso(f)[0]
        assert is_quasi_iso(f)[0]


def test_mapping_cone_shapes():
    c = two_term(Matrix(2, 3, [[1, 0, 0], [0, 1, 0]]))
    cone = mapping_cone(ComplexMap(c, c, {0: Matrix.identity(3),
                                          1: Matrix.identity(2)}))
    assert cone.dim(-1) == 3 and cone.dim(0) == 5 and cone.dim(1) == 2
    assert all(r == 0 for r in cohomology_ranks(cone).values())


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------


def contact_fixture(h="x^2"):
    def hfn(alg, names):
        return alg.gen("x1") ** 2 if h == "x^2" else alg.zero()
    return build_contact_darboux(ContactDarbouxSpec.create(-1, (1,), hfn))


def test_zero_differential_gives_zero_matrices():
    data = contact_fixture(h="0")
    pt = PointAssignment({"x1": Fraction(3)})
    t = tangent_complex_at(data.presentation, pt)
    assert not t.diffs
    c = cotangent_complex_at(data.presentation, pt)
    assert not c.diffs


def test_tangent_entries_from_second_derivatives():
    # with H = x^2: d(y) = 2x, d(z) = x^2; at the origin only the constant
    # second derivative d2H/dx2 = 2 survives, pairing d/dx against d/dy
    data = contact_fixture()
    pt = PointAssignment({"x1": Fraction(0)})
    t = tangent_complex_at(data.presentation, pt)
    d0 = t.differential(0)  # degree 0 -> 1: from d/dx to the odd duals
    entries = {x for row in d0.data for x in row}
    assert Fraction(2) in entries or Fraction(-2) in entries


def test_evaluation_scales_with_hamiltonian():
    def hfn(alg, names):
        return (alg.gen("x1") ** 2).scale(3)
    data = build_contact_darboux(ContactDarbouxSpec.create(-1, (1,), hfn))
    pt = PointAssignment({"x1": Fraction(0)})
    t = tangent_complex_at(data.presentation, pt)
    entries = {abs(x) for row in t.differential(0).data for x in row if x}
    assert entries == {Fraction(6)}


def test_point_not_on_locus_rejected():
    data = contact_fixture()
    with pytest.raises(PointNotOnClassicalLocus):
        require_classical_point(data.presentation, PointAssignment({"x1": 1}))


def test_sampler_respects_locus():
    data = contact_fixture()
    pts = sample_classical_points(data.presentation, 4, random.Random(0))
    assert pts == [PointAssignment({"x1": 0})] or len(pts) == 1


def test_complex_shift_signs():
    c = two_term(Matrix(1, 1, [[2]]))
    s1 = c.shift(1)
    assert s1.dim(-1) == 1 and s1.differential(-1).data == [[-2]]
    s2 = c.shift(2)
    assert s2.differential(-2).data == [[2]]


def test_evaluate_at_point_dispatcher():
    data = contact_fixture()
    pt = PointAssignment({"x1": Fraction(0)})
    from darbouxforge.homcheck import evaluate_at_point

    t = evaluate_at_point(data.presentation, pt, "tangent")
    c = evaluate_at_point(data.presentation, pt, "cotangent")
    assert t.dims == {0: 1, 1: 2}
    assert c.dims == {0: 1, -1: 2}
    with pytest.raises(ValueError):
        evaluate_at_point(data.presentation, pt, "bogus")

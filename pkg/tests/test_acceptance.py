"""Acceptance suite: one test per criterion, each printing a PASS line.

Every tolerance here is exact-zero (symbolic identity) or an exact rank
statement; the only numeric bounds are the stated wall-clock budgets.
"""

import dataclasses
import json
import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

from darbouxforge.algebra import partial_derivative
from darbouxforge.cdga import CdgaPresentation, check_d_squared
from darbouxforge.darboux import (
    Z_NAME,
    _differential_images,
    _xy_corrector,
    build_contact_darboux,
    check_master_equation,
    verify_contact_identities,
)
from darbouxforge.derham import (
    DeRhamComplex,
    VectorField,
    contract,
    de_rham_d,
    internal_d,
    push_forward,
    wedge,
)
from darbouxforge.errors import MasterEquationViolated
from darbouxforge.homcheck import cohomology_ranks, sample_classical_points
from darbouxforge.legendrian import (
    LegendrianDarbouxSpec,
    _cotangent_layout,
    _fiber_layout,
    build_jet1_zero_section,
    build_legendrian_model,
    build_point_source,
    check_legendrian_nondegeneracy,
    chi_map_at,
    fiber_complex_at,
    point_target_transfer,
    verify_jet1_zero_section,
    verify_legendrian_identities,
)
from darbouxforge.homcheck import cotangent_complex_at, mapping_cone

from support import (
    coupled_legendrian_recipe,
    coupled_legendrian_spec,
    oracle_apply_d,
    perturbed_contact_spec,
    random_algebra,
    random_contact_spec,
    random_element,
    random_homogeneous,
    sympy_rank,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

CONTACT_IDENTITY_NAMES = [
    "dH", "ddr_H_plus_d_phi", "ddr_phi", "d_alpha0",
    "dz_is_H_plus", "ddr_phi_plus", "reeb_normalization",
]

LEGENDRIAN_IDENTITY_NAMES = [
    "dG", "ddr_G_plus_d_psi", "ddr_psi", "d_lambda", "corrector",
]


def _report(criterion: int, message: str) -> None:
    print(f"[criterion {criterion}] PASS: {message}")


def test_criterion_1_algebra_laws():
    """Graded commutativity, associativity, both Leibniz rules, and the
    anticommutation of the two differentials: exact zero on >= 500 random
    homogeneous pairs/triples over 10 random presentations, under 30 s."""
    start = time.perf_counter()
    rng = random.Random(101)
    pair_checks = triple_checks = 0
    for _ in range(10):
        alg = random_algebra(rng)
        images = {}
        for g in alg.generators:
            if g.degree >= 0:
                continue
            img = random_homogeneous(alg, rng)
            if not img.is_zero() and img.degree() == g.degree + 1:
                images[g.name] = img
        p = CdgaPresentation(alg, images)
        if not check_d_squared(p).passed:
            p = CdgaPresentation(alg, {})
        dr = DeRhamComplex(p)
        for _ in range(30):
            a = random_homogeneous(alg, rng)
            b = random_homogeneous(alg, rng)
            sign = -1 if (a.parity() and b.parity()) else 1
            assert (a * b - (b * a).scale(sign)).is_zero()
            g = rng.choice(alg.generators)
            lhs = partial_derivative(a * b, g.name)
            psign = -1 if (g.degree & 1) and a.parity() else 1
            rhs = partial_derivative(a, g.name) * b \
                + (a * partial_derivative(b, g.name)).scale(psign)
            assert (lhs - rhs).is_zero()
            dsign = -1 if a.parity() else 1
            assert (p.d(a * b) - p.d(a) * b - (a * p.d(b)).scale(dsign)).is_zero()
            form = wedge(dr.inject(a), de_rham_d(dr.inject(b)))
            assert (internal_d(de_rham_d(form))
                    + de_rham_d(internal_d(form))).is_zero()
            pair_checks += 4
        for _ in range(25):
            a, b, c = (random_element(alg, rng, terms=2) for _ in range(3))
            assert ((a * b) * c - a * (b * c)).is_zero()
            triple_checks += 1
    elapsed = time.perf_counter() - start
    assert pair_checks + triple_checks >= 500
    assert elapsed < 30.0
    _report(1, f"{pair_checks + triple_checks} exact algebra-law checks "
               f"in {elapsed:.1f}s")


def _ungated_contact_presentation(spec):
    images = _differential_images(spec, contact=True)
    partial = CdgaPresentation(spec.algebra, images)
    images[Z_NAME] = (spec.hamiltonian + partial.d(_xy_corrector(spec))).scale(
        Fraction(-1, spec.k)
    )
    return CdgaPresentation(spec.algebra, images)


def _oracle_d_squared(p) -> bool:
    for g in p.algebra.generators:
        if not oracle_apply_d(p, oracle_apply_d(p, p.algebra.gen(g.name))).is_zero():
            return False
    return True


def test_criterion_2_master_equation_iff_flatness():
    """Build succeeds iff the master equation holds, and the d^2 certificate
    agrees, on 50 random contact specs (k in {-1, -3, -5}, m_i <= 2) and 20
    deliberately perturbed Hamiltonians.  Oracle: an independent term-by-term
    expansion of d(d(g)) on every generator."""
    rng = random.Random(202)
    admissible = []
    for trial in range(50):
        k = rng.choice([-1, -3, -5])
        spec = random_contact_spec(rng, k)
        cme_ok = check_master_equation(spec).passed
        try:
            data = build_contact_darboux(spec)
            built = True
        except MasterEquationViolated:
            built = False
        assert built == cme_ok
        p = data.presentation if built else _ungated_contact_presentation(spec)
        assert check_d_squared(p).passed == cme_ok
        assert _oracle_d_squared(p) == cme_ok
        if built:
            admissible.append(data)
    perturbed = 0
    for _ in range(20):
        spec = perturbed_contact_spec(rng)
        assert not check_master_equation(spec).passed
        p = _ungated_contact_presentation(spec)
        assert not check_d_squared(p).passed
        assert not _oracle_d_squared(p)
        perturbed += 1
    test_criterion_2_master_equation_iff_flatness.admissible = admissible
    _report(2, f"50 random specs agree (CME <=> build <=> d^2, oracle-checked), "
               f"{perturbed} perturbed Hamiltonians fail all three")


def test_criterion_3_contact_identity_suite():
    """Every generated Darboux fixture passes the full contact identity list
    with exact-zero residuals."""
    admissible = getattr(test_criterion_2_master_equation_iff_flatness,
                         "admissible", None)
    if admissible is None:
        rng = random.Random(202)
        admissible = []
        for _ in range(30):
            spec = random_contact_spec(rng, rng.choice([-1, -3, -5]))
            if check_master_equation(spec).passed:
                admissible.append(build_contact_darboux(spec))
    assert admissible
    for data in admissible:
        report = verify_contact_identities(data)
        status = {c.name: c.status for c in report.checks}
        for name in CONTACT_IDENTITY_NAMES:
            assert status[name] == "pass", (name, data.spec.k, data.spec.m)
        assert report.passed
    _report(3, f"{len(admissible)} fixtures x {len(CONTACT_IDENTITY_NAMES)} "
               "identities, all exact zeros")


def _legendrian_corpus(count=10, seed=303):
    rng = random.Random(seed)
    specs = [LegendrianDarbouxSpec.create(
        -1, (1,), (1, 1), lambda a, n: a.zero(),
        lambda a, n: a.gen("u1") * a.gen("v1_km0"))]
    while len(specs) < count + 1:
        specs.append(coupled_legendrian_spec(coupled_legendrian_recipe(rng)))
    return [build_legendrian_model(s) for s in specs]


def test_criterion_4_legendrian_identity_suite():
    """The canonical shift -1 fixture plus >= 10 randomized admissible (H, G)
    fixtures pass the relative identities, d_B(Lambda) = -beta_*(alpha0),
    the corrector expression and the chain-map certificate, exactly, under
    60 s total."""
    start = time.perf_counter()
    corpus = _legendrian_corpus()
    for data in corpus:
        report = verify_legendrian_identities(data)
        status = {c.name: c.status for c in report.checks}
        for name in LEGENDRIAN_IDENTITY_NAMES:
            assert status[name] == "pass", name
        assert all(c.status == "pass" for c in report.checks
                   if c.name.startswith("chain_map"))
        assert report.passed
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    test_criterion_4_legendrian_identity_suite.corpus = corpus
    _report(4, f"{len(corpus)} fixtures through the full identity suite "
               f"in {elapsed:.1f}s")


def _cone_ranks_via_snf_oracle(cone):
    """Cohomology ranks recomputed from sympy ranks of the differentials."""
    out = {}
    for d in sorted(cone.dims):
        out[d] = cone.dim(d) - sympy_rank(cone.differential(d)) \
            - sympy_rank(cone.differential(d - 1))
    return out


def test_criterion_5_nondegeneracy():
    """On every admissible fixture the subcomplex map is a strict
    isomorphism (unit determinant) and the mapping cone is acyclic at 5
    classical-locus points; the Lambda-degenerate mutant fails both.
    Oracle: exact elimination ranks recomputed independently."""
    corpus = getattr(test_criterion_4_legendrian_identity_suite, "corpus",
                     None) or _legendrian_corpus()
    oracle_cones = 0
    for data in corpus:
        pts = sample_classical_points(data.source, 5, random.Random(404))
        assert len(pts) == 5
        report = check_legendrian_nondegeneracy(data, pts)
        assert report.passed, [
            (c.name, c.residual) for c in report.failures()
        ]
        # independent oracle on the first point's cone
        layout = _fiber_layout(data)
        fiber = fiber_complex_at(data, pts[0], layout)
        omega = cotangent_complex_at(data.source, pts[0]).shift(data.k - 1)
        chi = chi_map_at(data, pts[0], layout, fiber, omega)
        cone = mapping_cone(chi)
        assert cohomology_ranks(cone) == _cone_ranks_via_snf_oracle(cone)
        assert all(r == 0 for r in cohomology_ranks(cone).values())
        oracle_cones += 1
    # the degenerate mutant (built over G = 0 so nothing hides the failure)
    spec0 = LegendrianDarbouxSpec.create(
        -1, (1,), (1, 1), lambda a, n: a.zero(), lambda a, n: a.zero())
    base = build_legendrian_model(spec0)
    mutant = dataclasses.replace(base, lambda_witness=base.source_dr.zero(1))
    pts = sample_classical_points(base.source, 3, random.Random(405))
    report = check_legendrian_nondegeneracy(mutant, pts)
    assert any(c.status == "fail" and c.name.startswith("strict_iso_C")
               for c in report.checks)
    assert any(c.status == "fail" and c.name.startswith("cone_acyclic")
               for c in report.checks)
    _report(5, f"{len(corpus)} fixtures strict-iso + cone-acyclic at 5 points "
               f"({oracle_cones} cones cross-checked), mutant fails both")


def test_criterion_6_zero_section():
    """For m0 in {1,2,3} and n in {-1,-2}: beta_*(alpha) = 0 exactly, the
    kernel membership iota_(d/dx + y d/dz)(alpha) = 0 exactly, and the point
    non-degeneracy check passes."""
    for m0 in (1, 2, 3):
        for n in (-1, -2):
            data = build_jet1_zero_section(m0, n)
            pulled = push_forward(data.beta, data.target_dr, data.source_dr,
                                  data.alpha)
            assert pulled.is_zero()
            alg = data.target.algebra
            for j in range(1, m0 + 1):
                field = VectorField(
                    data.target_dr,
                    [(alg.one(), f"x{j}"), (alg.gen(f"y{j}_km0"), Z_NAME)],
                )
                assert contract(field, data.alpha).is_zero()
            pts = sample_classical_points(data.source, 3, random.Random(m0))
            report = verify_jet1_zero_section(data, pts)
            assert report.passed, (m0, n, [c.name for c in report.failures()])
    _report(6, "6 jet models: exact pullback, exact kernel membership, "
               "acyclic cones at sampled points")


def test_criterion_7_point_target_transfer():
    """For 5 fixtures: iota_(d/dt)(sigma) = 1, d_dR(d_dR(Lambda)) = 0, and
    the sigma-kernel pairing equals the omega pairing entry-wise at 3 points."""
    shapes = [(-1, (1, 1)), (-1, (2, 1)), (-1, (1, 2)), (-2, (1, 1)),
              (-3, (1, 1, 1))]
    done = 0
    for n, shape in shapes:
        source, names, _ = build_point_source(n, shape, lambda a, nm: a.zero())
        dr = DeRhamComplex(source)
        lam = dr.zero(1)
        for i, row in enumerate(names.u):
            for j in range(1, len(row) + 1):
                from darbouxforge.lagrangian import u_name, v_name

                lam = lam + wedge(dr.inject(source.algebra.gen(u_name(j, i))),
                                  dr.symbol(v_name(j, i)))
        pts = sample_classical_points(source, 3, random.Random(n + 17))
        assert len(pts) == 3
        data = point_target_transfer(source, lam, n, pts)
        status = {c.name: c.status for c in data.report.checks}
        assert status["reeb_normalization"] == "pass"
        assert status["omega_ddr_closed"] == "pass"
        for pt in pts:
            assert status[f"pairing_match@{pt.to_dict()}"] == "pass"
        assert data.report.passed
        done += 1
    assert done == 5
    _report(7, "5 transfers: sigma normalized, omega closed, "
               "pairings match at 3 points each")


def _run_cli(*args):
    env = dict(os.environ)
    env.setdefault("DARBOUX_FORGE_SEED", "0")
    return subprocess.run([sys.executable, "-m", "darbouxforge.cli", *args],
                          capture_output=True, text=True, env=env)


def test_criterion_8_cli():
    """Fixture round-trip idempotence, deterministic reports, and the three
    exit-code classes on the checked-in spec files."""
    good = FIXTURES / "legendrian_k1.dbx"
    assert _run_cli("verify", str(good)).returncode == 0
    assert _run_cli("verify",
                    str(FIXTURES / "contact_cme_violation.dbx")).returncode == 1
    assert _run_cli("verify", str(FIXTURES / "malformed.dbx")).returncode == 2
    first = _run_cli("build", str(good), "--emit-fixture").stdout
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".dbx", delete=False) as fh:
        fh.write(first)
        path = fh.name
    try:
        second = _run_cli("build", path, "--emit-fixture").stdout
    finally:
        os.unlink(path)
    assert first == second
    a = json.loads(_run_cli("report", str(good)).stdout)
    b = json.loads(_run_cli("report", str(good)).stdout)
    for payload in (a, b):
        for check in payload["checks"]:
            check.pop("wall_time")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    _report(8, "exit codes 0/1/2 exercised, round-trip idempotent, "
               "reports deterministic")

"""Lagrangian-Darboux models: source cdga B, superpotential G, map beta.

The source of a Lagrangian (and of a Legendrian) over a Darboux target has
pulled-back variables xt_j^{-i} = beta(x_j^{-i}), extra smooth variables
u_j^0, and paired generators u_j^{-i} (i = 1..s), v_j^{k-1+i} (i = 0..s) with
s = (1-k)/2 for odd k.  The superpotential G of degree k drives both the
differential d_B and the images beta(y); admissibility is the relative
master equation  sum dG/du * dG/dv + beta(H) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import (
    AlgElement,
    GradedAlgebra,
    GradedGenerator,
    partial_derivative,
    substitute,
)
from .cdga import CdgaMorphism, CdgaPresentation, check_chain_map, check_d_squared
from .darboux import (
    SymplecticDarbouxData,
    SymplecticDarbouxSpec,
    _check_shape,
    _sign,
    build_symplectic_darboux,
    check_shift,
    hamiltonian_decomposition,
)
from .derham import (
    DeRhamComplex,
    DeRhamForm,
    de_rham_d,
    internal_d,
    push_forward,
    wedge,
)
from .errors import DegreeMismatch, RelativeMasterEquationViolated
from .report import VerificationReport, timed_check

# ---------------------------------------------------------------------------
# source naming and shape
# ---------------------------------------------------------------------------


def xt_name(j: int, i: int) -> str:
    return f"xt{j}" if i == 0 else f"xt{j}_m{i}"


def u_name(j: int, i: int) -> str:
    return f"u{j}" if i == 0 else f"u{j}_m{i}"


def v_name(j: int, i: int) -> str:
    # v_j^{k-1+i}: superscript k + (i-1) rendered relative to k
    offset = i - 1
    if offset < 0:
        return f"v{j}_km{-offset}"
    if offset == 0:
        return f"v{j}_km0"
    return f"v{j}_kp{offset}"


@dataclass(frozen=True)
class SourceNames:
    """Name tables for a source: xt[i][j-1] (i <= l), u[i][j-1], v[i][j-1]."""

    xt: tuple[tuple[str, ...], ...]
    u: tuple[tuple[str, ...], ...]
    v: tuple[tuple[str, ...], ...]

    def all_xt(self):
        return [(i, j, n) for i, row in enumerate(self.xt) for j, n in enumerate(row, 1)]

    def all_u(self):
        return [(i, j, n) for i, row in enumerate(self.u) for j, n in enumerate(row, 1)]

    def all_v(self):
        return [(i, j, n) for i, row in enumerate(self.v) for j, n in enumerate(row, 1)]


def source_shape(k: int) -> int:
    """s = -floor(k/2); for odd k this is l + 1."""
    check_shift(k)
    return -(k // 2)


def source_algebra(k: int, m, n, n_v=None) -> tuple[GradedAlgebra, SourceNames]:
    """Free graded algebra of the source: xt mirrors the target x-shape m,
    u/v pairs follow the shape n = (n_0, ..., n_s).

    A separate v-shape may be supplied, but non-degeneracy forces the u and v
    counts to agree level by level, so any mismatch is rejected here.
    """
    ell = check_shift(k)
    s = source_shape(k)
    m = _check_shape(m, ell + 1, "m")
    n = _check_shape(n, s + 1, "n")
    if n_v is not None and _check_shape(n_v, s + 1, "n_v") != n:
        from .errors import ShapeMismatch

        raise ShapeMismatch(
            f"u-shape {n} and v-shape {tuple(n_v)} must agree level by level"
        )
    gens: list[GradedGenerator] = []
    xt_rows, u_rows, v_rows = [], [], []
    for i in range(ell + 1):
        row = tuple(xt_name(j, i) for j in range(1, m[i] + 1))
        xt_rows.append(row)
        gens.extend(GradedGenerator(name, -i) for name in row)
    for i in range(s + 1):
        row = tuple(u_name(j, i) for j in range(1, n[i] + 1))
        u_rows.append(row)
        gens.extend(GradedGenerator(name, -i) for name in row)
    for i in range(s + 1):
        row = tuple(v_name(j, i) for j in range(1, n[i] + 1))
        v_rows.append(row)
        gens.extend(GradedGenerator(name, k - 1 + i) for name in row)
    algebra = GradedAlgebra(gens)
    return algebra, SourceNames(tuple(xt_rows), tuple(u_rows), tuple(v_rows))


# ---------------------------------------------------------------------------
# spec
# ---------------------------------------------------------------------------


@dataclass
class LagrangianDarbouxSpec:
    """Symplectic target spec plus source shape n and superpotential G."""

    target: SymplecticDarbouxSpec
    n: tuple[int, ...]
    superpotential: AlgElement
    source_alg: GradedAlgebra
    source_names: SourceNames

    @property
    def k(self) -> int:
        return self.target.k

    @classmethod
    def create(cls, k: int, m, n, hamiltonian_fn, superpotential_fn
               ) -> "LagrangianDarbouxSpec":
        target = SymplecticDarbouxSpec.create(k, m, hamiltonian_fn)
        source_alg, source_names = source_algebra(k, m, n)
        g = superpotential_fn(source_alg, source_names)
        spec = cls(target, _check_shape(n, source_shape(k) + 1, "n"), g,
                   source_alg, source_names)
        _validate_superpotential(spec)
        return spec


def _validate_superpotential(spec) -> None:
    g = spec.superpotential
    if g.algebra is not spec.source_alg:
        raise DegreeMismatch("superpotential must live over the source algebra")
    if not g.is_zero() and g.degree() != spec.k:
        raise DegreeMismatch(
            f"superpotential must have degree {spec.k}, got {g.degree()}"
        )


# ---------------------------------------------------------------------------
# beta on the graded-algebra level, and the relative master equation
# ---------------------------------------------------------------------------


def beta_plus_images(spec) -> dict[str, AlgElement]:
    """x |-> xt on every target x-variable."""
    out = {}
    for i, j, n in spec.target.names.all_x():
        out[n] = spec.source_alg.gen(xt_name(j, i))
    return out


def beta_y_image(spec, i: int, j: int) -> AlgElement:
    """beta(y_j^{k+i}) = (-1)^{-i+1} dG/dxt_j^{-i}."""
    return partial_derivative(spec.superpotential, xt_name(j, i)).scale(
        _sign(-i + 1)
    )


def beta_algebra_images(spec) -> dict[str, AlgElement]:
    """Images of every target generator except z (graded-algebra level)."""
    out = beta_plus_images(spec)
    for i, j, n in spec.target.names.all_y():
        out[n] = beta_y_image(spec, i, j)
    return out


def relative_master_equation_residual(spec) -> AlgElement:
    """sum_{i>=1} dG/du_j^{-i} * dG/dv_j^{k-1+i} + beta(H)   (degree k+1)."""
    g = spec.superpotential
    acc = spec.source_alg.zero()
    s = source_shape(spec.k)
    for i in range(1, s + 1):
        for j in range(1, spec.n[i] + 1):
            acc = acc + partial_derivative(g, u_name(j, i)) * partial_derivative(
                g, v_name(j, i)
            )
    images = beta_algebra_images(spec)
    acc = acc + substitute(spec.target.hamiltonian, spec.source_alg, images)
    return acc


def check_relative_master_equation(spec) -> VerificationReport:
    report = VerificationReport()
    with timed_check() as t:
        residual = relative_master_equation_residual(spec)
    report.add(
        "relative_master_equation",
        "sum dG/du * dG/dv + beta(H) = 0",
        residual.is_zero(),
        str(residual),
        t.elapsed,
    )
    return report


# ---------------------------------------------------------------------------
# the differential on B and the canonical forms
# ---------------------------------------------------------------------------


def source_differential_images(spec) -> dict[str, AlgElement]:
    """d_B: xt |-> (-1)^{1-i} beta(H-linear coefficient), u |-> sign dG/dv,
    v |-> dG/du.  Degree-0 generators get zero automatically."""
    k = spec.k
    g = spec.superpotential
    _, h_linear = hamiltonian_decomposition(spec.target)
    bplus = beta_plus_images(spec)
    images: dict[str, AlgElement] = {}
    for i, j, n in spec.source_names.all_xt():
        if i == 0:
            continue
        coeff = h_linear.get((i, j))
        if coeff is None:
            continue
        images[n] = substitute(coeff, spec.source_alg, bplus).scale(_sign(1 - i))
    for i, j, n in spec.source_names.all_u():
        if i == 0:
            continue
        images[n] = partial_derivative(g, v_name(j, i)).scale(_sign((1 - i) * k))
    for i, j, n in spec.source_names.all_v():
        images[n] = partial_derivative(g, u_name(j, i))
    return images


def source_corrector(spec) -> AlgElement:
    """sum (-1)^{1-k-i} (1-k-i) (-1)^{(1-i)k} v_j^{k-1+i} u_j^{-i}  (degree k-1)."""
    acc = spec.source_alg.zero()
    k = spec.k
    for i, j, _ in spec.source_names.all_u():
        factor = _sign(1 - k - i) * (1 - k - i) * _sign((1 - i) * k)
        term = spec.source_alg.gen(v_name(j, i)) * spec.source_alg.gen(u_name(j, i))
        acc = acc + term.scale(factor)
    return acc


def psi_form(spec, dr: DeRhamComplex) -> DeRhamForm:
    """psi = sum [-i u d_dR(v) + (-1)^{(1-i)k} (k-1+i) v d_dR(u)]."""
    k = spec.k
    alg = spec.source_alg
    acc = dr.zero(1)
    for i, j, _ in spec.source_names.all_u():
        u = dr.inject(alg.gen(u_name(j, i)))
        v = dr.inject(alg.gen(v_name(j, i)))
        if i:
            acc = acc + wedge(u, dr.symbol(v_name(j, i))).scale(-i)
        acc = acc + wedge(v, dr.symbol(u_name(j, i))).scale(
            _sign((1 - i) * k) * (k - 1 + i)
        )
    return acc


def lambda_form(spec, dr: DeRhamComplex) -> DeRhamForm:
    """Lambda = sum u_j^{-i} d_dR(v_j^{k-1+i})   (weight 1, degree k-1)."""
    alg = spec.source_alg
    acc = dr.zero(1)
    for i, j, _ in spec.source_names.all_u():
        acc = acc + wedge(dr.inject(alg.gen(u_name(j, i))), dr.symbol(v_name(j, i)))
    return acc


# ---------------------------------------------------------------------------
# build + verify
# ---------------------------------------------------------------------------


@dataclass
class LagrangianDarbouxData:
    spec: LagrangianDarbouxSpec
    target: SymplecticDarbouxData
    source: CdgaPresentation
    source_dr: DeRhamComplex
    beta: CdgaMorphism
    h0: DeRhamForm
    psi: DeRhamForm
    lambda_witness: DeRhamForm
    corrector: AlgElement


def build_lagrangian_model(spec: LagrangianDarbouxSpec) -> LagrangianDarbouxData:
    rel = check_relative_master_equation(spec)
    if not rel.passed:
        raise RelativeMasterEquationViolated(
            "; ".join(c.residual or c.name for c in rel.failures())
        )
    target = build_symplectic_darboux(spec.target)
    source = CdgaPresentation(spec.source_alg, source_differential_images(spec))
    source_dr = DeRhamComplex(source)
    beta = CdgaMorphism(target.presentation, source, beta_algebra_images(spec))
    lam = lambda_form(spec, source_dr)
    return LagrangianDarbouxData(
        spec=spec,
        target=target,
        source=source,
        source_dr=source_dr,
        beta=beta,
        h0=de_rham_d(lam),
        psi=psi_form(spec, source_dr),
        lambda_witness=lam,
        corrector=source_corrector(spec),
    )


def _zero_check(report, name, equation, value):
    with timed_check() as t:
        zero = value.is_zero()
    report.add(name, equation, zero, str(value), t.elapsed)


def relative_identity_suite(
    report: VerificationReport,
    data,
    *,
    target_form,
    h0: DeRhamForm,
) -> None:
    """The shared relative identities: dG = -beta(H + H_plus),
    d_dR(G) + d(psi) = -beta_*(phi + phi_plus), d_dR(psi) = (k-1) h0,
    and the corrector expression for the primitive of h0."""
    spec = data.spec
    k = spec.k
    g = spec.superpotential
    src = data.source
    dr = data.source_dr
    tgt = data.target
    beta = data.beta
    _zero_check(
        report, "dG", "d_B(G) = -beta(H + H_plus)",
        src.d(g) + beta.apply(tgt.spec.hamiltonian + tgt.h_plus),
    )
    pushed = push_forward(beta, tgt.dr, dr, tgt.phi + tgt.phi_plus)
    _zero_check(
        report, "ddr_G_plus_d_psi",
        "d_dR(G) + d_B(psi) = -beta_*(phi + phi_plus)",
        de_rham_d(dr.inject(g)) + internal_d(data.psi) + pushed,
    )
    _zero_check(
        report, "ddr_psi", "d_dR(psi) = (k-1) * h0",
        de_rham_d(data.psi) - h0.scale(k - 1),
    )
    _zero_check(
        report, "corrector",
        "(k-1)*Lambda = psi + d_dR(corrector)",
        data.lambda_witness.scale(k - 1) - data.psi
        - de_rham_d(dr.inject(data.corrector)),
    )
    _zero_check(
        report, "d_h0", "d_B(h0) = beta_*(target 2-form)",
        internal_d(h0) - push_forward(beta, tgt.dr, dr, target_form),
    )


def verify_lagrangian_identities(data: LagrangianDarbouxData) -> VerificationReport:
    report = VerificationReport()
    relative_identity_suite(report, data, target_form=data.target.omega0, h0=data.h0)
    _zero_check(report, "ddr_h0", "d_dR(h0) = 0", de_rham_d(data.h0))
    report.extend(check_d_squared(data.source))
    report.extend(check_chain_map(data.beta))
    return report

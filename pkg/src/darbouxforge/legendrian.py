"""Legendrian-Darboux models and their non-degeneracy certification.

The model couples a contact Darboux target (A, alpha0) with a source cdga B
through beta: A -> B, the path witness Lambda = sum u d_dR(v) trivializing
beta_*(alpha0), and the tangent lift rho sending d/d(xt) to the certified
x-kernel generator of alpha0.  Non-degeneracy is checked two ways:

  * symbolically, the u/v- and y-indexed subcomplex maps onto the shifted
    cotangent basis by a square matrix of unit determinant per degree;
  * at rational points of the classical locus, the fiber complex of rho maps
    to the shifted cotangent complex by a certified chain map whose mapping
    cone must be acyclic.

The same machinery covers the affine 1-jet zero section and the transfer of
a Legendrian over the point to a shifted symplectic/contact pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import AlgElement, GradedAlgebra, GradedGenerator, substitute
from .cdga import CdgaMorphism, CdgaPresentation, check_chain_map, check_d_squared
from .darboux import (
    ContactDarbouxData,
    ContactDarbouxSpec,
    Z_NAME,
    _check_shape,
    _sign,
    build_contact_darboux,
    kernel_generators,
    x_name,
    y_name,
)
from .derham import (
    DeRhamComplex,
    DeRhamForm,
    VectorField,
    coefficient_map,
    contract,
    de_rham_d,
    decompose_one_form,
    internal_d,
    push_forward,
    vector_field_differential,
    wedge,
)
from .errors import (
    DegenerateAtPoint,
    DegreeMismatch,
    DegreeOutOfRange,
    NotAChainMap,
    NotClosed,
    RelativeMasterEquationViolated,
    UnsupportedShift,
)
from .homcheck import (
    ChainComplexQ,
    ComplexMap,
    Matrix,
    PointAssignment,
    cotangent_complex_at,
    is_quasi_iso,
    require_classical_point,
)
from .lagrangian import (
    SourceNames,
    beta_algebra_images,
    check_relative_master_equation,
    lambda_form,
    psi_form,
    relative_identity_suite,
    source_algebra,
    source_corrector,
    source_differential_images,
    source_shape,
    u_name,
    v_name,
    xt_name,
)
from .report import VerificationReport, timed_check

# ---------------------------------------------------------------------------
# spec and build
# ---------------------------------------------------------------------------


@dataclass
class LegendrianDarbouxSpec:
    """Contact target spec plus source shape n and superpotential G."""

    target: ContactDarbouxSpec
    n: tuple[int, ...]
    superpotential: AlgElement
    source_alg: GradedAlgebra
    source_names: SourceNames

    @property
    def k(self) -> int:
        return self.target.k

    @classmethod
    def create(cls, k: int, m, n, hamiltonian_fn, superpotential_fn, n_v=None
               ) -> "LegendrianDarbouxSpec":
        target = ContactDarbouxSpec.create(k, m, hamiltonian_fn)
        src_alg, src_names = source_algebra(k, m, n, n_v)
        g = superpotential_fn(src_alg, src_names)
        spec = cls(target, _check_shape(n, source_shape(k) + 1, "n"), g,
                   src_alg, src_names)
        if not g.is_zero() and g.degree() != k:
            raise DegreeMismatch(
                f"superpotential must have degree {k}, got {g.degree()}"
            )
        return spec


@dataclass
class LegendrianDarbouxData:
    spec: LegendrianDarbouxSpec
    target: ContactDarbouxData
    source: CdgaPresentation
    source_dr: DeRhamComplex
    beta: CdgaMorphism
    lambda_witness: DeRhamForm
    psi: DeRhamForm
    corrector: AlgElement
    kernel_fields: list[VectorField]
    rho: dict[str, int]  # source xt name -> index into kernel_fields

    @property
    def k(self) -> int:
        return self.spec.k


def beta_z_image(spec, source: CdgaPresentation) -> AlgElement:
    """(k-1) beta(z) = G + sum i xt dG/dxt + d_B[corrector]."""
    from .algebra import partial_derivative

    g = spec.superpotential
    acc = g
    for i, j, n in spec.source_names.all_xt():
        if i == 0:
            continue
        acc = acc + (spec.source_alg.gen(n) * partial_derivative(g, n)).scale(i)
    acc = acc + source.d(source_corrector(spec))
    return acc.scale(Fraction(1, spec.k - 1))


def build_legendrian_model(spec: LegendrianDarbouxSpec) -> LegendrianDarbouxData:
    rel = check_relative_master_equation(spec)
    if not rel.passed:
        raise RelativeMasterEquationViolated(
            "; ".join(c.residual or c.name for c in rel.failures())
        )
    target = build_contact_darboux(spec.target)
    source = CdgaPresentation(spec.source_alg, source_differential_images(spec))
    source_dr = DeRhamComplex(source)
    images = beta_algebra_images(spec)
    images[Z_NAME] = beta_z_image(spec, source)
    beta = CdgaMorphism(target.presentation, source, images)
    fields = kernel_generators(target)
    rho = {
        xt_name(j, i): pos
        for pos, (i, j, _) in enumerate(target.names.all_x())
    }
    return LegendrianDarbouxData(
        spec=spec,
        target=target,
        source=source,
        source_dr=source_dr,
        beta=beta,
        lambda_witness=lambda_form(spec, source_dr),
        psi=psi_form(spec, source_dr),
        corrector=source_corrector(spec),
        kernel_fields=fields,
        rho=rho,
    )


def verify_legendrian_identities(data: LegendrianDarbouxData) -> VerificationReport:
    report = VerificationReport()
    target = data.target
    relative_identity_suite(
        report, data,
        target_form=de_rham_d(target.alpha0),
        h0=de_rham_d(data.lambda_witness),
    )
    with timed_check() as t:
        residual = internal_d(data.lambda_witness) + push_forward(
            data.beta, target.dr, data.source_dr, target.alpha0
        )
    report.add("d_lambda", "d_B(Lambda) = -beta_*(alpha0)",
               residual.is_zero(), str(residual), t.elapsed)
    report.extend(check_d_squared(data.source))
    report.extend(check_chain_map(data.beta))
    return report


# ---------------------------------------------------------------------------
# the kernel subcomplex of the target, expressed in the certified basis
# ---------------------------------------------------------------------------


def _kernel_layout(target: ContactDarbouxData):
    """(field names in kernel_generators order, name -> position)."""
    names = [n for _, _, n in target.names.all_x()]
    names += [n for _, _, n in target.names.all_y()]
    return names, {n: pos for pos, n in enumerate(names)}


def kernel_differential_coefficients(
    target: ContactDarbouxData, fields: list[VectorField]
) -> list[dict[int, AlgElement]]:
    """d(K_a) = sum_b c[a][b] K_b over A, via the quotient identification.

    The kernel of alpha0 is canonically identified with Der(A)/(d/dz) (the
    z-direction is a subcomplex because no differential image involves z),
    and the kernel basis is triangular over the coordinate fields: the
    x- and y-components of d_T(K_a) are the coefficients, the z-component is
    projected away.  The resulting complex squares to zero structurally;
    the fiber complex construction re-certifies this at every point.
    """
    names, position = _kernel_layout(target)
    out = []
    for a, field in enumerate(fields):
        image = vector_field_differential(field)
        comps = coefficient_map(image)
        comps.pop(Z_NAME, None)
        coeffs: dict[int, AlgElement] = {}
        for name, coeff in comps.items():
            if name not in position:
                raise DegreeMismatch(
                    f"d_T of kernel generator {a} leaves the coordinate span "
                    f"through {name}"
                )
            coeffs[position[name]] = coeff
        out.append(coeffs)
    return out


# ---------------------------------------------------------------------------
# fiber complex of rho and the chi map at a point
# ---------------------------------------------------------------------------


@dataclass
class _FiberLayout:
    """Basis bookkeeping for the fiber complex: per degree, first the source
    coordinate fields, then the shifted kernel generators."""

    source_by_degree: dict[int, list[int]]
    kernel_by_degree: dict[int, list[int]]

    def degrees(self):
        return sorted(set(self.source_by_degree) | set(self.kernel_by_degree))

    def dim(self, d: int) -> int:
        return len(self.source_by_degree.get(d, [])) + len(
            self.kernel_by_degree.get(d, [])
        )

    def kernel_offset(self, d: int) -> int:
        return len(self.source_by_degree.get(d, []))

    def kernel_position(self, d: int, field_index: int) -> int:
        return self.kernel_offset(d) + self.kernel_by_degree[d].index(field_index)


def _fiber_layout(data) -> _FiberLayout:
    src_alg = data.source.algebra
    source_by_degree: dict[int, list[int]] = {}
    for idx, g in enumerate(src_alg.generators):
        source_by_degree.setdefault(-g.degree, []).append(idx)
    kernel_by_degree: dict[int, list[int]] = {}
    for pos, field in enumerate(data.kernel_fields):
        deg = field.degree() + 1  # tangent degree -|g|, shifted by [-1]
        kernel_by_degree.setdefault(deg, []).append(pos)
    return _FiberLayout(source_by_degree, kernel_by_degree)


def fiber_complex_at(data, point: PointAssignment,
                     layout: _FiberLayout) -> ChainComplexQ:
    """Model of the fiber of rho at a point: source tangent complex plus the
    shifted target kernel, with the block differential [[d_B, 0], [pi, -d]].

    The connecting block pi is the dual of beta_* projected along the
    z-direction and lifted to the certified kernel basis: its entries are
    the partial derivatives of the beta-images, evaluated at the point.  At
    a minimal point this reduces to the stored generator-level rho (d/d(xt)
    onto its x-kernel generator); away from minimality the extra entries are
    exactly what makes chi a chain map.  d^2 = 0 is certified on assembly.
    """
    from .algebra import partial_derivative

    src = data.source
    src_alg = src.algebra
    target = data.target
    require_classical_point(src, point)
    kernel_coeffs = kernel_differential_coefficients(target, data.kernel_fields)
    coord_names, _ = _kernel_layout(target)
    tgt_alg = target.spec.algebra
    dims = {d: layout.dim(d) for d in layout.degrees()}
    labels = {}
    for d in layout.degrees():
        row = [f"d/d({src_alg.generators[i].name})"
               for i in layout.source_by_degree.get(d, [])]
        row += [f"ker[{i}][1]" for i in layout.kernel_by_degree.get(d, [])]
        labels[d] = row
    diffs: dict[int, Matrix] = {}
    for d in layout.degrees():
        cols = layout.dim(d)
        rows = layout.dim(d + 1)
        if not cols or not rows:
            continue
        mat = Matrix(rows, cols)
        src_cols = layout.source_by_degree.get(d, [])
        src_rows = layout.source_by_degree.get(d + 1, [])
        kernel_rows = layout.kernel_by_degree.get(d + 1, [])
        # source tangent block
        for cj, j in enumerate(src_cols):
            name = src_alg.generators[j].name
            sign = 1 if src_alg.parities[j] else -1  # -(-1)^{|g_j|}
            for ri, m in enumerate(src_rows):
                val = point.evaluate(partial_derivative(src.d_image(m), name))
                if val:
                    mat.data[ri][cj] = sign * val
            # connecting block: the dual of beta_* with the z-row projected
            # away and the x/y-rows lifted to the kernel basis
            for pos in kernel_rows:
                a_idx = tgt_alg.index(coord_names[pos])
                coeff = partial_derivative(data.beta.image(a_idx), name)
                val = point.evaluate(coeff)
                if val:
                    mat.data[layout.kernel_position(d + 1, pos)][cj] = val
        # shifted kernel block (differential negated by the shift)
        for cj, a in enumerate(layout.kernel_by_degree.get(d, [])):
            col = layout.kernel_offset(d) + cj
            for b, coeff in kernel_coeffs[a].items():
                if b not in kernel_rows:
                    continue
                val = point.evaluate(data.beta.apply(coeff))
                if val:
                    mat.data[layout.kernel_position(d + 1, b)][col] = -val
        diffs[d] = mat
    return ChainComplexQ(dims, diffs, labels)


def _cotangent_layout(src_alg: GradedAlgebra, shift: int):
    """Positions of d_dR(g) inside the shifted cotangent complex."""
    by_degree: dict[int, list[int]] = {}
    for idx, g in enumerate(src_alg.generators):
        by_degree.setdefault(g.degree - shift, []).append(idx)
    position = {}
    for d, idxs in by_degree.items():
        for pos, idx in enumerate(idxs):
            position[idx] = (d, pos)
    return by_degree, position


def chi_columns_symbolic(data) -> tuple[dict[str, dict[str, AlgElement]],
                                        dict[int, dict[str, AlgElement]]]:
    """The chi map on basis fields, as one-form coefficient maps over B.

    Source coordinate fields contract d_dR(Lambda); kernel generators contract
    d_dR(alpha0) and push along beta.
    """
    src_cols: dict[str, dict[str, AlgElement]] = {}
    two_form = de_rham_d(data.lambda_witness)
    for g in data.source.algebra.generators:
        form = contract(VectorField.coordinate(data.source_dr, g.name), two_form)
        src_cols[g.name] = decompose_one_form(form)
    ker_cols: dict[int, dict[str, AlgElement]] = {}
    target_two_form = de_rham_d(data.target.alpha0)
    coord_names, _ = _kernel_layout(data.target)
    tgt_alg = data.target.spec.algebra
    for pos, field in enumerate(data.kernel_fields):
        # the [-1] shift of the kernel twists the contraction map by the
        # Koszul sign -(-1)^{|a|} of the paired coordinate
        par = tgt_alg.parities[tgt_alg.index(coord_names[pos])]
        s_sign = 1 if par else -1
        pulled = push_forward(
            data.beta, data.target.dr, data.source_dr,
            contract(field, target_two_form),
        )
        ker_cols[pos] = {n: c.scale(s_sign) for n, c in decompose_one_form(pulled).items()}
    return src_cols, ker_cols


def chi_map_at(data, point: PointAssignment, layout: _FiberLayout,
               fiber: ChainComplexQ, omega: ChainComplexQ) -> ComplexMap:
    """chi as a certified map of complexes fiber -> shifted cotangent."""
    src_alg = data.source.algebra
    shift = data.k - 1
    _, position = _cotangent_layout(src_alg, shift)
    src_cols, ker_cols = chi_columns_symbolic(data)
    mats: dict[int, Matrix] = {}

    def ensure(diag_degree):
        if diag_degree not in mats:
            mats[diag_degree] = Matrix(omega.dim(diag_degree), fiber.dim(diag_degree))
        return mats[diag_degree]

    for d in layout.degrees():
        ensure(d)
        for cj, j in enumerate(layout.source_by_degree.get(d, [])):
            comps = src_cols[src_alg.generators[j].name]
            for name, coeff in comps.items():
                idx = src_alg.index(name)
                rd, rp = position[idx]
                val = point.evaluate(coeff)
                if not val:
                    continue
                if rd != d:
                    raise DegreeMismatch("chi entry lands in the wrong degree")
                ensure(d).data[rp][cj] = val
        for cj, a in enumerate(layout.kernel_by_degree.get(d, [])):
            col = layout.kernel_offset(d) + cj
            for name, coeff in ker_cols[a].items():
                idx = src_alg.index(name)
                rd, rp = position[idx]
                val = point.evaluate(coeff)
                if not val:
                    continue
                if rd != d:
                    raise DegreeMismatch("chi entry lands in the wrong degree")
                ensure(d).data[rp][col] = val
    return ComplexMap(fiber, omega, mats)


# ---------------------------------------------------------------------------
# the strict subcomplex C and the block description of chi
# ---------------------------------------------------------------------------


@dataclass
class ChiBlocks:
    """Per-degree blocks of chi on the subcomplex C, entries over B^0.

    ``uv_block``: rows d_dR(u/v) of degree k-1+i, columns d/d(u), d/d(v) of
    variable degree -i.  ``y_block``: rows d_dR(xt) of degree k-1+i, columns
    the shifted kernel fields d/d(y) of variable degree 1-i.
    """

    degree: int
    uv_rows: list[str]
    uv_cols: list[str]
    uv_block: list[list[AlgElement]]
    y_rows: list[str]
    y_cols: list[str]
    y_block: list[list[AlgElement]]


def _subcomplex_columns(data, degree: int):
    """C^degree: u/v coordinate fields of variable degree -degree, then
    kernel y-fields of variable degree 1-degree."""
    src_alg = data.source.algebra
    uv_cols = []
    for g in src_alg.generators:
        base = g.name.split("_")[0].rstrip("0123456789")
        if base in ("u", "v") and -g.degree == degree:
            uv_cols.append(g.name)
    names, _ = _kernel_layout(data.target)
    y_cols = []
    for pos, field in enumerate(data.kernel_fields):
        if field.degree() + 1 != degree:
            continue
        if names[pos].startswith("y"):
            y_cols.append(pos)
    return uv_cols, y_cols


def _target_rows(data, degree: int):
    """Target basis d_dR(g) with |g| = (k-1) + degree, split xt vs u/v."""
    src_alg = data.source.algebra
    want = data.k - 1 + degree
    xt_rows, uv_rows = [], []
    for g in src_alg.generators:
        if g.degree != want:
            continue
        base = g.name.split("_")[0].rstrip("0123456789")
        if base in ("u", "v"):
            uv_rows.append(g.name)
        else:
            xt_rows.append(g.name)
    return xt_rows, uv_rows


def chi_rho_blocks(data, degree: int) -> ChiBlocks:
    """The two certified blocks of chi at one fiber degree.

    Entries are elements of B (degree 0 for Darboux data); both blocks are
    plus/minus permutation matrices exactly when the model is non-degenerate.
    """
    max_degree = 1 - data.k
    if degree < 0 or degree > max_degree:
        raise DegreeOutOfRange(
            f"fiber degree must lie in [0, {max_degree}], got {degree}"
        )
    src_cols, ker_cols = chi_columns_symbolic(data)
    uv_cols, y_cols = _subcomplex_columns(data, degree)
    xt_rows, uv_rows = _target_rows(data, degree)
    zero = data.source.algebra.zero()
    uv_block = [
        [src_cols[c].get(r, zero) for c in uv_cols] for r in uv_rows
    ]
    names, _ = _kernel_layout(data.target)
    y_block = [
        [ker_cols[pos].get(r, zero) for pos in y_cols] for r in xt_rows
    ]
    return ChiBlocks(
        degree=degree,
        uv_rows=uv_rows,
        uv_cols=uv_cols,
        uv_block=uv_block,
        y_rows=xt_rows,
        y_cols=[names[pos] for pos in y_cols],
        y_block=y_block,
    )


def _alg_det(rows: list[list[AlgElement]], algebra: GradedAlgebra) -> AlgElement:
    """Cofactor-expansion determinant of a matrix of degree-0 elements."""
    n = len(rows)
    if n == 0:
        return algebra.one()
    if n == 1:
        return rows[0][0]
    acc = algebra.zero()
    for c in range(n):
        entry = rows[0][c]
        if entry.is_zero():
            continue
        minor = [[row[x] for x in range(n) if x != c] for row in rows[1:]]
        term = entry * _alg_det(minor, algebra)
        acc = acc + term if c % 2 == 0 else acc - term
    return acc


def strict_subcomplex_report(data) -> VerificationReport:
    """Certify chi restricted to C: per degree the combined block (C columns
    against the full shifted cotangent basis) is square with unit determinant."""
    report = VerificationReport()
    src_alg = data.source.algebra
    src_cols, ker_cols = chi_columns_symbolic(data)
    for degree in range(0, 2 - data.k):
        uv_cols, y_cols = _subcomplex_columns(data, degree)
        xt_rows, uv_rows = _target_rows(data, degree)
        rows = xt_rows + uv_rows
        ncols = len(uv_cols) + len(y_cols)
        if not rows and not ncols:
            continue
        with timed_check() as t:
            if len(rows) != ncols:
                report.add(
                    f"strict_iso_C[{degree}]",
                    "chi|_C is a square block per degree",
                    False,
                    f"{len(rows)} target rows vs {ncols} subcomplex columns",
                    t.elapsed,
                )
                continue
            matrix = []
            for r in rows:
                line = [src_cols[c].get(r, src_alg.zero()) for c in uv_cols]
                line += [ker_cols[pos].get(r, src_alg.zero()) for pos in y_cols]
                matrix.append(line)
            det = _alg_det(matrix, src_alg)
            unit = det.constant_value()
        report.add(
            f"strict_iso_C[{degree}]",
            "det(chi|_C) is a nonzero rational unit",
            unit is not None and unit != 0,
            f"det = {det}",
            t.elapsed,
        )
    return report


def check_legendrian_nondegeneracy(
    data, points: list[PointAssignment]
) -> VerificationReport:
    """Strict subcomplex certification plus cone acyclicity at each point."""
    report = strict_subcomplex_report(data)
    layout = _fiber_layout(data)
    shift = data.k - 1
    for point in points:
        with timed_check() as t:
            try:
                fiber = fiber_complex_at(data, point, layout)
                omega = cotangent_complex_at(data.source, point).shift(shift)
                chi = chi_map_at(data, point, layout, fiber, omega)
                ok, witness = is_quasi_iso(chi)
            except NotAChainMap as exc:
                ok, witness = False, f"chi is not a chain map: {exc}"
        report.add(
            f"cone_acyclic@{point.to_dict()}",
            "mapping cone of chi is acyclic",
            ok,
            witness,
            t.elapsed,
        )
    return report


# ---------------------------------------------------------------------------
# the affine 1-jet zero section
# ---------------------------------------------------------------------------


@dataclass
class JetZeroSectionData:
    """Zero section of the shifted 1-jet target over a smooth base."""

    shift: int
    m0: int
    target: CdgaPresentation
    target_dr: DeRhamComplex
    alpha: DeRhamForm
    source: CdgaPresentation
    source_dr: DeRhamComplex
    beta: CdgaMorphism
    lambda_witness: DeRhamForm
    kernel_fields: list[VectorField]
    rho: dict[str, int]

    @property
    def k(self) -> int:
        return self.shift


def build_jet1_zero_section(m0: int, n: int) -> JetZeroSectionData:
    """Target Spec A(0)[y_j, z] with alpha = -d_dR(z) + sum y_j d_dR(x_j) and
    zero differential; source the smooth base; beta kills y and z."""
    if n >= 0:
        raise UnsupportedShift(f"the 1-jet shift must be negative, got {n}")
    if m0 < 0:
        raise DegreeMismatch("base variable count must be non-negative")
    gens = [GradedGenerator(x_name(j, 0), 0) for j in range(1, m0 + 1)]
    gens.append(GradedGenerator(Z_NAME, n))
    gens += [GradedGenerator(y_name(j, 0), n) for j in range(1, m0 + 1)]
    target = CdgaPresentation(GradedAlgebra(gens), {})
    target_dr = DeRhamComplex(target)
    alpha = -target_dr.symbol(Z_NAME)
    for j in range(1, m0 + 1):
        alpha = alpha + wedge(
            target_dr.inject(target.algebra.gen(y_name(j, 0))),
            target_dr.symbol(x_name(j, 0)),
        )
    source = CdgaPresentation(
        GradedAlgebra([GradedGenerator(xt_name(j, 0), 0) for j in range(1, m0 + 1)]),
        {},
    )
    source_dr = DeRhamComplex(source)
    images = {x_name(j, 0): source.algebra.gen(xt_name(j, 0)) for j in range(1, m0 + 1)}
    images[Z_NAME] = source.algebra.zero()
    for j in range(1, m0 + 1):
        images[y_name(j, 0)] = source.algebra.zero()
    beta = CdgaMorphism(target, source, images)

    fields: list[VectorField] = []
    alg = target.algebra
    for j in range(1, m0 + 1):
        solved = None
        for c in (Fraction(1), Fraction(-1)):
            candidate = VectorField(
                target_dr,
                [(alg.one(), x_name(j, 0)), (alg.gen(y_name(j, 0)).scale(c), Z_NAME)],
            )
            if contract(candidate, alpha).is_zero():
                solved = candidate
                break
        if solved is None:
            raise DegreeMismatch(f"no kernel completion found for d/d(x{j})")
        fields.append(solved)
    for j in range(1, m0 + 1):
        fields.append(VectorField.coordinate(target_dr, y_name(j, 0)))
    rho = {xt_name(j, 0): j - 1 for j in range(1, m0 + 1)}
    return JetZeroSectionData(
        shift=n,
        m0=m0,
        target=target,
        target_dr=target_dr,
        alpha=alpha,
        source=source,
        source_dr=source_dr,
        beta=beta,
        lambda_witness=source_dr.zero(1),
        kernel_fields=fields,
        rho=rho,
    )


def verify_jet1_zero_section(data: JetZeroSectionData,
                             points: list[PointAssignment]) -> VerificationReport:
    report = VerificationReport()
    with timed_check() as t:
        pulled = push_forward(data.beta, data.target_dr, data.source_dr, data.alpha)
    report.add("pullback_alpha", "beta_*(alpha) = 0 exactly",
               pulled.is_zero(), str(pulled), t.elapsed)
    for pos, field in enumerate(data.kernel_fields):
        with timed_check() as t:
            residual = contract(field, data.alpha)
        report.add(
            f"kernel_membership[{pos}]",
            f"iota_({field})(alpha) = 0",
            residual.is_zero(),
            str(residual),
            t.elapsed,
        )
    layout = _jet_fiber_layout(data)
    for point in points:
        with timed_check() as t:
            try:
                fiber = _jet_fiber_complex_at(data, point, layout)
                omega = cotangent_complex_at(data.source, point).shift(data.shift - 1)
                chi = _jet_chi_at(data, point, layout, fiber, omega)
                ok, witness = is_quasi_iso(chi)
            except NotAChainMap as exc:
                ok, witness = False, f"chi is not a chain map: {exc}"
        report.add(
            f"cone_acyclic@{point.to_dict()}",
            "mapping cone of chi is acyclic",
            ok,
            witness,
            t.elapsed,
        )
    return report


def _jet_fiber_layout(data: JetZeroSectionData) -> _FiberLayout:
    source_by_degree: dict[int, list[int]] = {}
    for idx, g in enumerate(data.source.algebra.generators):
        source_by_degree.setdefault(-g.degree, []).append(idx)
    kernel_by_degree: dict[int, list[int]] = {}
    for pos, field in enumerate(data.kernel_fields):
        kernel_by_degree.setdefault(field.degree() + 1, []).append(pos)
    return _FiberLayout(source_by_degree, kernel_by_degree)


def _jet_fiber_complex_at(data: JetZeroSectionData, point: PointAssignment,
                          layout: _FiberLayout) -> ChainComplexQ:
    # all differentials vanish; only the rho block survives
    require_classical_point(data.source, point)
    src_alg = data.source.algebra
    dims = {d: layout.dim(d) for d in layout.degrees()}
    labels = {
        d: [f"d/d({src_alg.generators[i].name})"
            for i in layout.source_by_degree.get(d, [])]
        + [f"ker[{i}][1]" for i in layout.kernel_by_degree.get(d, [])]
        for d in layout.degrees()
    }
    diffs: dict[int, Matrix] = {}
    for d in layout.degrees():
        rows, cols = layout.dim(d + 1), layout.dim(d)
        if not rows or not cols:
            continue
        mat = Matrix(rows, cols)
        for cj, j in enumerate(layout.source_by_degree.get(d, [])):
            pos = data.rho.get(src_alg.generators[j].name)
            if pos is not None and pos in layout.kernel_by_degree.get(d + 1, []):
                mat.data[layout.kernel_position(d + 1, pos)][cj] = Fraction(1)
        diffs[d] = mat
    return ChainComplexQ(dims, diffs, labels)


def _jet_chi_at(data: JetZeroSectionData, point: PointAssignment,
                layout: _FiberLayout, fiber: ChainComplexQ,
                omega: ChainComplexQ) -> ComplexMap:
    src_alg = data.source.algebra
    _, position = _cotangent_layout(src_alg, data.shift - 1)
    two_form = de_rham_d(data.alpha)
    # kernel generators pair d/dx with d/dx + y d/dz (x even, sign -1) and
    # d/dy with itself (parity of the shift n)
    tgt_alg = data.target.algebra
    coord = [f"x{j + 1}" for j in range(data.m0)] + [
        f"y{j + 1}_km0" for j in range(data.m0)
    ]
    mats: dict[int, Matrix] = {}
    for d in layout.degrees():
        mats.setdefault(d, Matrix(omega.dim(d), fiber.dim(d)))
        for cj, a in enumerate(layout.kernel_by_degree.get(d, [])):
            col = layout.kernel_offset(d) + cj
            s_sign = 1 if tgt_alg.parities[tgt_alg.index(coord[a])] else -1
            pulled = push_forward(
                data.beta, data.target_dr, data.source_dr,
                contract(data.kernel_fields[a], two_form),
            ).scale(s_sign)
            for name, coeff in decompose_one_form(pulled).items():
                rd, rp = position[src_alg.index(name)]
                val = point.evaluate(coeff)
                if not val:
                    continue
                if rd != d:
                    raise DegreeMismatch("chi entry lands in the wrong degree")
                mats[d].data[rp][col] = val
    return ComplexMap(fiber, omega, mats)


# ---------------------------------------------------------------------------
# Legendrians over the point: transfer to symplectic/contact data
# ---------------------------------------------------------------------------

T_NAME = "t"


def point_source_shape(n: int) -> int:
    """Levels of u/v pairs for a point-target source of shift n (any n <= 0)."""
    if n > 0:
        raise UnsupportedShift(f"point-target shift must be <= 0, got {n}")
    return -(n // 2)


def build_point_source(n: int, shape, superpotential_fn):
    """A source cdga for a Legendrian over the point: u/v pairs only.

    Pairs u_j^{-i}, v_j^{n-1+i} for i = 0..s with s = -floor(n/2); the
    superpotential G of degree n must satisfy the absolute master equation
    sum dG/du * dG/dv = 0 (the relative equation with zero target), which
    also makes Lambda = sum u d_dR(v) closed under the induced differential.
    """
    from .algebra import partial_derivative

    s = point_source_shape(n)
    shape = _check_shape(shape, s + 1, "n")
    gens: list[GradedGenerator] = []
    u_rows, v_rows = [], []
    for i in range(s + 1):
        row = tuple(u_name(j, i) for j in range(1, shape[i] + 1))
        u_rows.append(row)
        gens.extend(GradedGenerator(name, -i) for name in row)
    for i in range(s + 1):
        row = tuple(v_name(j, i) for j in range(1, shape[i] + 1))
        v_rows.append(row)
        gens.extend(GradedGenerator(name, n - 1 + i) for name in row)
    algebra = GradedAlgebra(gens)
    names = SourceNames((), tuple(u_rows), tuple(v_rows))
    g = superpotential_fn(algebra, names)
    if not g.is_zero() and g.degree() != n:
        raise DegreeMismatch(f"superpotential must have degree {n}, got {g.degree()}")
    residual = algebra.zero()
    for i in range(1, s + 1):
        for j in range(1, shape[i] + 1):
            residual = residual + partial_derivative(g, u_name(j, i)) \
                * partial_derivative(g, v_name(j, i))
    if not residual.is_zero():
        raise RelativeMasterEquationViolated(str(residual))
    images: dict[str, AlgElement] = {}
    for i in range(1, s + 1):
        for j in range(1, shape[i] + 1):
            images[u_name(j, i)] = partial_derivative(g, v_name(j, i)).scale(
                _sign((1 - i) * n)
            )
    for i in range(s + 1):
        for j in range(1, shape[i] + 1):
            images[v_name(j, i)] = partial_derivative(g, u_name(j, i))
    presentation = CdgaPresentation(algebra, images)
    return presentation, names, g


@dataclass
class PointTargetData:
    """sigma = d_dR(t) + Lambda over B[t], and omega = d_dR(Lambda) over B."""

    shift: int
    base: CdgaPresentation
    base_dr: DeRhamComplex
    omega: DeRhamForm
    extended: CdgaPresentation
    extended_dr: DeRhamComplex
    inclusion: CdgaMorphism
    sigma: DeRhamForm
    kernel_fields: list[VectorField]
    report: VerificationReport


def point_target_transfer(
    presentation: CdgaPresentation,
    lam: DeRhamForm,
    n: int,
    points: list[PointAssignment],
) -> PointTargetData:
    """Transfer a Legendrian witness over the point target.

    Requires d_B(Lambda) = 0 (raises NotClosed otherwise) and non-degeneracy
    of d_dR(Lambda) at every supplied point (raises DegenerateAtPoint).  The
    contact variable t has degree n-1, the unique choice making
    sigma = d_dR(t) + Lambda homogeneous with iota_{d/dt}(sigma) = 1.
    """
    if n > 0:
        raise UnsupportedShift(f"point-target shift must be <= 0, got {n}")
    base_dr = lam.complex
    if base_dr.presentation is not presentation:
        from .errors import PresentationMismatch

        raise PresentationMismatch("Lambda does not live over the given presentation")
    if lam.weight != 1:
        raise DegreeMismatch("Lambda must be a one-form")
    if not lam.is_zero() and lam.degree() != n - 1:
        raise DegreeMismatch(
            f"Lambda must have degree {n - 1}, got {lam.degree()}"
        )
    closed = internal_d(lam)
    if not closed.is_zero():
        raise NotClosed(f"d_B(Lambda) = {closed}")
    report = VerificationReport()
    omega = de_rham_d(lam)
    _add_zero(report, "omega_ddr_closed", "d_dR(d_dR(Lambda)) = 0", de_rham_d(omega))
    _add_zero(report, "omega_d_closed", "d_B(d_dR(Lambda)) = 0", internal_d(omega))

    base_alg = presentation.algebra
    ext_gens = list(base_alg.generators) + [GradedGenerator(T_NAME, n - 1)]
    ext_alg = GradedAlgebra(ext_gens)
    rename = {g.name: ext_alg.gen(g.name) for g in base_alg.generators}
    ext_images = {
        base_alg.generators[i].name: substitute(img, ext_alg, rename)
        for i, img in presentation.d_images.items()
    }
    extended = CdgaPresentation(ext_alg, ext_images)
    extended_dr = DeRhamComplex(extended)
    inclusion = CdgaMorphism(
        presentation, extended,
        {g.name: ext_alg.gen(g.name) for g in base_alg.generators},
    )
    lam_ext = push_forward(inclusion, base_dr, extended_dr, lam)
    sigma = extended_dr.symbol(T_NAME) + lam_ext

    reeb = contract(VectorField.coordinate(extended_dr, T_NAME), sigma)
    _add_zero(report, "reeb_normalization", "iota_{d/dt}(sigma) = 1",
              reeb - extended_dr.scalar(1))

    fields: list[VectorField] = []
    for g in base_alg.generators:
        correction = contract(
            VectorField.coordinate(extended_dr, g.name), lam_ext
        )
        coeff = AlgElement(ext_alg, dict(correction.elem.terms))
        field = VectorField(extended_dr, [(ext_alg.one(), g.name),
                                          (-coeff, T_NAME)])
        residual = contract(field, sigma)
        _add_zero(report, f"sigma_kernel[{g.name}]",
                  f"iota_(d/d({g.name}) - iota(Lambda) d/dt)(sigma) = 0", residual)
        fields.append(field)

    two_sigma = de_rham_d(sigma)
    base_fields = [VectorField.coordinate(base_dr, g.name)
                   for g in base_alg.generators]
    for point in points:
        require_classical_point(presentation, point)
        size = len(base_fields)
        p_omega = Matrix(size, size)
        p_sigma = Matrix(size, size)
        for a in range(size):
            inner_o = contract(base_fields[a], omega)
            inner_s = contract(fields[a], two_sigma)
            for b in range(size):
                vo = contract(base_fields[b], inner_o)
                vs = contract(fields[b], inner_s)
                p_omega.data[a][b] = point.evaluate(
                    AlgElement(base_alg, dict(vo.elem.terms))
                )
                p_sigma.data[a][b] = point.evaluate(
                    AlgElement(ext_alg, dict(vs.elem.terms))
                )
        report.add(
            f"pairing_match@{point.to_dict()}",
            "sigma-kernel pairing equals the omega pairing entry-wise",
            p_omega == p_sigma,
            f"omega {p_omega.data} vs sigma {p_sigma.data}",
        )
        if p_omega.rank() != size:
            raise DegenerateAtPoint(
                f"d_dR(Lambda) pairing has rank {p_omega.rank()} < {size} at "
                f"{point.to_dict()}"
            )
        report.add(
            f"omega_nondegenerate@{point.to_dict()}",
            "d_dR(Lambda) pairing is invertible",
            True,
        )
    return PointTargetData(
        shift=n,
        base=presentation,
        base_dr=base_dr,
        omega=omega,
        extended=extended,
        extended_dr=extended_dr,
        inclusion=inclusion,
        sigma=sigma,
        kernel_fields=fields,
        report=report,
    )


def _add_zero(report: VerificationReport, name: str, equation: str, value) -> None:
    with timed_check() as t:
        zero = value.is_zero()
    report.add(name, equation, zero, str(value), t.elapsed)

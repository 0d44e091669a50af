"""Shifted symplectic and contact Darboux models on the target side.

Builders take a shape (odd negative shift k, variable counts m_0..m_l with
l = -(k+1)/2) and a Hamiltonian of degree k+1, produce the standard-form
presentation with its Darboux one-/two-form, and verifiers certify every
defining identity as an exact symbolic zero.

Variable naming follows the instance-file convention: ``x2_m1`` is the
second degree -1 target variable, ``y1_km0``/``y1_kp2`` carry superscripts
k+0/k+2, ``z`` is the distinguished contact generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    AlgElement,
    GradedAlgebra,
    GradedGenerator,
    partial_derivative,
)
from .cdga import CdgaPresentation, check_d_squared
from .derham import (
    DeRhamComplex,
    DeRhamForm,
    VectorField,
    contract,
    de_rham_d,
    internal_d,
    wedge,
)
from .errors import (
    DegreeMismatch,
    MasterEquationViolated,
    ShapeMismatch,
    UnsupportedShift,
)
from .homcheck import (
    Matrix,
    PointAssignment,
    require_classical_point,
)
from .report import VerificationReport, timed_check

# ---------------------------------------------------------------------------
# naming and shape helpers
# ---------------------------------------------------------------------------


def x_name(j: int, i: int) -> str:
    return f"x{j}" if i == 0 else f"x{j}_m{i}"


def y_name(j: int, i: int) -> str:
    # superscript k+i rendered relative to k; i = 0 is written km0
    return f"y{j}_km0" if i == 0 else f"y{j}_kp{i}"


Z_NAME = "z"


def check_shift(k: int) -> int:
    """Validate the shift and return l = -(k+1)/2 (number of negative x levels)."""
    if k >= 0 or k % 2 == 0:
        raise UnsupportedShift(
            f"shift k must be a negative odd integer, got {k} "
            "(even shifts are not implemented)"
        )
    return -((k + 1) // 2)


def _check_shape(m, expected_len: int, label: str) -> tuple[int, ...]:
    m = tuple(int(v) for v in m)
    if len(m) != expected_len:
        raise ShapeMismatch(
            f"shape vector {label} must have {expected_len} entries, got {len(m)}"
        )
    if any(v < 0 for v in m):
        raise ShapeMismatch(f"shape vector {label} has negative entries")
    return m


@dataclass(frozen=True)
class TargetNames:
    """Name tables for a Darboux target: x[i][j-1], y[i][j-1], optional z."""

    x: tuple[tuple[str, ...], ...]
    y: tuple[tuple[str, ...], ...]
    z: str | None

    def all_x(self):
        return [(i, j, n) for i, row in enumerate(self.x) for j, n in enumerate(row, 1)]

    def all_y(self):
        return [(i, j, n) for i, row in enumerate(self.y) for j, n in enumerate(row, 1)]


def target_algebra(k: int, m, *, with_z: bool) -> tuple[GradedAlgebra, TargetNames]:
    """The free graded algebra of a symplectic (no z) or contact target."""
    ell = check_shift(k)
    m = _check_shape(m, ell + 1, "m")
    gens: list[GradedGenerator] = []
    xs, ys = [], []
    for i in range(ell + 1):
        row = tuple(x_name(j, i) for j in range(1, m[i] + 1))
        xs.append(row)
        gens.extend(GradedGenerator(n, -i) for n in row)
    if with_z:
        gens.append(GradedGenerator(Z_NAME, k))
    for i in range(ell + 1):
        row = tuple(y_name(j, i) for j in range(1, m[i] + 1))
        ys.append(row)
        gens.extend(GradedGenerator(n, k + i) for n in row)
    algebra = GradedAlgebra(gens)
    return algebra, TargetNames(tuple(xs), tuple(ys), Z_NAME if with_z else None)


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------


def _validate_hamiltonian(algebra: GradedAlgebra, names: TargetNames,
                          k: int, h: AlgElement) -> None:
    if h.algebra is not algebra:
        raise DegreeMismatch("Hamiltonian must live over the target algebra")
    if not h.is_zero() and h.degree() != k + 1:
        raise DegreeMismatch(
            f"Hamiltonian must have degree {k + 1}, got {h.degree()}"
        )
    if names.z is not None:
        zi = algebra.index(names.z)
        for mono in h.terms:
            if any(mono[t] == zi for t in range(0, len(mono), 2)):
                raise DegreeMismatch("Hamiltonian must not involve z")


@dataclass
class SymplecticDarbouxSpec:
    """Shape (k, m) plus a Hamiltonian of degree k+1 over the target algebra."""

    k: int
    m: tuple[int, ...]
    hamiltonian: AlgElement
    algebra: GradedAlgebra
    names: TargetNames

    @classmethod
    def create(cls, k: int, m, hamiltonian_fn) -> "SymplecticDarbouxSpec":
        algebra, names = target_algebra(k, m, with_z=False)
        h = hamiltonian_fn(algebra, names)
        ell = check_shift(k)
        spec = cls(k, _check_shape(m, ell + 1, "m"), h, algebra, names)
        _validate_hamiltonian(algebra, names, k, h)
        return spec


@dataclass
class ContactDarbouxSpec:
    """As the symplectic spec, with the distinguished degree-k generator z."""

    k: int
    m: tuple[int, ...]
    hamiltonian: AlgElement
    algebra: GradedAlgebra
    names: TargetNames

    @classmethod
    def create(cls, k: int, m, hamiltonian_fn) -> "ContactDarbouxSpec":
        algebra, names = target_algebra(k, m, with_z=True)
        h = hamiltonian_fn(algebra, names)
        ell = check_shift(k)
        spec = cls(k, _check_shape(m, ell + 1, "m"), h, algebra, names)
        _validate_hamiltonian(algebra, names, k, h)
        return spec


# ---------------------------------------------------------------------------
# Hamiltonian decomposition and the master equation
# ---------------------------------------------------------------------------


def decompose_linear(e: AlgElement, gen_names: list[str]):
    """Split ``e = rest + sum(coeff_g * g)`` over the listed generators.

    Requires each term to contain at most one listed generator, to exponent
    one (forced by degree for Darboux Hamiltonians).  The reconstruction is
    verified exactly, so reordering signs cannot slip through.
    """
    alg = e.algebra
    indices = {alg.index(n): n for n in gen_names}
    rest_terms: dict = {}
    linear: dict[str, dict] = {}
    for mono, c in e.terms.items():
        hits = [t for t in range(0, len(mono), 2) if mono[t] in indices]
        if not hits:
            rest_terms[mono] = c
            continue
        if len(hits) > 1 or mono[hits[0] + 1] != 1:
            raise DegreeMismatch(
                "element is not linear in the designated generators"
            )
        t = hits[0]
        name = indices[mono[t]]
        stripped = mono[:t] + mono[t + 2:]
        # the listed generators sort after every other factor they meet in
        # Darboux Hamiltonians, but recompute the sign generically below
        linear.setdefault(name, {})[stripped] = c
    rest = AlgElement(alg, rest_terms)
    coeffs = {name: AlgElement(alg, terms) for name, terms in linear.items()}
    rebuilt = rest
    for name, coeff in coeffs.items():
        rebuilt = rebuilt + coeff * alg.gen(name)
    if rebuilt != e:
        # a stripped generator crossed an odd factor: redo with signs
        coeffs = {}
        for mono, c in e.terms.items():
            hits = [t for t in range(0, len(mono), 2) if mono[t] in indices]
            if not hits:
                continue
            t = hits[0]
            name = indices[mono[t]]
            suffix_par = 0
            for s in range(t + 2, len(mono), 2):
                suffix_par ^= alg.parities[mono[s]] & mono[s + 1]
            sign = -1 if (alg.parities[mono[t]] & suffix_par) else 1
            stripped = mono[:t] + mono[t + 2:]
            acc = coeffs.setdefault(name, {})
            acc[stripped] = acc.get(stripped, Fraction(0)) + sign * c
        coeffs = {n: AlgElement(alg, {m: v for m, v in t.items() if v})
                  for n, t in coeffs.items()}
        rebuilt = rest
        for name, coeff in coeffs.items():
            rebuilt = rebuilt + coeff * alg.gen(name)
        if rebuilt != e:
            raise DegreeMismatch("linear decomposition failed to reconstruct")
    return rest, coeffs


def hamiltonian_decomposition(spec):
    """H = H_plus + sum H_{ij} y_j^{k+i}; returns (H_plus, {(i, j): H_ij})."""
    y_names = [n for _, _, n in spec.names.all_y()]
    rest, coeffs = decompose_linear(spec.hamiltonian, y_names)
    table = {}
    for i, j, n in spec.names.all_y():
        if n in coeffs:
            table[(i, j)] = coeffs[n]
    return rest, table


def master_equation_residual(spec) -> AlgElement:
    """sum_{i>=1} dH/dx_j^{-i} * dH/dy_j^{k+i} (degree k+2)."""
    h = spec.hamiltonian
    acc = spec.algebra.zero()
    for i in range(1, len(spec.m)):
        for j in range(1, spec.m[i] + 1):
            acc = acc + partial_derivative(h, x_name(j, i)) * partial_derivative(
                h, y_name(j, i)
            )
    return acc


def check_master_equation(spec) -> VerificationReport:
    """The classical master equation, plus its y-free and y-linear components.

    The component equations are the decomposition of the residual by
    y-content (the expanded form the Hamiltonian decomposition satisfies).
    """
    report = VerificationReport()
    with timed_check() as t:
        residual = master_equation_residual(spec)
    report.add(
        "master_equation",
        "sum dH/dx * dH/dy = 0",
        residual.is_zero(),
        str(residual),
        t.elapsed,
    )
    y_names = [n for _, _, n in spec.names.all_y()]
    with timed_check() as t:
        rest, coeffs = decompose_linear(residual, y_names)
    report.add(
        "master_equation_component_plus",
        "y-free component of the master equation = 0",
        rest.is_zero(),
        str(rest),
        t.elapsed,
    )
    for name in y_names:
        if name in coeffs and not coeffs[name].is_zero():
            report.add(
                f"master_equation_component[{name}]",
                f"coefficient of {name} in the master equation = 0",
                False,
                str(coeffs[name]),
            )
    return report


# ---------------------------------------------------------------------------
# built data
# ---------------------------------------------------------------------------


@dataclass
class SymplecticDarbouxData:
    spec: SymplecticDarbouxSpec
    presentation: CdgaPresentation
    dr: DeRhamComplex
    omega0: DeRhamForm
    phi: DeRhamForm
    phi_plus: DeRhamForm
    h_plus: AlgElement
    h_linear: dict = field(default_factory=dict)

    @property
    def names(self) -> TargetNames:
        return self.spec.names


@dataclass
class ContactDarbouxData:
    spec: ContactDarbouxSpec
    presentation: CdgaPresentation
    dr: DeRhamComplex
    alpha0: DeRhamForm
    phi: DeRhamForm
    phi_plus: DeRhamForm
    h_plus: AlgElement
    h_linear: dict
    corrector: AlgElement  # sum (-1)^i i x y, the bracket inside dz

    @property
    def names(self) -> TargetNames:
        return self.spec.names

    @property
    def k(self) -> int:
        return self.spec.k


def _sign(exp: int) -> int:
    return -1 if exp & 1 else 1


def _differential_images(spec, *, contact: bool) -> dict[str, AlgElement]:
    """dx = (-1)^{(1-i)(k+1)} dH/dy (i >= 1), dy = dH/dx; the factor is 1 for
    odd k and is kept literal to match the stated general form."""
    k = spec.k
    h = spec.hamiltonian
    images: dict[str, AlgElement] = {}
    for i, j, n in spec.names.all_x():
        if i == 0:
            continue
        img = partial_derivative(h, y_name(j, i)).scale(_sign((1 - i) * (k + 1)))
        images[n] = img
    for i, j, n in spec.names.all_y():
        images[n] = partial_derivative(h, x_name(j, i))
    return images


def _xy_corrector(spec) -> AlgElement:
    """sum_{i,j} (-1)^i i x_j^{-i} y_j^{k+i} (x written before y)."""
    acc = spec.algebra.zero()
    for i in range(1, len(spec.m)):
        for j in range(1, spec.m[i] + 1):
            term = spec.algebra.gen(x_name(j, i)) * spec.algebra.gen(y_name(j, i))
            acc = acc + term.scale(_sign(i) * i)
    return acc


def explicit_phi(data) -> DeRhamForm:
    """phi = sum [-i x d_dR(y) + (-1)^{(1-i)(k+1)} (k+i) y d_dR(x)]."""
    spec = data.spec
    dr = data.dr
    k = spec.k
    acc = dr.zero(1)
    for i in range(len(spec.m)):
        for j in range(1, spec.m[i] + 1):
            x = dr.inject(spec.algebra.gen(x_name(j, i)))
            y = dr.inject(spec.algebra.gen(y_name(j, i)))
            if i:
                acc = acc + wedge(x, dr.symbol(y_name(j, i))).scale(-i)
            acc = acc + wedge(y, dr.symbol(x_name(j, i))).scale(
                _sign((1 - i) * (k + 1)) * (k + i)
            )
    return acc


def _phi_plus(spec, dr: DeRhamComplex) -> DeRhamForm:
    """phi_+ = - sum (-1)^{(-i+1)(k+1)} y d_dR(x); the sign is 1 for odd k."""
    acc = dr.zero(1)
    for i in range(len(spec.m)):
        for j in range(1, spec.m[i] + 1):
            y = dr.inject(spec.algebra.gen(y_name(j, i)))
            acc = acc - wedge(y, dr.symbol(x_name(j, i))).scale(
                _sign((-i + 1) * (spec.k + 1))
            )
    return acc


def build_symplectic_darboux(spec: SymplecticDarbouxSpec) -> SymplecticDarbouxData:
    """Target data (A, omega0, phi, H_plus, phi_plus); master equation enforced."""
    cme = check_master_equation(spec)
    if not cme.passed:
        raise MasterEquationViolated(
            "; ".join(c.residual or c.name for c in cme.failures())
        )
    presentation = CdgaPresentation(
        spec.algebra, _differential_images(spec, contact=False)
    )
    dr = DeRhamComplex(presentation)
    omega0 = dr.zero(2)
    for i in range(len(spec.m)):
        for j in range(1, spec.m[i] + 1):
            omega0 = omega0 + wedge(dr.symbol(x_name(j, i)), dr.symbol(y_name(j, i)))
    h_plus, h_linear = hamiltonian_decomposition(spec)
    data = SymplecticDarbouxData(
        spec=spec,
        presentation=presentation,
        dr=dr,
        omega0=omega0,
        phi=dr.zero(1),
        phi_plus=_phi_plus(spec, dr),
        h_plus=h_plus,
        h_linear=h_linear,
    )
    data.phi = explicit_phi(data)
    return data


def build_contact_darboux(spec: ContactDarbouxSpec) -> ContactDarbouxData:
    """Contact target: differential solved from -k dz = H + d[corrector],
    alpha0 = d_dR(z) + sum y d_dR(x), phi = k alpha0 - k d_dR(z) - d_dR[corr]."""
    cme = check_master_equation(spec)
    if not cme.passed:
        raise MasterEquationViolated(
            "; ".join(c.residual or c.name for c in cme.failures())
        )
    k = spec.k
    images = _differential_images(spec, contact=True)
    partial = CdgaPresentation(spec.algebra, images)
    corrector = _xy_corrector(spec)
    z_image = (spec.hamiltonian + partial.d(corrector)).scale(Fraction(-1, k))
    images[Z_NAME] = z_image
    presentation = CdgaPresentation(spec.algebra, images)
    dr = DeRhamComplex(presentation)

    alpha0 = dr.symbol(Z_NAME)
    for i in range(len(spec.m)):
        for j in range(1, spec.m[i] + 1):
            alpha0 = alpha0 + wedge(
                dr.inject(spec.algebra.gen(y_name(j, i))), dr.symbol(x_name(j, i))
            )
    phi = (alpha0.scale(k) - dr.symbol(Z_NAME).scale(k)
           - de_rham_d(dr.inject(corrector)))
    h_plus, h_linear = hamiltonian_decomposition(spec)
    return ContactDarbouxData(
        spec=spec,
        presentation=presentation,
        dr=dr,
        alpha0=alpha0,
        phi=phi,
        phi_plus=dr.symbol(Z_NAME) - alpha0,
        h_plus=h_plus,
        h_linear=h_linear,
        corrector=corrector,
    )


# ---------------------------------------------------------------------------
# identity suites
# ---------------------------------------------------------------------------


def _zero_check(report, name, equation, form_or_elem):
    with timed_check() as t:
        zero = form_or_elem.is_zero()
    report.add(name, equation, zero, str(form_or_elem), t.elapsed)


def verify_symplectic_identities(data: SymplecticDarbouxData) -> VerificationReport:
    p = data.presentation
    dr = data.dr
    k = data.spec.k
    h = dr.inject(data.spec.hamiltonian)
    h_plus = dr.inject(data.h_plus)
    report = VerificationReport()
    _zero_check(report, "dH", "d(H) = 0", dr.inject(p.d(data.spec.hamiltonian)))
    _zero_check(report, "ddr_H_plus_d_phi", "d_dR(H) + d(phi) = 0",
                de_rham_d(h) + internal_d(data.phi))
    _zero_check(report, "ddr_phi", "d_dR(phi) = k*omega0",
                de_rham_d(data.phi) - data.omega0.scale(k))
    _zero_check(report, "d_omega0", "d(omega0) = 0", internal_d(data.omega0))
    _zero_check(report, "dH_plus", "d(H_plus) = 0", dr.inject(p.d(data.h_plus)))
    _zero_check(report, "ddr_H_plus_plus_d_phi_plus", "d_dR(H_plus) + d(phi_plus) = 0",
                de_rham_d(h_plus) + internal_d(data.phi_plus))
    _zero_check(report, "ddr_phi_plus", "d_dR(phi_plus) = -omega0",
                de_rham_d(data.phi_plus) + data.omega0)
    report.extend(check_d_squared(p))
    return report


def verify_contact_identities(data: ContactDarbouxData) -> VerificationReport:
    p = data.presentation
    dr = data.dr
    k = data.spec.k
    h = dr.inject(data.spec.hamiltonian)
    h_plus = dr.inject(data.h_plus)
    report = VerificationReport()
    _zero_check(report, "dH", "d(H) = 0", dr.inject(p.d(data.spec.hamiltonian)))
    _zero_check(report, "ddr_H_plus_d_phi", "d_dR(H) + d(phi) = 0",
                de_rham_d(h) + internal_d(data.phi))
    _zero_check(report, "ddr_phi", "d_dR(phi) = k*d_dR(alpha0)",
                de_rham_d(data.phi) - de_rham_d(data.alpha0).scale(k))
    _zero_check(report, "d_alpha0", "d(alpha0) = 0", internal_d(data.alpha0))
    _zero_check(report, "dH_plus", "d(H_plus) = 0", dr.inject(p.d(data.h_plus)))
    _zero_check(report, "ddr_H_plus_plus_d_phi_plus", "d_dR(H_plus) + d(phi_plus) = 0",
                de_rham_d(h_plus) + internal_d(data.phi_plus))
    _zero_check(report, "ddr_phi_plus", "d_dR(phi_plus) = -d_dR(alpha0)",
                de_rham_d(data.phi_plus) + de_rham_d(data.alpha0))
    _zero_check(report, "dz_is_H_plus", "d(z) = H_plus",
                dr.inject(p.d(p.algebra.gen(Z_NAME)) - data.h_plus))
    with timed_check() as t:
        reeb = contract(VectorField.coordinate(dr, Z_NAME), data.alpha0)
        residual = reeb - dr.scalar(1)
    report.add("reeb_normalization", "iota_{d/dz}(alpha0) = 1",
               residual.is_zero(), str(residual), t.elapsed)
    _zero_check(report, "phi_explicit",
                "phi matches its explicit x/y expansion",
                data.phi - explicit_phi(data))
    report.extend(check_d_squared(p))
    return report


# ---------------------------------------------------------------------------
# the kernel of alpha0 and non-degeneracy on it
# ---------------------------------------------------------------------------


def kernel_generators(data: ContactDarbouxData) -> list[VectorField]:
    """Certified generators of ker(alpha0): for every pair (i, j) a field
    d/dx - c y d/dz with the sign c solved and certified by iota = 0, then
    all coordinate fields d/dy.  Order: x-fields (i asc, j asc), y-fields."""
    dr = data.dr
    alg = data.spec.algebra
    fields: list[VectorField] = []
    for i, j, n in data.names.all_x():
        base = contract(VectorField.coordinate(dr, n), data.alpha0)
        solved = None
        for c in (Fraction(-1), Fraction(1)):
            candidate = VectorField(
                dr, [(alg.one(), n), (alg.gen(y_name(j, i)).scale(c), Z_NAME)]
            )
            if contract(candidate, data.alpha0).is_zero():
                solved = candidate
                break
        if solved is None:
            raise DegreeMismatch(
                f"no unit multiple of {y_name(j, i)} d/dz closes iota for {n}: "
                f"iota_(d/d{n})(alpha0) = {base}"
            )
        fields.append(solved)
    for i, j, n in data.names.all_y():
        candidate = VectorField.coordinate(dr, n)
        if not contract(candidate, data.alpha0).is_zero():
            raise DegreeMismatch(f"d/d({n}) fails iota(alpha0) = 0")
        fields.append(candidate)
    return fields


def kernel_pairing(data: ContactDarbouxData, fields=None) -> list[list[AlgElement]]:
    """Matrix iota_Vb(iota_Va(d_dR alpha0)) of the kernel pairing (entries in A)."""
    fields = kernel_generators(data) if fields is None else fields
    two_form = de_rham_d(data.alpha0)
    rows = []
    for va in fields:
        inner = contract(va, two_form)
        row = []
        for vb in fields:
            value = contract(vb, inner)
            if value.weight != 0:
                raise DegreeMismatch("pairing did not land in weight 0")
            row.append(AlgElement(data.spec.algebra, dict(value.elem.terms)))
        rows.append(row)
    return rows


def check_nondegenerate_on_kernel(
    data: ContactDarbouxData, points: list[PointAssignment]
) -> VerificationReport:
    """Invertibility of the kernel pairing of d_dR(alpha0) at each point."""
    report = VerificationReport()
    fields = kernel_generators(data)
    pairing = kernel_pairing(data, fields)
    n = len(fields)
    for point in points:
        require_classical_point(data.presentation, point)
        with timed_check() as t:
            mat = Matrix(n, n, [[point.evaluate(e) for e in row] for row in pairing])
            rank = mat.rank()
        report.add(
            f"kernel_pairing@{point.to_dict()}",
            "pairing of d_dR(alpha0) on ker(alpha0) is invertible",
            rank == n,
            f"rank {rank} < {n}",
            t.elapsed,
        )
    return report

"""The bigraded de Rham algebra of a standard-form cdga.

Forms of weight p over a presentation A live in an auxiliary free graded
algebra on the base generators g (parity |g|) together with one-form symbols
d_dR(g) (parity |g| + 1, the shift convention: symbols of even-degree
generators anticommute, symbols of odd-degree generators commute and may
square).  Both gradings are tracked: the internal degree of a term is the sum
of generator degrees of all factors (a symbol d_dR(g) contributes |g|), the
weight is the number of symbol factors.  An element of internal degree k and
weight p is what the usual bigrading writes as a p-form of degree k.

Sign conventions, fixed once and certified by the identity suites:
  * both differentials are odd derivations for the auxiliary parity, with
    the Leibniz sign accumulated over the prefix;
  * the internal differential extends the cdga differential by
    d(d_dR(g)) := -d_dR(d(g)), which makes d o d_dR = -d_dR o d hold;
  * contraction by a coordinate field is transparent over coefficient
    factors and picks up (-1)^((|g|+1) * s) crossing preceding symbols of
    total symbol-parity s.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import AlgElement, GradedAlgebra, GradedGenerator
from .cdga import CdgaMorphism, CdgaPresentation
from .errors import (
    DegreeMismatch,
    PresentationMismatch,
    WeightMismatch,
    WeightZero,
)
from .report import VerificationReport, timed_check


class DeRhamComplex:
    """Auxiliary algebra carrying the forms of one presentation."""

    __slots__ = ("presentation", "aux", "n_base")

    def __init__(self, presentation: CdgaPresentation):
        self.presentation = presentation
        base = presentation.algebra
        n = len(base)
        gens = list(base.generators)
        parities = list(base.parities)
        for g in base.generators:
            gens.append(GradedGenerator(f"d_dR({g.name})", g.degree))
            parities.append((g.degree + 1) & 1)
        self.aux = GradedAlgebra(gens, parities=parities, keep_declared_order=True)
        self.n_base = n

    # -- constructors ---------------------------------------------------------

    def inject(self, e: AlgElement) -> DeRhamForm:
        """A weight-0 form from a base element (indices are shared)."""
        if e.algebra is not self.presentation.algebra:
            raise PresentationMismatch("element lives over a different presentation")
        return DeRhamForm(self, AlgElement(self.aux, dict(e.terms)), 0)

    def zero(self, weight: int = 0) -> DeRhamForm:
        return DeRhamForm(self, self.aux.zero(), weight)

    def scalar(self, value) -> DeRhamForm:
        return DeRhamForm(self, self.aux.scalar(value), 0)

    def symbol(self, gen_name: str) -> DeRhamForm:
        """The one-form d_dR(g)."""
        idx = self.presentation.algebra.index(gen_name)
        elem = AlgElement(self.aux, {(self.n_base + idx, 1): Fraction(1)})
        return DeRhamForm(self, elem, 1)

    def _aux_weight(self, mono: tuple) -> int:
        n = self.n_base
        return sum(mono[t + 1] for t in range(0, len(mono), 2) if mono[t] >= n)

    def form(self, elem: AlgElement, weight: int | None = None) -> DeRhamForm:
        """Wrap an auxiliary element, checking weight homogeneity."""
        weights = {self._aux_weight(m) for m in elem.terms}
        if len(weights) > 1:
            raise WeightMismatch(f"mixed weights {sorted(weights)}")
        found = weights.pop() if weights else None
        if weight is None:
            if found is None:
                raise WeightMismatch("weight of the zero form must be given")
            weight = found
        elif found is not None and found != weight:
            raise WeightMismatch(f"element has weight {found}, expected {weight}")
        return DeRhamForm(self, elem, weight)


class DeRhamForm:
    """A weight-homogeneous form; immutable."""

    __slots__ = ("complex", "elem", "weight")

    def __init__(self, complex: DeRhamComplex, elem: AlgElement, weight: int):
        self.complex = complex
        self.elem = elem
        self.weight = weight

    def is_zero(self) -> bool:
        return self.elem.is_zero()

    def degree(self) -> int | None:
        """Internal degree k (coefficient degrees plus |g| per symbol)."""
        return self.elem.degree()

    def _check_same(self, other: DeRhamForm) -> None:
        if self.complex is not other.complex:
            raise PresentationMismatch("forms live over different presentations")

    def __add__(self, other: DeRhamForm) -> DeRhamForm:
        self._check_same(other)
        if self.weight != other.weight and not (self.is_zero() or other.is_zero()):
            raise WeightMismatch(
                f"cannot add weight {self.weight} to weight {other.weight}"
            )
        weight = other.weight if self.is_zero() and not other.is_zero() else self.weight
        return DeRhamForm(self.complex, self.elem + other.elem, weight)

    def __sub__(self, other: DeRhamForm) -> DeRhamForm:
        return self + (-other)

    def __neg__(self) -> DeRhamForm:
        return DeRhamForm(self.complex, -self.elem, self.weight)

    def scale(self, value) -> DeRhamForm:
        return DeRhamForm(self.complex, self.elem.scale(value), self.weight)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DeRhamForm)
            and self.complex is other.complex
            and self.elem == other.elem
        )

    def __hash__(self):
        return hash(self.elem)

    def __repr__(self) -> str:
        return f"<DeRhamForm w={self.weight} {self.elem}>"

    def __str__(self) -> str:
        return str(self.elem)


def wedge(a: DeRhamForm, b: DeRhamForm) -> DeRhamForm:
    """Weight-additive graded product."""
    a._check_same(b)
    return DeRhamForm(a.complex, a.elem * b.elem, a.weight + b.weight)


def _odd_derivation(dr: DeRhamComplex, images: dict[int, AlgElement], e: AlgElement) -> AlgElement:
    """Apply an odd derivation given by images on auxiliary generators."""
    aux = dr.aux
    par = aux.parities
    acc = aux.zero()
    for mono, c in e.terms.items():
        prefix_par = 0
        for t in range(0, len(mono), 2):
            idx = mono[t]
            exp = mono[t + 1]
            img = images.get(idx)
            if img is not None and not img.is_zero():
                pre = list(mono[:t])
                post = list(mono[t:])
                if exp == 1:
                    del post[:2]
                else:
                    post[1] = exp - 1
                piece = aux.element({tuple(pre): c * exp})
                piece = piece * img * aux.element({tuple(post): 1})
                if prefix_par:
                    piece = -piece
                acc = acc + piece
            prefix_par ^= par[idx] & exp
    return acc


def de_rham_d(f: DeRhamForm) -> DeRhamForm:
    """The de Rham differential: weight +1, internal degree preserved."""
    dr = f.complex
    n = dr.n_base
    images = {
        i: AlgElement(dr.aux, {(n + i, 1): Fraction(1)}) for i in range(n)
    }
    return DeRhamForm(dr, _odd_derivation(dr, images, f.elem), f.weight + 1)


def internal_d(f: DeRhamForm) -> DeRhamForm:
    """The internal differential: degree +1, weight preserved.

    On symbols it acts by d(d_dR(g)) = -d_dR(d(g)), the unique extension for
    which the two differentials anticommute.
    """
    dr = f.complex
    n = dr.n_base
    images: dict[int, AlgElement] = {}
    for idx, img in dr.presentation.d_images.items():
        lifted = dr.inject(img)
        images[idx] = lifted.elem
        images[n + idx] = (-de_rham_d(lifted)).elem
    return DeRhamForm(dr, _odd_derivation(dr, images, f.elem), f.weight)


def contract_with_generator(f: DeRhamForm, gen_name: str) -> DeRhamForm:
    """Contraction with the coordinate field dual to one generator.

    Sends d_dR(g) to 1 and every other symbol to 0; transparent over
    coefficient factors, Koszul sign over preceding symbol factors only.
    """
    if f.weight == 0:
        raise WeightZero("cannot contract a weight-0 form")
    dr = f.complex
    aux = dr.aux
    n = dr.n_base
    gi = dr.presentation.algebra.index(gen_name)
    target = n + gi
    op_par = aux.parities[target]
    acc = aux.zero()
    for mono, c in f.elem.terms.items():
        sym_par = 0
        for t in range(0, len(mono), 2):
            idx = mono[t]
            exp = mono[t + 1]
            if idx < n:
                continue
            if idx == target:
                rest = list(mono)
                if exp == 1:
                    del rest[t : t + 2]
                else:
                    rest[t + 1] = exp - 1
                coeff = c * exp
                if op_par and (sym_par & 1):
                    coeff = -coeff
                acc = acc + aux.element({tuple(rest): coeff})
            sym_par ^= aux.parities[idx] & exp
    return DeRhamForm(dr, acc, f.weight - 1)


class VectorField:
    """A derivation sum(coeff * d/dg); coefficients live over the base."""

    __slots__ = ("complex", "terms")

    def __init__(self, complex: DeRhamComplex, terms: Iterable[tuple[AlgElement, str]]):
        self.complex = complex
        base = complex.presentation.algebra
        cleaned = []
        for coeff, name in terms:
            if coeff.algebra is not base:
                raise PresentationMismatch("coefficient over a different presentation")
            base.index(name)
            if not coeff.is_zero():
                cleaned.append((coeff, name))
        self.terms = tuple(cleaned)

    @classmethod
    def coordinate(cls, complex: DeRhamComplex, gen_name: str) -> "VectorField":
        return cls(complex, [(complex.presentation.algebra.one(), gen_name)])

    def degree(self) -> int | None:
        """Common degree |coeff| - |g|; None for the zero field."""
        degs = set()
        base = self.complex.presentation.algebra
        for coeff, name in self.terms:
            degs.add(coeff.degree() - base.degrees[base.index(name)])
        if len(degs) > 1:
            raise DegreeMismatch(f"inhomogeneous vector field (degrees {sorted(degs)})")
        return degs.pop() if degs else None

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({coeff})*d/d({name})" for coeff, name in self.terms)


def contract(v: VectorField, f: DeRhamForm) -> DeRhamForm:
    """Contraction ``iota_V f``, coefficients multiplied from the left."""
    if v.complex is not f.complex:
        raise PresentationMismatch("vector field and form over different presentations")
    if f.weight == 0:
        raise WeightZero("cannot contract a weight-0 form")
    dr = f.complex
    acc = dr.zero(f.weight - 1)
    for coeff, name in v.terms:
        piece = contract_with_generator(f, name)
        acc = acc + wedge(dr.inject(coeff), piece)
    return acc


def coefficient_map(v: VectorField) -> dict[str, AlgElement]:
    """Collect the field as {generator name: coefficient}, merging duplicates."""
    out: dict[str, AlgElement] = {}
    for coeff, name in v.terms:
        out[name] = out[name] + coeff if name in out else coeff
    return {n: c for n, c in out.items() if not c.is_zero()}


def vector_field_differential(v: VectorField) -> VectorField:
    """The differential of Der(A): d_T(V) = d o V - (-1)^|V| V o d.

    On a coordinate field, d_T(d/dg) = -(-1)^{|g|} sum_m (d/dg of d(g_m)) d/dm;
    on coefficients it acts by d with the usual Leibniz sign.
    """
    from .algebra import partial_derivative

    dr = v.complex
    p = dr.presentation
    alg = p.algebra
    terms: list[tuple[AlgElement, str]] = []
    for coeff, name in v.terms:
        d_coeff = p.d(coeff)
        if not d_coeff.is_zero():
            terms.append((d_coeff, name))
        gi = alg.index(name)
        coeff_sign = -1 if (not coeff.is_zero() and coeff.parity()) else 1
        base_sign = 1 if alg.parities[gi] else -1  # -(-1)^{|g|}
        for m_idx, img in p.d_images.items():
            part = partial_derivative(img, name)
            if part.is_zero():
                continue
            piece = (coeff * part).scale(coeff_sign * base_sign)
            if not piece.is_zero():
                terms.append((piece, alg.generators[m_idx].name))
    return VectorField(dr, terms)


def decompose_one_form(f: DeRhamForm) -> dict[str, AlgElement]:
    """Write a weight-1 form as sum(coeff_g * d_dR(g)); returns name -> coeff.

    Valid because canonical order puts all coefficient factors left of the
    single symbol factor, so stripping the trailing symbol costs no sign.
    """
    if f.weight != 1:
        raise WeightMismatch("decompose_one_form needs a weight-1 form")
    dr = f.complex
    base = dr.presentation.algebra
    n = dr.n_base
    out: dict[str, dict] = {}
    for mono, c in f.elem.terms.items():
        sym = mono[-2]
        if sym < n or mono[-1] != 1:
            raise WeightMismatch("malformed weight-1 monomial")
        name = base.generators[sym - n].name
        out.setdefault(name, {})[mono[:-2]] = c
    return {name: AlgElement(base, terms) for name, terms in out.items()}


def push_forward(m: CdgaMorphism, source_dr: DeRhamComplex, target_dr: DeRhamComplex,
                 f: DeRhamForm) -> DeRhamForm:
    """Push a form along a cdga morphism: coefficients map through the
    morphism, each symbol d_dR(g) becomes d_dR(image of g)."""
    if f.complex is not source_dr:
        raise PresentationMismatch("form does not live over the morphism's source")
    if m.source is not source_dr.presentation or m.target is not target_dr.presentation:
        raise PresentationMismatch("morphism endpoints do not match the complexes")
    n = source_dr.n_base
    src_base = m.source.algebra
    acc = target_dr.zero(f.weight)
    for mono, c in f.elem.terms.items():
        piece = target_dr.scalar(c)
        for t in range(0, len(mono), 2):
            idx = mono[t]
            exp = mono[t + 1]
            if idx < n:
                factor = target_dr.inject(
                    m.apply(AlgElement(src_base, {(idx, 1): Fraction(1)}))
                )
            else:
                factor = de_rham_d(target_dr.inject(m.image(idx - n)))
            for _ in range(exp):
                piece = wedge(piece, factor)
            if piece.is_zero():
                break
        acc = acc + piece
    return acc


class FormSequence:
    """Entries w^0, w^1, ..., w^P with weight p+i and internal degree k-i."""

    __slots__ = ("complex", "base_weight", "degree", "entries")

    def __init__(self, complex: DeRhamComplex, base_weight: int, degree: int,
                 entries: Sequence[DeRhamForm]):
        self.complex = complex
        self.base_weight = base_weight
        self.degree = degree
        self.entries = tuple(entries)
        for i, w in enumerate(self.entries):
            if w.complex is not complex:
                raise PresentationMismatch("sequence entry over a different presentation")

    @property
    def truncation(self) -> int:
        return len(self.entries) - 1

    def entry(self, i: int) -> DeRhamForm:
        if 0 <= i < len(self.entries):
            return self.entries[i]
        return self.complex.zero(self.base_weight + i)


def _shape_ok(seq: FormSequence, i: int) -> tuple[bool, str]:
    w = seq.entry(i)
    if w.weight != seq.base_weight + i and not w.is_zero():
        return False, f"entry {i} has weight {w.weight}, expected {seq.base_weight + i}"
    if not w.is_zero() and w.degree() != seq.degree - i:
        return False, f"entry {i} has degree {w.degree()}, expected {seq.degree - i}"
    return True, ""


def check_closed_sequence(seq: FormSequence) -> VerificationReport:
    """The closedness equations: d w^0 = 0 and d_dR w^i + d w^{i+1} = 0.

    Entries beyond the truncation bound are zero, so the final equation
    degenerates to d_dR of the last entry vanishing.  Bigrading violations
    are reported as failures of the touching equation.
    """
    report = VerificationReport()
    shapes_ok = True
    for i in range(len(seq.entries)):
        ok, why = _shape_ok(seq, i)
        if not ok:
            report.add(f"shape[{i}]", "entry has weight p+i and degree k-i", False, why)
            shapes_ok = False
    if not shapes_ok:
        return report
    with timed_check() as t:
        residual = internal_d(seq.entry(0))
    report.add("closed[internal]", "d(w^0) = 0", residual.is_zero(), str(residual),
               t.elapsed)
    for i in range(seq.truncation + 1):
        with timed_check() as t:
            residual = de_rham_d(seq.entry(i)) + internal_d(seq.entry(i + 1))
        report.add(
            f"closed[{i}]",
            f"d_dR(w^{i}) + d(w^{i + 1}) = 0",
            residual.is_zero(),
            str(residual),
            t.elapsed,
        )
    return report


def check_path_equivalence(
    omega: FormSequence,
    sigma: FormSequence,
    path: FormSequence,
    *,
    sign_convention: str = "minus",
) -> VerificationReport:
    """Path equivalence of closed sequences.

    Weight 0: w^0 - s^0 = d(a^0).  Higher weights follow the selected
    convention: "minus" checks w^{i+1} - s^{i+1} = d_dR(a^i) + d(a^{i+1}),
    "plus" uses the sum w^{i+1} + s^{i+1} on the left instead.
    """
    if sign_convention not in ("minus", "plus"):
        raise ValueError(f"unknown sign convention {sign_convention!r}")
    report = VerificationReport()
    with timed_check() as t:
        residual = omega.entry(0) - sigma.entry(0) - internal_d(path.entry(0))
    report.add("path[0]", "w^0 - s^0 = d(a^0)", residual.is_zero(), str(residual),
               t.elapsed)
    bound = max(omega.truncation, sigma.truncation, path.truncation)
    for i in range(bound + 1):
        with timed_check() as t:
            lhs = omega.entry(i + 1)
            lhs = lhs - sigma.entry(i + 1) if sign_convention == "minus" \
                else lhs + sigma.entry(i + 1)
            residual = lhs - de_rham_d(path.entry(i)) - internal_d(path.entry(i + 1))
        sign = "-" if sign_convention == "minus" else "+"
        report.add(
            f"path[{i + 1}]",
            f"w^{i + 1} {sign} s^{i + 1} = d_dR(a^{i}) + d(a^{i + 1})",
            residual.is_zero(),
            str(residual),
            t.elapsed,
        )
    return report

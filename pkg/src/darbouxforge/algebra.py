"""Graded-commutative polynomial algebras over Q with exact Koszul signs.

A ``GradedAlgebra`` is a free graded-commutative algebra on named generators
with integer cohomological degrees.  Elements are sparse Fraction-linear
combinations of canonical monomials (see ``_kernel_py`` for the encoding).
Everything is immutable after construction; operations return new elements.

Canonical monomial order: generators are sorted once, at algebra
construction, by degree descending (0 first, then -1, -2, ...) with the
declaration order breaking ties.  Monomial factor lists are strictly
increasing in that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import kernel
from .errors import DegreeMismatch, PresentationMismatch, UnknownGenerator

Rational = int | Fraction


@dataclass(frozen=True)
class GradedGenerator:
    """A named generator with a cohomological degree."""

    name: str
    degree: int


class GradedAlgebra:
    """Presentation of a free graded-commutative algebra.

    ``parities`` defaults to ``degree mod 2`` per generator; the de Rham layer
    overrides it for one-form symbols (a symbol ``d(g)`` commutes with parity
    ``|g| + 1``).  ``keep_declared_order`` skips the canonical degree sort,
    which the de Rham layer uses to keep coefficients left of symbols.
    """

    __slots__ = ("generators", "degrees", "parities", "_index")

    def __init__(
        self,
        generators: Iterable[GradedGenerator],
        *,
        parities: Sequence[int] | None = None,
        keep_declared_order: bool = False,
    ):
        gens = list(generators)
        if parities is not None and len(parities) != len(gens):
            raise ValueError("parities length does not match generator count")
        if not keep_declared_order:
            order = sorted(range(len(gens)), key=lambda i: (-gens[i].degree, i))
            gens = [gens[i] for i in order]
            if parities is not None:
                parities = [parities[i] for i in order]
        self.generators: tuple[GradedGenerator, ...] = tuple(gens)
        self.degrees: tuple[int, ...] = tuple(g.degree for g in gens)
        if parities is None:
            self.parities: tuple[int, ...] = tuple(d & 1 for d in self.degrees)
        else:
            self.parities = tuple(int(p) & 1 for p in parities)
        self._index: dict[str, int] = {}
        for i, g in enumerate(gens):
            if g.name in self._index:
                raise ValueError(f"duplicate generator name {g.name!r}")
            self._index[g.name] = i

    def __len__(self) -> int:
        return len(self.generators)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def name(self, index: int) -> str:
        return self.generators[index].name

    def zero(self) -> AlgElement:
        return AlgElement(self, {})

    def one(self) -> AlgElement:
        return AlgElement(self, {(): Fraction(1)})

    def scalar(self, value: Rational) -> AlgElement:
        c = Fraction(value)
        return AlgElement(self, {(): c} if c else {})

    def gen(self, name: str) -> AlgElement:
        i = self.index(name)
        return AlgElement(self, {(i, 1): Fraction(1)})

    def element(self, terms: Mapping[tuple, Fraction]) -> AlgElement:
        """Wrap a kernel term map already in canonical form (trusted)."""
        return AlgElement(self, dict(terms))

    def monomial_degree(self, mono: tuple) -> int:
        degs = self.degrees
        return sum(degs[mono[t]] * mono[t + 1] for t in range(0, len(mono), 2))

    def monomial_parity(self, mono: tuple) -> int:
        par = self.parities
        p = 0
        for t in range(0, len(mono), 2):
            p ^= par[mono[t]] & mono[t + 1]
        return p

    def format_monomial(self, mono: tuple) -> str:
        if not mono:
            return "1"
        parts = []
        for t in range(0, len(mono), 2):
            n = self.generators[mono[t]].name
            e = mono[t + 1]
            parts.append(n if e == 1 else f"{n}^{e}")
        return "*".join(parts)


class AlgElement:
    """An exact element: sparse map from canonical monomials to Fractions."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: GradedAlgebra, terms: dict):
        self.algebra = algebra
        self.terms = terms

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int | None:
        """Common degree of all monomials; None for 0; raises if mixed."""
        if not self.terms:
            return None
        degs = {self.algebra.monomial_degree(m) for m in self.terms}
        if len(degs) > 1:
            raise DegreeMismatch(f"inhomogeneous element (degrees {sorted(degs)})")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len({self.algebra.monomial_degree(m) for m in self.terms}) <= 1

    def parity(self) -> int | None:
        """Common parity under the algebra's commutation parity; None for 0."""
        if not self.terms:
            return None
        pars = {self.algebra.monomial_parity(m) for m in self.terms}
        if len(pars) > 1:
            raise DegreeMismatch("element has mixed commutation parity")
        return pars.pop()

    def constant_value(self) -> Fraction | None:
        """The rational value if the element is a constant, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    # -- arithmetic ----------------------------------------------------------

    def _check_same(self, other: AlgElement) -> None:
        if self.algebra is not other.algebra:
            raise PresentationMismatch("elements live over different presentations")

    def __add__(self, other: AlgElement) -> AlgElement:
        self._check_same(other)
        return AlgElement(self.algebra, kernel.add_terms(self.terms, other.terms))

    def __sub__(self, other: AlgElement) -> AlgElement:
        return self + (-other)

    def __neg__(self) -> AlgElement:
        return AlgElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def scale(self, value: Rational) -> AlgElement:
        c = Fraction(value)
        if not c:
            return self.algebra.zero()
        return AlgElement(self.algebra, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgElement):
            self._check_same(other)
            return AlgElement(
                self.algebra,
                kernel.mul_terms(self.terms, other.terms, self.algebra.parities),
            )
        return self.scale(other)

    def __rmul__(self, other):
        # scalars commute with everything; AlgElement*AlgElement goes via __mul__
        return self.scale(other)

    def __pow__(self, n: int) -> AlgElement:
        if n < 0:
            raise ValueError("negative powers are not defined")
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgElement)
            and self.algebra is other.algebra
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((id(self.algebra), tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        return f"<AlgElement {self}>"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            word = self.algebra.format_monomial(mono)
            if word == "1":
                body = str(abs(c))
            elif abs(c) == 1:
                body = word
            else:
                body = f"{abs(c)}*{word}"
            bits.append(("- " if c < 0 else "+ ") + body)
        out = " ".join(bits)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]


def normalize(
    algebra: GradedAlgebra,
    raw: Iterable[tuple[Rational, Iterable[tuple[str, int]]]],
) -> AlgElement:
    """Build an element from raw terms ``(coefficient, [(gen name, exp), ...])``.

    Factor lists may be unordered and may repeat generators; Koszul reordering
    signs are applied, odd squares are dropped, and like terms merge.
    """
    acc: dict = {}
    par = algebra.parities
    for coeff, factors in raw:
        c = Fraction(coeff)
        if not c:
            continue
        pairs = [(algebra.index(n), e) for n, e in factors]
        hit = kernel.monomial_from_pairs(pairs, par)
        if hit is None:
            continue
        sign, mono = hit
        acc = kernel.add_terms(acc, {mono: c if sign > 0 else -c})
    return AlgElement(algebra, acc)


def mul(a: AlgElement, b: AlgElement) -> AlgElement:
    """Graded-commutative product (function form of ``a * b``)."""
    return a * b


def substitute(
    e: AlgElement,
    target: GradedAlgebra,
    images: Mapping[str, AlgElement],
) -> AlgElement:
    """Apply the graded-algebra morphism given by generator images.

    Every generator occurring in ``e`` must have an image over ``target`` of
    the same degree.  Products of images are formed left to right, so Koszul
    reordering signs are handled by the target's multiplication.
    """
    acc = target.zero()
    src = e.algebra
    for mono, c in e.terms.items():
        piece = target.scalar(c)
        for t in range(0, len(mono), 2):
            name = src.generators[mono[t]].name
            try:
                img = images[name]
            except KeyError:
                raise UnknownGenerator(f"no image given for generator {name!r}") from None
            if not img.is_zero() and img.degree() != src.degrees[mono[t]]:
                raise DegreeMismatch(
                    f"image of {name!r} has degree {img.degree()}, "
                    f"expected {src.degrees[mono[t]]}"
                )
            for _ in range(mono[t + 1]):
                piece = piece * img
            if piece.is_zero():
                break
        acc = acc + piece
    return acc


def partial_derivative(e: AlgElement, gen_name: str) -> AlgElement:
    """Left partial derivative with respect to a generator.

    Acting on a monomial ``u * g^n * w`` gives
    ``(-1)^(|g|*|u|) * n * u * g^(n-1) * w``: the operator carries the parity
    of ``g`` and picks up a Koszul sign crossing the prefix ``u``.
    """
    alg = e.algebra
    gi = alg.index(gen_name)
    gpar = alg.parities[gi]
    par = alg.parities
    acc: dict = {}
    for mono, c in e.terms.items():
        prefix_par = 0
        for t in range(0, len(mono), 2):
            idx = mono[t]
            exp = mono[t + 1]
            if idx == gi:
                coeff = c * exp
                if gpar and (prefix_par & 1):
                    coeff = -coeff
                rest = list(mono)
                if exp == 1:
                    del rest[t : t + 2]
                else:
                    rest[t + 1] = exp - 1
                acc = kernel.add_terms(acc, {tuple(rest): coeff})
                break
            prefix_par ^= par[idx] & exp
    return AlgElement(alg, acc)

"""Standard-form cdgas: free graded algebras with a degree +1 differential.

The differential is stored on generators and extended by the graded Leibniz
rule ``d(ab) = d(a) b + (-1)^|a| a d(b)``.  ``check_d_squared`` certifies
``d^2 = 0`` on generators, which Leibniz extends to the whole algebra.
"""

from __future__ import annotations

from typing import Mapping

from .algebra import AlgElement, GradedAlgebra, GradedGenerator
from .errors import DegreeMismatch, PresentationMismatch, UnknownGenerator
from .report import VerificationReport, timed_check


class CdgaPresentation:
    """A free graded algebra together with differential images per generator.

    Degree-0 generators present the smooth base and must have zero image;
    every image must be homogeneous of degree ``|g| + 1`` (or zero).
    """

    __slots__ = ("algebra", "d_images")

    def __init__(self, algebra: GradedAlgebra, d_images: Mapping[str, AlgElement]):
        self.algebra = algebra
        images: dict[int, AlgElement] = {}
        for name, img in d_images.items():
            idx = algebra.index(name)
            if img.algebra is not algebra:
                raise PresentationMismatch(
                    f"differential image of {name!r} lives over a different algebra"
                )
            if img.is_zero():
                continue
            gdeg = algebra.degrees[idx]
            if gdeg == 0:
                raise DegreeMismatch(
                    f"degree-0 generator {name!r} must have zero differential"
                )
            if img.degree() != gdeg + 1:
                raise DegreeMismatch(
                    f"d({name}) must have degree {gdeg + 1}, got {img.degree()}"
                )
            images[idx] = img
        self.d_images = images

    @classmethod
    def build(
        cls,
        generators: list[GradedGenerator],
        d_image_fn=None,
    ) -> "CdgaPresentation":
        """Construct algebra and presentation together.

        ``d_image_fn(algebra, name) -> AlgElement | None`` supplies images
        after the algebra exists (images usually refer to other generators).
        """
        algebra = GradedAlgebra(generators)
        images: dict[str, AlgElement] = {}
        if d_image_fn is not None:
            for g in algebra.generators:
                img = d_image_fn(algebra, g.name)
                if img is not None:
                    images[g.name] = img
        return cls(algebra, images)

    def d_image(self, index: int) -> AlgElement:
        img = self.d_images.get(index)
        return img if img is not None else self.algebra.zero()

    def d(self, e: AlgElement) -> AlgElement:
        """Apply the differential, extended by the graded Leibniz rule."""
        if e.algebra is not self.algebra:
            raise PresentationMismatch("element lives over a different algebra")
        alg = self.algebra
        par = alg.parities
        acc = alg.zero()
        for mono, c in e.terms.items():
            prefix_par = 0
            for t in range(0, len(mono), 2):
                idx = mono[t]
                exp = mono[t + 1]
                img = self.d_images.get(idx)
                if img is not None:
                    # d passes the prefix (sign), differentiates g^exp in place
                    pre = list(mono[:t])
                    post = list(mono[t:])
                    if exp == 1:
                        del post[:2]
                    else:
                        post[1] = exp - 1
                    piece = alg.element({tuple(pre): c * exp})
                    piece = piece * img * alg.element({tuple(post): 1})
                    if prefix_par:
                        piece = -piece
                    acc = acc + piece
                prefix_par ^= par[idx] & exp
        return acc


def apply_d(p: CdgaPresentation, e: AlgElement) -> AlgElement:
    return p.d(e)


def check_d_squared(p: CdgaPresentation) -> VerificationReport:
    """Certify d(d(g)) = 0 for every generator; witnesses on failure."""
    report = VerificationReport()
    for g in p.algebra.generators:
        with timed_check() as t:
            residual = p.d(p.d(p.algebra.gen(g.name)))
        report.add(
            name=f"d_squared[{g.name}]",
            equation=f"d(d({g.name})) = 0",
            ok=residual.is_zero(),
            residual=str(residual),
            wall_time=t.elapsed,
        )
    return report


class CdgaMorphism:
    """Algebra morphism between presentations, given on generators.

    Images must preserve degree generator-wise; chain-map compatibility with
    the differentials is a separate certified check.
    """

    __slots__ = ("source", "target", "images")

    def __init__(
        self,
        source: CdgaPresentation,
        target: CdgaPresentation,
        images: Mapping[str, AlgElement],
    ):
        self.source = source
        self.target = target
        table: dict[int, AlgElement] = {}
        for name, img in images.items():
            idx = source.algebra.index(name)
            if img.algebra is not target.algebra:
                raise PresentationMismatch(
                    f"image of {name!r} does not live over the target algebra"
                )
            if not img.is_zero():
                gdeg = source.algebra.degrees[idx]
                if img.degree() != gdeg:
                    raise DegreeMismatch(
                        f"image of {name!r} must have degree {gdeg}, got {img.degree()}"
                    )
                table[idx] = img
        missing = [
            g.name
            for i, g in enumerate(source.algebra.generators)
            if i not in table and g.name not in images
        ]
        if missing:
            raise UnknownGenerator(
                f"morphism lacks images for generators: {', '.join(missing)}"
            )
        self.images = table

    def image(self, index: int) -> AlgElement:
        img = self.images.get(index)
        return img if img is not None else self.target.algebra.zero()

    def apply(self, e: AlgElement) -> AlgElement:
        """Substitute generator images (monomial-wise product of images)."""
        if e.algebra is not self.source.algebra:
            raise PresentationMismatch("element lives over a different algebra")
        tgt = self.target.algebra
        acc = tgt.zero()
        for mono, c in e.terms.items():
            piece = tgt.scalar(c)
            for t in range(0, len(mono), 2):
                img = self.image(mono[t])
                for _ in range(mono[t + 1]):
                    piece = piece * img
                if piece.is_zero():
                    break
            acc = acc + piece
        return acc

    def __call__(self, e: AlgElement) -> AlgElement:
        return self.apply(e)


def check_chain_map(m: CdgaMorphism) -> VerificationReport:
    """Certify d_target(m(g)) = m(d_source(g)) per source generator."""
    report = VerificationReport()
    for g in m.source.algebra.generators:
        with timed_check() as t:
            lhs = m.target.d(m.apply(m.source.algebra.gen(g.name)))
            rhs = m.apply(m.source.d(m.source.algebra.gen(g.name)))
            residual = lhs - rhs
        report.add(
            name=f"chain_map[{g.name}]",
            equation=f"d(beta({g.name})) - beta(d({g.name})) = 0",
            ok=residual.is_zero(),
            residual=str(residual),
            wall_time=t.elapsed,
        )
    return report


def compose(outer: CdgaMorphism, inner: CdgaMorphism) -> CdgaMorphism:
    """The composite ``outer . inner`` (inner applied first)."""
    if inner.target is not outer.source:
        raise PresentationMismatch("morphisms are not composable")
    images = {
        g.name: outer.apply(inner.apply(inner.source.algebra.gen(g.name)))
        for g in inner.source.algebra.generators
    }
    return CdgaMorphism(inner.source, outer.target, images)

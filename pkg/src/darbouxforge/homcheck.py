"""Point evaluation into finite rational chain complexes, and their checks.

Rank and determinant use fraction-free Bareiss elimination on integer-scaled
matrices, so every non-degeneracy verdict is exact.  Kernel witnesses come
from a plain rational row reduction (not performance relevant).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import AlgElement
from .cdga import CdgaPresentation
from .derham import DeRhamComplex, de_rham_d, decompose_one_form
from .errors import (
    DegreeMismatch,
    NotAChainMap,
    PointNotOnClassicalLocus,
    UnknownGenerator,
)

# ---------------------------------------------------------------------------
# exact matrices
# ---------------------------------------------------------------------------


class Matrix:
    """Dense exact matrix; rows of Fractions, explicit shape for empty sizes."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence] | None = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [[Fraction(0)] * cols for _ in range(rows)]
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise ValueError("matrix data does not match its shape")
            self.data = [[Fraction(x) for x in r] for r in data]

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = Fraction(1)
        return m

    def is_zero(self) -> bool:
        return all(not x for row in self.data for x in row)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("matrix shapes are not composable")
        out = Matrix(self.rows, other.cols)
        for i in range(self.rows):
            for k in range(self.cols):
                a = self.data[i][k]
                if not a:
                    continue
                row = other.data[k]
                for j in range(other.cols):
                    if row[j]:
                        out.data[i][j] += a * row[j]
        return out

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shapes differ")
        return Matrix(
            self.rows,
            self.cols,
            [
                [self.data[i][j] + other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols,
                      [[-x for x in row] for row in self.data])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.data == other.data
        )

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {self.data})"

    def _integer_rows(self) -> list[list[int]]:
        out = []
        for row in self.data:
            scale = 1
            for x in row:
                scale = scale * x.denominator // _gcd(scale, x.denominator)
            out.append([int(x * scale) for x in row])
        return out

    def rank(self) -> int:
        """Exact rank by fraction-free Bareiss elimination."""
        m = self._integer_rows()
        rows, cols = self.rows, self.cols
        rank = 0
        prev = 1
        row = 0
        for col in range(cols):
            pivot = None
            for r in range(row, rows):
                if m[r][col]:
                    pivot = r
                    break
            if pivot is None:
                continue
            m[row], m[pivot] = m[pivot], m[row]
            for r in range(row + 1, rows):
                for c in range(col + 1, cols):
                    m[r][c] = (m[r][c] * m[row][col] - m[r][col] * m[row][c]) // prev
                m[r][col] = 0
            prev = m[row][col]
            row += 1
            rank += 1
            if row == rows:
                break
        return rank

    def det(self) -> Fraction:
        """Exact determinant (Bareiss on an integer scaling)."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return Fraction(1)
        m = []
        scale = Fraction(1)
        for row in self.data:
            s = 1
            for x in row:
                s = s * x.denominator // _gcd(s, x.denominator)
            scale *= s
            m.append([int(x * s) for x in row])
        sign = 1
        prev = 1
        for k in range(n - 1):
            if not m[k][k]:
                pivot = next((r for r in range(k + 1, n) if m[r][k]), None)
                if pivot is None:
                    return Fraction(0)
                m[k], m[pivot] = m[pivot], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return Fraction(sign * m[n - 1][n - 1], 1) / scale

    def nullspace(self) -> list[list[Fraction]]:
        """Basis of the right kernel via rational row reduction."""
        m = [row[:] for row in self.data]
        rows, cols = self.rows, self.cols
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            pivot = next((i for i in range(r, rows) if m[i][c]), None)
            if pivot is None:
                continue
            m[r], m[pivot] = m[pivot], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(rows):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == rows:
                break
        free = [c for c in range(cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [Fraction(0)] * cols
            v[fc] = Fraction(1)
            for pr, pc in enumerate(pivots):
                v[pc] = -m[pr][fc]
            basis.append(v)
        return basis


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a) or 1


def solve_exact(a: Matrix, rhs: list[Fraction]) -> list[Fraction] | None:
    """One solution of a x = rhs, or None if inconsistent."""
    m = [row[:] + [rhs[i]] for i, row in enumerate(a.data)]
    rows, cols = a.rows, a.cols
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if m[i][cols]:
            return None
    x = [Fraction(0)] * cols
    for pr, pc in enumerate(pivots):
        x[pc] = m[pr][cols]
    return x


# ---------------------------------------------------------------------------
# chain complexes over Q
# ---------------------------------------------------------------------------


class ChainComplexQ:
    """Finite complex of finite-dimensional Q-vector spaces.

    ``dims[i]`` is the dimension in cohomological degree i, ``diffs[i]`` the
    matrix of d: degree i -> i+1 (shape dims[i+1] x dims[i]).  d о d = 0 is
    certified at construction.  ``labels`` names basis vectors for witnesses.
    """

    __slots__ = ("dims", "diffs", "labels")

    def __init__(
        self,
        dims: Mapping[int, int],
        diffs: Mapping[int, Matrix],
        labels: Mapping[int, Sequence[str]] | None = None,
    ):
        self.dims = {d: n for d, n in dims.items() if n}
        self.diffs: dict[int, Matrix] = {}
        for d, mat in diffs.items():
            expected = (self.dim(d + 1), self.dim(d))
            if (mat.rows, mat.cols) != expected:
                raise ValueError(
                    f"differential at degree {d} has shape {(mat.rows, mat.cols)}, "
                    f"expected {expected}"
                )
            if not mat.is_zero():
                self.diffs[d] = mat
        self.labels = {d: list(v) for d, v in (labels or {}).items()}
        for d in list(self.diffs):
            nxt = self.diffs.get(d + 1)
            if nxt is not None and not (nxt @ self.diffs[d]).is_zero():
                raise ValueError(f"d^2 != 0 between degrees {d} and {d + 2}")

    def dim(self, degree: int) -> int:
        return self.dims.get(degree, 0)

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def differential(self, degree: int) -> Matrix:
        mat = self.diffs.get(degree)
        if mat is not None:
            return mat
        return Matrix(self.dim(degree + 1), self.dim(degree))

    def label(self, degree: int, index: int) -> str:
        names = self.labels.get(degree)
        return names[index] if names else f"e[{degree}][{index}]"

    def shift(self, n: int) -> "ChainComplexQ":
        """The complex X[n] with X[n]^i = X^(i+n) and differential (-1)^n d."""
        dims = {d - n: v for d, v in self.dims.items()}
        sign = -1 if n & 1 else 1
        diffs = {
            d - n: (mat if sign > 0 else -mat) for d, mat in self.diffs.items()
        }
        labels = {d - n: v for d, v in self.labels.items()}
        return ChainComplexQ(dims, diffs, labels)

    def euler_characteristic(self) -> int:
        return sum((-1) ** (d & 1) * n for d, n in self.dims.items())


def cohomology_ranks(c: ChainComplexQ) -> dict[int, int]:
    """dim ker(D_i) - rank(D_{i-1}) per degree, by exact elimination."""
    out = {}
    degrees = set(c.dims)
    for d in sorted(degrees):
        dim = c.dim(d)
        out[d] = (dim - c.differential(d).rank()) - c.differential(d - 1).rank()
    return out


class ComplexMap:
    """Degree-wise matrices commuting with the differentials (certified)."""

    __slots__ = ("source", "target", "mats")

    def __init__(self, source: ChainComplexQ, target: ChainComplexQ,
                 mats: Mapping[int, Matrix]):
        self.source = source
        self.target = target
        self.mats = {}
        for d, mat in mats.items():
            expected = (target.dim(d), source.dim(d))
            if (mat.rows, mat.cols) != expected:
                raise NotAChainMap(
                    f"map at degree {d} has shape {(mat.rows, mat.cols)}, "
                    f"expected {expected}"
                )
            if not mat.is_zero():
                self.mats[d] = mat
        for d in set(source.dims) | set(target.dims):
            lhs = self.target.differential(d) @ self.matrix(d)
            rhs = self.matrix(d + 1) @ self.source.differential(d)
            if lhs != rhs:
                raise NotAChainMap(f"map does not commute with d at degree {d}")

    def matrix(self, degree: int) -> Matrix:
        mat = self.mats.get(degree)
        if mat is not None:
            return mat
        return Matrix(self.target.dim(degree), self.source.dim(degree))


def mapping_cone(f: ComplexMap) -> ChainComplexQ:
    """Cone(f) = target + source[1], d = [[d_Y, F],[0, -d_X[1]]]."""
    x, y = f.source, f.target
    degrees = set(y.dims) | {d - 1 for d in x.dims}
    dims = {d: y.dim(d) + x.dim(d + 1) for d in degrees}
    labels = {
        d: [y.label(d, i) for i in range(y.dim(d))]
        + [f"{x.label(d + 1, i)}[1]" for i in range(x.dim(d + 1))]
        for d in degrees
    }
    diffs = {}
    for d in degrees:
        ry, rx = y.dim(d + 1), x.dim(d + 2)
        cy, cx = y.dim(d), x.dim(d + 1)
        block = Matrix(ry + rx, cy + cx)
        dy = y.differential(d)
        for i in range(ry):
            for j in range(cy):
                block.data[i][j] = dy.data[i][j]
        fm = f.matrix(d + 1)
        for i in range(ry):
            for j in range(cx):
                block.data[i][cy + j] = fm.data[i][j]
        dx = x.differential(d + 1)
        for i in range(rx):
            for j in range(cx):
                block.data[ry + i][cy + j] = -dx.data[i][j]
        diffs[d] = block
    return ChainComplexQ(dims, diffs, labels)


def is_quasi_iso(f: ComplexMap) -> tuple[bool, str | None]:
    """True iff the mapping cone is acyclic; witness names a surviving class."""
    cone = mapping_cone(f)
    ranks = cohomology_ranks(cone)
    for d in sorted(ranks):
        if ranks[d]:
            witness = _cohomology_witness(cone, d)
            return False, f"H^{d}(cone) has rank {ranks[d]}; class {witness}"
    return True, None


def _cohomology_witness(c: ChainComplexQ, degree: int) -> str:
    kernel = c.differential(degree).nullspace()
    image_mat = c.differential(degree - 1)
    base_rank = image_mat.rank()
    for v in kernel:
        cols = [[image_mat.data[i][j] for j in range(image_mat.cols)] + [v[i]]
                for i in range(image_mat.rows)]
        stacked = Matrix(image_mat.rows, image_mat.cols + 1, cols)
        if stacked.rank() > base_rank:
            parts = [
                f"{coeff}*{c.label(degree, i)}" for i, coeff in enumerate(v) if coeff
            ]
            return " + ".join(parts)
    return "(witness extraction failed)"


def is_strict_iso(f: ComplexMap) -> tuple[bool, str | None]:
    """True iff every degree-wise matrix is square and invertible over Q."""
    for d in sorted(set(f.source.dims) | set(f.target.dims)):
        rows, cols = f.target.dim(d), f.source.dim(d)
        if rows != cols:
            return False, f"degree {d}: matrix is {rows}x{cols}, not square"
        mat = f.matrix(d)
        if mat.rank() != rows:
            return False, f"degree {d}: matrix of rank {mat.rank()} < {rows}"
    return True, None


# ---------------------------------------------------------------------------
# points and evaluation
# ---------------------------------------------------------------------------


class PointAssignment:
    """Rational values for the degree-0 generators; negative degrees are 0."""

    __slots__ = ("values",)

    def __init__(self, values: Mapping[str, Fraction | int]):
        self.values = {name: Fraction(v) for name, v in values.items()}

    def evaluate(self, e: AlgElement) -> Fraction:
        alg = e.algebra
        total = Fraction(0)
        for mono, c in e.terms.items():
            val = c
            for t in range(0, len(mono), 2):
                g = alg.generators[mono[t]]
                if g.degree != 0:
                    val = Fraction(0)
                    break
                if g.name not in self.values:
                    raise UnknownGenerator(
                        f"point assigns no value to degree-0 generator {g.name!r}"
                    )
                val *= self.values[g.name] ** mono[t + 1]
                if not val:
                    break
            total += val
        return total

    def to_dict(self) -> dict[str, str]:
        return {name: str(v) for name, v in sorted(self.values.items())}

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}={v}" for n, v in sorted(self.values.items()))
        return f"<Point {inner}>"


def classical_locus_residuals(p: CdgaPresentation, point: PointAssignment):
    """Evaluations of d(g) for degree -1 generators g (locus membership)."""
    out = []
    for i, g in enumerate(p.algebra.generators):
        if g.degree == -1:
            out.append((g.name, point.evaluate(p.d_image(i))))
    return out


def require_classical_point(p: CdgaPresentation, point: PointAssignment) -> None:
    bad = [(n, v) for n, v in classical_locus_residuals(p, point) if v]
    if bad:
        shown = ", ".join(f"d({n}) -> {v}" for n, v in bad)
        raise PointNotOnClassicalLocus(shown)


def sample_classical_points(
    p: CdgaPresentation,
    count: int,
    rng,
    pool: Sequence[Fraction | int] = (0, 1, -1, 2, -2, Fraction(1, 2), 3),
    max_tries: int = 400,
) -> list[PointAssignment]:
    """Random rational points on the classical locus (origin tried first).

    Returns at most ``count`` distinct points; loci without small rational
    points may yield fewer.
    """
    names = [g.name for g in p.algebra.generators if g.degree == 0]
    found: list[PointAssignment] = []
    seen = set()

    def consider(values: dict) -> None:
        key = tuple(sorted((n, v) for n, v in values.items()))
        if key in seen:
            return
        seen.add(key)
        pt = PointAssignment(values)
        if not any(v for _, v in classical_locus_residuals(p, pt)):
            found.append(pt)

    consider({n: Fraction(0) for n in names})
    tries = 0
    while len(found) < count and tries < max_tries:
        tries += 1
        consider({n: Fraction(rng.choice(pool)) for n in names})
    return found[:count]


def evaluate_at_point(p: CdgaPresentation, point: PointAssignment,
                      module: str = "tangent") -> ChainComplexQ:
    """Restrict a presentation-derived module to a classical point.

    ``module`` selects the tangent complex (coordinate fields) or the
    cotangent complex (one-form symbols).
    """
    if module == "tangent":
        return tangent_complex_at(p, point)
    if module == "cotangent":
        return cotangent_complex_at(p, point)
    raise ValueError(f"unknown module kind {module!r}")


def tangent_complex_at(p: CdgaPresentation, point: PointAssignment) -> ChainComplexQ:
    """Der(A) restricted to a classical point.

    Basis d/dg in degree -|g|; the differential of a coordinate field is read
    off d_T(d/dg_j) = -(-1)^{|g_j|} sum_m (left d/dg_j of d(g_m)) d/dg_m,
    evaluated at the point.  d^2 = 0 is certified (it holds exactly on the
    classical locus).
    """
    require_classical_point(p, point)
    from .algebra import partial_derivative

    alg = p.algebra
    by_degree: dict[int, list[int]] = {}
    for i, g in enumerate(alg.generators):
        by_degree.setdefault(-g.degree, []).append(i)
    dims = {d: len(v) for d, v in by_degree.items()}
    labels = {
        d: [f"d/d({alg.generators[i].name})" for i in v] for d, v in by_degree.items()
    }
    diffs = {}
    for d, cols in by_degree.items():
        rows = by_degree.get(d + 1, [])
        if not rows:
            continue
        mat = Matrix(len(rows), len(cols))
        for cj, j in enumerate(cols):
            sign = -1 if alg.parities[j] == 0 else 1  # -(-1)^{|g_j|}
            for ri, m in enumerate(rows):
                coeff = partial_derivative(p.d_image(m), alg.generators[j].name)
                val = point.evaluate(coeff)
                if val:
                    mat.data[ri][cj] = sign * val
        diffs[d] = mat
    return ChainComplexQ(dims, diffs, labels)


def cotangent_complex_at(p: CdgaPresentation, point: PointAssignment) -> ChainComplexQ:
    """Kahler differentials restricted to a classical point.

    Basis d_dR(g) in degree |g|; the differential sends d_dR(g) to minus the
    universal-derivation image of d(g), evaluated at the point.  The sign is
    the de Rham algebra convention d(d_dR(g)) = -d_dR(d(g)) (the one under
    which the two differentials anticommute); contraction maps into this
    complex are chain maps with no further sign twists.
    """
    require_classical_point(p, point)
    dr = DeRhamComplex(p)
    alg = p.algebra
    by_degree: dict[int, list[int]] = {}
    for i, g in enumerate(alg.generators):
        by_degree.setdefault(g.degree, []).append(i)
    dims = {d: len(v) for d, v in by_degree.items()}
    labels = {
        d: [f"d_dR({alg.generators[i].name})" for i in v]
        for d, v in by_degree.items()
    }
    index_in_degree = {
        i: pos for d, v in by_degree.items() for pos, i in enumerate(v)
    }
    diffs: dict[int, Matrix] = {}
    for d, cols in by_degree.items():
        rows = by_degree.get(d + 1, [])
        if not rows:
            continue
        mat = Matrix(len(rows), len(cols))
        for cj, j in enumerate(cols):
            img = p.d_image(j)
            if img.is_zero():
                continue
            for name, coeff in decompose_one_form(de_rham_d(dr.inject(img))).items():
                m = alg.index(name)
                val = point.evaluate(coeff)
                if not val:
                    # off-degree components have negative-degree coefficients
                    # and never survive evaluation
                    continue
                if alg.degrees[m] != d + 1:
                    raise DegreeMismatch("differential image is not degree-homogeneous")
                mat.data[index_in_degree[m]][cj] = -val
        diffs[d] = mat
    return ChainComplexQ(dims, diffs, labels)

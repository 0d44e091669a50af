"""Instance-specification files: strict line format plus expression grammar.

A file is a sequence of ``key: value`` lines (``#`` comments, blank lines
ignored).  Keys: ``kind``, ``shift``, ``m``, ``n``, ``H``, ``G``, ``Lambda``,
``point`` (repeatable), ``option`` (repeatable).  Expressions admit rationals
(``a`` or ``a/b``), generator names, ``+ - * ^`` with non-negative integer
exponents, parentheses, and - in form slots only - ``d_dR(name)`` atoms.
There is no implicit multiplication and no division by variables.

``parse_spec`` validates everything (shapes, generator alphabet, slot
degrees) and normalizes the expression texts to canonical form, so
serialize-then-parse is the identity on parsed specs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import AlgElement, GradedAlgebra
from .darboux import ContactDarbouxSpec, SymplecticDarbouxSpec, check_shift
from .derham import DeRhamComplex, DeRhamForm, wedge
from .errors import (
    DegreeMismatch,
    SpecSyntaxError,
    UnknownGenerator,
)
from .lagrangian import LagrangianDarbouxSpec
from .legendrian import LegendrianDarbouxSpec

KINDS = (
    "symplectic-darboux",
    "contact-darboux",
    "lagrangian",
    "legendrian",
    "jet1-zero-section",
    "point-target",
)

_OPTION_DEFAULTS = {"points": 5, "truncation": 2, "sign_convention": "minus"}


# ---------------------------------------------------------------------------
# tokenizer / expression parser
# ---------------------------------------------------------------------------


@dataclass
class _Token:
    kind: str  # number, name, op, end
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        col = col0 + i
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("number", text[i:j], line, col))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], line, col))
            i = j
            continue
        if ch in "+-*^()/,":
            tokens.append(_Token("op", ch, line, col))
            i += 1
            continue
        raise SpecSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", "", line, col0 + len(text)))
    return tokens


class _ExprParser:
    """Recursive descent over one expression, evaluating as it goes.

    ``env`` supplies the value algebra: ``scalar``, ``gen``, ``symbol`` (or
    None to forbid d_dR), and the arithmetic happens through the returned
    objects' operators (AlgElement or DeRhamForm).
    """

    def __init__(self, tokens: list[_Token], env):
        self.tokens = tokens
        self.pos = 0
        self.env = env

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise SpecSyntaxError(f"expected {text!r}", tok.line, tok.col)
        return self.take()

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise SpecSyntaxError(f"unexpected trailing {tok.text!r}", tok.line, tok.col)
        return value

    def expr(self):
        tok = self.peek()
        negate = False
        if tok.kind == "op" and tok.text in "+-":
            self.take()
            negate = tok.text == "-"
        value = self.term()
        if negate:
            value = -value
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.take()
                rhs = self.term()
                value = value - rhs if tok.text == "-" else value + rhs
            else:
                return value

    def term(self):
        value = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.take()
                value = self.env.multiply(value, self.factor())
            else:
                return value

    def factor(self):
        value = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.take()
            num = self.peek()
            if num.kind != "number":
                raise SpecSyntaxError("exponent must be a non-negative integer",
                                      num.line, num.col)
            self.take()
            value = self.env.power(value, int(num.text))
        return value

    def atom(self):
        tok = self.take()
        if tok.kind == "number":
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "/":
                self.take()
                den = self.peek()
                if den.kind != "number":
                    raise SpecSyntaxError("denominator must be an integer",
                                          den.line, den.col)
                self.take()
                if int(den.text) == 0:
                    raise SpecSyntaxError("division by zero", den.line, den.col)
                return self.env.scalar(Fraction(int(tok.text), int(den.text)))
            return self.env.scalar(Fraction(int(tok.text)))
        if tok.kind == "name":
            if tok.text == "d_dR":
                self.expect_op("(")
                inner = self.peek()
                if inner.kind != "name":
                    raise SpecSyntaxError("d_dR takes a generator name",
                                          inner.line, inner.col)
                self.take()
                self.expect_op(")")
                return self.env.symbol(inner.text, inner.line, inner.col)
            return self.env.gen(tok.text, tok.line, tok.col)
        if tok.kind == "op" and tok.text == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        raise SpecSyntaxError(f"unexpected token {tok.text!r}", tok.line, tok.col)


class _ScalarEnv:
    def __init__(self, algebra: GradedAlgebra):
        self.algebra = algebra

    def scalar(self, q: Fraction) -> AlgElement:
        return self.algebra.scalar(q)

    def gen(self, name: str, line: int, col: int) -> AlgElement:
        try:
            return self.algebra.gen(name)
        except UnknownGenerator:
            raise UnknownGenerator(
                f"unknown generator {name!r} at line {line}, column {col}"
            ) from None

    def symbol(self, name: str, line: int, col: int):
        raise SpecSyntaxError("d_dR(...) is not allowed in a scalar slot", line, col)

    @staticmethod
    def multiply(a, b):
        return a * b

    @staticmethod
    def power(a, n: int):
        return a ** n


class _FormEnv:
    def __init__(self, dr: DeRhamComplex):
        self.dr = dr

    def scalar(self, q: Fraction) -> DeRhamForm:
        return self.dr.scalar(q)

    def gen(self, name: str, line: int, col: int) -> DeRhamForm:
        try:
            return self.dr.inject(self.dr.presentation.algebra.gen(name))
        except UnknownGenerator:
            raise UnknownGenerator(
                f"unknown generator {name!r} at line {line}, column {col}"
            ) from None

    def symbol(self, name: str, line: int, col: int) -> DeRhamForm:
        try:
            return self.dr.symbol(name)
        except UnknownGenerator:
            raise UnknownGenerator(
                f"unknown generator {name!r} at line {line}, column {col}"
            ) from None

    @staticmethod
    def multiply(a, b):
        return wedge(a, b)

    @staticmethod
    def power(a, n: int):
        out = a.complex.scalar(1)
        for _ in range(n):
            out = wedge(out, a)
        return out


def parse_expression(text: str, algebra: GradedAlgebra, *, line: int = 1,
                     col: int = 1) -> AlgElement:
    return _ExprParser(_tokenize(text, line, col), _ScalarEnv(algebra)).parse()


def parse_form_expression(text: str, dr: DeRhamComplex, *, line: int = 1,
                          col: int = 1) -> DeRhamForm:
    return _ExprParser(_tokenize(text, line, col), _FormEnv(dr)).parse()


# ---------------------------------------------------------------------------
# the instance file
# ---------------------------------------------------------------------------


@dataclass
class InstanceSpecFile:
    """Parsed, validated and normalized instance description."""

    kind: str
    shift: int
    m: tuple[int, ...] | None
    n: tuple[int, ...] | None
    h_text: str
    g_text: str
    lambda_text: str | None
    points: tuple[tuple[tuple[str, Fraction], ...], ...]
    options: dict
    resolved: dict = field(default_factory=dict, compare=False, repr=False)


def _parse_int(value: str, line: int) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise SpecSyntaxError(f"expected an integer, got {value.strip()!r}", line, 1)


def _parse_shape(value: str, line: int) -> tuple[int, ...]:
    parts = value.split()
    if not parts:
        raise SpecSyntaxError("empty shape vector", line, 1)
    out = []
    for p in parts:
        try:
            v = int(p)
        except ValueError:
            raise SpecSyntaxError(f"bad shape entry {p!r}", line, 1) from None
        if v < 0:
            raise SpecSyntaxError(f"negative shape entry {p}", line, 1)
        out.append(v)
    return tuple(out)


def _parse_rational(text: str, line: int) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise SpecSyntaxError(f"bad rational {text.strip()!r}", line, 1) from None


def _parse_point(value: str, line: int) -> tuple[tuple[str, Fraction], ...]:
    pairs = []
    for chunk in value.split(","):
        if "=" not in chunk:
            raise SpecSyntaxError(f"point entry {chunk.strip()!r} is not name = value",
                                  line, 1)
        name, _, raw = chunk.partition("=")
        pairs.append((name.strip(), _parse_rational(raw, line)))
    return tuple(sorted(pairs))


def _parse_option(value: str, line: int, options: dict) -> None:
    if "=" not in value:
        raise SpecSyntaxError("option must be name = value", line, 1)
    name, _, raw = value.partition("=")
    name = name.strip()
    raw = raw.strip()
    if name in ("points", "truncation"):
        v = _parse_int(raw, line)
        if v < 0:
            raise SpecSyntaxError(f"option {name} must be non-negative", line, 1)
        options[name] = v
    elif name == "sign_convention":
        if raw not in ("minus", "plus"):
            raise SpecSyntaxError("sign_convention must be minus or plus", line, 1)
        options[name] = raw
    else:
        raise SpecSyntaxError(f"unknown option {name!r}", line, 1)


_KEYS_BY_KIND = {
    "symplectic-darboux": {"m", "H"},
    "contact-darboux": {"m", "H"},
    "lagrangian": {"m", "n", "H", "G"},
    "legendrian": {"m", "n", "H", "G"},
    "jet1-zero-section": {"m"},
    "point-target": {"n", "G", "Lambda"},
}


def parse_spec_text(text: str) -> InstanceSpecFile:
    fields: dict[str, tuple[str, int]] = {}
    points: list = []
    options = dict(_OPTION_DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        if ":" not in stripped:
            raise SpecSyntaxError("expected 'key: value'", lineno, 1)
        key, _, value = stripped.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "point":
            points.append(_parse_point(value, lineno))
        elif key == "option":
            _parse_option(value, lineno, options)
        elif key in ("kind", "shift", "m", "n", "H", "G", "Lambda"):
            if key in fields:
                raise SpecSyntaxError(f"duplicate key {key!r}", lineno, 1)
            fields[key] = (value, lineno)
        else:
            raise SpecSyntaxError(f"unknown key {key!r}", lineno, 1)

    if "kind" not in fields:
        raise SpecSyntaxError("missing required key 'kind'", 1, 1)
    kind = fields["kind"][0]
    if kind not in KINDS:
        raise SpecSyntaxError(
            f"unknown kind {kind!r} (expected one of {', '.join(KINDS)})",
            fields["kind"][1], 1,
        )
    if "shift" not in fields:
        raise SpecSyntaxError("missing required key 'shift'", 1, 1)
    shift = _parse_int(*fields["shift"])

    allowed = _KEYS_BY_KIND[kind]
    for key in ("m", "n", "H", "G", "Lambda"):
        if key in fields and key not in allowed:
            raise SpecSyntaxError(f"key {key!r} is not used by kind {kind}",
                                  fields[key][1], 1)

    m = _parse_shape(*fields["m"]) if "m" in fields else None
    n = _parse_shape(*fields["n"]) if "n" in fields else None
    if "m" in allowed and m is None:
        raise SpecSyntaxError(f"kind {kind} requires the shape vector m", 1, 1)
    if "n" in allowed and n is None:
        raise SpecSyntaxError(f"kind {kind} requires the shape vector n", 1, 1)

    spec = InstanceSpecFile(
        kind=kind,
        shift=shift,
        m=m,
        n=n,
        h_text=fields.get("H", ("0", 0))[0],
        g_text=fields.get("G", ("0", 0))[0],
        lambda_text=fields.get("Lambda", (None, 0))[0],
        points=tuple(points),
        options=options,
    )
    _resolve(spec, fields)
    return spec


def parse_spec(path: str) -> InstanceSpecFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec_text(fh.read())


def _expr_line(fields, key) -> int:
    return fields.get(key, ("", 1))[1] or 1


def _resolve(spec: InstanceSpecFile, fields) -> None:
    """Build the model objects, validate slot degrees, canonicalize texts."""
    kind = spec.kind
    k = spec.shift
    if kind in ("symplectic-darboux", "contact-darboux", "lagrangian", "legendrian"):
        check_shift(k)

    if kind in ("symplectic-darboux", "contact-darboux"):
        cls = SymplecticDarbouxSpec if kind == "symplectic-darboux" else ContactDarbouxSpec
        line = _expr_line(fields, "H")
        try:
            model = cls.create(
                k, spec.m,
                lambda alg, names: parse_expression(spec.h_text, alg, line=line),
            )
        except DegreeMismatch as exc:
            raise DegreeMismatch(f"H (line {line}): {exc}") from None
        spec.resolved["model_spec"] = model
        spec.h_text = str(model.hamiltonian)
    elif kind in ("lagrangian", "legendrian"):
        cls = LagrangianDarbouxSpec if kind == "lagrangian" else LegendrianDarbouxSpec
        h_line = _expr_line(fields, "H")
        g_line = _expr_line(fields, "G")
        try:
            model = cls.create(
                k, spec.m, spec.n,
                lambda alg, names: parse_expression(spec.h_text, alg, line=h_line),
                lambda alg, names: parse_expression(spec.g_text, alg, line=g_line),
            )
        except DegreeMismatch as exc:
            raise DegreeMismatch(f"H/G (lines {h_line}/{g_line}): {exc}") from None
        spec.resolved["model_spec"] = model
        spec.h_text = str(model.target.hamiltonian)
        spec.g_text = str(model.superpotential)
    elif kind == "jet1-zero-section":
        if k >= 0:
            raise DegreeMismatch(f"jet shift must be negative, got {k}")
        if spec.m is None or len(spec.m) != 1:
            raise SpecSyntaxError("jet1-zero-section needs m with a single entry",
                                  _expr_line(fields, "m"), 1)
    elif kind == "point-target":
        from .legendrian import build_point_source

        g_line = _expr_line(fields, "G")
        source, names, g = build_point_source(
            k, spec.n,
            lambda alg, nm: parse_expression(spec.g_text, alg, line=g_line),
        )
        dr = DeRhamComplex(source)
        if spec.lambda_text is not None:
            lam = parse_form_expression(spec.lambda_text, dr,
                                        line=_expr_line(fields, "Lambda"))
            if lam.weight != 1:
                raise DegreeMismatch("Lambda must be a one-form (weight 1)")
            if not lam.is_zero() and lam.degree() != k - 1:
                raise DegreeMismatch(
                    f"Lambda must have degree {k - 1}, got {lam.degree()}"
                )
        else:
            from .lagrangian import u_name, v_name

            lam = dr.zero(1)
            for i, row in enumerate(names.u):
                for j, _ in enumerate(row, 1):
                    lam = lam + wedge(
                        dr.inject(source.algebra.gen(u_name(j, i))),
                        dr.symbol(v_name(j, i)),
                    )
        spec.resolved["point_source"] = source
        spec.resolved["point_source_dr"] = dr
        spec.resolved["lambda_form"] = lam
        spec.g_text = str(g)
        spec.lambda_text = str(lam)


def serialize_spec(spec: InstanceSpecFile) -> str:
    """Canonical text form; parse(serialize(s)) == s for parsed specs."""
    lines = [f"kind: {spec.kind}", f"shift: {spec.shift}"]
    allowed = _KEYS_BY_KIND[spec.kind]
    if "m" in allowed and spec.m is not None:
        lines.append("m: " + " ".join(str(v) for v in spec.m))
    if "n" in allowed and spec.n is not None:
        lines.append("n: " + " ".join(str(v) for v in spec.n))
    if "H" in allowed:
        lines.append(f"H: {spec.h_text}")
    if "G" in allowed:
        lines.append(f"G: {spec.g_text}")
    if "Lambda" in allowed and spec.lambda_text is not None:
        lines.append(f"Lambda: {spec.lambda_text}")
    for name in sorted(spec.options):
        lines.append(f"option: {name} = {spec.options[name]}")
    for point in spec.points:
        inner = ", ".join(f"{n} = {v}" for n, v in point)
        lines.append(f"point: {inner}")
    return "\n".join(lines) + "\n"

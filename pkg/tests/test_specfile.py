"""Instance-file grammar, validation, and canonical serialization."""

import random
from fractions import Fraction

import pytest

from darbouxforge.algebra import GradedAlgebra, GradedGenerator
from darbouxforge.errors import DegreeMismatch, SpecSyntaxError, UnknownGenerator
from darbouxforge.specfile import (
    parse_expression,
    parse_spec_text,
    serialize_spec,
)


@pytest.fixture
def k1_alg():
    return GradedAlgebra([
        GradedGenerator("x1", 0), GradedGenerator("z", -1),
        GradedGenerator("y1_km0", -1),
    ])


def test_expression_basic(k1_alg):
    e = parse_expression("x1^2", k1_alg)
    assert e == k1_alg.gen("x1") ** 2


def test_expression_rationals_and_parens(k1_alg):
    e = parse_expression("1/2*x1*(x1 + 3) - 2", k1_alg)
    x = k1_alg.gen("x1")
    assert e == (x * (x + k1_alg.scalar(3))).scale(Fraction(1, 2)) - k1_alg.scalar(2)


def test_expression_unary_minus(k1_alg):
    assert parse_expression("-x1 + x1", k1_alg).is_zero()


def test_expression_zero(k1_alg):
    assert parse_expression("0", k1_alg).is_zero()


def test_expression_rejects_unknown_generator(k1_alg):
    with pytest.raises(UnknownGenerator) as info:
        parse_expression("x1 + bogus", k1_alg)
    assert "line 1" in str(info.value)


def test_expression_syntax_error_position(k1_alg):
    with pytest.raises(SpecSyntaxError) as info:
        parse_expression("x1 + + ", k1_alg)
    assert info.value.line == 1


def test_expression_rejects_division_by_variable(k1_alg):
    with pytest.raises(SpecSyntaxError):
        parse_expression("1/x1", k1_alg)


def test_expression_rejects_form_atom_in_scalar_slot(k1_alg):
    with pytest.raises(SpecSyntaxError):
        parse_expression("d_dR(x1)", k1_alg)


def test_parse_contact_instance():
    spec = parse_spec_text(
        "kind: contact-darboux\nshift: -1\nm: 1\nH: x1^2\n"
    )
    assert spec.kind == "contact-darboux"
    assert spec.shift == -1
    assert spec.m == (1,)
    assert spec.h_text == "x1^2"


def test_parse_rejects_wrong_slot_degree():
    with pytest.raises(DegreeMismatch):
        parse_spec_text("kind: contact-darboux\nshift: -1\nm: 1\nH: y1_km0\n")


def test_parse_accepts_zero_in_any_slot():
    spec = parse_spec_text("kind: contact-darboux\nshift: -1\nm: 1\nH: 0\n")
    assert spec.h_text == "0"


def test_parse_rejects_unknown_kind():
    with pytest.raises(SpecSyntaxError):
        parse_spec_text("kind: mystery\nshift: -1\n")


def test_parse_rejects_unknown_key():
    with pytest.raises(SpecSyntaxError):
        parse_spec_text("kind: contact-darboux\nshift: -1\nm: 1\nQ: 1\n")


def test_parse_rejects_key_for_wrong_kind():
    with pytest.raises(SpecSyntaxError):
        parse_spec_text("kind: contact-darboux\nshift: -1\nm: 1\nG: 0\n")


def test_parse_rejects_duplicate_key():
    with pytest.raises(SpecSyntaxError):
        parse_spec_text("kind: contact-darboux\nshift: -1\nshift: -3\nm: 1\n")


def test_parse_points_and_options():
    spec = parse_spec_text(
        "kind: contact-darboux\nshift: -1\nm: 2\nH: 0\n"
        "point: x1 = 1/2, x2 = -3\noption: points = 2\n"
        "option: sign_convention = plus\n"
    )
    assert spec.points == ((("x1", Fraction(1, 2)), ("x2", Fraction(-3))),)
    assert spec.options["points"] == 2
    assert spec.options["sign_convention"] == "plus"


def test_parse_rejects_bad_option():
    with pytest.raises(SpecSyntaxError):
        parse_spec_text("kind: contact-darboux\nshift: -1\nm: 1\noption: foo = 1\n")


def test_comments_and_blank_lines():
    spec = parse_spec_text(
        "# a comment\n\nkind: contact-darboux  # inline\nshift: -1\nm: 1\nH: 0\n"
    )
    assert spec.kind == "contact-darboux"


def test_round_trip_identity():
    texts = [
        "kind: contact-darboux\nshift: -3\nm: 1 1\nH: x1^2*y1_kp1\n",
        "kind: legendrian\nshift: -1\nm: 1\nn: 1 1\nH: 0\nG: u1*v1_km0\n"
        "point: u1 = 0, xt1 = 2\n",
        "kind: jet1-zero-section\nshift: -2\nm: 3\n",
        "kind: point-target\nshift: -1\nn: 0 1\nG: 0\n",
        "kind: point-target\nshift: -1\nn: 0 1\nG: 0\n"
        "Lambda: u1_m1*d_dR(v1_km0)\n",
    ]
    for text in texts:
        spec = parse_spec_text(text)
        canonical = serialize_spec(spec)
        spec2 = parse_spec_text(canonical)
        assert spec2 == spec
        assert serialize_spec(spec2) == canonical


def test_round_trip_random_hamiltonians():
    rng = random.Random(8)
    for _ in range(10):
        c1 = rng.choice([1, -1, 2, Fraction(1, 2)])
        c2 = rng.randint(0, 3)
        text = (
            "kind: contact-darboux\nshift: -1\nm: 2\n"
            f"H: {Fraction(c1)}*x1^{rng.randint(1, 3)}*x2 + {c2}\n"
        )
        spec = parse_spec_text(text)
        canonical = serialize_spec(spec)
        assert parse_spec_text(canonical) == spec


def test_point_target_lambda_validation():
    with pytest.raises(DegreeMismatch):
        parse_spec_text(
            "kind: point-target\nshift: -1\nn: 0 1\nG: 0\nLambda: u1_m1*v1_km0\n"
        )  # weight 0, not a one-form

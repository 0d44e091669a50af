"""Command-line front end: verify / build / report on instance files.

Exit codes: 0 all checks pass, 1 at least one verification failure,
2 input error (unreadable file, syntax, unknown generator, bad degrees).
``DARBOUX_FORGE_SEED`` seeds the classical-point sampler, so reports are
deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .darboux import (
    build_contact_darboux,
    build_symplectic_darboux,
    check_master_equation,
    check_nondegenerate_on_kernel,
    verify_contact_identities,
    verify_symplectic_identities,
)
from .derham import FormSequence, check_closed_sequence, de_rham_d
from .errors import (
    DarbouxForgeError,
    DegenerateAtPoint,
    MasterEquationViolated,
    NotClosed,
    PointNotOnClassicalLocus,
    RelativeMasterEquationViolated,
)
from .homcheck import (
    PointAssignment,
    require_classical_point,
    sample_classical_points,
)
from .lagrangian import (
    build_lagrangian_model,
    check_relative_master_equation,
    verify_lagrangian_identities,
)
from .legendrian import (
    build_jet1_zero_section,
    build_legendrian_model,
    check_legendrian_nondegeneracy,
    point_target_transfer,
    verify_jet1_zero_section,
    verify_legendrian_identities,
)
from .report import VerificationReport
from .specfile import InstanceSpecFile, parse_spec, serialize_spec

SCHEMA_VERSION = 1


def _seeded_rng() -> random.Random:
    raw = os.environ.get("DARBOUX_FORGE_SEED", "0")
    try:
        seed = int(raw)
    except ValueError:
        seed = raw
    return random.Random(seed)


def _gather_points(presentation, spec: InstanceSpecFile,
                   report: VerificationReport) -> list[PointAssignment]:
    """User points (validated) plus sampled ones up to the requested count."""
    degree_zero = {g.name for g in presentation.algebra.generators if g.degree == 0}
    points = []
    for entry in spec.points:
        values = dict(entry)
        extra = set(values) - degree_zero
        missing = degree_zero - set(values)
        if extra:
            raise PointNotOnClassicalLocus(
                f"point assigns unknown or non-degree-0 names: {sorted(extra)}"
            )
        if missing:
            raise PointNotOnClassicalLocus(
                f"point is missing values for: {sorted(missing)}"
            )
        pt = PointAssignment(values)
        require_classical_point(presentation, pt)
        points.append(pt)
    want = spec.options.get("points", 5)
    if len(points) < want:
        sampled = sample_classical_points(
            presentation, want, _seeded_rng()
        )
        seen = {tuple(sorted(p.values.items())) for p in points}
        for pt in sampled:
            key = tuple(sorted(pt.values.items()))
            if key not in seen and len(points) < want:
                seen.add(key)
                points.append(pt)
    if len(points) < want:
        report.add_skipped(
            "point_sampling",
            f"sample {want} classical-locus points",
            f"only found {len(points)} rational points on the classical locus",
        )
    return points


def _closed_sequence_check(dr, two_form, degree: int, truncation: int,
                           report: VerificationReport) -> None:
    entries = [two_form] + [dr.zero(3 + i) for i in range(truncation)]
    seq = FormSequence(dr, 2, degree, entries)
    report.extend(check_closed_sequence(seq))


def run_pipeline(spec: InstanceSpecFile) -> VerificationReport:
    """Deterministic ordered check list for one instance."""
    report = VerificationReport()
    kind = spec.kind
    truncation = spec.options.get("truncation", 2)
    try:
        if kind in ("symplectic-darboux", "contact-darboux"):
            model_spec = spec.resolved["model_spec"]
            report.extend(check_master_equation(model_spec))
            if not report.passed:
                return report
            if kind == "symplectic-darboux":
                data = build_symplectic_darboux(model_spec)
                report.extend(verify_symplectic_identities(data))
                _closed_sequence_check(data.dr, data.omega0, model_spec.k,
                                       truncation, report)
            else:
                data = build_contact_darboux(model_spec)
                report.extend(verify_contact_identities(data))
                _closed_sequence_check(data.dr, de_rham_d(data.alpha0),
                                       model_spec.k, truncation, report)
                points = _gather_points(data.presentation, spec, report)
                report.extend(check_nondegenerate_on_kernel(data, points))
        elif kind == "lagrangian":
            model_spec = spec.resolved["model_spec"]
            report.extend(check_master_equation(model_spec.target))
            report.extend(check_relative_master_equation(model_spec))
            if not report.passed:
                return report
            data = build_lagrangian_model(model_spec)
            report.extend(verify_lagrangian_identities(data))
        elif kind == "legendrian":
            model_spec = spec.resolved["model_spec"]
            report.extend(check_master_equation(model_spec.target))
            report.extend(check_relative_master_equation(model_spec))
            if not report.passed:
                return report
            data = build_legendrian_model(model_spec)
            report.extend(verify_legendrian_identities(data))
            points = _gather_points(data.source, spec, report)
            report.extend(check_legendrian_nondegeneracy(data, points))
        elif kind == "jet1-zero-section":
            data = build_jet1_zero_section(spec.m[0], spec.shift)
            points = _gather_points(data.source, spec, report)
            report.extend(verify_jet1_zero_section(data, points))
        elif kind == "point-target":
            source = spec.resolved["point_source"]
            lam = spec.resolved["lambda_form"]
            points = _gather_points(source, spec, report)
            transfer = point_target_transfer(source, lam, spec.shift, points)
            report.extend(transfer.report)
        else:  # pragma: no cover - parse_spec rejects unknown kinds
            raise DarbouxForgeError(f"unhandled kind {kind}")
    except (MasterEquationViolated, RelativeMasterEquationViolated) as exc:
        report.add("build", "model construction", False, str(exc))
    except (NotClosed, DegenerateAtPoint) as exc:
        report.add("transfer", type(exc).__name__, False, str(exc))
    return report


def report_payload(spec: InstanceSpecFile, report: VerificationReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "darbouxforge",
        "kind": spec.kind,
        "shift": spec.shift,
        "m": list(spec.m) if spec.m is not None else None,
        "n": list(spec.n) if spec.n is not None else None,
        "options": {k: spec.options[k] for k in sorted(spec.options)},
        "overall": "pass" if report.passed else "fail",
        "checks": [c.to_dict() for c in report.checks],
    }


def render_human(payload: dict) -> str:
    lines = [
        f"darbouxforge report (schema {payload['schema_version']})",
        f"kind: {payload['kind']}   shift: {payload['shift']}"
        f"   m: {payload['m']}   n: {payload['n']}",
        f"overall: {payload['overall'].upper()}",
        "",
        f"{'status':8} {'check':44} equation",
        "-" * 100,
    ]
    for c in payload["checks"]:
        lines.append(f"{c['status']:8} {c['name'][:44]:44} {c['equation']}")
        if c["status"] == "fail" and c["residual"]:
            lines.append(f"{'':8} residual: {c['residual']}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _apply_overrides(spec: InstanceSpecFile, args) -> None:
    if getattr(args, "points", None) is not None:
        spec.options["points"] = args.points
    if getattr(args, "truncation", None) is not None:
        spec.options["truncation"] = args.truncation
    if getattr(args, "sign_convention", None) is not None:
        spec.options["sign_convention"] = args.sign_convention


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="darbouxforge",
        description="Build and verify shifted contact/symplectic Darboux models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("spec", help="instance specification file")
        p.add_argument("--points", type=int, default=None,
                       help="number of classical-locus points to check")
        p.add_argument("--truncation", type=int, default=None,
                       help="truncation bound for form sequences")
        p.add_argument("--sign-convention", dest="sign_convention",
                       choices=("minus", "plus"), default=None,
                       help="path-equivalence sign convention")
        p.add_argument("--out", default=None, help="write output to a file")

    p_verify = sub.add_parser("verify", help="run the full check pipeline")
    add_common(p_verify)
    p_verify.add_argument("--format", choices=("json", "human"), default="json")

    p_build = sub.add_parser("build", help="parse and normalize an instance")
    add_common(p_build)
    p_build.add_argument("--emit-fixture", action="store_true",
                         help="print the canonical serialized instance")

    p_report = sub.add_parser("report", help="emit a verification report")
    add_common(p_report)
    p_report.add_argument("--format", choices=("json", "human"), default="json")

    args = parser.parse_args(argv)

    try:
        spec = parse_spec(args.spec)
        _apply_overrides(spec, args)
    except OSError as exc:
        sys.stderr.write(f"error: cannot read {args.spec}: {exc}\n")
        return 2
    except DarbouxForgeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2

    if args.command == "build":
        try:
            text = serialize_spec(spec)
        except DarbouxForgeError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 2
        if args.emit_fixture:
            _emit(text, args.out)
        else:
            sys.stdout.write("ok\n")
        return 0

    try:
        report = run_pipeline(spec)
    except PointNotOnClassicalLocus as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    payload = report_payload(spec, report)
    if args.format == "human":
        _emit(render_human(payload), args.out)
    else:
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

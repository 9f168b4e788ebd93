"""Command line front end.

Usage::

    leftdecomp decompose --input problem.json --output report.json
    leftdecomp verify --input problem.json --pair polar --seed 7 --samples 2000

Exit codes: 0 success, 1 invalid input, 2 validation failure (e.g. w not
PSD, pair not dominating), 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import forms, measures, verifier
from .errors import InvalidInputError, NumericalFailure, ValidationError
from .linalg_core import DEFAULT_TOL, SubspaceBasis, ToleranceContext, operator_norm
from .problem import (
    CONVENTION,
    SCHEMA_VERSION,
    PairSpec,
    ProblemFile,
    encode_complex,
    encode_matrix,
    encode_vector,
    parse_problem,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VALIDATION = 2
EXIT_CHECK_FAILED = 3

SUBCOMMANDS = ("classify", "decompose", "psd-decompose", "check-pair", "witness", "measure", "verify")


class CommandResult:
    def __init__(self, result: dict, exit_code: int = EXIT_OK, summary: str = ""):
        self.result = result
        self.exit_code = exit_code
        self.summary = summary


def _basis(b: SubspaceBasis) -> list:
    return [encode_vector(b.vectors[:, k]) for k in range(b.count)]


def _require(problem: ProblemFile, *keys):
    for key in keys:
        if getattr(problem, key) is None:
            raise InvalidInputError(f"problem file lacks {key!r}")


def _select_pair(problem: ProblemFile, t: forms.FormMatrix, kind, tol) -> tuple:
    spec = problem.pair or PairSpec()
    if kind is None:
        kind = "explicit" if spec.explicit else spec.preset
    if kind == "explicit":
        if not spec.explicit:
            raise InvalidInputError("--pair explicit needs pair.s1 and pair.s2 in the problem file")
        s1 = forms.NonnegativeForm.checked(spec.s1, tol, "pair.s1")
        s2 = forms.NonnegativeForm.checked(spec.s2, tol, "pair.s2")
        check = forms.pair_check(s1, s2, t, tol)
        return kind, forms.DominatingPair(s1, s2, check.contraction_norm)
    pairs = forms.default_pairs(t, tol)
    return kind, pairs.identity_pair if kind == "identity" else pairs.polar_pair


def _pair_json(kind, pair: forms.DominatingPair) -> dict:
    return {
        "kind": kind,
        "s1": encode_matrix(pair.s1.matrix),
        "s2": encode_matrix(pair.s2.matrix),
        "contraction_norm": pair.contraction_norm,
    }


def _decomposition_json(t, kind, dec: forms.LeftDecomposition) -> dict:
    residual = operator_norm(dec.t_lr.matrix + dec.t_ls.matrix - t.matrix)
    return {
        "pair": _pair_json(kind, dec.pair),
        "t_lr": encode_matrix(dec.t_lr.matrix),
        "t_ls": encode_matrix(dec.t_ls.matrix),
        "sigma_a": encode_matrix(dec.sigma_a.matrix),
        "sigma_s": encode_matrix(dec.sigma_s.matrix),
        "certificates": {
            "ker_w": _basis(dec.ker_w),
            "ker_t_lr": _basis(dec.ker_lr),
            "ker_t_ls": _basis(dec.ker_ls),
            "bound_norms": {"regular": dec.bound_norms[0], "singular": dec.bound_norms[1]},
            "additivity_residual": residual,
        },
    }


def _fmt(m) -> str:
    m = np.asarray(m)
    if np.all(m.imag == 0):
        m = m.real
    return np.array2string(np.round(m, 12) + 0.0, precision=6, suppress_small=True)


def cmd_classify(problem, flags, tol) -> CommandResult:
    _require(problem, "form_t", "form_w")
    c = forms.classify_left(problem.form_t, problem.form_w, tol)
    result = {
        "left_regular": c.left_regular,
        "left_strongly_singular": c.left_strongly_singular,
        "left_bounded": c.left_bounded,
        "minimal_C": c.minimal_C,
    }
    summary = "\n".join(f"{k}: {v}" for k, v in result.items())
    return CommandResult(result, summary=summary)


def _decompose(problem, flags, tol):
    _require(problem, "form_t", "form_w")
    t = forms.FormMatrix(problem.form_t)
    w = forms.NonnegativeForm.checked(problem.form_w, tol, "form_w")
    kind, pair = _select_pair(problem, t, flags.pair, tol)
    return t, w, kind, forms.left_decompose(t, w, pair, tol)


def cmd_decompose(problem, flags, tol) -> CommandResult:
    t, _, kind, dec = _decompose(problem, flags, tol)
    summary = f"pair: {kind}\nt_lr =\n{_fmt(dec.t_lr.matrix)}\nt_ls =\n{_fmt(dec.t_ls.matrix)}"
    return CommandResult(_decomposition_json(t, kind, dec), summary=summary)


def cmd_verify(problem, flags, tol) -> CommandResult:
    t, w, kind, dec = _decompose(problem, flags, tol)
    report = verifier.full_report(t, w, dec, seed=flags.seed, tol=tol, samples=flags.samples)
    result = _decomposition_json(t, kind, dec)
    result["verification"] = report.to_dict()
    lines = [f"pair: {kind}"]
    for c in report.checks:
        status = "INCONCLUSIVE" if c.inconclusive else ("pass" if c.passed else "FAIL")
        lines.append(f"  [{status}] {c.name}: residual {c.worst_residual:.3e} (tol {c.tolerance:.1e})")
    return CommandResult(result, EXIT_OK if report.ok else EXIT_CHECK_FAILED, "\n".join(lines))


def cmd_psd_decompose(problem, flags, tol) -> CommandResult:
    _require(problem, "form_w")
    source = "form_s" if problem.form_s is not None else "form_t"
    _require(problem, source)
    s = forms.NonnegativeForm.checked(getattr(problem, source), tol, source)
    w = forms.NonnegativeForm.checked(problem.form_w, tol, "form_w")
    d = forms.lebesgue_decompose_psd(s, w, tol)
    result = {
        "source": source,
        "s_a": encode_matrix(d.s_a.matrix),
        "s_s": encode_matrix(d.s_s.matrix),
        "s_a_abs_continuous": forms.is_abs_continuous(d.s_a, w, tol),
        "s_s_singular": forms.is_singular(d.s_s, w, tol),
        "parts_mutually_singular": forms.is_singular(d.s_a, d.s_s, tol),
    }
    summary = f"s_a =\n{_fmt(d.s_a.matrix)}\ns_s =\n{_fmt(d.s_s.matrix)}"
    return CommandResult(result, summary=summary)


def cmd_check_pair(problem, flags, tol) -> CommandResult:
    _require(problem, "form_t")
    t = forms.FormMatrix(problem.form_t)
    kind, pair = _select_pair(problem, t, flags.pair, tol)
    check = forms.pair_check(pair.s1, pair.s2, t, tol)
    result = {
        "pair": _pair_json(kind, pair),
        "ok": check.ok,
        "contraction_norm": check.contraction_norm,
        "left_kernel_ok": check.left_kernel_ok,
        "right_kernel_ok": check.right_kernel_ok,
    }
    summary = f"pair {kind}: ok={check.ok}, contraction norm {check.contraction_norm:.6g}"
    return CommandResult(result, EXIT_OK if check.ok else EXIT_CHECK_FAILED, summary)


def cmd_witness(problem, flags, tol) -> CommandResult:
    _require(problem, "form_t", "form_w", "vector")
    wit = forms.singular_witness(problem.form_t, problem.form_w, problem.vector, tol)
    result = {"u": encode_vector(wit.u), "v": encode_vector(wit.v), "residual": wit.residual}
    summary = f"u = {_fmt(wit.u)}\nv = {_fmt(wit.v)}"
    return CommandResult(result, summary=summary)


def cmd_measure(problem, flags, tol) -> CommandResult:
    _require(problem, "measure")
    m = problem.measure
    mu = measures.AtomicMeasure(m.atoms, m.mu)
    nu = measures.AtomicMeasure(m.atoms, m.nu)
    dec = measures.lebesgue_decompose_measure(mu, nu)
    rn = measures.radon_nikodym(mu, nu)
    cls = forms.classify_left(measures.induced_form(mu), measures.induced_form(nu), tol)
    result = {
        "atoms": list(m.atoms),
        "mu_a": encode_vector(dec.mu_a.weights),
        "mu_s": encode_vector(dec.mu_s.weights),
        "support": list(dec.support),
        "radon_nikodym": {a: encode_complex(h) for a, h in rn.items()},
        "total_variation": [float(x) for x in measures.total_variation(mu).weights.real],
        "abs_continuous": measures.is_abs_continuous_measure(mu, nu),
        "singular": measures.is_singular_measure(mu, nu),
        "induced_left_regular": cls.left_regular,
    }
    summary = "\n".join([
        f"mu_a = {_fmt(dec.mu_a.weights)}",
        f"mu_s = {_fmt(dec.mu_s.weights)}",
        "dmu_a/dnu = " + ", ".join(f"{a}: {h:g}" for a, h in rn.items()),
    ])
    return CommandResult(result, summary=summary)


COMMANDS = {
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "psd-decompose": cmd_psd_decompose,
    "check-pair": cmd_check_pair,
    "witness": cmd_witness,
    "measure": cmd_measure,
    "verify": cmd_verify,
}


def make_flags(**overrides) -> argparse.Namespace:
    """Flag namespace with CLI defaults, for calling :func:`run_subcommand` directly."""
    flags = dict(pair=None, seed=0, samples=1000, tol_rank=None, tol_cert=None)
    flags.update(overrides)
    return argparse.Namespace(**flags)


def tolerance_for(problem: ProblemFile, flags) -> ToleranceContext:
    tol = DEFAULT_TOL.replace(**problem.tolerance)
    return tol.replace(rank_rel=flags.tol_rank, cert_abs=flags.tol_cert)


def run_subcommand(name: str, problem: ProblemFile, flags) -> tuple:
    """Run one subcommand; returns ``(report_dict, exit_code, summary)``.

    Library errors are mapped onto exit codes instead of propagating.
    """
    report = {"schema": SCHEMA_VERSION, "convention": CONVENTION, "command": name}
    try:
        tol = tolerance_for(problem, flags)
        report["tolerance"] = {"rank_rel": tol.rank_rel, "cert_abs": tol.cert_abs}
        out = COMMANDS[name](problem, flags, tol)
    except InvalidInputError as exc:
        return _error(report, "invalid_input", exc, EXIT_INVALID)
    except ValidationError as exc:
        return _error(report, "validation", exc, EXIT_VALIDATION)
    except NumericalFailure as exc:
        return _error(report, "numerical_failure", exc, EXIT_CHECK_FAILED)
    report["ok"] = out.exit_code == EXIT_OK
    report["result"] = out.result
    return report, out.exit_code, out.summary


def _error(report, kind, exc, code):
    report["ok"] = False
    report["error"] = {"kind": kind, "message": str(exc)}
    return report, code, f"error ({kind}): {exc}"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="leftdecomp",
        description="One-sided Lebesgue decomposition of sesquilinear forms on C^n.",
        epilog=f"Matrix convention: {CONVENTION}. Exit codes: 0 ok, 1 invalid input, "
               "2 validation failure, 3 verification check failed.",
    )
    ap.add_argument("command", choices=SUBCOMMANDS)
    ap.add_argument("--input", default="-", help="problem JSON file ('-' for stdin)")
    ap.add_argument("--output", default=None, help="write the full JSON report here")
    ap.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    ap.add_argument("--pair", choices=("identity", "polar", "explicit"), default=None,
                    help="dominating pair (default: from the problem file, else identity)")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    ap.add_argument("--samples", type=int, default=1000, help="random vector pairs per sampled check")
    ap.add_argument("--tol-rank", type=float, default=None, help="relative rank threshold")
    ap.add_argument("--tol-cert", type=float, default=None, help="absolute certificate tolerance")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = sys.stdin.buffer.read() if args.input == "-" else Path(args.input).read_bytes()
        problem = parse_problem(raw)
        if args.samples < 1:
            raise InvalidInputError("--samples must be at least 1")
    except OSError as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidInputError as exc:
        print(f"error (invalid_input): {exc}", file=sys.stderr)
        return EXIT_INVALID

    report, code, summary = run_subcommand(args.command, problem, args)
    text = json.dumps(report, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    if args.json:
        print(text)
    else:
        stream = sys.stdout if code in (EXIT_OK, EXIT_CHECK_FAILED) else sys.stderr
        print(f"# {args.command} ({CONVENTION})", file=stream)
        print(summary, file=stream)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

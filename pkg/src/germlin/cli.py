"""Command-line interface: ``germlin {analyze,brjuno,linearize,simul,verify}``.

Exit codes: 0 ok, 1 verification negative, 2 input error, 3 hypothesis or
commutation violation, 4 resonant obstruction, 5 theorem residual exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .brjuno import brjuno_partial_sums, omega_table
from .errors import (
    AllPairsResonant,
    GermlinError,
    HypothesisViolation,
    ResonantObstruction,
    SchemaError,
    SmallDivisorUnderflow,
    TheoremResidualExceeded,
)
from .fileio import GermFile, digest, dump_germ_file, literal_kind, load_germ_file, resolve_backend
from .germ import GermMap, Residual, assert_diagonal
from .linearizer import (
    DEFAULT_TOL_LIN,
    quasi_brjuno_linearize,
    simultaneous_linearize,
    verify_linearization,
)
from .normal_form import Witness, check_osc, check_osc3
from .resonance import DEFAULT_EPS_RES, Spectrum, classify_level_s
from .scalars import zero_tolerance

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_HYPOTHESIS = 3
EXIT_OBSTRUCTION = 4
EXIT_THEOREM = 5


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, TheoremResidualExceeded):
        return EXIT_THEOREM
    if isinstance(exc, (ResonantObstruction, SmallDivisorUnderflow)):
        return EXIT_OBSTRUCTION
    if isinstance(exc, (HypothesisViolation, AllPairsResonant)):
        return EXIT_HYPOTHESIS
    return EXIT_INPUT


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (Residual, Witness)):
        return obj.as_record()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if getattr(obj, "denominator", None) == 1:
        return int(obj)
    if hasattr(obj, "denominator"):
        return str(obj)
    return str(obj)


@dataclass
class Report:
    command: str
    argv: list
    inputs_digest: str | None = None
    sections: dict = field(default_factory=dict)
    error: dict | None = None
    exit_code: int = EXIT_OK

    def fail(self, exc: BaseException) -> "Report":
        self.exit_code = exit_code_for(exc)
        self.error = {
            "type": type(exc).__name__,
            "message": str(exc),
            "witness": _jsonable(getattr(exc, "witness", None)),
        }
        return self

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "argv": list(self.argv),
            "inputs_digest": self.inputs_digest,
            "sections": _jsonable(self.sections),
            "error": self.error,
            "exit_code": self.exit_code,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_text(self) -> str:
        lines = [f"germlin {self.command}"]
        if self.inputs_digest:
            lines.append(f"  input sha256: {self.inputs_digest}")
        for name, body in self.sections.items():
            lines.append(f"[{name}]")
            lines.extend(_text_lines(body, "  "))
        if self.error:
            lines.append(f"[error] {self.error['type']}: {self.error['message']}")
        lines.append(f"exit code: {self.exit_code}")
        return "\n".join(lines)


def _text_lines(body, indent):
    if isinstance(body, str):
        return [indent + line for line in body.splitlines()]
    if isinstance(body, dict):
        out = []
        for k, v in body.items():
            if isinstance(v, (dict, list)) and v:
                out.append(f"{indent}{k}:")
                out.extend(_text_lines(v, indent + "  "))
            else:
                out.append(f"{indent}{k}: {_jsonable(v)}")
        return out
    if isinstance(body, list):
        return [indent + (json.dumps(_jsonable(x)) if not isinstance(x, str) else x) for x in body]
    return [indent + str(_jsonable(body))]


def render_germ(g: GermMap, s: int) -> list[str]:
    """Component-wise rendering with the x/y split: ``x1' = ...``, ``y1' = ...``."""
    names = [f"x{i + 1}" for i in range(s)] + [f"y{j + 1}" for j in range(g.n - s)]
    return [f"{names[j]}' = {c.to_string(names)}" for j, c in enumerate(g.components)]


def _spectrum_record(sp: Spectrum) -> dict:
    fmt = sp.backend.format
    return {"values": [list(fmt(v)) for v in sp.values], "s": sp.s}


def _load(args) -> GermFile:
    gf = load_germ_file(args.input, args.backend)
    if args.max_degree is not None:
        if args.max_degree < 1 or args.max_degree > gf.N:
            raise SchemaError(f"--max-degree must be in 1..{gf.N} (the file's truncation degree)")
        gf.N = args.max_degree
    return gf


def _tol(args, gf: GermFile):
    if args.tol is not None:
        return args.tol
    if "tol" in gf.tolerances:
        return gf.tolerances["tol"]
    return 0 if gf.backend.exact else DEFAULT_TOL_LIN


def _eps_res(args, gf: GermFile | None = None):
    if args.eps_res is not None:
        return args.eps_res
    if gf is not None and "eps_res" in gf.tolerances:
        return gf.tolerances["eps_res"]
    return DEFAULT_EPS_RES


def _run(report: Report, body) -> Report:
    try:
        body(report)
    except (GermlinError, ValueError, TypeError, OSError) as exc:
        report.fail(exc)
    return report


def cmd_analyze(args) -> Report:
    """Spectrum, resonance table, level-s verdict and osc / osc3 verdicts."""
    report = Report("analyze", list(args.argv))

    def body(rep):
        rep.inputs_digest = digest(args.input)
        gf = _load(args)
        germs = gf.germ_maps()
        spectrum = assert_diagonal(germs[0], gf.s)
        rep.sections["spectrum"] = _spectrum_record(spectrum)
        resonance = classify_level_s(spectrum, max(gf.N, 2), _eps_res(args, gf))
        rep.sections["resonance"] = resonance.as_record()
        osc = check_osc(germs, gf.s, gf.N)
        osc3 = check_osc3(germs, gf.s, gf.N)
        rep.sections["verdicts"] = {"level_s_ok": resonance.level_s_ok, "osc": osc.ok, "osc3": osc3.ok}
        rep.sections["osc"] = osc.as_record()
        rep.sections["osc3"] = osc3.as_record()

    return _run(report, body)


def parse_eigenvalue(token: str) -> tuple[str, str]:
    """``"re"`` or ``"re:im"`` with integer, ``p/q`` or decimal parts."""
    parts = token.split(":")
    if len(parts) == 1:
        parts.append("0")
    if len(parts) != 2:
        raise SchemaError(f"eigenvalue {token!r} must be 're' or 're:im'")
    for p in parts:
        literal_kind(p)
    return parts[0], parts[1]


def cmd_brjuno(args) -> Report:
    """omega~ table and reduced Brjuno partial sums (diagnostic only)."""
    report = Report("brjuno", list(args.argv))

    def body(rep):
        if args.input:
            rep.inputs_digest = digest(args.input)
            gf = _load(args)
            spectrum = gf.spectrum or assert_diagonal(gf.germ_maps()[0], gf.s)
        else:
            if not args.eigenvalues:
                raise SchemaError("give --eigenvalues or --input")
            pairs = [parse_eigenvalue(t) for t in args.eigenvalues]
            kinds = {literal_kind(x) for p in pairs for x in p}
            backend = resolve_backend(kinds, args.backend)
            spectrum = Spectrum(tuple(backend.scalar(a, b) for a, b in pairs), args.s)
        if args.p:
            sequence = [int(x) for x in args.p.split(",")]
            nu_max = args.nu_max if args.nu_max is not None else len(sequence) - 2
        else:
            sequence = "geometric2"
            nu_max = args.nu_max if args.nu_max is not None else max(0, (args.m_max).bit_length() - 2)
        rep.sections["spectrum"] = _spectrum_record(spectrum)
        result = brjuno_partial_sums(spectrum, nu_max, sequence, _eps_res(args), args.exclude)
        record = result.as_record()
        if args.m_max is not None:
            record["omega_table"] = [
                {"m": m, "omega_tilde": _num(w)}
                for m, w in omega_table(spectrum, args.m_max, _eps_res(args), args.exclude)
            ]
        rep.sections["brjuno"] = record

    return _run(report, body)


def _num(x):
    if getattr(x, "denominator", None) == 1:
        return int(x)
    return float(x)


def _result_sections(rep: Report, result, gf: GermFile):
    rep.sections["spectrum"] = _spectrum_record(result.spectrum)
    rep.sections["structure"] = result.structure_flags
    rep.sections["divisors"] = result.divisor_log.as_record()
    if result.commutation:
        rep.sections["commutation"] = [r.as_record() for r in result.commutation]
    rep.sections["residuals"] = {
        "linearization": result.linearization_residual.as_record(),
        "conjugates": [r.as_record() for r in result.residuals],
    }
    if result.omega is not None:
        rep.sections["omega_tilde (diagnostic only)"] = [
            {"m": m, "omega_tilde": _num(w)} for m, w in result.omega
        ]
    rep.sections["psi"] = render_germ(result.psi, gf.s)
    rep.sections["conjugated"] = [line for g in result.conjugated for line in render_germ(g, gf.s)]


def _write_result(args, gf: GermFile, result, suffix: str) -> str:
    out = args.output or str(Path(args.input).with_suffix("")) + f".{suffix}.json"
    N = gf.N
    germs = [(name, g.truncate(N) if g.order > N else g) for name, g in gf.germs]
    conj_names = [f"{name}~" for name, _ in germs][: len(result.conjugated)]
    tolerances = dict(gf.tolerances)
    out_file = GermFile(
        gf.n,
        gf.s,
        N,
        gf.backend,
        germs[: max(len(result.conjugated), 1)] if suffix == "linearize" else germs,
        result.psi,
        list(zip(conj_names, result.conjugated)),
        result.spectrum,
        tolerances,
    )
    dump_germ_file(out_file, out)
    return out


def cmd_linearize(args) -> Report:
    """Linearize the first germ of the file (single-germ theorem)."""
    report = Report("linearize", list(args.argv))

    def body(rep):
        rep.inputs_digest = digest(args.input)
        gf = _load(args)
        f = gf.germ_maps()[0]
        if f.order > gf.N:
            f = f.truncate(gf.N)
        result = quasi_brjuno_linearize(f, gf.s, gf.N, _eps_res(args, gf), _tol(args, gf))
        _result_sections(rep, result, gf)
        rep.sections["output"] = _write_result(args, gf, result, "linearize")

    return _run(report, body)


def cmd_simul(args) -> Report:
    """Full simultaneous pipeline; writes psi and the linear conjugates."""
    report = Report("simul", list(args.argv))

    def body(rep):
        rep.inputs_digest = digest(args.input)
        gf = _load(args)
        germs = gf.germ_maps()
        if len(germs) < 2:
            raise SchemaError("simul needs at least two germs (m >= 2)")
        germs = [g.truncate(gf.N) if g.order > gf.N else g for g in germs]
        result = simultaneous_linearize(germs, gf.s, gf.N, _tol(args, gf), _eps_res(args, gf))
        _result_sections(rep, result, gf)
        rep.sections["output"] = _write_result(args, gf, result, "simul")

    return _run(report, body)


def cmd_verify(args) -> Report:
    """Residual of ``f o psi - psi o L`` for every germ in the file."""
    report = Report("verify", list(args.argv))

    def body(rep):
        rep.inputs_digest = digest(args.input)
        gf = _load(args)
        psi = gf.psi
        if psi is None:
            named = [g for name, g in gf.germs if name == "psi"]
            if not named:
                raise SchemaError("verify needs a 'psi' germ")
            psi = named[0]
        targets = [(name, g) for name, g in gf.germs if g is not psi]
        if not targets:
            raise SchemaError("verify needs at least one germ besides psi")
        tol = _tol(args, gf)
        rows = []
        worst = None
        for idx, (name, g) in enumerate(targets):
            target = gf.spectrum if (idx == 0 and gf.spectrum is not None) else g
            res = verify_linearization(g, psi, target, gf.N)
            rows.append({"germ": name, **res.as_record()})
            if worst is None or float(res.value) > float(worst.value):
                worst = res
        rep.sections["residuals"] = rows
        rep.sections["verdict"] = {
            "max_residual": worst.as_record()["value"],
            "tol": tol,
            "linearized": worst.value <= tol,
        }
        if not worst.value <= tol:
            rep.exit_code = EXIT_NEGATIVE

    return _run(report, body)


COMMANDS = {
    "analyze": cmd_analyze,
    "brjuno": cmd_brjuno,
    "linearize": cmd_linearize,
    "simul": cmd_simul,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="germ file (JSON)")
    common.add_argument("--max-degree", type=int, help="truncation degree N (at most the file's N)")
    common.add_argument("--tol", type=float, help="acceptance tolerance (default 0 exact, 1e-9 floating)")
    common.add_argument("--eps-res", type=float, help=f"resonance threshold (default {DEFAULT_EPS_RES})")
    common.add_argument("--eps-zero", type=float, help="floating zero-test tolerance (default 1e-12)")
    common.add_argument("--backend", choices=["exact", "floating"], help="override the file's backend")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="json", action="store_true", help="machine-readable report")
    fmt.add_argument("--pretty", dest="json", action="store_false", help="human-readable report (default)")

    parser = argparse.ArgumentParser(
        prog="germlin", description="Simultaneous linearization of commuting holomorphic germs to order N."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "linearize", "simul", "verify"):
        p = sub.add_parser(name, parents=[common], help=COMMANDS[name].__doc__.splitlines()[0])
        if name in ("linearize", "simul"):
            p.add_argument("--output", help="output germ file (default: <input>.<command>.json)")
    p = sub.add_parser("brjuno", parents=[common], help=cmd_brjuno.__doc__)
    p.add_argument("--eigenvalues", nargs="+", metavar="RE[:IM]", help="eigenvalues, e.g. 2 1/2 0:1")
    p.add_argument("--s", type=int, help="split s (default n)")
    p.add_argument("--m-max", type=int, help="also tabulate omega~ up to this degree")
    p.add_argument("--nu-max", type=int, help="last partial-sum index (default from --m-max or --p)")
    p.add_argument("--p", help="custom sequence p_0=1,p_1,... (comma separated)")
    p.add_argument("--exclude", choices=["pair", "index"], default="pair",
                   help="drop resonant (k, j) pairs (default) or every k resonant for some j")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args.argv = argv
    if args.command != "brjuno" and not args.input:
        report = Report(args.command, argv).fail(SchemaError("--input is required"))
    else:
        if args.command == "brjuno" and args.m_max is None and args.nu_max is None and not args.p:
            args.m_max = 16
        report = _dispatch(args)
    print(report.to_json() if args.json else report.to_text())
    return report.exit_code


def _dispatch(args) -> Report:
    if args.eps_zero:
        with zero_tolerance(args.eps_zero):
            return COMMANDS[args.command](args)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

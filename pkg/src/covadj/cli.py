"""Command-line front end.

Subcommands: analyze, size, power, pilot, study, catalog.  Every flag has a
COVADJ_* environment override (flag beats env beats default).  Exit codes
are stable API: 0 success, 2 usage or malformed input, 3 degenerate data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .backend import BACKEND_NAME
from .data import load_dataset_csv
from .distributions import ErrorDistSpec, ErrorKind
from .errors import (CovadjError, DegenerateDesign, DomainError,
                     InputFormatError, InsufficientData, UnknownCaseError,
                     ZeroVarianceGroup)
from .methods import recommend
from .regression import fit_grouped
from .report import (StudyReport, analyze_report, emit_agreement_table,
                     emit_kappa_table, emit_power_curves,
                     emit_size_comparisons, emit_size_table)
from .rng import RngStream
from .simulate import (CaseSpec, CovariateScheme, StudyConfig, TreatmentSpec,
                       catalog, estimate_power_curve, estimate_size,
                       get_case, pilot_m_u)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

_ENV_PREFIX = "COVADJ_"


def _env(name: str, default, cast=str):
    raw = os.environ.get(_ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError:
        raise DomainError(f"bad value for {_ENV_PREFIX}{name}: {raw!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="covadj",
        description="Covariate-adjusted treatment comparisons: ANCOVA, "
                    "residual-based tests, and Monte-Carlo size/power studies.")
    p.add_argument("--version", action="version",
                   version=f"covadj {__version__} (backend: {BACKEND_NAME})")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, with_q=False):
        sp.add_argument("--nmc", type=int, default=_env("NMC", 10000, int),
                        help="Monte-Carlo replicates per grid point")
        sp.add_argument("--alpha", type=float, default=_env("ALPHA", 0.05, float),
                        help="nominal significance level")
        sp.add_argument("--seed", type=int, default=_env("SEED", 0, int),
                        help="base seed; fully determines all outputs")
        sp.add_argument("--threads", type=int,
                        default=_env("THREADS", os.cpu_count() or 1, int),
                        help="worker threads (results are thread-count independent)")
        sp.add_argument("--format", choices=("csv", "json"),
                        default=_env("FORMAT", "csv"),
                        help="output document format")
        sp.add_argument("--df-convention", choices=("paper", "restricted"),
                        default=_env("DF_CONVENTION", "paper"),
                        help="residual-ANOVA error df: n-t (paper) or n-t-1")
        sp.add_argument("--fixed-covariates", action="store_true",
                        default=_env("FIXED_COVARIATES", False, bool),
                        help="draw covariates once per case instead of per replicate")
        sp.add_argument("--case-file", default=_env("CASE_FILE", None),
                        help="JSON file with additional case definitions")
        if with_q:
            sp.add_argument("--qmax", default=_env("QMAX", "auto"),
                            help="top of the separation grid, or 'auto' for pilot sizing")

    sp = sub.add_parser("analyze", help="staged analysis of a treatment,x,y CSV file")
    sp.add_argument("input", help="input CSV path, or - for stdin")
    sp.add_argument("--alpha", type=float, default=_env("ALPHA", 0.05, float))
    sp.add_argument("--format", choices=("csv", "json"),
                    default=_env("FORMAT", "json"))
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--df-convention", choices=("paper", "restricted"),
                    default=_env("DF_CONVENTION", "paper"))
    sp.add_argument("--overlap-threshold", type=float,
                    default=_env("OVERLAP_THRESHOLD", 0.25, float),
                    help="covariate-range overlap below which ANCOVA is flagged")

    sp = sub.add_parser("size", help="empirical size of one case at the null")
    sp.add_argument("--case", required=True)
    add_common(sp)
    sp.add_argument("--out", default=None, help="output directory (default stdout)")

    sp = sub.add_parser("power", help="power curve of one case over the separation grid")
    sp.add_argument("--case", required=True)
    add_common(sp, with_q=True)
    sp.add_argument("--out", default=None, help="output directory (default stdout)")

    sp = sub.add_parser("pilot", help="pilot-size the separation grid for one case")
    sp.add_argument("--case", required=True)
    sp.add_argument("--seed", type=int, default=_env("SEED", 0, int))
    sp.add_argument("--format", choices=("csv", "json"),
                    default=_env("FORMAT", "csv"))
    sp.add_argument("--case-file", default=_env("CASE_FILE", None))

    sp = sub.add_parser("study", help="size, agreement, power and kappa for many cases")
    sp.add_argument("--cases", required=True,
                    help="comma-separated case ids, or 'all'")
    add_common(sp, with_q=True)
    sp.add_argument("--out", default=_env("OUT", "."),
                    help="output directory for the study documents")

    sp = sub.add_parser("catalog", help="list the built-in simulation cases")
    sp.add_argument("--format", choices=("csv", "json"),
                    default=_env("FORMAT", "csv"))
    sp.add_argument("--case-file", default=_env("CASE_FILE", None))
    return p


# ---------------------------------------------------------------------------
# Case files
# ---------------------------------------------------------------------------

_KIND_NAMES = {
    "NormalVar": ErrorKind.NORMAL_VAR,
    "UniformSym": ErrorKind.UNIFORM_SYM,
    "DoubleWeibull": ErrorKind.DOUBLE_WEIBULL,
    "ScaledBeta62": ErrorKind.SCALED_BETA62,
    "ChiSq2Centered": ErrorKind.CHISQ2_CENTERED,
    "LogNormalCentered": ErrorKind.LOGNORMAL_CENTERED,
    "NormalVarSqrtX": ErrorKind.NORMAL_VAR_SQRTX,
    "UniformSqrtX": ErrorKind.UNIFORM_SQRTX,
}


def _parse_error_spec(obj: dict) -> ErrorDistSpec:
    kind = obj.get("kind")
    if kind not in _KIND_NAMES:
        raise InputFormatError(
            f"unknown error kind {kind!r}; one of {sorted(_KIND_NAMES)}")
    return ErrorDistSpec(_KIND_NAMES[kind], float(obj.get("variance", 1.0)))


def _parse_scheme(obj: dict) -> CovariateScheme:
    kind = obj.get("kind")
    if kind == "UniformInterval":
        return CovariateScheme.uniform(float(obj["lo"]), float(obj["hi"]))
    if kind == "TwoIntervalMix":
        return CovariateScheme.two_interval(float(obj["lo1"]), float(obj["hi1"]),
                                            float(obj["lo2"]), float(obj["hi2"]))
    raise InputFormatError(f"unknown covariate scheme {kind!r}")


def load_case_file(path: str) -> dict[str, CaseSpec]:
    """Read extra case definitions from a JSON file."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read case file {path}: {exc}") from None
    out: dict[str, CaseSpec] = {}
    for obj in doc.get("cases", []):
        treatments = obj.get("treatments", [])
        if len(treatments) != 2:
            raise InputFormatError("each case needs exactly 2 treatments")
        specs = [TreatmentSpec(_parse_error_spec(t["error"]),
                               _parse_scheme(t["covariates"]),
                               int(t["n"])) for t in treatments]
        case = CaseSpec(str(obj["id"]), specs[0], specs[1],
                        replicates=int(obj.get("replicates", 1)),
                        slope=float(obj.get("slope", 2.0)),
                        base_intercept=float(obj.get("base_intercept", 1.0)),
                        intercept_step=float(obj.get("intercept_step", 0.02)))
        out[case.case_id] = case
    return out


def _extra_cases(args) -> dict[str, CaseSpec]:
    path = getattr(args, "case_file", None)
    return load_case_file(path) if path else {}


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _write_docs(out: str | None, fmt: str, docs: dict[str, bytes]) -> None:
    if out is None:
        first = True
        for _name, data in docs.items():
            if not first:
                sys.stdout.write("\n")
            sys.stdout.write(data.decode("utf-8"))
            first = False
        sys.stdout.flush()
        return
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, data in docs.items():
        (outdir / f"{name}.{fmt}").write_bytes(data)


def _study_docs(report: StudyReport, fmt: str) -> dict[str, bytes]:
    docs: dict[str, bytes] = {}
    if report.sizes:
        docs["size"] = emit_size_table(report, fmt)
        docs["agreement"] = emit_agreement_table(report, fmt)
        docs["size_compare"] = emit_size_comparisons(report, fmt)
    if report.powers:
        docs["power"] = emit_power_curves(report, fmt)
        docs["kappa"] = emit_kappa_table(report, fmt)
    return docs


def _config(args) -> StudyConfig:
    return StudyConfig(n_mc=args.nmc, alpha=args.alpha, seed=args.seed,
                       regenerate_covariates=not args.fixed_covariates,
                       threads=max(1, args.threads),
                       df_convention=args.df_convention)


def _resolve_qmax(args, case, cfg) -> int:
    raw = getattr(args, "qmax", "auto")
    if isinstance(raw, str) and raw.strip().lower() == "auto":
        return pilot_m_u(case, RngStream(cfg.seed))
    try:
        q = int(raw)
    except (TypeError, ValueError):
        raise DomainError(f"--qmax must be an integer or 'auto', got {raw!r}") from None
    if q < 1:
        raise DomainError("--qmax must be at least 1")
    return q


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_analyze(args) -> int:
    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.input).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"covadj: cannot read {args.input}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    data = load_dataset_csv(text)
    overall, fits = fit_grouped(data)
    rec = recommend(data, args.alpha, overlap_threshold=args.overlap_threshold,
                    df_convention=args.df_convention)
    doc = analyze_report(rec, overall, fits, data.treatments(), args.format)
    if args.out:
        Path(args.out).write_bytes(doc)
    else:
        sys.stdout.write(doc.decode("utf-8"))
    return EXIT_OK


def _cmd_size(args) -> int:
    case = get_case(args.case, _extra_cases(args))
    cfg = _config(args)
    report = StudyReport(cfg.n_mc, cfg.alpha, cfg.seed)
    report.sizes.append(estimate_size(case, cfg))
    _write_docs(args.out, args.format, _study_docs(report, args.format))
    return EXIT_OK


def _cmd_power(args) -> int:
    case = get_case(args.case, _extra_cases(args))
    cfg = _config(args)
    q_max = _resolve_qmax(args, case, cfg)
    report = StudyReport(cfg.n_mc, cfg.alpha, cfg.seed)
    report.sizes.append(estimate_size(case, cfg))  # provides the q = 0 row
    report.powers.append(estimate_power_curve(case, cfg, q_max))
    _write_docs(args.out, args.format, _study_docs(report, args.format))
    return EXIT_OK


def _cmd_pilot(args) -> int:
    case = get_case(args.case, _extra_cases(args))
    m_u = pilot_m_u(case, RngStream(args.seed))
    if args.format == "json":
        print(json.dumps({"case": case.case_id, "m_u": m_u,
                          "max_intercept_difference":
                              round(case.intercept_step * m_u, 10)}))
    else:
        print(f"case,m_u,max_intercept_difference\n"
              f"{case.case_id},{m_u},{case.intercept_step * m_u:.2f}")
    return EXIT_OK


def _cmd_study(args) -> int:
    extra = _extra_cases(args)
    all_cases = catalog()
    all_cases.update(extra)
    if args.cases.strip().lower() == "all":
        ids = list(all_cases)
    else:
        ids = [c.strip() for c in args.cases.split(",") if c.strip()]
        for cid in ids:
            if cid not in all_cases:
                raise UnknownCaseError(
                    f"unknown case {cid!r}; valid ids: {', '.join(all_cases)}")
    cfg = _config(args)
    report = StudyReport(cfg.n_mc, cfg.alpha, cfg.seed)
    for cid in ids:
        case = all_cases[cid]
        print(f"case {cid}: estimating size (n_mc={cfg.n_mc})", file=sys.stderr)
        report.sizes.append(estimate_size(case, cfg))
        q_max = _resolve_qmax(args, case, cfg)
        print(f"case {cid}: power grid q=1..{q_max}", file=sys.stderr)
        report.powers.append(estimate_power_curve(case, cfg, q_max))
        print(f"case {cid}: done", file=sys.stderr)
    _write_docs(args.out, args.format, _study_docs(report, args.format))
    return EXIT_OK


def _cmd_catalog(args) -> int:
    cases = catalog()
    cases.update(_extra_cases(args))
    if args.format == "json":
        doc = [{"case": c.case_id,
                "n1": c.treatment1.n, "n2": c.treatment2.n,
                "error1": c.treatment1.error.describe(),
                "error2": c.treatment2.error.describe(),
                "covariates1": c.treatment1.covariates.describe(),
                "covariates2": c.treatment2.covariates.describe(),
                "replicates": c.replicates}
               for c in cases.values()]
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print("case,n1,n2,error1,error2,covariates1,covariates2,replicates")
    for c in cases.values():
        print(f"{c.case_id},{c.treatment1.n},{c.treatment2.n},"
              f"{c.treatment1.error.describe()},{c.treatment2.error.describe()},"
              f"{c.treatment1.covariates.describe()},"
              f"{c.treatment2.covariates.describe()},{c.replicates}")
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "size": _cmd_size,
    "power": _cmd_power,
    "pilot": _cmd_pilot,
    "study": _cmd_study,
    "catalog": _cmd_catalog,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (InputFormatError, UnknownCaseError, DomainError) as exc:
        print(f"covadj: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateDesign, InsufficientData, ZeroVarianceGroup) as exc:
        print(f"covadj: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except CovadjError as exc:
        print(f"covadj: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())

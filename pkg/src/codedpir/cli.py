"""Command-line front end: ``codedpir analyze | rate-table | simulate``.

Code files are JSON (``{"q": 2, "format": "matrix", "payload": [[...], ...]}``
or ``{"q": 2, "format": "decimal", "k": 4, "payload": [1, 2, ...]}``) or plain
text: one generator row per line for ``--format matrix``, or comma/space
separated column integers for ``--format decimal`` (needs ``--k``). Decimal
columns are read least significant digit first, so column (1,0,1,1)^T is 13.
The names C1..C4 refer to the bundled example codes.

Exit codes: 0 success, 2 parse error, 3 infeasible request, 4 verification
failure (recovery or privacy).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .code import (
    CodeError,
    LinearCode,
    direct_sum_decompose,
    mds_pir_necessary_check,
    weight_hierarchy,
)
from .dss import encode_store, generate_files, respond_all
from .field import FieldError
from .ratematrix import RateMatrixNotFound, find_min_ratio, is_capacity_achieving
from .rates import INF, RateError, RateReport, render, reports_to_csv, reports_to_json
from .protocols import (
    ProtocolError,
    RecoveryError,
    Schedule,
    audit_privacy,
    bundled_schedule,
    plan_protocol1,
    plan_protocol2,
    plan_protocolA,
    plan_protocolA_inf,
    plan_protocolB,
    plan_schedule,
    recover,
    transcript,
    verify_schedule,
)
from .protocols.directsum import part_rate_matrices, required_beta as b_required_beta
from .protocols.fileindep import masked_layout

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 2, 3, 4
BUILTIN_CODES = ("C1", "C2", "C3", "C4")
BUNDLED_SCHEDULES = ("table2_c2", "c1", "c3")
PROTOCOLS = ("p1", "p2", "a", "a-inf", "b-p1", "b-p2", "schedule")


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class CodeSpecFile:
    q: int
    format: str
    payload: object
    k: int | None = None
    name: str = ""

    def to_code(self) -> LinearCode:
        try:
            if self.format == "matrix":
                return LinearCode.from_rows(self.payload, q=self.q, name=self.name)
            if self.format == "decimal":
                if self.k is None:
                    raise ParseError("decimal-column format needs k (--k or a \"k\" field)")
                return LinearCode.from_decimal_columns(list(self.payload), self.k, q=self.q, name=self.name)
        except (CodeError, FieldError) as exc:
            raise ParseError(str(exc)) from exc
        raise ParseError(f"unknown format {self.format!r}; use matrix or decimal")


def _ints(text: str, where: str) -> list[int]:
    out = []
    for tok in text.replace(",", " ").split():
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"{where}: {tok!r} is not an integer") from None
    return out


def parse_code_text(text: str, q: int | None, k: int | None, fmt: str | None, name: str = "") -> CodeSpecFile:
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
        fmt_ = fmt or data.get("format", "matrix")
        if fmt_ in ("decimal-columns", "decimal_columns"):
            fmt_ = "decimal"
        return CodeSpecFile(
            int(q or data.get("q", 2)), fmt_, data.get("payload"), k or data.get("k"), data.get("name", name)
        )
    fmt = fmt or "matrix"
    lines = [(i + 1, ln.split("#")[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise ParseError("code file is empty")
    if fmt == "decimal":
        cols = [c for i, ln in lines for c in _ints(ln, f"line {i}")]
        return CodeSpecFile(q or 2, "decimal", cols, k, name)
    rows = [_ints(ln, f"line {i}") for i, ln in lines]
    width = len(rows[0])
    for (i, _), row in zip(lines, rows):
        if len(row) != width:
            raise ParseError(f"line {i}: row has {len(row)} entries, expected {width}")
    return CodeSpecFile(q or 2, "matrix", rows, None, name)


def load_code(ref: str, q: int | None = None, k: int | None = None, fmt: str | None = None) -> LinearCode:
    path = Path(ref)
    if not path.exists() and ref.upper() in BUILTIN_CODES:
        text = resources.files("codedpir.data").joinpath(f"{ref.lower()}.json").read_text()
        return parse_code_text(text, q, k, fmt, ref.upper()).to_code()
    if not path.exists():
        raise ParseError(f"code file {ref!r} not found (built-in names: {', '.join(BUILTIN_CODES)})")
    return parse_code_text(path.read_text(), q, k, fmt, path.stem).to_code()


def parse_files(text: str):
    if text.lower() in ("inf", "infinity", "∞"):
        return INF
    try:
        f = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--files must be a positive integer or 'inf', got {text!r}") from None
    if f < 1:
        raise argparse.ArgumentTypeError("--files must be positive")
    return f


# -- analyze -------------------------------------------------------------------------


def analyze(code: LinearCode, nu_max: int) -> dict:
    hierarchy = weight_hierarchy(code)
    ok, failing = mds_pir_necessary_check(code)
    best = find_min_ratio(code, nu_max=nu_max)
    verdict = is_capacity_achieving(code, nu_max=nu_max)
    decomposition = direct_sum_decompose(code)
    parts = []
    for coords, sub in decomposition.parts:
        entry = {"coords": list(coords), "n": sub.n, "k": sub.k}
        if sub.k < sub.n:
            entry["capacity_achieving"] = is_capacity_achieving(sub, nu_max=nu_max).verdict.value
        else:
            entry["capacity_achieving"] = "no (k = n)"
        parts.append(entry)
    return {
        "name": code.name,
        "q": code.q,
        "n": code.n,
        "k": code.k,
        "weight_hierarchy": hierarchy,
        "necessary_condition": {"pass": ok, "failing_s": failing},
        "min_ratio": f"{best.kappa}/{best.nu}",
        "min_ratio_certified": best.certified,
        "rate_matrix": best.matrix.matrix.tolist(),
        "capacity_achieving": verdict.verdict.value,
        "capacity_reason": verdict.reason,
        "direct_sum_parts": parts,
    }


def _analyze_text(r: dict) -> str:
    lines = [
        f"code {r['name'] or '-'}: [{r['n']},{r['k']}] over GF({r['q']})",
        "weight hierarchy: " + ", ".join(f"d_{s + 1} = {d}" for s, d in enumerate(r["weight_hierarchy"])),
        "necessary condition d_s >= (n/k) s: "
        + ("pass" if r["necessary_condition"]["pass"] else f"fails at s = {r['necessary_condition']['failing_s']}"),
        f"min kappa/nu: {r['min_ratio']}" + ("" if r["min_ratio_certified"] else " (not certified minimal)"),
        "rate matrix:",
        *("  " + " ".join(map(str, row)) for row in r["rate_matrix"]),
        f"MDS-PIR capacity-achieving: {r['capacity_achieving']}",
        "direct-sum parts: "
        + "; ".join(f"{p['coords']} [{p['n']},{p['k']}] capacity-achieving={p['capacity_achieving']}" for p in r["direct_sum_parts"]),
    ]
    return "\n".join(lines)


# -- rate table ------------------------------------------------------------------------


def _schedule_rate(code: LinearCode) -> Fraction | None:
    for name in BUNDLED_SCHEDULES:
        sched = bundled_schedule(name)
        spec = sched.code_spec
        if spec is None:
            continue
        other = CodeSpecFile(spec.get("q", 2), spec.get("format", "matrix"), spec["payload"], spec.get("k")).to_code()
        if other.q == code.q and other.n == code.n and other.k == code.k and other.same_code_as(code):
            v = verify_schedule(code, sched, 2)
            if v.recoverable and v.private:
                return v.rate
    return None


def rate_row(code: LinearCode, f, nu_max: int) -> RateReport:
    best = find_min_ratio(code, nu_max=nu_max)
    decomposition = direct_sum_decompose(code)
    parts = None
    if decomposition.num_parts > 1:
        try:
            part_rate_matrices(decomposition, nu_max)
            parts = decomposition.shapes
        except (ProtocolError, RateMatrixNotFound):
            parts = None
    return RateReport.build(
        code.name or "code", code.n, code.k, best.kappa, best.nu, f, parts=parts, rate_c=_schedule_rate(code)
    )


def _table_text(reports: Sequence[RateReport]) -> str:
    header = ["code", "kappa/nu", "R_S", "R_A", "R_B", "R_C", "C"]
    rows = [header] + [list(r.table_row().values()) for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows)


# -- simulate ----------------------------------------------------------------------------


def build_plan_family(code: LinearCode, protocol: str, f: int, beta: int | None, seed: int, nu_max: int, schedule=None):
    """Store plus one plan per wanted file, all from the same seed."""
    if protocol in ("b-p1", "b-p2"):
        decomposition = direct_sum_decompose(code)
        if decomposition.num_parts == 1:
            raise ProtocolError("Protocol B needs a decomposable code; this code is indecomposable")
        sub = protocol[2:].upper()
        base = b_required_beta(decomposition, f, sub, nu_max)

        def make(store, m):
            return plan_protocolB(store, decomposition, m, sub, seed, nu_max)

    elif protocol == "schedule":
        if schedule is None:
            raise ProtocolError("--protocol schedule needs --schedule <file> (or a bundled name)")
        base = schedule.beta

        def make(store, m):
            return plan_schedule(store, schedule, m, seed)

    else:
        rm = find_min_ratio(code, nu_max=nu_max).matrix
        if rm.kappa == rm.nu:
            raise ProtocolError("the best rate matrix has kappa = nu; no private protocol applies")
        planners = {"p1": plan_protocol1, "a": plan_protocolA, "p2": plan_protocol2, "a-inf": plan_protocolA_inf}
        planner = planners[protocol]
        if protocol in ("p1", "a"):
            base = rm.nu**f
        else:
            base = masked_layout(rm, asymmetric=(protocol == "a-inf")).beta

        def make(store, m):
            return planner(store, rm, m, seed)

    beta = beta or base
    if beta % base:
        raise ProtocolError(f"--beta {beta} is not a multiple of the protocol's stripe unit {base}")
    files = generate_files(f, beta, code.k, code.field, seed)
    store = encode_store(files, code)
    return files, store, {m: make(store, m) for m in range(1, f + 1)}


def simulate(code: LinearCode, protocol: str, f: int, beta: int | None, seed: int, m: int, nu_max: int, schedule=None):
    if not 1 <= m <= f:
        raise ProtocolError(f"--target {m} outside [1, {f}]")
    files, store, plans = build_plan_family(code, protocol, f, beta, seed, nu_max, schedule)
    plan = plans[m]
    responses = respond_all(store, plan.queries())
    try:
        recovered = recover(plan, responses)
        recovery_ok = bool(np.array_equal(recovered, files.file(m)))
    except RecoveryError:
        recovery_ok = False
    privacy = audit_privacy(plans)
    verdicts = {"recovery": recovery_ok, "privacy": privacy.passed, "privacy_violations": privacy.violations}
    summary = {
        "protocol": protocol,
        "code": code.name,
        "n": code.n,
        "k": code.k,
        "f": f,
        "beta": plan.beta,
        "target": m,
        "seed": seed,
        "per_node_download": plan.per_node_download(),
        "download": plan.total_download,
        "rate": str(plan.rate),
        **verdicts,
    }
    return summary, transcript(plan, responses, seed, verdicts)


def _simulate_text(s: dict) -> str:
    return "\n".join(
        [
            f"protocol {s['protocol']} on {s['code'] or 'code'} [{s['n']},{s['k']}], f = {s['f']}, beta = {s['beta']}, "
            f"target file {s['target']}, seed {s['seed']}",
            "download per node: " + " ".join(map(str, s["per_node_download"])),
            f"total download D = {s['download']}",
            f"rate = {s['rate']} = {render(Fraction(s['rate']))}",
            f"recovery: {'pass' if s['recovery'] else 'FAIL'}",
            f"privacy audit: {'pass' if s['privacy'] else 'FAIL'}",
            *("  " + v for v in s["privacy_violations"]),
        ]
    )


# -- argument handling -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codedpir", description=__doc__.split("\n\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, help="field order (overrides the code file)")
    common.add_argument("--k", type=int, help="dimension, needed for decimal-column text files")
    common.add_argument("--format", choices=("matrix", "decimal"), help="code file format")
    common.add_argument("--nu-max", type=int, default=8, help="largest nu tried by the rate matrix search")
    common.add_argument("--out", choices=("text", "json", "csv"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="weights, rate matrix, capacity verdict, direct sum")
    p.add_argument("--code", required=True, help="code file or C1..C4")

    p = sub.add_parser("rate-table", parents=[common], help="closed-form rates per code")
    p.add_argument("--code", action="append", default=[], help="code file or C1..C4 (repeatable)")
    p.add_argument("--files", type=parse_files, default=INF, help="number of files f, or inf")

    p = sub.add_parser("simulate", parents=[common], help="plan, respond, recover and audit")
    p.add_argument("--code", required=True, help="code file or C1..C4")
    p.add_argument("--protocol", choices=PROTOCOLS, required=True)
    p.add_argument("--schedule", help="schedule JSON file or a bundled name (table2_c2, c1, c3)")
    p.add_argument("--files", type=parse_files, default=2, help="number of stored files f")
    p.add_argument("--beta", type=int, help="stripes per file (a multiple of the protocol's unit)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=int, default=1, help="wanted file m")
    p.add_argument("--transcript", help="write the replayable JSON transcript here")
    return parser


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "analyze":
            code = load_code(args.code, args.q, args.k, args.format)
            report = analyze(code, args.nu_max)
            _emit(json.dumps(report, indent=2) if args.out == "json" else _analyze_text(report))
            return EXIT_OK

        if args.command == "rate-table":
            reports, errors = [], []
            for ref in args.code:
                try:
                    code = load_code(ref, args.q, args.k, args.format)
                    reports.append(rate_row(code, args.files, args.nu_max))
                except (ProtocolError, RateMatrixNotFound, RateError) as exc:
                    errors.append(f"{ref}: {exc}")
            if args.out == "csv":
                _emit(reports_to_csv(reports).rstrip("\n"))
            elif args.out == "json":
                _emit(reports_to_json(reports))
            else:
                _emit(_table_text(reports))
            for e in errors:
                sys.stderr.write(f"error: {e}\n")
            return EXIT_OK if not errors else EXIT_INFEASIBLE

        code = load_code(args.code, args.q, args.k, args.format)
        if args.files == INF:
            raise ProtocolError("simulation needs a finite number of files")
        schedule = None
        if args.schedule:
            schedule = (
                bundled_schedule(args.schedule)
                if args.schedule in BUNDLED_SCHEDULES and not Path(args.schedule).exists()
                else Schedule.load(args.schedule)
            )
        summary, record = simulate(
            code, args.protocol, int(args.files), args.beta, args.seed, args.target, args.nu_max, schedule
        )
        if args.transcript:
            Path(args.transcript).write_text(record + "\n")
        _emit(json.dumps(summary, indent=2, sort_keys=True) if args.out == "json" else _simulate_text(summary))
        return EXIT_OK if summary["recovery"] and summary["privacy"] else EXIT_VERIFY
    except (ParseError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (ProtocolError, RateMatrixNotFound, RateError, CodeError) as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import fock, fuzz
from .bounds import bittel_bound, sandwich
from .covariance import Covariance
from .embezzlement import construct_plan, number_shift, verify_plan_exact
from .errors import BoundViolation, FermbezzleError, UnknownModel
from .serialization import (
    load_covariance,
    plan_from_json,
    plan_to_json,
    read_json,
    to_json,
    write_json,
)
from .spectra import SpectrumModel, random_covariance

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TOL = 1e-9
EXACT_LIMIT = 9
VACUOUS = "vacuous (trivially satisfied)"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(rows: list[list], header: list[str], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) if not isinstance(x, str) else x for x in row])
    text = buf.getvalue()
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def report(pairs: list[tuple[str, object]]) -> None:
    for key, value in pairs:
        shown = value if isinstance(value, str) else fmt(value)
        print(f"{key}: {shown}")


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


# --- spectrum gen ----------------------------------------------------------


def build_model(model: str, n: int | None, L: int | None, seed: int, boundary: str) -> Covariance:
    if model == "ladder":
        return SpectrumModel("ladder", {"n": n if n is not None else 8}).build()
    if model == "xx":
        return SpectrumModel("xx", {"L": L if L is not None else 2 * (n or 8), "boundary": boundary}).build()
    if model == "random":
        return SpectrumModel("random", {"n": n if n is not None else 4, "seed": seed}).build()
    raise UnknownModel(f"unknown model {model!r}; choose ladder, xx or random")


def cmd_spectrum_gen(args) -> int:
    cov = build_model(args.model, args.n, args.L, args.seed, args.boundary)
    payload = to_json(cov)
    if args.out:
        write_json(args.out, payload)
    else:
        print(json.dumps(payload))
    return EXIT_OK


# --- bounds verify ---------------------------------------------------------


def cmd_bounds_verify(args) -> int:
    cap = fock.mode_cap()
    if args.max_modes > cap:
        raise FermbezzleError(f"--max-modes {args.max_modes} exceeds the Fock cap {cap}")
    if args.max_modes < 1:
        raise FermbezzleError("--max-modes must be at least 1")
    rng = np.random.default_rng(args.seed)
    rows, failed = [], 0
    for _ in range(args.trials):
        n = int(rng.integers(1, args.max_modes + 1))
        a, b = random_covariance(n, rng), random_covariance(n, rng)
        rep = sandwich(a, b)
        exact = fock.trace_distance(fock.gaussian_state(a), fock.gaussian_state(b))
        ok = rep.contains(exact, TOL)
        failed += not ok
        rows.append([rep.eta, rep.lower, exact, rep.upper, ok])
    write_csv(rows, ["eta", "lower", "exact", "upper", "pass"], args.out)
    return EXIT_FAIL if failed else EXIT_OK


# --- embezzle --------------------------------------------------------------


def cmd_embezzle(args) -> int:
    K, F, G = (load_covariance(p) for p in (args.K, args.F, args.G))
    plan = construct_plan(K, F, G, use_window=not args.no_window)
    plan.check_certificates()
    exact = None
    if args.verify:
        if plan.n + plan.d > EXACT_LIMIT:
            raise FermbezzleError(f"--verify needs at most {EXACT_LIMIT} modes, got {plan.n + plan.d}")
        exact = verify_plan_exact(plan)
    if args.out:
        payload = plan_to_json(plan)
        if exact is not None:
            payload["exact_distance"] = exact
        write_json(args.out, payload)
    lines = [
        ("n", plan.n),
        ("d", plan.d),
        ("eps", plan.eps),
        ("delta", plan.delta),
        ("n_eps", plan.n_eps),
        ("active", int(plan.active_indices.size)),
        ("eta", plan.eta_achieved),
        ("certified_bound", plan.certified_bound),
        ("theorem_bound", plan.theorem_bound),
        ("theorem_status", VACUOUS if plan.vacuous else "nonvacuous"),
        ("bittel_bound", bittel_bound(F, G)),
    ]
    if exact is not None:
        lines.append(("exact_distance", exact))
    report(lines)
    if exact is not None and exact > plan.certified_bound + TOL:
        print("error: exact distance exceeds the certificate", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --- sweep -----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    model: str
    n: int
    d: int
    eps_measured: float
    delta: float
    eta: float
    certified_bound: float
    theorem_bound: float
    exact_distance: float | None
    runtime_ms: int
    theorem_status: str

    def ok(self) -> bool:
        good = self.certified_bound <= self.theorem_bound + TOL
        if self.exact_distance is not None:
            good &= self.exact_distance <= self.certified_bound + TOL
        return good


SWEEP_HEADER = [f.name for f in fields(SweepRow)]


def _ancilla(values: list[float] | None, d: int, default: float) -> Covariance:
    if values is None:
        return Covariance.diagonal(np.full(d, default))
    if len(values) == 1:
        return Covariance.diagonal(np.full(d, values[0]))
    if len(values) != d:
        raise FermbezzleError(f"need 1 or {d} ancilla eigenvalues, got {len(values)}")
    return Covariance.diagonal(values)


def sweep_cell(model: str, n: int, d: int, f_vals, g_vals, seed: int, timing: bool,
               no_window: bool = False) -> SweepRow:
    start = time.perf_counter()
    K = build_model(model, n, None, seed, "open")
    F, G = _ancilla(f_vals, d, 1.0), _ancilla(g_vals, d, 0.0)
    plan = construct_plan(K, F, G, use_window=not no_window)
    plan.check_certificates()
    exact = verify_plan_exact(plan) if plan.n + d <= EXACT_LIMIT else None
    elapsed = int(round(1000 * (time.perf_counter() - start))) if timing else 0
    return SweepRow(model, K.dim, d, plan.eps, plan.delta, plan.eta_achieved, plan.certified_bound,
                    plan.theorem_bound, exact, elapsed, VACUOUS if plan.vacuous else "nonvacuous")


def cmd_sweep(args) -> int:
    rows = []
    for d in args.d:
        for n in args.n:
            rows.append(sweep_cell(args.model, n, d, args.f, args.g, args.seed, args.timing, args.no_window))
    write_csv([[getattr(r, h) for h in SWEEP_HEADER] for r in rows], SWEEP_HEADER, args.out)
    return EXIT_OK if all(r.ok() for r in rows) else EXIT_FAIL


# --- lemma-fuzz ------------------------------------------------------------


def cmd_lemma_fuzz(args) -> int:
    if args.iterations < 1:
        raise FermbezzleError("--iterations must be at least 1")
    result = fuzz.run(args.which, args.iterations, args.seed)
    report([
        ("which", result.which),
        ("iterations", result.iterations),
        ("passed", result.iterations - result.failures),
        ("failed", result.failures),
        ("worst_margin", result.worst_margin),
    ])
    return EXIT_OK if result.passed else EXIT_FAIL


# --- number-dist -----------------------------------------------------------


def cmd_number_dist(args) -> int:
    plan = plan_from_json(read_json(args.plan))
    shift = number_shift(plan)
    report([
        ("n", plan.n),
        ("d", plan.d),
        ("total_variation", shift.total_variation),
        ("mean_shift", shift.mean_shift),
        ("total_system_variation", shift.total_system_variation),
    ])
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermbezzle", description="Gaussian fermionic embezzlement toolkit")
    parser.add_argument("--cap-override", type=int, default=None,
                        help="Fock-space mode cap (default 12, or FERMBEZZLE_FOCK_CAP)")
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", help="covariance generators")
    spectrum_sub = spectrum.add_subparsers(dest="action", required=True)
    gen = spectrum_sub.add_parser("gen", help="write a covariance as JSON")
    gen.add_argument("--model", required=True)
    gen.add_argument("--n", type=int)
    gen.add_argument("--L", type=int)
    gen.add_argument("--boundary", choices=("open", "ring"), default="open")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_spectrum_gen)

    bounds = sub.add_parser("bounds", help="trace-distance bound checks")
    bounds_sub = bounds.add_subparsers(dest="action", required=True)
    verify = bounds_sub.add_parser("verify", help="check the eta sandwich against the Fock oracle")
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--max-modes", type=int, default=6)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out")
    verify.set_defaults(func=cmd_bounds_verify)

    emb = sub.add_parser("embezzle", help="construct an embezzlement plan")
    emb.add_argument("--K", required=True)
    emb.add_argument("--F", required=True)
    emb.add_argument("--G", required=True)
    emb.add_argument("--out")
    emb.add_argument("--verify", action="store_true")
    emb.add_argument("--no-window", action="store_true", help="match on the whole selected subspace")
    emb.set_defaults(func=cmd_embezzle)

    sweep = sub.add_parser("sweep", help="protocol certificates over a grid of sizes")
    sweep.add_argument("--model", default="ladder", choices=("ladder", "xx", "random"))
    sweep.add_argument("--n", type=parse_int_list, required=True)
    sweep.add_argument("--d", type=parse_int_list, default=[1])
    sweep.add_argument("--f", type=parse_float_list, default=None, help="ancilla eigenvalues before (default 1)")
    sweep.add_argument("--g", type=parse_float_list, default=None, help="ancilla eigenvalues after (default 0)")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--timing", action="store_true", help="fill runtime_ms (otherwise 0)")
    sweep.add_argument("--no-window", action="store_true")
    sweep.add_argument("--out")
    sweep.set_defaults(func=cmd_sweep)

    lf = sub.add_parser("lemma-fuzz", help="randomized checks of the lemmas")
    lf.add_argument("--which", required=True, choices=fuzz.FUZZERS)
    lf.add_argument("--iterations", type=int, default=10000)
    lf.add_argument("--seed", type=int, default=0)
    lf.set_defaults(func=cmd_lemma_fuzz)

    nd = sub.add_parser("number-dist", help="fermion-number statistics of a plan")
    nd.add_argument("--plan", required=True)
    nd.set_defaults(func=cmd_number_dist)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cap_override is not None:
        os.environ["FERMBEZZLE_FOCK_CAP"] = str(args.cap_override)
    try:
        return args.func(args)
    except BoundViolation as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (FermbezzleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
